"""Spectral factorization P = Q*Q of monic PSD Hermitian matrix polynomials."""

import random

import pytest
from gmpy2 import mpq, mpz

from jordanforge import (
    MatrixPolynomial,
    NotPsdCertificate,
    RatMatrix,
    SpectralFactor,
    evaluate_and_check_psd_sample,
    factor_residual,
    max_norm,
    nonmonic_spectral_factor,
    spectral_factor,
)
from jordanforge.specfact import block_companion, build_half, working_precision_pp

from conftest import monic_uhp_factor, pow2, psd_from_factor, unimodular_int_matrix


def scalar_poly(coeffs):
    return MatrixPolynomial.from_scalars(coeffs)


def q_max_norm(coeff_list):
    return max(max_norm(c) for c in coeff_list)


# -- building blocks ---------------------------------------------------------------


def test_block_companion_shapes():
    # x^2 (scalar): nilpotent 2x2
    c = block_companion(scalar_poly([0, 0]))
    assert [[int(c.entry(i, j).re) for j in range(2)] for i in range(2)] == [[0, 1], [0, 0]]
    # x^2 + 1 (scalar)
    c = block_companion(scalar_poly([1, 0]))
    assert [[int(c.entry(i, j).re) for j in range(2)] for i in range(2)] == [[0, 1], [-1, 0]]


def test_block_companion_2x2_layout():
    p0 = RatMatrix.from_rows([[2, 0], [0, 3]])
    p1 = RatMatrix.from_rows([[0, 1], [1, 0]])
    p = MatrixPolynomial([p0, p1])
    c = block_companion(p)
    assert (c.rows, c.cols) == (4, 4)
    # top-right identity block, bottom row of negated coefficients
    assert c.entry(0, 2).re == 1 and c.entry(1, 3).re == 1
    assert c.entry(2, 0).re == -2 and c.entry(3, 1).re == -3
    assert c.entry(2, 3).re == -1 and c.entry(3, 2).re == -1


def test_working_precision_pp_formula():
    # c * a * (dn)^3 * ceil(log2(dn + 1)) + b
    assert working_precision_pp(1, 1, 2, 64, 8) == 8 * 1 * 8 * 2 + 64


def test_build_half_splits_even_blocks():
    from jordanforge.jnf import JordanBlockSpec
    from jordanforge.linalg import DyadicComplexMatrix
    from jordanforge.scalars import DyadicComplex

    zero = DyadicComplex.zero(4)
    blocks = [JordanBlockSpec(zero, 2), JordanBlockSpec(zero, 4)]
    cols = DyadicComplexMatrix.identity(6, 4)
    halved, half_cols = build_half(blocks, cols)
    assert [b.size for b in halved] == [1, 2]
    assert half_cols.cols == 3
    # columns 1, then 3 and 4 of the respective groups (0-indexed: 0; 2, 3)
    assert half_cols.entry(0, 0).re_num == 1 << 4
    assert half_cols.entry(2, 1).re_num == 1 << 4
    assert half_cols.entry(3, 2).re_num == 1 << 4


def test_build_half_rejects_odd():
    from jordanforge.jnf import JordanBlockSpec
    from jordanforge.linalg import DyadicComplexMatrix
    from jordanforge.scalars import DyadicComplex

    blocks = [JordanBlockSpec(DyadicComplex.zero(4), 3)]
    with pytest.raises(ValueError):
        build_half(blocks, DyadicComplexMatrix.identity(3, 4))


# -- degenerate exact factorizations --------------------------------------------------


def test_scalar_x_squared():
    p = scalar_poly([0, 0])
    out = spectral_factor(p, 64)
    assert isinstance(out, SpectralFactor)
    assert out.coeffs[0].entry(0, 0).re_num == 0
    assert out.coeffs[0].entry(0, 0).im_num == 0
    assert factor_residual(p, out) == 0
    # documented split: one size-2 zero block halved to size 1
    inner = out._inner
    assert [b.size for b in inner.blocks] == [2]


def test_scalar_x2_plus_1():
    p = scalar_poly([1, 0])
    out = spectral_factor(p, 64)
    # latent root i is kept, so Q = x - i exactly
    assert out.coeffs[0].entry(0, 0).as_rational_pair() == (mpq(0), mpq(-1))
    assert factor_residual(p, out) == 0


def test_scalar_double_real_root():
    p = scalar_poly([1, -2])  # (x-1)^2
    out = spectral_factor(p, 64)
    q0 = out.coeffs[0].entry(0, 0)
    r, i = q0.as_rational_pair()
    assert (r, i) == (mpq(-1), mpq(0))
    assert factor_residual(p, out) == 0


def test_scalar_two_double_roots():
    # (x-1)^2 (x+1)^2 = x^4 - 2x^2 + 1
    p = scalar_poly([1, 0, -2, 0])
    out = spectral_factor(p, 64)
    assert factor_residual(p, out) == 0
    # Q = (x-1)(x+1) = x^2 - 1
    assert out.coeffs[0].entry(0, 0).as_rational_pair() == (mpq(-1), mpq(0))
    assert out.coeffs[1].entry(0, 0).as_rational_pair() == (mpq(0), mpq(0))
    inner = out._inner
    assert sorted(b.size for b in inner.blocks) == [2, 2]


def test_x_squared_identity_2x2():
    z = RatMatrix.zeros(2, 2)
    p = MatrixPolynomial([z, z])
    out = spectral_factor(p, 64)
    assert factor_residual(p, out) == 0
    assert sorted(b.size for b in out._inner.blocks) == [2, 2]
    for c in out.coeffs:
        assert c.to_rat().is_zero()


# -- certificates ----------------------------------------------------------------------


def test_x2_minus_1_not_psd():
    out = spectral_factor(scalar_poly([-1, 0]), 64)
    assert isinstance(out, NotPsdCertificate)
    assert out.reason == "odd-real-block"
    assert out.block_size == 1
    re, im = out.eigenvalue_rational()
    assert im == 0 and re in (mpq(1), mpq(-1))


def test_certificate_matches_indefiniteness_point():
    out = spectral_factor(scalar_poly([-1, 0]), 64)
    assert isinstance(out, NotPsdCertificate)
    re, _ = out.eigenvalue_rational()
    # P is negative just inside the root at +-1
    x = re - mpq(1, 4) if re > 0 else re + mpq(1, 4)
    _, has_negative = evaluate_and_check_psd_sample(scalar_poly([-1, 0]), x)
    assert has_negative


def test_psd_sampler():
    val, neg = evaluate_and_check_psd_sample(scalar_poly([-1, 0]), mpq(0))
    assert neg and val.entry(0, 0).re == -1
    _, neg = evaluate_and_check_psd_sample(scalar_poly([1, 0]), mpq(17, 3))
    assert not neg
    # 2x2 indefinite constant term
    p0 = RatMatrix.from_rows([[1, 0], [0, -1]])
    p = MatrixPolynomial([p0, RatMatrix.zeros(2, 2)])
    _, neg = evaluate_and_check_psd_sample(p, mpq(0))
    assert neg


def test_random_psd_samples_nonnegative():
    rng = random.Random(131)
    for _ in range(6):
        n = rng.randint(1, 3)
        q = monic_uhp_factor(rng, n, 1)
        p = psd_from_factor(q)
        x = mpq(rng.randint(-8, 8), rng.randint(1, 5))
        _, neg = evaluate_and_check_psd_sample(p, x)
        assert not neg


# -- round trips -----------------------------------------------------------------------


def test_round_trip_recovers_constructed_factor():
    """Uniqueness makes the constructed Q the oracle; d = 1 and 2, n up to 3."""
    rng = random.Random(137)
    done = 0
    while done < 6:
        n = rng.randint(1, 3)
        d = rng.randint(1, 2)
        q_full = monic_uhp_factor(rng, n, d)
        p = psd_from_factor(q_full)
        out = spectral_factor(p, 64)
        assert isinstance(out, SpectralFactor), "constructed PSD instance must factor"
        qn = q_max_norm(q_full)
        for k in range(d):
            err = max_norm(out.coeffs[k].to_rat() + q_full[k].scale(-1))
            assert err <= pow2(-60) * max(qn, 1)
        resid = factor_residual(p, out)
        assert resid <= pow2(-56) * max(p.max_norm(), 1)
        done += 1


def test_diagnostics_keys_and_kappa():
    p = scalar_poly([1, 0])
    out = spectral_factor(p, 64)
    d = out.diagnostics
    assert set(d) == {"factor_residual", "kappa_Vge_enclosure"}
    lo, hi = d["kappa_Vge_enclosure"]
    assert 1 <= lo <= hi


# -- non-monic reduction -----------------------------------------------------------------


def test_nonmonic_identity_v_matches_monic():
    p = scalar_poly([1, 0])
    v = RatMatrix.identity(1)
    out1 = nonmonic_spectral_factor(p.all_coeffs(), v, 64)
    out2 = spectral_factor(p, 64)
    assert out1.coeffs[0].entry(0, 0).as_rational_pair() == out2.coeffs[0].entry(0, 0).as_rational_pair()
    # V = I means the recomposed factor is still monic-with-exact-leading I
    assert out1.leading is None or out1.leading == RatMatrix.identity(1)


def test_nonmonic_scalar_4x2_plus_4():
    """P = 4x^2 + 4 = (2x - 2i)* (2x - 2i) with V = 2."""
    four = RatMatrix.from_rows([[4]])
    v = RatMatrix.from_rows([[2]])
    coeffs = [four, RatMatrix.zeros(1, 1), four]  # P0 + P1 x + P2 x^2
    out = nonmonic_spectral_factor(coeffs, v, 64)
    assert out.leading is not None and out.leading.entry(0, 0).re == 2
    q0 = out.coeffs[0].entry(0, 0).as_rational_pair()
    assert q0 == (mpq(0), mpq(-2))
    # exact recomposition check: conj(Q) * Q = P by convolution
    p_in = MatrixPolynomial([four, RatMatrix.zeros(1, 1)], leading=four)
    assert factor_residual(p_in, out) == 0


def test_nonmonic_rejects_wrong_v():
    four = RatMatrix.from_rows([[4]])
    bad_v = RatMatrix.from_rows([[3]])  # 3*3 != 4
    coeffs = [four, RatMatrix.zeros(1, 1), four]
    with pytest.raises(ValueError):
        nonmonic_spectral_factor(coeffs, bad_v, 64)


def test_nonmonic_random_conjugated_instances():
    rng = random.Random(139)
    for _ in range(4):
        n = rng.randint(1, 2)
        q_full = monic_uhp_factor(rng, n, 1)
        p_monic = psd_from_factor(q_full)
        v = unimodular_int_matrix(rng, n, shears=3)
        v_star = v.conj_transpose()
        coeffs = [v @ c @ v_star for c in p_monic.all_coeffs()]
        out = nonmonic_spectral_factor(coeffs, v, 64)
        p_in = MatrixPolynomial(coeffs[:-1], leading=coeffs[-1])
        resid = factor_residual(p_in, out)
        assert resid <= pow2(-40) * max(p_in.max_norm(), 1)


# -- input validation -----------------------------------------------------------------


def test_rejects_non_hermitian():
    p0 = RatMatrix.from_rows([[(mpq(0), mpq(1))]])  # i is not Hermitian as 1x1
    with pytest.raises(ValueError):
        spectral_factor(MatrixPolynomial([p0, RatMatrix.zeros(1, 1)]), 64)


def test_rejects_odd_degree():
    with pytest.raises(ValueError):
        spectral_factor(MatrixPolynomial.from_scalars([1]), 64)  # degree 1 cannot be Q*Q


def test_matrix_polynomial_evaluate():
    p = scalar_poly([2, -3])  # x^2 - 3x + 2
    v = p.evaluate(mpq(1))
    assert v.entry(0, 0).re == 0
    v = p.evaluate(mpq(5, 2))
    assert v.entry(0, 0).re == mpq(25, 4) - mpq(15, 2) + 2
