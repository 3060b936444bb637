"""Certified root clusters: accuracy against independent interval oracles,
exact multiplicities, Mahler gap bound, conjugate pairing."""

import random

import pytest
from gmpy2 import mpq, mpz

from jordanforge import (
    IntPolynomial,
    approx_roots_with_mults,
    mahler_mingap_bound,
    min_working_bits,
    root_bound,
)

from conftest import int_poly_from_root_plan, pow2
from oracles import newton_refined_enclosures, sqrt_interval


def run_roots(p, b=64):
    """Clusters at the requested accuracy, raising b to the admissible minimum."""
    b_eff = max(b, min_working_bits(p))
    return approx_roots_with_mults(p, b_eff), b_eff


def cluster_rationals(clusters):
    return [(c.value.as_rational_pair(), c.multiplicity) for c in clusters]


# -- bounds ----------------------------------------------------------------------


def test_root_bound_examples():
    assert root_bound(IntPolynomial([-2, 0, 1])) >= 2  # covers sqrt 2
    assert root_bound(IntPolynomial([0, 0, 0, 1])) >= 0
    w = IntPolynomial.from_roots([1, 2, 3, 4, 5])
    assert root_bound(w) >= 5


def test_mahler_bound_is_valid_lower_bound():
    # roots 1 and 2: true gap 1
    assert mahler_mingap_bound(IntPolynomial([2, -3, 1])) <= 1
    # single distinct root: bound positive but vacuous
    assert mahler_mingap_bound(IntPolynomial([0, 0, 1])) > 0


def test_mahler_bound_vs_constructed_tight_gap():
    """(x-1)(x-1-2^-k) scaled integral: exact gap 2^-k must beat the bound."""
    for k in (3, 8, 16):
        s = mpz(1) << k
        # roots 1 and (s+1)/s; integral form: (x-1)(s x - (s+1))
        p = IntPolynomial([s + 1, -(2 * s + 1), s])
        gap = pow2(-k)
        assert mahler_mingap_bound(p) <= gap


def test_min_working_bits_scales_with_instance():
    easy = IntPolynomial([-2, 0, 1])
    assert min_working_bits(easy) >= 1
    wilk = IntPolynomial.from_roots(list(range(1, 9)))
    assert min_working_bits(wilk) > min_working_bits(easy)


# -- exact cases -------------------------------------------------------------------


def test_rational_double_root_exact():
    clusters, _ = run_roots(IntPolynomial([1, -2, 1]))  # (x-1)^2
    assert len(clusters) == 1
    (val, mult), = cluster_rationals(clusters)
    assert val == (mpq(1), mpq(0))
    assert mult == 2


def test_pure_power_factored_exactly():
    clusters, _ = run_roots(IntPolynomial([0, 0, 0, 1]))  # x^3
    assert cluster_rationals(clusters) == [((mpq(0), mpq(0)), 3)]


def test_gaussian_unit_pair_exact():
    clusters, _ = run_roots(IntPolynomial([1, 0, 1]))  # x^2 + 1
    vals = sorted(cluster_rationals(clusters), key=lambda t: t[0][1])
    assert vals == [((mpq(0), mpq(-1)), 1), ((mpq(0), mpq(1)), 1)]


def test_integer_roots_with_multiplicity():
    p = IntPolynomial.from_roots([3, 3, 3, -1])
    clusters, _ = run_roots(p)
    got = {tuple(v): m for v, m in cluster_rationals(clusters)}
    assert got == {(mpq(3), mpq(0)): 3, (mpq(-1), mpq(0)): 1}


# -- accuracy vs oracle -------------------------------------------------------------


def test_sqrt2_against_integer_sqrt_oracle():
    """Oracle first: isqrt(2 * 4^80) brackets sqrt 2 independently."""
    oracle = sqrt_interval(mpq(2), 80)
    clusters, b_eff = run_roots(IntPolynomial([-2, 0, 1]), b=64)
    tol = pow2(-b_eff)
    by_sign = {}
    for (re, im), mult in cluster_rationals(clusters):
        assert im == 0
        assert mult == 1
        by_sign[1 if re > 0 else -1] = re
    assert oracle.lo - tol <= by_sign[1] <= oracle.hi + tol
    assert -oracle.hi - tol <= by_sign[-1] <= -oracle.lo + tol


def test_cube_root_of_two_against_iroot_oracle():
    """x^3 - 2: oracle via integer cube root of 2 * 8^80."""
    import gmpy2

    k = 80
    r, _exact = gmpy2.iroot(mpz(2) << (3 * k), 3)
    lo = mpq(r, mpz(1) << k)
    hi = mpq(r + 1, mpz(1) << k)
    assert lo**3 <= 2 <= hi**3
    clusters, b_eff = run_roots(IntPolynomial([-2, 0, 0, 1]), b=64)
    tol = pow2(-b_eff)
    real = [v for v, m in cluster_rationals(clusters) if v[1] == 0]
    assert len(real) == 1
    assert lo - tol <= real[0][0] <= hi + tol
    # the complex pair is conjugate bit-for-bit
    pair = [c for c in clusters if c.value.im_num != 0]
    assert len(pair) == 2
    a, b = pair
    assert a.value.re_num == b.value.re_num and a.value.im_num == -b.value.im_num


def test_constructed_plans_against_interval_newton():
    rng = random.Random(103)
    for trial in range(12):
        p, plan = int_poly_from_root_plan(rng)
        clusters, b_eff = run_roots(p, b=64)
        assert sum(m for _, m in cluster_rationals(clusters)) == p.degree
        oracle = newton_refined_enclosures(p, plan, width_bits=80)
        tol = pow2(-b_eff) * 2
        matched = set()
        for (re, im), mult in cluster_rationals(clusters):
            hit = None
            for rid, (ore, oim, omult) in oracle.items():
                if rid in matched:
                    continue
                if ore.lo - tol <= re <= ore.hi + tol and oim.lo - tol <= im <= oim.hi + tol:
                    hit = rid
                    assert mult == omult, (rid, mult, omult)
                    break
            assert hit is not None, f"unmatched cluster {float(re)}+{float(im)}i"
            matched.add(hit)
        assert len(matched) == len(oracle)


def test_mingap_validated_by_certified_clusters():
    rng = random.Random(107)
    for _ in range(8):
        p, _plan = int_poly_from_root_plan(rng)
        clusters, b_eff = run_roots(p, b=64)
        bound = mahler_mingap_bound(p)
        err = pow2(-b_eff)
        vals = [c.value.as_rational_pair() for c in clusters]
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                dr = vals[i][0] - vals[j][0]
                di = vals[i][1] - vals[j][1]
                dist2 = dr * dr + di * di
                # |true gap| >= |computed gap| - 2 err; compare squares safely
                lower = sqrt_interval(dist2, 96).lo - 2 * err
                assert lower >= bound, (float(lower), float(bound))


# -- preconditions -----------------------------------------------------------------


def test_insufficient_bits_rejected():
    wilk = IntPolynomial.from_roots(list(range(1, 9)))
    need = min_working_bits(wilk)
    with pytest.raises(ValueError):
        approx_roots_with_mults(wilk, need - 1)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        approx_roots_with_mults(IntPolynomial([]), 64)


def test_constant_rejected():
    with pytest.raises(ValueError):
        approx_roots_with_mults(IntPolynomial([7]), 64)


def test_determinism_same_bits():
    p = IntPolynomial.from_roots([1, 2]) * IntPolynomial([-2, 0, 1])
    a, _ = run_roots(p, 64)
    b, _ = run_roots(p, 64)
    assert [(c.value.re_num, c.value.im_num, c.value.exp, c.multiplicity) for c in a] == [
        (c.value.re_num, c.value.im_num, c.value.exp, c.multiplicity) for c in b
    ]
