"""Integer polynomial layer: exact construction, evaluation, square-free parts."""

import random

import pytest
from gmpy2 import mpq, mpz

from jordanforge.polynomials import IntPolynomial, square_free_decomposition
from jordanforge.scalars import DyadicComplex


def test_basic_accessors():
    p = IntPolynomial([2, -3, 1])  # x^2 - 3x + 2
    assert p.degree == 2
    assert p.is_monic()
    assert p.leading() == 1
    assert p(1) == 0 and p(2) == 0 and p(0) == 2


def test_bit_length_a():
    assert IntPolynomial([255, 1]).bit_length_a() == 8
    assert IntPolynomial([0, 0, 1]).bit_length_a() == 1


def test_from_roots_and_eval():
    p = IntPolynomial.from_roots([1, 2, 3])
    assert p.coeffs == (mpz(-6), mpz(11), mpz(-6), mpz(1))
    for r in (1, 2, 3):
        assert p(r) == 0
    assert p(4) == 6


def test_multiplication_degree_and_content():
    rng = random.Random(5)
    for _ in range(50):
        a = IntPolynomial([rng.randint(-9, 9) for _ in range(rng.randint(1, 5))] + [1])
        b = IntPolynomial([rng.randint(-9, 9) for _ in range(rng.randint(1, 5))] + [1])
        c = a * b
        assert c.degree == a.degree + b.degree
        x = mpq(rng.randint(-5, 5), rng.randint(1, 5))
        assert c(x) == a(x) * b(x)


def test_divexact():
    a = IntPolynomial([2, -3, 1])
    b = IntPolynomial([-1, 1])
    assert a.divexact(b).coeffs == (mpz(-2), mpz(1))
    with pytest.raises(ValueError):
        a.divexact(IntPolynomial([1, 1]))  # x + 1 does not divide it


def test_derivative():
    p = IntPolynomial([5, 0, -4, 2])  # 2x^3 - 4x^2 + 5
    assert p.derivative().coeffs == (mpz(0), mpz(-8), mpz(6))


def test_square_free_decomposition_structure():
    """(x-1)^2 (x+2) splits into multiplicity classes exactly."""
    p = IntPolynomial.from_roots([1, 1, -2])
    parts = square_free_decomposition(p)
    as_dict = {m: f.coeffs for f, m in parts}
    assert as_dict[1] == (mpz(2), mpz(1))  # x + 2
    assert as_dict[2] == (mpz(-1), mpz(1))  # x - 1


def test_square_free_decomposition_random_reassembly():
    rng = random.Random(17)
    for _ in range(40):
        roots = [rng.randint(-4, 4) for _ in range(rng.randint(1, 5))]
        p = IntPolynomial.from_roots(roots)
        parts = square_free_decomposition(p)
        rebuilt = IntPolynomial([1])
        for factor, mult in parts:
            for _ in range(mult):
                rebuilt = rebuilt * factor
        assert rebuilt.coeffs == p.coeffs
        # multiplicity classes are square-free and pairwise coprime: the
        # total count of roots with multiplicity equals the degree
        assert sum(m * f.degree for f, m in parts) == p.degree


def test_square_free_handles_irreducible_quadratics():
    p = IntPolynomial([1, 0, 1]) * IntPolynomial([1, 0, 1]) * IntPolynomial([-2, 0, 1])
    parts = {m: f.coeffs for f, m in square_free_decomposition(p)}
    assert parts[1] == (mpz(-2), mpz(0), mpz(1))
    assert parts[2] == (mpz(1), mpz(0), mpz(1))


def test_eval_dyadic_complex_is_exact_horner():
    """Evaluation at a dyadic point must agree with the rational model exactly."""
    rng = random.Random(29)
    for _ in range(60):
        p = IntPolynomial([rng.randint(-20, 20) for _ in range(rng.randint(1, 6))] + [1])
        z = DyadicComplex(rng.randint(-40, 40), rng.randint(-40, 40), rng.randint(0, 8))
        val = p.eval_dyadic_complex(z)
        zr, zi = z.as_rational_pair()
        # rational oracle
        er, ei = mpq(0), mpq(0)
        for c in reversed(p.coeffs):
            er, ei = er * zr - ei * zi + mpq(c), er * zi + ei * zr
        vr, vi = val.as_rational_pair()
        assert (vr, vi) == (er, ei)


def test_zero_and_constant_edge_cases():
    c = IntPolynomial([7])
    assert c.degree == 0
    assert c(123) == 7
    z = IntPolynomial([])
    assert z.is_zero() and z.degree == -1
    assert IntPolynomial([0, 0]).is_zero()  # trailing zeros stripped
