"""Exact scalar layer: dyadics, complex dyadics, rounding, enclosures."""

import random
from fractions import Fraction

import pytest
from gmpy2 import isqrt, mpq, mpz

from jordanforge.scalars import (
    Dyadic,
    DyadicComplex,
    bit_length,
    ceil_log2,
    floor_log2,
    isqrt_ceil,
    isqrt_floor,
    round_c,
    round_half_even,
    sqrt_enclosure,
)


def test_round_identity_when_representable():
    x = Dyadic(5, 3)  # 5/8
    assert round_c(x, 3).as_rational() == mpq(5, 8)
    assert round_c(x, 7).as_rational() == mpq(5, 8)


def test_round_one_third():
    # nearest multiple of 1/2 to 1/3 is 1/2 (distance 1/6)
    assert round_c(mpq(1, 3), 1).as_rational() == mpq(1, 2)
    # nearest multiple of 1/4 is 1/4 (distance 1/12)
    assert round_c(mpq(1, 3), 2).as_rational() == mpq(1, 4)


def test_round_error_bound_random():
    rng = random.Random(101)
    for _ in range(300):
        num = rng.randint(-10**6, 10**6)
        den = rng.randint(1, 10**6)
        c = rng.randint(0, 40)
        x = mpq(num, den)
        r = round_c(x, c)
        assert r.exp == c
        assert abs(r.as_rational() - x) <= mpq(1, mpz(1) << (c + 1))


def test_round_half_even_ties():
    assert round_half_even(1, 2) == 0
    assert round_half_even(3, 2) == 2
    assert round_half_even(-1, 2) == 0
    assert round_half_even(5, 2) == 2
    assert round_half_even(7, 2) == 4


def test_dyadic_arithmetic_exact():
    a = Dyadic(3, 1)  # 3/2
    b = Dyadic(1, 2)  # 1/4
    assert (a + b).as_rational() == mpq(7, 4)
    assert (a * b).as_rational() == mpq(3, 8)
    assert (a - b).as_rational() == mpq(5, 4)


def test_complex_identity_and_involution():
    rng = random.Random(7)
    for _ in range(50):
        z = DyadicComplex(rng.randint(-99, 99), rng.randint(-99, 99), rng.randint(0, 12))
        one = DyadicComplex.one(z.exp)
        assert one * z == z
        assert z.conj().conj() == z


def test_imaginary_unit_squares_to_minus_one():
    i = DyadicComplex(0, 1, 0)
    sq = i * i
    assert sq == DyadicComplex(-1, 0, 0)


def test_complex_multiplication_matches_rational_model():
    rng = random.Random(13)
    for _ in range(100):
        z = DyadicComplex(rng.randint(-50, 50), rng.randint(-50, 50), rng.randint(0, 6))
        w = DyadicComplex(rng.randint(-50, 50), rng.randint(-50, 50), rng.randint(0, 6))
        zr, zi = z.as_rational_pair()
        wr, wi = w.as_rational_pair()
        pr, pi = (z * w).as_rational_pair()
        assert pr == zr * wr - zi * wi
        assert pi == zr * wi + zi * wr


def test_abs_squared():
    z = DyadicComplex(3, 4, 1)  # (3 + 4i)/2
    assert z.abs_squared() == mpq(25, 4)


def test_bit_length_values():
    assert bit_length(0) == 0
    assert bit_length(mpq(0)) == (0, 1)
    assert bit_length(255) == 8
    assert bit_length(256) == 9
    assert bit_length(mpq(1, 1024)) == (1, 11)
    assert bit_length(Fraction(-7, 8)) == (3, 4)


@pytest.mark.parametrize(
    "v,lg_floor,lg_ceil",
    [
        (mpq(1), 0, 0),
        (mpq(2), 1, 1),
        (mpq(3), 1, 2),
        (mpq(1, 2), -1, -1),
        (mpq(1, 3), -2, -1),
        (mpq(7, 2), 1, 2),
    ],
)
def test_exact_log2(v, lg_floor, lg_ceil):
    assert floor_log2(v) == lg_floor
    assert ceil_log2(v) == lg_ceil


def test_isqrt_floor_ceil():
    assert isqrt_floor(0) == 0
    assert isqrt_floor(15) == 3
    assert isqrt_floor(16) == 4
    assert isqrt_ceil(16) == 4
    assert isqrt_ceil(17) == 5


def test_sqrt_enclosure_against_isqrt_oracle():
    """Oracle first: floor(sqrt(v * 4^bits)) brackets sqrt(v) by definition."""
    rng = random.Random(23)
    for _ in range(60):
        v = mpq(rng.randint(0, 10**8), rng.randint(1, 10**4))
        bits = rng.randint(4, 128)
        # independent oracle bracket
        s = isqrt(v.numerator * v.denominator * (mpz(1) << (2 * bits)))
        oracle_lo = mpq(s, v.denominator * (mpz(1) << bits))
        oracle_hi = mpq(s + 1, v.denominator * (mpz(1) << bits))
        assert oracle_lo * oracle_lo <= v <= oracle_hi * oracle_hi

        lo, hi = sqrt_enclosure(v, bits)
        assert lo <= hi
        assert lo * lo <= v <= hi * hi
        # the enclosure must overlap the oracle bracket and be comparably tight
        assert lo <= oracle_hi and oracle_lo <= hi
        assert hi - lo <= mpq(1, mpz(1) << (bits - 2))


def test_sqrt_enclosure_exact_squares():
    for k in [0, 1, 4, 9, 100, 1 << 40]:
        lo, hi = sqrt_enclosure(mpq(k), 32)
        r = isqrt(mpz(k))
        assert lo <= r <= hi


def test_dyadic_json_round_trip():
    rng = random.Random(31)
    for _ in range(40):
        z = DyadicComplex(rng.randint(-2**70, 2**70), rng.randint(-2**70, 2**70), rng.randint(0, 90))
        d = z.to_json_dict()
        assert set(d) == {"re_num", "im_num", "exp"}
        back = DyadicComplex.from_json_dict(d)
        assert back == z and back.exp == z.exp


def test_normalized_minimal_exponent():
    z = DyadicComplex(4, 8, 5)
    nz = z.normalized()
    assert nz == z
    assert nz.exp == 3  # gcd of trailing zeros is 2 bits
    assert DyadicComplex(0, 0, 77).normalized().exp == 0
    assert Dyadic(mpz(1) << 192, 192).normalized().to_json_dict() == {"num": "1", "exp": 0}


def test_shift_and_round_to():
    z = DyadicComplex(5, -3, 2)
    up = z.shift_to(10)
    assert up == z and up.exp == 10
    down = up.round_to(2)
    assert down == z
    with pytest.raises(ValueError):
        z.shift_to(1)  # shifting down would lose bits; that's round_to's job
