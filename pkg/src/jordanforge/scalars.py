"""Exact scalar arithmetic: big integers, rationals, dyadics, complex dyadics.

Integers are arbitrary-precision (`gmpy2.mpz`, interchangeable with Python
``int``); rationals are `gmpy2.mpq`, which keeps ``den > 0`` and
``gcd(num, den) == 1`` canonically.  On top of those this module defines
dyadic rationals ``num / 2**exp`` with an *explicit* exponent (the exponent is
part of the representation and is never silently reduced), complex dyadics
whose real and imaginary parts share one exponent, and the directed rounding
primitive ``round_c`` (nearest multiple of ``2**-c``, ties to the even
numerator) with error at most ``2**-(c+1)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpq, mpz

__all__ = [
    "BigInteger",
    "Rational",
    "Dyadic",
    "DyadicComplex",
    "RationalComplex",
    "bit_length",
    "round_c",
    "round_half_even",
    "sqrt_enclosure",
    "isqrt_floor",
    "isqrt_ceil",
    "floor_log2",
    "ceil_log2",
]

# Public aliases: the arbitrary-precision integer / canonical rational types
# this package computes with.  ``int`` values are accepted everywhere.
BigInteger = type(mpz(0))
Rational = type(mpq(0))

RationalLike = Union[int, "BigInteger", Fraction, "Rational"]

_ZERO = mpz(0)
_ONE = mpz(1)


def bit_length(x) -> "int | tuple[int, int]":
    """Bit length of the magnitude; 0 has bit length 0.

    Rationals (and dyadics) report ``(numerator_bits, denominator_bits)``
    of the canonical fraction, e.g. ``bit_length(mpq(1, 1024)) == (1, 11)``
    and ``bit_length(0) == 0`` for integers, ``(0, 1)`` for rational zero.
    """
    if isinstance(x, (int, type(_ZERO))):
        return abs(mpz(x)).bit_length()
    if isinstance(x, Dyadic):
        q = x.as_rational()
        return (abs(q.numerator).bit_length(), q.denominator.bit_length())
    if isinstance(x, Fraction):
        x = mpq(x.numerator, x.denominator)
    if isinstance(x, type(mpq(0))):
        return (abs(x.numerator).bit_length(), x.denominator.bit_length())
    raise TypeError(f"bit_length: unsupported type {type(x)!r}")


def round_half_even(num, den):
    """Nearest integer to num/den (den > 0), ties to the even integer."""
    num = mpz(num)
    den = mpz(den)
    q, r = divmod(num, den)  # floor division: 0 <= r < den
    twice = r << 1
    if twice > den or (twice == den and (q & 1)):
        q += 1
    return q


def _to_mpq(x: RationalLike):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, Dyadic):
        return x.as_rational()
    return mpq(x)


def trailing_zero_bits(x) -> int:
    """Number of trailing zero bits of a nonzero integer."""
    return gmpy2.bit_scan1(mpz(x))


class Dyadic:
    """Exact dyadic rational ``num / 2**exp`` with explicit exponent.

    The exponent is nonnegative and preserved by arithmetic: products add
    exponents, sums align to the larger exponent.  No operation introduces
    rounding; ``round_to`` is the only lossy step, and it is explicit.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num, exp: int = 0):
        if exp < 0:
            raise ValueError("dyadic exponent must be nonnegative")
        self.num = mpz(num)
        self.exp = int(exp)

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, exp: int = 0) -> "Dyadic":
        return cls(0, exp)

    @classmethod
    def one(cls, exp: int = 0) -> "Dyadic":
        return cls(_ONE << exp, exp)

    @classmethod
    def from_rational(cls, x: RationalLike, exp: int) -> "Dyadic":
        """Round x to the nearest multiple of 2**-exp (ties to even)."""
        q = _to_mpq(x)
        return cls(round_half_even(q.numerator << exp, q.denominator), exp)

    # -- value access ----------------------------------------------------
    def as_rational(self):
        return mpq(self.num, _ONE << self.exp)

    def as_fraction(self) -> Fraction:
        return Fraction(int(self.num), 1 << self.exp)

    def __float__(self) -> float:
        return float(self.as_rational())

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num == 0

    # -- arithmetic (exact) ----------------------------------------------
    def _aligned(self, other: "Dyadic") -> "tuple[int, int, int]":
        e = max(self.exp, other.exp)
        return (self.num << (e - self.exp), other.num << (e - other.exp), e)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __mul__(self, other) -> "Dyadic":
        if isinstance(other, Dyadic):
            return Dyadic(self.num * other.num, self.exp + other.exp)
        return Dyadic(self.num * mpz(other), self.exp)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.num), self.exp)

    def shift_to(self, exp: int) -> "Dyadic":
        """Exactly re-express at a larger (or equal) exponent."""
        if exp < self.exp:
            raise ValueError("shift_to cannot reduce the exponent exactly")
        return Dyadic(self.num << (exp - self.exp), exp)

    def round_to(self, c: int) -> "Dyadic":
        """Round to exponent c (exact when c >= exp)."""
        if c >= self.exp:
            return self.shift_to(c)
        return Dyadic(round_half_even(self.num, _ONE << (self.exp - c)), c)

    # -- comparisons (exact, value-based) ----------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, Dyadic):
            a, b, _ = self._aligned(other)
        else:
            q = _to_mpq(other)
            a = self.num * q.denominator
            b = q.numerator << self.exp
        return (a > b) - (a < b)

    def __eq__(self, other) -> bool:
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash(self.as_fraction())

    def __repr__(self) -> str:
        return f"Dyadic({self.num}, {self.exp})"

    def normalized(self) -> "Dyadic":
        """Value-equal copy with the smallest nonnegative exponent."""
        if self.num == 0:
            return Dyadic(0, 0)
        shift = min(trailing_zero_bits(self.num), self.exp)
        return Dyadic(self.num >> shift, self.exp - shift)

    # -- serialization ------------------------------------------------------
    def to_json_dict(self) -> dict:
        return {"num": str(self.num), "exp": self.exp}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Dyadic":
        return cls(mpz(d["num"]), int(d["exp"]))


class DyadicComplex:
    """Complex number with dyadic re/im parts sharing one exponent."""

    __slots__ = ("re_num", "im_num", "exp")

    def __init__(self, re_num, im_num, exp: int = 0):
        if exp < 0:
            raise ValueError("dyadic exponent must be nonnegative")
        self.re_num = mpz(re_num)
        self.im_num = mpz(im_num)
        self.exp = int(exp)

    @classmethod
    def zero(cls, exp: int = 0) -> "DyadicComplex":
        return cls(0, 0, exp)

    @classmethod
    def one(cls, exp: int = 0) -> "DyadicComplex":
        return cls(_ONE << exp, 0, exp)

    @classmethod
    def from_dyadics(cls, re: Dyadic, im: Dyadic) -> "DyadicComplex":
        e = max(re.exp, im.exp)
        return cls(re.num << (e - re.exp), im.num << (e - im.exp), e)

    @classmethod
    def from_rationals(cls, re: RationalLike, im: RationalLike, exp: int) -> "DyadicComplex":
        return cls.from_dyadics(
            Dyadic.from_rational(re, exp), Dyadic.from_rational(im, exp)
        )

    # -- parts -------------------------------------------------------------
    @property
    def re(self) -> Dyadic:
        return Dyadic(self.re_num, self.exp)

    @property
    def im(self) -> Dyadic:
        return Dyadic(self.im_num, self.exp)

    def as_rational_pair(self):
        d = _ONE << self.exp
        return (mpq(self.re_num, d), mpq(self.im_num, d))

    def is_zero(self) -> bool:
        return self.re_num == 0 and self.im_num == 0

    def is_real(self) -> bool:
        return self.im_num == 0

    # -- exact arithmetic -----------------------------------------------
    def _aligned(self, other: "DyadicComplex"):
        e = max(self.exp, other.exp)
        s1 = e - self.exp
        s2 = e - other.exp
        return (
            self.re_num << s1,
            self.im_num << s1,
            other.re_num << s2,
            other.im_num << s2,
            e,
        )

    def __add__(self, other: "DyadicComplex") -> "DyadicComplex":
        a, b, c, d, e = self._aligned(other)
        return DyadicComplex(a + c, b + d, e)

    def __sub__(self, other: "DyadicComplex") -> "DyadicComplex":
        a, b, c, d, e = self._aligned(other)
        return DyadicComplex(a - c, b - d, e)

    def __mul__(self, other) -> "DyadicComplex":
        if isinstance(other, DyadicComplex):
            # (a+bi)(c+di); exponents add.
            a, b = self.re_num, self.im_num
            c, d = other.re_num, other.im_num
            return DyadicComplex(a * c - b * d, a * d + b * c, self.exp + other.exp)
        if isinstance(other, Dyadic):
            return DyadicComplex(
                self.re_num * other.num, self.im_num * other.num, self.exp + other.exp
            )
        m = mpz(other)
        return DyadicComplex(self.re_num * m, self.im_num * m, self.exp)

    __rmul__ = __mul__

    def __neg__(self) -> "DyadicComplex":
        return DyadicComplex(-self.re_num, -self.im_num, self.exp)

    def conj(self) -> "DyadicComplex":
        return DyadicComplex(self.re_num, -self.im_num, self.exp)

    def abs_squared(self) -> Dyadic:
        """|z|^2 exactly, as a dyadic with exponent 2*exp."""
        return Dyadic(self.re_num * self.re_num + self.im_num * self.im_num, 2 * self.exp)

    def shift_to(self, exp: int) -> "DyadicComplex":
        if exp < self.exp:
            raise ValueError("shift_to cannot reduce the exponent exactly")
        s = exp - self.exp
        return DyadicComplex(self.re_num << s, self.im_num << s, exp)

    def round_to(self, c: int) -> "DyadicComplex":
        if c >= self.exp:
            return self.shift_to(c)
        den = _ONE << (self.exp - c)
        return DyadicComplex(
            round_half_even(self.re_num, den), round_half_even(self.im_num, den), c
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicComplex):
            return NotImplemented
        a, b, c, d, _ = self._aligned(other)
        return a == c and b == d

    def __hash__(self):
        return hash((Dyadic(self.re_num, self.exp).as_fraction(),
                     Dyadic(self.im_num, self.exp).as_fraction()))

    def __repr__(self) -> str:
        return f"DyadicComplex({self.re_num}, {self.im_num}, {self.exp})"

    def normalized(self) -> "DyadicComplex":
        """Value-equal copy with the smallest exponent both parts allow."""
        if self.re_num == 0 and self.im_num == 0:
            return DyadicComplex(0, 0, 0)
        shift = self.exp
        for part in (self.re_num, self.im_num):
            if part != 0:
                shift = min(shift, trailing_zero_bits(part))
        return DyadicComplex(self.re_num >> shift, self.im_num >> shift, self.exp - shift)

    def to_json_dict(self) -> dict:
        return {"re_num": str(self.re_num), "im_num": str(self.im_num), "exp": self.exp}

    @classmethod
    def from_json_dict(cls, d: dict) -> "DyadicComplex":
        return cls(mpz(d["re_num"]), mpz(d["im_num"]), int(d["exp"]))


def round_c(x, c: int):
    """Round to the nearest multiple of 2**-c, ties to the even numerator.

    Accepts rationals, dyadics and dyadic complexes; the result carries
    exponent exactly c.  |x - round_c(x)| <= 2**-(c+1) < 2**-c componentwise,
    and the operation is exact (identity up to re-expression) whenever x is a
    dyadic with exponent <= c.
    """
    if c < 0:
        raise ValueError("rounding exponent must be nonnegative")
    if isinstance(x, DyadicComplex):
        return x.round_to(c)
    if isinstance(x, Dyadic):
        return x.round_to(c)
    return Dyadic.from_rational(x, c)


class RationalComplex:
    """Gaussian rational (exact complex number over mpq); internal workhorse."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @classmethod
    def from_dyadic_complex(cls, z: DyadicComplex) -> "RationalComplex":
        re, im = z.as_rational_pair()
        return cls(re, im)

    def __add__(self, other: "RationalComplex") -> "RationalComplex":
        return RationalComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "RationalComplex") -> "RationalComplex":
        return RationalComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other) -> "RationalComplex":
        if isinstance(other, RationalComplex):
            return RationalComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        q = _to_mpq(other)
        return RationalComplex(self.re * q, self.im * q)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalComplex":
        if isinstance(other, RationalComplex):
            n2 = other.re * other.re + other.im * other.im
            if n2 == 0:
                raise ZeroDivisionError("division by complex zero")
            return RationalComplex(
                (self.re * other.re + self.im * other.im) / n2,
                (self.im * other.re - self.re * other.im) / n2,
            )
        q = _to_mpq(other)
        return RationalComplex(self.re / q, self.im / q)

    def __neg__(self) -> "RationalComplex":
        return RationalComplex(-self.re, -self.im)

    def conj(self) -> "RationalComplex":
        return RationalComplex(self.re, -self.im)

    def abs_squared(self):
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalComplex):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((Fraction(int(self.re.numerator), int(self.re.denominator)),
                     Fraction(int(self.im.numerator), int(self.im.denominator))))

    def __repr__(self) -> str:
        return f"RationalComplex({self.re}, {self.im})"


def isqrt_floor(n):
    return gmpy2.isqrt(mpz(n))


def isqrt_ceil(n):
    n = mpz(n)
    s = gmpy2.isqrt(n)
    return s if s * s == n else s + 1


def sqrt_enclosure(x, bits: int):
    """Certified (lo, hi) rationals with lo <= sqrt(x) <= hi, hi - lo <= 2**-bits.

    x must be a nonnegative rational.  Uses integer square roots on scaled
    numerators, so the bounds are exact.
    """
    q = _to_mpq(x)
    if q < 0:
        raise ValueError("sqrt_enclosure of a negative value")
    if q == 0:
        return (mpq(0), mpq(0))
    p, d = q.numerator, q.denominator
    # sqrt(p/d) = sqrt(p*d)/d; scale to get the requested absolute width.
    scale = _ONE << bits
    s = gmpy2.isqrt(p * d * scale * scale)
    lo = mpq(s, d * scale)
    hi = mpq(s + 1, d * scale)
    return (lo, hi)


def _pow2_le(q, e: int) -> bool:
    n, d = q.numerator, q.denominator
    if e >= 0:
        return (d << e) <= n
    return d <= (n << (-e))


def floor_log2(x) -> int:
    """Largest integer e with 2**e <= x, for positive rational x. Exact."""
    q = _to_mpq(x)
    if q <= 0:
        raise ValueError("floor_log2 of a nonpositive value")
    e = q.numerator.bit_length() - q.denominator.bit_length()
    while not _pow2_le(q, e):
        e -= 1
    while _pow2_le(q, e + 1):
        e += 1
    return e


def ceil_log2(x) -> int:
    """Smallest integer e with x <= 2**e, for positive rational x. Exact."""
    q = _to_mpq(x)
    e = floor_log2(q)
    num, den = q.numerator, q.denominator
    exact = (num == den << e) if e >= 0 else (num << (-e) == den)
    return e if exact else e + 1
