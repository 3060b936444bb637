"""Exact univariate polynomials: integer coefficients plus rational helpers.

``IntPolynomial`` stores coefficients low-to-high as arbitrary-precision
integers.  Evaluation is exact at rationals, Gaussian rationals and dyadic
complexes (Horner).  The module also provides exact gcds and Yun's square-free
decomposition over Q (returned as primitive integer factors), which the root
finder uses to make multiplicities exact, and low-level rational-coefficient
polynomial helpers shared with the Frobenius-form computation.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

from .scalars import DyadicComplex, RationalComplex, _to_mpq

__all__ = [
    "IntPolynomial",
    "poly_gcd_int",
    "square_free_decomposition",
]

_ZERO = mpz(0)
_ONE = mpz(1)


class IntPolynomial:
    """Polynomial with exact integer coefficients, stored low-to-high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [mpz(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "IntPolynomial":
        return cls(())

    @classmethod
    def monomial(cls, k: int, c=1) -> "IntPolynomial":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntPolynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    # -- structure ----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self):
        if not self.coeffs:
            return _ZERO
        return self.coeffs[-1]

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i <= self.degree else _ZERO

    def bit_length_a(self) -> int:
        """Max bit length over the coefficients (0 for the zero polynomial)."""
        return max((abs(c).bit_length() for c in self.coeffs), default=0)

    def trailing_zero_count(self) -> int:
        if not self.coeffs:
            return 0
        k = 0
        while self.coeffs[k] == 0:
            k += 1
        return k

    def shift_down(self, k: int) -> "IntPolynomial":
        """Exact division by x**k."""
        if any(c != 0 for c in self.coeffs[:k]):
            raise ValueError("shift_down: polynomial not divisible by x**k")
        return IntPolynomial(self.coeffs[k:])

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(
            [self[i] + other[i] for i in range(n)]
        )

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial([self[i] - other[i] for i in range(n)])

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial([-c for c in self.coeffs])

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, IntPolynomial):
            if self.is_zero() or other.is_zero():
                return IntPolynomial.zero()
            out = [mpz(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return IntPolynomial(out)
        return IntPolynomial([c * mpz(other) for c in self.coeffs])

    __rmul__ = __mul__

    def divexact(self, other: "IntPolynomial") -> "IntPolynomial":
        """Exact polynomial division over Z; raises if the remainder is nonzero."""
        q, r = _q_divmod(_q_from_int(self), _q_from_int(other))
        if any(c != 0 for c in r):
            raise ValueError("divexact: nonzero remainder")
        out = []
        for c in q:
            if c.denominator != 1:
                raise ValueError("divexact: quotient not integral")
            out.append(mpz(c.numerator))
        return IntPolynomial(out)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def content(self):
        g = mpz(0)
        for c in self.coeffs:
            g = gcd_mpz(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Primitive part with positive leading coefficient (roots unchanged)."""
        if self.is_zero():
            return self
        g = self.content()
        if self.coeffs[-1] < 0:
            g = -g
        return IntPolynomial([c // g for c in self.coeffs])

    # -- evaluation -----------------------------------------------------------
    def __call__(self, x):
        q = _to_mpq(x)
        acc = mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def eval_rc(self, z: RationalComplex) -> RationalComplex:
        acc = RationalComplex(0, 0)
        for c in reversed(self.coeffs):
            acc = acc * z + RationalComplex(mpq(c), 0)
        return acc

    def eval_dyadic_complex(self, z: DyadicComplex) -> DyadicComplex:
        """Exact Horner evaluation; result exponent is degree * z.exp."""
        if self.is_zero():
            return DyadicComplex.zero()
        acc = DyadicComplex(self.coeffs[-1], 0, 0)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + DyadicComplex(mpz(c) << acc.exp + z.exp, 0, acc.exp + z.exp)
        return acc

    # -- misc -------------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(int(c) for c in self.coeffs))

    def __repr__(self) -> str:
        return f"IntPolynomial({[int(c) for c in self.coeffs]})"


def gcd_mpz(a, b):
    a, b = abs(mpz(a)), abs(mpz(b))
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Rational-coefficient helpers (lists of mpq, low-to-high, trimmed).
# ---------------------------------------------------------------------------

def _q_trim(cs):
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _q_from_int(p: IntPolynomial):
    return [mpq(c) for c in p.coeffs]


def _q_divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [mpq(0)] * max(0, len(a) - len(b) + 1)
    inv = 1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        f = a[i + len(b) - 1] * inv
        if f != 0:
            q[i] = f
            for j, bc in enumerate(b):
                a[i + j] -= f * bc
    return _q_trim(q), _q_trim(a[: len(b) - 1])


def _q_derivative(a):
    return [i * c for i, c in enumerate(a)][1:]


def _q_gcd_monic(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _q_divmod(a, b)
        a, b = b, r
    if a:
        inv = 1 / a[-1]
        a = [c * inv for c in a]
    return a


def _q_to_primitive_int(a) -> IntPolynomial:
    """Clear denominators and divide by content; positive leading coefficient."""
    if not a:
        return IntPolynomial.zero()
    den = mpz(1)
    for c in a:
        den = den * c.denominator // gcd_mpz(den, c.denominator)
    ints = [mpz(c * den) for c in a]
    return IntPolynomial(ints).primitive()


def poly_gcd_int(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """gcd over Q, returned as a primitive integer polynomial (leading > 0)."""
    g = _q_gcd_monic(_q_from_int(p), _q_from_int(q))
    return _q_to_primitive_int(g)


def square_free_decomposition(p: IntPolynomial):
    """Yun's algorithm: p = c * prod(f_i ** m_i) with f_i square-free, coprime.

    Returns a list of (primitive IntPolynomial factor, multiplicity) pairs with
    strictly positive-degree factors, ordered by increasing multiplicity, and
    asserts the exact reconstruction against the primitive part of p.
    """
    if p.is_zero():
        raise ValueError("square-free decomposition of the zero polynomial")
    prim = p.primitive()
    if prim.degree == 0:
        return []
    f = _q_from_int(prim)
    fp = _q_derivative(f)
    g = _q_gcd_monic(f, fp)
    out = []
    if len(g) == 1:  # gcd == 1: already square-free
        out.append((prim, 1))
    else:
        c, _ = _q_divmod(f, g)
        w, _ = _q_divmod(fp, g)
        d = [a - b for a, b in _zip_pad(w, _q_derivative(c))]
        _q_trim(d)
        i = 1
        while len(c) > 1:
            a = _q_gcd_monic(c, d)
            if len(a) > 1:
                out.append((_q_to_primitive_int(a), i))
            c, _ = _q_divmod(c, a)
            wq, _ = _q_divmod(d, a)
            d = [x - y for x, y in _zip_pad(wq, _q_derivative(c))]
            _q_trim(d)
            i += 1
    check = IntPolynomial([1])
    for fac, mult in out:
        for _ in range(mult):
            check = check * fac
    if check.primitive() != prim:
        raise AssertionError("square-free decomposition failed reconstruction")
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    pad = mpq(0)
    return [
        (a[i] if i < len(a) else pad, b[i] if i < len(b) else pad) for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Gaussian-rational coefficient helpers (lists of RationalComplex), used by the
# Frobenius-form computation over Q(i).
# ---------------------------------------------------------------------------

def _qc_trim(cs):
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _qc_divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [RationalComplex(0, 0)] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        f = a[i + len(b) - 1] / lead
        if not f.is_zero():
            q[i] = f
            for j, bc in enumerate(b):
                a[i + j] = a[i + j] - f * bc
    return _qc_trim(q), _qc_trim(a[: len(b) - 1])


def _qc_monic(a):
    if not a:
        return a
    inv = RationalComplex(1, 0) / a[-1]
    return [c * inv for c in a]


def _qc_gcd_monic(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _qc_divmod(a, b)
        a, b = b, r
    return _qc_monic(a)


def _qc_lcm_monic(a, b):
    if not a:
        return list(b)
    if not b:
        return list(a)
    g = _qc_gcd_monic(a, b)
    prod = _qc_mul(a, b)
    q, r = _qc_divmod(prod, g)
    assert not r
    return _qc_monic(q)


def _qc_mul(a, b):
    if not a or not b:
        return []
    out = [RationalComplex(0, 0) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _qc_trim(out)
