"""Exact matrices and certified numeric diagnostics.

Two matrix representations:

* ``RatMatrix`` — Gaussian-rational entries stored as integer numerator grids
  (real and imaginary) over a single shared positive denominator, kept
  canonical (gcd of all numerators with the denominator is 1).  ``IntMatrix``
  is the denominator-1, real specialization used for integer inputs.
* ``DyadicComplexMatrix`` — complex dyadic entries sharing one explicit
  exponent; products add exponents, sums align them, nothing rounds silently.

On top of these: exact inversion by fraction-free (Bareiss) elimination over
the Gaussian integers, exact characteristic polynomials (companion read-off
fast path, Faddeev–LeVerrier in general), max/operator norm brackets, and
certified singular-value enclosures via exact inertia bisection on M*M.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

from .polynomials import IntPolynomial, gcd_mpz
from .scalars import (
    Dyadic,
    DyadicComplex,
    RationalComplex,
    _to_mpq,
    round_half_even,
    sqrt_enclosure,
)

__all__ = [
    "RatMatrix",
    "IntMatrix",
    "DyadicComplexMatrix",
    "SingularMatrixError",
    "mat_add",
    "mat_mul",
    "exact_inverse",
    "char_poly",
    "max_norm",
    "op_norm_bounds",
    "sigma_min_estimate",
    "sigma_max_estimate",
    "hermitian_eig_enclosure",
    "exact_rank",
    "kappa_enclosure_norm",
    "kappa_enclosure_sigma",
    "gram",
    "matmul_int_dyadic",
    "leading_principal_minors",
]

_ZERO = mpz(0)
_ONE = mpz(1)


class SingularMatrixError(ZeroDivisionError):
    """Raised when an exact inverse of a singular matrix is requested."""


def _lcm(a, b):
    return a * b // gcd_mpz(a, b)


def _entry_to_pair(v):
    """Coerce an entry to an exact (re, im) pair of mpq."""
    if isinstance(v, RationalComplex):
        return (v.re, v.im)
    if isinstance(v, DyadicComplex):
        return v.as_rational_pair()
    if isinstance(v, Dyadic):
        return (v.as_rational(), mpq(0))
    if isinstance(v, tuple):
        return (_to_mpq(v[0]), _to_mpq(v[1]))
    return (_to_mpq(v), mpq(0))


class RatMatrix:
    """Exact Gaussian-rational matrix with one shared positive denominator."""

    __slots__ = ("rows", "cols", "re", "im", "den")

    def __init__(self, re, im, den, _normalized: bool = False):
        self.re = tuple(tuple(mpz(x) for x in row) for row in re)
        self.im = tuple(tuple(mpz(x) for x in row) for row in im)
        self.rows = len(self.re)
        self.cols = len(self.re[0]) if self.rows else 0
        den = mpz(den)
        if den == 0:
            raise ZeroDivisionError("matrix denominator must be nonzero")
        if den < 0:
            den = -den
            self.re = tuple(tuple(-x for x in row) for row in self.re)
            self.im = tuple(tuple(-x for x in row) for row in self.im)
        self.den = den
        if not _normalized:
            self._normalize()

    def _normalize(self) -> None:
        g = self.den
        for grid in (self.re, self.im):
            for row in grid:
                for x in row:
                    g = gcd_mpz(g, x)
                    if g == 1:
                        return
        if g > 1:
            self.re = tuple(tuple(x // g for x in row) for row in self.re)
            self.im = tuple(tuple(x // g for x in row) for row in self.im)
            self.den = self.den // g

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        pairs = [[_entry_to_pair(v) for v in row] for row in rows]
        den = mpz(1)
        for row in pairs:
            for re, im in row:
                den = _lcm(den, re.denominator)
                den = _lcm(den, im.denominator)
        re = [[mpz(p[0] * den) for p in row] for row in pairs]
        im = [[mpz(p[1] * den) for p in row] for row in pairs]
        return cls(re, im, den)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(
            [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)],
            [[_ZERO] * n for _ in range(n)],
            1,
            _normalized=True,
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(
            [[_ZERO] * cols for _ in range(rows)],
            [[_ZERO] * cols for _ in range(rows)],
            1,
            _normalized=True,
        )

    @classmethod
    def from_rc_columns(cls, columns: Sequence[Sequence[RationalComplex]]) -> "RatMatrix":
        rows = len(columns[0])
        return cls.from_rows(
            [[columns[j][i] for j in range(len(columns))] for i in range(rows)]
        )

    # -- access -------------------------------------------------------------
    def entry(self, i: int, j: int) -> RationalComplex:
        return RationalComplex(
            mpq(self.re[i][j], self.den), mpq(self.im[i][j], self.den)
        )

    def is_real(self) -> bool:
        return all(x == 0 for row in self.im for x in row)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_hermitian(self) -> bool:
        if not self.is_square():
            return False
        for i in range(self.rows):
            for j in range(self.rows):
                if self.re[i][j] != self.re[j][i] or self.im[i][j] != -self.im[j][i]:
                    return False
        return True

    def bit_length_a(self) -> int:
        """Max bit length over numerators: the input-size parameter `a` that
        every working-precision formula is budgeted against."""
        return max(
            (abs(x).bit_length() for g in (self.re, self.im) for row in g for x in row),
            default=0,
        )

    def den_bit_length(self) -> int:
        return self.den.bit_length()

    # -- arithmetic -----------------------------------------------------------
    def _check_shape(self, other: "RatMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_shape(other)
        d = _lcm(self.den, other.den)
        s, o = d // self.den, d // other.den
        return RatMatrix(
            [[self.re[i][j] * s + other.re[i][j] * o for j in range(self.cols)]
             for i in range(self.rows)],
            [[self.im[i][j] * s + other.im[i][j] * o for j in range(self.cols)]
             for i in range(self.rows)],
            d,
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(
            [[-x for x in row] for row in self.re],
            [[-x for x in row] for row in self.im],
            self.den,
            _normalized=True,
        )

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        n, m, k = self.rows, other.cols, self.cols
        re = [[_ZERO] * m for _ in range(n)]
        im = [[_ZERO] * m for _ in range(n)]
        for i in range(n):
            are, aim = self.re[i], self.im[i]
            for j in range(m):
                sre = mpz(0)
                sim = mpz(0)
                for t in range(k):
                    ar, ai = are[t], aim[t]
                    br, bi = other.re[t][j], other.im[t][j]
                    sre += ar * br - ai * bi
                    sim += ar * bi + ai * br
                re[i][j] = sre
                im[i][j] = sim
        return RatMatrix(re, im, self.den * other.den)

    def scale(self, s) -> "RatMatrix":
        q = _to_mpq(s)
        return RatMatrix(
            [[x * q.numerator for x in row] for row in self.re],
            [[x * q.numerator for x in row] for row in self.im],
            self.den * q.denominator,
        )

    def conj_transpose(self) -> "RatMatrix":
        return RatMatrix(
            [[self.re[i][j] for i in range(self.rows)] for j in range(self.cols)],
            [[-self.im[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.den,
            _normalized=True,
        )

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            [[self.re[i][j] for i in range(self.rows)] for j in range(self.cols)],
            [[self.im[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.den,
            _normalized=True,
        )

    def trace(self) -> RationalComplex:
        tr = RationalComplex(0, 0)
        for i in range(min(self.rows, self.cols)):
            tr = tr + self.entry(i, i)
        return tr

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix(
            [[self.re[i][j] for j in col_idx] for i in row_idx],
            [[self.im[i][j] for j in col_idx] for i in row_idx],
            self.den,
        )

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        d = _lcm(self.den, other.den)
        s, o = d // self.den, d // other.den
        return RatMatrix(
            [[x * s for x in self.re[i]] + [x * o for x in other.re[i]]
             for i in range(self.rows)],
            [[x * s for x in self.im[i]] + [x * o for x in other.im[i]]
             for i in range(self.rows)],
            d,
        )

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        d = _lcm(self.den, other.den)
        s, o = d // self.den, d // other.den
        re = [[x * s for x in row] for row in self.re] + [
            [x * o for x in row] for row in other.re
        ]
        im = [[x * s for x in row] for row in self.im] + [
            [x * o for x in row] for row in other.im
        ]
        return RatMatrix(re, im, d)

    @classmethod
    def block_diag(cls, blocks: Sequence["RatMatrix"]) -> "RatMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        den = mpz(1)
        for b in blocks:
            den = _lcm(den, b.den)
        re = [[_ZERO] * m for _ in range(n)]
        im = [[_ZERO] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            s = den // b.den
            for i in range(b.rows):
                for j in range(b.cols):
                    re[r0 + i][c0 + j] = b.re[i][j] * s
                    im[r0 + i][c0 + j] = b.im[i][j] * s
            r0 += b.rows
            c0 += b.cols
        return cls(re, im, den)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.den == other.den
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self):
        return hash((self.rows, self.cols, int(self.den)))

    def is_zero(self) -> bool:
        return all(x == 0 for g in (self.re, self.im) for row in g for x in row)

    def __repr__(self) -> str:
        return f"RatMatrix({self.rows}x{self.cols}, den={self.den})"


class IntMatrix(RatMatrix):
    """Real integer matrix (denominator 1); the exact input type for the
    Jordan-form pipeline."""

    def __init__(self, rows: Sequence[Sequence]):
        re = [[mpz(v) for v in row] for row in rows]
        im = [[_ZERO] * len(row) for row in rows]
        super().__init__(re, im, 1, _normalized=True)

    @property
    def a(self) -> int:
        return self.bit_length_a()


def mat_add(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return a + b


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return a @ b


class DyadicComplexMatrix:
    """Complex dyadic matrix; every entry shares one explicit exponent."""

    __slots__ = ("rows", "cols", "re", "im", "exp")

    def __init__(self, re, im, exp: int):
        if exp < 0:
            raise ValueError("dyadic exponent must be nonnegative")
        self.re = tuple(tuple(mpz(x) for x in row) for row in re)
        self.im = tuple(tuple(mpz(x) for x in row) for row in im)
        self.rows = len(self.re)
        self.cols = len(self.re[0]) if self.rows else 0
        self.exp = int(exp)

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_entries(cls, grid: Sequence[Sequence[DyadicComplex]]) -> "DyadicComplexMatrix":
        e = max((z.exp for row in grid for z in row), default=0)
        re = [[z.re_num << (e - z.exp) for z in row] for row in grid]
        im = [[z.im_num << (e - z.exp) for z in row] for row in grid]
        return cls(re, im, e)

    @classmethod
    def identity(cls, n: int, exp: int = 0) -> "DyadicComplexMatrix":
        one = _ONE << exp
        return cls(
            [[one if i == j else _ZERO for j in range(n)] for i in range(n)],
            [[_ZERO] * n for _ in range(n)],
            exp,
        )

    @classmethod
    def zeros(cls, rows: int, cols: int, exp: int = 0) -> "DyadicComplexMatrix":
        return cls(
            [[_ZERO] * cols for _ in range(rows)],
            [[_ZERO] * cols for _ in range(rows)],
            exp,
        )

    @classmethod
    def from_rat_rounded(cls, m: RatMatrix, exp: int) -> "DyadicComplexMatrix":
        """Round every entry of an exact rational matrix to exponent `exp`."""
        den = m.den
        re = [[round_half_even(x << exp, den) for x in row] for row in m.re]
        im = [[round_half_even(x << exp, den) for x in row] for row in m.im]
        return cls(re, im, exp)

    # -- access ---------------------------------------------------------------
    def entry(self, i: int, j: int) -> DyadicComplex:
        return DyadicComplex(self.re[i][j], self.im[i][j], self.exp)

    def to_rat(self) -> RatMatrix:
        return RatMatrix(self.re, self.im, _ONE << self.exp)

    def is_real(self) -> bool:
        return all(x == 0 for row in self.im for x in row)

    # -- exact arithmetic -----------------------------------------------------
    def shift_to(self, exp: int) -> "DyadicComplexMatrix":
        if exp < self.exp:
            raise ValueError("shift_to cannot reduce the exponent exactly")
        s = exp - self.exp
        return DyadicComplexMatrix(
            [[x << s for x in row] for row in self.re],
            [[x << s for x in row] for row in self.im],
            exp,
        )

    def round_to(self, exp: int) -> "DyadicComplexMatrix":
        if exp >= self.exp:
            return self.shift_to(exp)
        den = _ONE << (self.exp - exp)
        return DyadicComplexMatrix(
            [[round_half_even(x, den) for x in row] for row in self.re],
            [[round_half_even(x, den) for x in row] for row in self.im],
            exp,
        )

    def _aligned(self, other: "DyadicComplexMatrix"):
        e = max(self.exp, other.exp)
        return self.shift_to(e), other.shift_to(e), e

    def __add__(self, other: "DyadicComplexMatrix") -> "DyadicComplexMatrix":
        a, b, e = self._aligned(other)
        return DyadicComplexMatrix(
            [[a.re[i][j] + b.re[i][j] for j in range(a.cols)] for i in range(a.rows)],
            [[a.im[i][j] + b.im[i][j] for j in range(a.cols)] for i in range(a.rows)],
            e,
        )

    def __sub__(self, other: "DyadicComplexMatrix") -> "DyadicComplexMatrix":
        return self + (-other)

    def __neg__(self) -> "DyadicComplexMatrix":
        return DyadicComplexMatrix(
            [[-x for x in row] for row in self.re],
            [[-x for x in row] for row in self.im],
            self.exp,
        )

    def __matmul__(self, other: "DyadicComplexMatrix") -> "DyadicComplexMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        n, m, k = self.rows, other.cols, self.cols
        re = [[_ZERO] * m for _ in range(n)]
        im = [[_ZERO] * m for _ in range(n)]
        for i in range(n):
            are, aim = self.re[i], self.im[i]
            for j in range(m):
                sre = mpz(0)
                sim = mpz(0)
                for t in range(k):
                    ar, ai = are[t], aim[t]
                    br, bi = other.re[t][j], other.im[t][j]
                    sre += ar * br - ai * bi
                    sim += ar * bi + ai * br
                re[i][j] = sre
                im[i][j] = sim
        return DyadicComplexMatrix(re, im, self.exp + other.exp)

    def conj_transpose(self) -> "DyadicComplexMatrix":
        return DyadicComplexMatrix(
            [[self.re[i][j] for i in range(self.rows)] for j in range(self.cols)],
            [[-self.im[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.exp,
        )

    def select_columns(self, cols: Sequence[int]) -> "DyadicComplexMatrix":
        return DyadicComplexMatrix(
            [[self.re[i][j] for j in cols] for i in range(self.rows)],
            [[self.im[i][j] for j in cols] for i in range(self.rows)],
            self.exp,
        )

    def top_rows(self, k: int) -> "DyadicComplexMatrix":
        return DyadicComplexMatrix(self.re[:k], self.im[:k], self.exp)

    def hstack(self, other: "DyadicComplexMatrix") -> "DyadicComplexMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        a, b, e = self._aligned(other)
        return DyadicComplexMatrix(
            [list(ra) + list(rb) for ra, rb in zip(a.re, b.re)],
            [list(ra) + list(rb) for ra, rb in zip(a.im, b.im)],
            e,
        )

    @classmethod
    def block_diag(cls, blocks: Sequence["DyadicComplexMatrix"]) -> "DyadicComplexMatrix":
        e = max((b.exp for b in blocks), default=0)
        blocks = [b.shift_to(e) for b in blocks]
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        re = [[_ZERO] * m for _ in range(n)]
        im = [[_ZERO] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    re[r0 + i][c0 + j] = b.re[i][j]
                    im[r0 + i][c0 + j] = b.im[i][j]
            r0 += b.rows
            c0 += b.cols
        return cls(re, im, e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicComplexMatrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        a, b, _ = self._aligned(other)
        return a.re == b.re and a.im == b.im

    def __hash__(self):
        return hash((self.rows, self.cols))

    def __repr__(self) -> str:
        return f"DyadicComplexMatrix({self.rows}x{self.cols}, exp={self.exp})"


def matmul_int_dyadic(a: RatMatrix, b: DyadicComplexMatrix) -> DyadicComplexMatrix:
    """Exact product of an integral RatMatrix with a dyadic matrix."""
    if not a.is_integral():
        raise ValueError("matmul_int_dyadic requires an integral left factor")
    if a.cols != b.rows:
        raise ValueError("shape mismatch in matrix product")
    n, m, k = a.rows, b.cols, a.cols
    re = [[_ZERO] * m for _ in range(n)]
    im = [[_ZERO] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            sre = mpz(0)
            sim = mpz(0)
            for t in range(k):
                ar, ai = a.re[i][t], a.im[i][t]
                br, bi = b.re[t][j], b.im[t][j]
                sre += ar * br - ai * bi
                sim += ar * bi + ai * br
            re[i][j] = sre
            im[i][j] = sim
    return DyadicComplexMatrix(re, im, b.exp)


# ---------------------------------------------------------------------------
# Exact inversion: fraction-free forward elimination over the Gaussian
# integers followed by exact-division back-substitution.  The result comes out
# naturally in shared-denominator form (numerators = +/- adjugate, denominator
# = determinant of the pivoted matrix).
# ---------------------------------------------------------------------------

class _ZeroMinorError(ArithmeticError):
    pass


def _gauss_div(ar, ai, br, bi):
    """Exact division in Z[i]; raises if not divisible."""
    n2 = br * br + bi * bi
    xr, rr = divmod(ar * br + ai * bi, n2)
    xi, ri = divmod(ai * br - ar * bi, n2)
    if rr or ri:
        raise ArithmeticError("inexact Gaussian-integer division")
    return xr, xi


def exact_inverse(a: RatMatrix) -> RatMatrix:
    """Exact inverse of a square Gaussian-rational matrix.

    Fraction-free (Bareiss) elimination keeps every intermediate entry a
    Gaussian integer; every internal division is checked to be exact.
    Raises SingularMatrixError when the matrix is exactly singular.
    """
    if not a.is_square():
        raise ValueError("exact_inverse requires a square matrix")
    n = a.rows
    if n == 0:
        return a
    w = n * 2
    re = [list(a.re[i]) + [_ONE if j == i else _ZERO for j in range(n)] for i in range(n)]
    im = [list(a.im[i]) + [_ZERO] * n for i in range(n)]
    prev = (_ONE, _ZERO)
    piv: list = [None] * n
    for k in range(n):
        p = k
        while p < n and re[p][k] == 0 and im[p][k] == 0:
            p += 1
        if p == n:
            raise SingularMatrixError("matrix is singular")
        if p != k:
            re[k], re[p] = re[p], re[k]
            im[k], im[p] = im[p], im[k]
        pr, pi = re[k][k], im[k][k]
        for i in range(k + 1, n):
            fr, fi = re[i][k], im[i][k]
            _bareiss_update_row(pr, pi, fr, fi, re[k], im[k], re[i], im[i],
                                k + 1, w, prev)
            re[i][k] = _ZERO
            im[i][k] = _ZERO
        piv[k] = (pr, pi)
        prev = (pr, pi)
    # back-substitution: X = d * U^{-1} B where d = last pivot (= det of the
    # row-permuted numerator matrix); every x is integral (adjugate entries).
    dr, di = piv[n - 1]
    xr = [[_ZERO] * n for _ in range(n)]
    xi = [[_ZERO] * n for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(n):
            sr = re[i][n + j] * dr - im[i][n + j] * di
            si = re[i][n + j] * di + im[i][n + j] * dr
            for t in range(i + 1, n):
                sr -= re[i][t] * xr[t][j] - im[i][t] * xi[t][j]
                si -= re[i][t] * xi[t][j] + im[i][t] * xr[t][j]
            xr[i][j], xi[i][j] = _gauss_div(sr, si, piv[i][0], piv[i][1])
    # a = N / q  =>  a^{-1} = q * N^{-1} = q * X / d; d may be complex only if
    # the input was complex, in which case fold it into the numerators.
    if di == 0:
        return RatMatrix(
            [[x * a.den for x in row] for row in xr],
            [[x * a.den for x in row] for row in xi],
            dr,
        )
    d2 = dr * dr + di * di
    return RatMatrix(
        [[(xr[i][j] * dr + xi[i][j] * di) * a.den for j in range(n)] for i in range(n)],
        [[(xi[i][j] * dr - xr[i][j] * di) * a.den for j in range(n)] for i in range(n)],
        d2,
    )


def _bareiss_update_row(pr, pi, fr, fi, krow_r, krow_i, rowr, rowi, lo, hi, prev):
    for j in range(lo, hi):
        nr = pr * rowr[j] - pi * rowi[j] - (fr * krow_r[j] - fi * krow_i[j])
        ni = pr * rowi[j] + pi * rowr[j] - (fr * krow_i[j] + fi * krow_r[j])
        if prev == (1, 0):
            rowr[j], rowi[j] = nr, ni
        else:
            rowr[j], rowi[j] = _gauss_div(nr, ni, prev[0], prev[1])


def leading_principal_minors(a: RatMatrix):
    """Leading principal minors of the numerator grid, no pivoting.

    Returns the list [d_1, ..., d_n] as Gaussian-integer pairs; raises
    _ZeroMinorError when some leading minor vanishes (the caller perturbs).
    """
    if not a.is_square():
        raise ValueError("minors of a non-square matrix")
    n = a.rows
    re = [list(row) for row in a.re]
    im = [list(row) for row in a.im]
    prev = (_ONE, _ZERO)
    out = []
    for k in range(n):
        pr, pi = re[k][k], im[k][k]
        if pr == 0 and pi == 0:
            raise _ZeroMinorError(f"leading minor {k + 1} vanishes")
        out.append((pr, pi))
        for i in range(k + 1, n):
            _bareiss_update_row(
                pr, pi, re[i][k], im[i][k], re[k], im[k], re[i], im[i], k + 1, n, prev
            )
            re[i][k] = _ZERO
            im[i][k] = _ZERO
        prev = (pr, pi)
    return out


# ---------------------------------------------------------------------------
# Characteristic polynomial.
# ---------------------------------------------------------------------------

def _companion_read_off(a: RatMatrix):
    """Detect the two companion orientations and read the polynomial off."""
    n = a.rows
    if not a.is_integral() or not a.is_real():
        return None
    if n == 1:
        return IntPolynomial([-a.re[0][0], 1])
    # row form: superdiagonal ones, last row = negated coefficients
    def is_row_form():
        for i in range(n - 1):
            for j in range(n):
                want = _ONE if j == i + 1 else _ZERO
                if a.re[i][j] != want:
                    return False
        return True

    def is_col_form():
        for j in range(n - 1):
            for i in range(n):
                want = _ONE if i == j + 1 else _ZERO
                if a.re[i][j] != want:
                    return False
        return True

    if is_row_form():
        return IntPolynomial([-a.re[n - 1][j] for j in range(n)] + [1])
    if is_col_form():
        return IntPolynomial([-a.re[i][n - 1] for i in range(n)] + [1])
    return None


def char_poly(a: RatMatrix) -> IntPolynomial:
    """Exact characteristic polynomial det(xI - A) of an integral matrix.

    Companion matrices (either orientation) are read off directly.  The
    general case runs Faddeev-LeVerrier over exact rationals.  The input must
    have denominator 1; Gaussian-integer inputs are accepted as long as the
    result is real (always true for the matrices this package builds), else
    this raises ValueError.
    """
    if not a.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    if not a.is_integral():
        raise ValueError("char_poly expects an integral matrix; scale first")
    fast = _companion_read_off(a)
    if fast is not None:
        return fast
    n = a.rows
    ident = RatMatrix.identity(n)
    coeffs = [mpq(0)] * (n + 1)
    coeffs[n] = mpq(1)
    m = RatMatrix.zeros(n, n)
    ck = mpq(1)
    for k in range(1, n + 1):
        m = (a @ m) + ident.scale(ck)
        am = a @ m
        tr = am.trace()
        if tr.im != 0:
            raise ValueError("characteristic polynomial came out complex")
        ck = -tr.re / k
        coeffs[n - k] = ck
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise AssertionError("Faddeev-LeVerrier produced a non-integer coefficient")
        out.append(mpz(c.numerator))
    return IntPolynomial(out)


# ---------------------------------------------------------------------------
# Norms.
# ---------------------------------------------------------------------------

def max_norm(m) -> "mpq":
    """Componentwise Chebyshev norm: max over entries of max(|Re|, |Im|).

    Exactly representable (unlike the modulus max-norm) and within sqrt(2)
    of it; for real matrices the two coincide.
    """
    if isinstance(m, DyadicComplexMatrix):
        m = m.to_rat()
    best = mpz(0)
    for grid in (m.re, m.im):
        for row in grid:
            for x in row:
                ax = abs(x)
                if ax > best:
                    best = ax
    return mpq(best, m.den)


def _abs1_max(m: RatMatrix) -> "mpq":
    best = mpz(0)
    for i in range(m.rows):
        for j in range(m.cols):
            v = abs(m.re[i][j]) + abs(m.im[i][j])
            if v > best:
                best = v
    return mpq(best, m.den)


def op_norm_bounds(m) -> "tuple[mpq, mpq]":
    """Certified (lower, upper) bracket of the spectral operator norm.

    lower = componentwise max norm <= ||M||; upper = max(dims) * max(|Re|+|Im|)
    >= sqrt(rows*cols) * (modulus max) >= ||M||.
    """
    if isinstance(m, DyadicComplexMatrix):
        m = m.to_rat()
    lo = max_norm(m)
    hi = max(m.rows, m.cols) * _abs1_max(m)
    return (lo, hi)


# ---------------------------------------------------------------------------
# Certified extreme-eigenvalue enclosures for Hermitian matrices by exact
# inertia bisection: the number of eigenvalues below t equals the number of
# sign changes in the sequence of leading principal minors of (H - tI)
# (Jacobi/Sylvester), computed fraction-free.
# ---------------------------------------------------------------------------

_PERTURB_NUM_DEN = (
    (1, 2), (1, 3), (2, 5), (3, 7), (5, 11), (4, 9), (7, 13), (8, 17),
    (9, 19), (11, 23), (13, 27), (16, 33), (23, 47), (29, 59), (37, 75),
    (41, 83), (53, 107), (61, 123), (71, 143), (89, 179),
)


def _inertia_below(h: RatMatrix, t) -> int:
    """Number of eigenvalues of Hermitian h strictly below t (minors method)."""
    n = h.rows
    t = _to_mpq(t)
    shifted = h + RatMatrix.identity(n).scale(-t)
    minors = leading_principal_minors(shifted)
    count = 0
    prev_sign = 1
    for dr, di in minors:
        if di != 0:
            raise AssertionError("Hermitian matrix produced a complex minor")
        s = 1 if dr > 0 else -1
        if s != prev_sign:
            count += 1
        prev_sign = s
    return count


def _inertia_below_robust(h: RatMatrix, lo, hi) -> "tuple[mpq, int]":
    """Inertia probe inside (lo, hi); nudges the probe off vanishing minors."""
    for num, den in _PERTURB_NUM_DEN:
        t = lo + (hi - lo) * mpq(num, den)
        try:
            return t, _inertia_below(h, t)
        except _ZeroMinorError:
            continue
    raise ArithmeticError(
        "inertia bisection could not find a probe with nonvanishing minors"
    )


def _gershgorin_radius(h: RatMatrix) -> "mpq":
    best = mpq(0)
    for i in range(h.rows):
        s = mpz(0)
        for j in range(h.cols):
            s += abs(h.re[i][j]) + abs(h.im[i][j])
        v = mpq(s, h.den)
        if v > best:
            best = v
    return best


def hermitian_eig_enclosure(h: RatMatrix, which: str, width) -> "tuple[mpq, mpq]":
    """Certified enclosure of the smallest or largest eigenvalue of Hermitian h.

    Bisects with exact inertia counts until hi - lo <= width.  The returned
    interval is guaranteed to contain the target eigenvalue.
    """
    if not h.is_hermitian():
        raise ValueError("eigenvalue enclosure requires a Hermitian matrix")
    n = h.rows
    width = _to_mpq(width)
    r = _gershgorin_radius(h)
    diag = [mpq(h.re[i][i], h.den) for i in range(n)]
    if which == "min":
        lo, hi = -r - 1, min(diag) + width / 4  # Rayleigh: lambda_min <= min diag
        # invariant: count(< lo) == 0 and count(< hi) >= 1
        while hi - lo > width:
            t, c = _inertia_below_robust(h, lo, hi)
            if c == 0:
                lo = t
            else:
                hi = t
        return (lo, hi)
    if which == "max":
        lo, hi = max(diag) - width / 4, r + 1
        while hi - lo > width:
            t, c = _inertia_below_robust(h, lo, hi)
            if c == n:
                hi = t
            else:
                lo = t
        return (lo, hi)
    raise ValueError("which must be 'min' or 'max'")


def gram(m) -> RatMatrix:
    if isinstance(m, DyadicComplexMatrix):
        m = m.to_rat()
    return m.conj_transpose() @ m


def sigma_min_estimate(m, target_bits: int = 64) -> "tuple[mpq, mpq]":
    """Certified enclosure [lo, hi] of sigma_min(M) with hi - lo <= 2**-target_bits.

    Exact bisection on the inertia of M*M - tI; returns [0, eps] for exactly
    singular M.  Diagnostic tool: the default 64-bit target is plenty for the
    condition-number ceilings this package checks.
    """
    h = gram(m)
    lam_width = mpq(1, _ONE << (2 * target_bits + 2))
    lo, hi = hermitian_eig_enclosure(h, "min", lam_width)
    if lo < 0:
        lo = mpq(0)  # Gram matrices are PSD
    if hi < 0:
        hi = mpq(0)
    slo, _ = sqrt_enclosure(lo, 2 * target_bits)
    _, shi = sqrt_enclosure(hi, 2 * target_bits)
    return (slo, shi)


def sigma_max_estimate(m, target_bits: int = 64) -> "tuple[mpq, mpq]":
    """Certified enclosure of sigma_max(M), companion to sigma_min_estimate."""
    h = gram(m)
    lam_width = mpq(1, _ONE << (2 * target_bits + 2))
    lo, hi = hermitian_eig_enclosure(h, "max", lam_width)
    lo = max(lo, mpq(0))
    hi = max(hi, mpq(0))
    slo, _ = sqrt_enclosure(lo, 2 * target_bits)
    _, shi = sqrt_enclosure(hi, 2 * target_bits)
    return (slo, shi)


def exact_rank(m: RatMatrix) -> int:
    """Exact rank by Gaussian elimination over the rationals."""
    if isinstance(m, DyadicComplexMatrix):
        m = m.to_rat()
    grid = [[m.entry(i, j) for j in range(m.cols)] for i in range(m.rows)]
    rank = 0
    row = 0
    for col in range(m.cols):
        p = next((r for r in range(row, m.rows) if not grid[r][col].is_zero()), None)
        if p is None:
            continue
        grid[row], grid[p] = grid[p], grid[row]
        pivot = grid[row][col]
        for r in range(row + 1, m.rows):
            if grid[r][col].is_zero():
                continue
            f = grid[r][col] / pivot
            grid[r] = [grid[r][j] - f * grid[row][j] for j in range(m.cols)]
        rank += 1
        row += 1
        if row == m.rows:
            break
    return rank


def kappa_enclosure_norm(m, m_inv=None) -> "tuple[mpq, mpq]":
    """Certified [lo, hi] for kappa(M) = ||M||*||M^-1|| via norm brackets.

    The inverse is computed exactly, so the only slack is the factor-of-dim
    gap between the max norm and the operator norm — irrelevant against the
    2**Theta(a n^3) ceilings this feeds.
    """
    if isinstance(m, DyadicComplexMatrix):
        m = m.to_rat()
    if m_inv is None:
        m_inv = exact_inverse(m)
    lo_n, hi_n = op_norm_bounds(m)
    lo_i, hi_i = op_norm_bounds(m_inv)
    return (lo_n * lo_i, hi_n * hi_i)


def kappa_enclosure_sigma(m, target_bits: int = 64) -> "tuple[mpq, mpq]":
    """Tight certified kappa enclosure via sigma_max/sigma_min bisection.

    Meant for small diagnostic matrices; raises SingularMatrixError when the
    sigma_min enclosure cannot be separated from zero.
    """
    smin_lo, smin_hi = sigma_min_estimate(m, target_bits)
    smax_lo, smax_hi = sigma_max_estimate(m, target_bits)
    if smin_lo <= 0:
        raise SingularMatrixError(
            "sigma_min enclosure touches zero; matrix is singular or nearly so "
            f"at {target_bits} bits"
        )
    return (smax_lo / smin_hi, smax_hi / smin_lo)
