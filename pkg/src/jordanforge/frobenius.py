"""Exact Frobenius (rational canonical) form A = U F U^{-1}.

F is a direct sum of companion matrices of the invariant factors of xI - A,
listed in increasing degree order so that each polynomial divides the next.
The algorithm is the deterministic cyclic-decomposition construction:

1. compute the minimal polynomial of the operator induced on V / S (S = span
   of the cyclic subspaces found so far) as an lcm of local annihilators;
2. find a quotient vector whose annihilator is that whole minimal polynomial,
   scanning the moment curve (1, t, t^2, ...) — a union of fewer than dim
   proper subspaces cannot contain dim^2+1 such points;
3. lift it to V and subtract the unique correction inside S that makes the
   annihilator exact (the classical divisibility step; every division is
   checked rather than trusted);
4. repeat until the cyclic subspaces exhaust V.

Everything is exact rational arithmetic; the decomposition identity
A U = U F is asserted entrywise before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from gmpy2 import mpq, mpz

from .linalg import RatMatrix, IntMatrix, exact_inverse, char_poly
from .polynomials import (
    IntPolynomial,
    _qc_divmod,
    _qc_lcm_monic,
    _qc_trim,
    gcd_mpz,
)
from .scalars import RationalComplex

__all__ = [
    "CompanionBlock",
    "FrobeniusDecomposition",
    "frobenius_form",
    "companion_realize",
    "hankel_symmetrizer",
]

_RC0 = RationalComplex(0, 0)
_RC1 = RationalComplex(1, 0)


@dataclass(frozen=True)
class CompanionBlock:
    """A monic integer polynomial standing for its companion matrix."""

    poly: IntPolynomial

    def __post_init__(self):
        if not self.poly.is_monic():
            raise ValueError("companion blocks require a monic polynomial")

    @property
    def dimension(self) -> int:
        return self.poly.degree


def companion_realize(block) -> IntMatrix:
    """Materialize a companion block: ones on the subdiagonal, negated
    coefficients down the last column (so x^2 -> [[0,0],[1,0]]).

    Accepts a CompanionBlock or a bare monic IntPolynomial.
    """
    p = block.poly if isinstance(block, CompanionBlock) else block
    if not p.is_monic():
        raise ValueError("companion_realize requires a monic polynomial")
    d = p.degree
    rows = [[0] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = 1
    for i in range(d):
        rows[i][d - 1] = -p[i]
    return IntMatrix(rows)


def hankel_symmetrizer(p: IntPolynomial) -> IntMatrix:
    """The unimodular Hankel matrix H with H^{-1} C_col H = C_row.

    H[r][c] = coefficient r+c+1 of p (leading coefficient included, zeros
    beyond).  Conjugating by it swaps a companion matrix between its
    column-oriented and row-oriented forms exactly.
    """
    d = p.degree
    return IntMatrix([[p[r + c + 1] if r + c + 1 <= d else 0 for c in range(d)]
                      for r in range(d)])


@dataclass(frozen=True)
class FrobeniusDecomposition:
    """Exact similarity A = U F U^{-1} with F a direct sum of companions."""

    U: RatMatrix
    U_inv: RatMatrix
    blocks: tuple[CompanionBlock, ...]

    def f_matrix(self) -> RatMatrix:
        return RatMatrix.block_diag([companion_realize(b) for b in self.blocks])

    def invariant_factors(self) -> list[IntPolynomial]:
        return [b.poly for b in self.blocks]

    def f_bit_length(self) -> int:
        """Max coefficient bit length across the invariant factors."""
        return max(b.poly.bit_length_a() for b in self.blocks)


# ---------------------------------------------------------------------------
# Exact elimination with expression tracking.
# ---------------------------------------------------------------------------

class _Eliminator:
    """Gauss-Jordan elimination over exact Gaussian rationals.

    insert() either records the vector (returning None) or, when the vector
    is dependent on earlier inserts, returns the exact combination dict
    tag -> coefficient expressing it in terms of the original inserts.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.pivots: dict[int, int] = {}
        self.store: list[tuple[list[RationalComplex], dict]] = []

    def reduce(self, vec: Sequence[RationalComplex]):
        vec = list(vec)
        expr: dict = {}
        for p in sorted(self.pivots):
            c = vec[p]
            if c.is_zero():
                continue
            rvec, rexpr = self.store[self.pivots[p]]
            for i in range(self.dim):
                if not rvec[i].is_zero():
                    vec[i] = vec[i] - c * rvec[i]
            for t, x in rexpr.items():
                expr[t] = expr.get(t, _RC0) - c * x
        return vec, expr

    def insert(self, vec: Sequence[RationalComplex], tag):
        vec, expr = self.reduce(vec)
        expr[tag] = expr.get(tag, _RC0) + _RC1
        p = next((i for i in range(self.dim) if not vec[i].is_zero()), None)
        if p is None:
            # dependent: 0 = vec_original + sum(expr[t]*orig_t for t != tag)
            return {t: -x for t, x in expr.items() if t != tag and not x.is_zero()}
        inv = _RC1 / vec[p]
        vec = [x * inv for x in vec]
        expr = {t: x * inv for t, x in expr.items()}
        for svec, sexpr in self.store:
            c = svec[p]
            if c.is_zero():
                continue
            for i in range(self.dim):
                if not vec[i].is_zero():
                    svec[i] = svec[i] - c * vec[i]
            for t, x in expr.items():
                sexpr[t] = sexpr.get(t, _RC0) - c * x
        self.pivots[p] = len(self.store)
        self.store.append((vec, expr))
        return None

    def complement(self) -> list[int]:
        return [i for i in range(self.dim) if i not in self.pivots]

    def rank(self) -> int:
        return len(self.store)


def _apply_matrix(a: RatMatrix, v: Sequence[RationalComplex]) -> list[RationalComplex]:
    out = []
    den = mpq(1, a.den)
    for i in range(a.rows):
        sre = mpq(0)
        sim = mpq(0)
        for j in range(a.cols):
            x = v[j]
            if x.is_zero():
                continue
            ar = a.re[i][j]
            ai = a.im[i][j]
            sre += ar * x.re - ai * x.im
            sim += ar * x.im + ai * x.re
        out.append(RationalComplex(sre * den, sim * den))
    return out


def _local_annihilator(apply_fn: Callable, v: Sequence[RationalComplex], dim: int):
    """Smallest monic g (coefficient list, low to high) with g(op) v = 0."""
    el = _Eliminator(dim)
    cur = list(v)
    k = 0
    while True:
        dep = el.insert(cur, k)
        if dep is not None:
            return [-dep.get(t, _RC0) for t in range(k)] + [_RC1]
        cur = apply_fn(cur)
        k += 1
        if k > dim + 1:
            raise AssertionError("annihilator search exceeded the dimension")


def _operator_min_poly(apply_fn: Callable, dim: int):
    m = [_RC1]
    for i in range(dim):
        e = [_RC1 if j == i else _RC0 for j in range(dim)]
        m = _qc_lcm_monic(m, _local_annihilator(apply_fn, e, dim))
        if len(m) == dim + 1:
            break
    return m


def _maximal_vector(apply_fn: Callable, dim: int, target_deg: int):
    """Moment-curve scan for a vector whose annihilator has full degree."""
    limit = 4 * dim * dim + 4
    for t in range(limit):
        v = [RationalComplex(mpq(t) ** i, 0) for i in range(dim)]
        ann = _local_annihilator(apply_fn, v, dim)
        if len(ann) - 1 == target_deg:
            return v, ann
    raise AssertionError("moment-curve scan failed to find a maximal vector")


def _poly_div_exact(num, den):
    q, r = _qc_divmod(num, den)
    if r:
        raise AssertionError("cyclic-decomposition correction was not divisible")
    return q


def _is_column_companion(a: RatMatrix) -> bool:
    n = a.rows
    if not a.is_real():
        return False
    for j in range(n - 1):
        for i in range(n):
            want = 1 if i == j + 1 else 0
            if a.re[i][j] != want:
                return False
    return True


def frobenius_form(a: RatMatrix) -> FrobeniusDecomposition:
    """Exact Frobenius form of a square integral matrix (real or Gaussian).

    Blocks come back in increasing degree order; each invariant factor
    divides the next; their product is char_poly(A); A U = U F and
    U U^{-1} = I hold exactly and are asserted before returning.
    """
    if not a.is_square():
        raise ValueError("Frobenius form requires a square matrix")
    if not a.is_integral():
        raise ValueError(
            "Frobenius form expects integer (or Gaussian-integer) entries; "
            "scale the matrix by its denominator first"
        )
    n = a.rows
    if n == 0:
        raise ValueError("empty matrix")

    if _is_column_companion(a):
        block = CompanionBlock(char_poly(a))
        ident = RatMatrix.identity(n)
        return FrobeniusDecomposition(ident, ident, (block,))

    basis = _Eliminator(n)          # Krylov vectors of the generators found so far
    gens: list[tuple[list, list]] = []   # (krylov vector list, annihilator coeffs)
    prev_m = None

    def apply_a(v):
        return _apply_matrix(a, v)

    while basis.rank() < n:
        comp = basis.complement()
        q_dim = len(comp)
        # matrix of the induced operator on V/S in residual coordinates
        q_cols = []
        for c in comp:
            col = [a.entry(i, c) for i in range(n)]
            red, _ = basis.reduce(col)
            q_cols.append([red[i] for i in comp])

        def apply_q(u):
            out = [_RC0] * q_dim
            for j, x in enumerate(u):
                if x.is_zero():
                    continue
                colj = q_cols[j]
                for i in range(q_dim):
                    if not colj[i].is_zero():
                        out[i] = out[i] + colj[i] * x
            return out

        m_bar = _operator_min_poly(apply_q, q_dim)
        if prev_m is not None:
            _poly_div_exact(prev_m, m_bar)  # divisibility chain, asserted
        prev_m = m_bar
        deg = len(m_bar) - 1
        u_star, ann = _maximal_vector(apply_q, q_dim, deg)
        # lift to V: residual coordinates embed with zeros at pivot positions
        w = [_RC0] * n
        for idx, c in enumerate(comp):
            w[c] = u_star[idx]
        # y = m_bar(A) w lies in S; express it in the Krylov basis
        powers = [list(w)]
        for _ in range(deg):
            powers.append(apply_a(powers[-1]))
        y = [_RC0] * n
        for t, coef in enumerate(m_bar):
            if coef.is_zero():
                continue
            for i in range(n):
                y[i] = y[i] + powers[t][i] * coef
        dep = basis.insert(y, ("__probe__",))
        if dep is None:
            raise AssertionError("conductor image escaped the invariant subspace")
        # group coordinates by generator: tag (j, t) -> coefficient of A^t v_j
        for j, (krylov, f_j) in enumerate(gens):
            h = [_RC0] * len(f_j)
            for (gj, t), cval in dep.items():
                if gj == j:
                    h[t] = cval
            h = _qc_trim(h)
            if not h:
                continue
            qu = _poly_div_exact(h, m_bar)
            # w -= q(A) v_j using the cached Krylov vectors of v_j
            for t, coef in enumerate(qu):
                if coef.is_zero():
                    continue
                for i in range(n):
                    w[i] = w[i] - krylov[t][i] * coef
        # annihilator of the corrected vector is exactly m_bar; build its
        # Krylov chain, assert the closure, and extend the basis
        chain = [list(w)]
        for _ in range(deg - 1):
            chain.append(apply_a(chain[-1]))
        closure = apply_a(chain[-1])
        for t in range(deg):
            coef = m_bar[t]
            if coef.is_zero():
                continue
            for i in range(n):
                closure[i] = closure[i] + chain[t][i] * coef
        if any(not x.is_zero() for x in closure):
            raise AssertionError("corrected generator is not annihilated exactly")
        j_new = len(gens)
        for t, vec in enumerate(chain):
            if basis.insert(vec, (j_new, t)) is not None:
                raise AssertionError("cyclic chain collapsed inside the basis")
        gens.append((chain, m_bar))

    # increasing degree order (construction yields non-increasing degrees)
    gens.reverse()
    columns = [vec for krylov, _f in gens for vec in krylov]
    u = RatMatrix.from_rc_columns(columns)
    u = _primitive_integral(u)
    u_inv = exact_inverse(u)

    blocks = []
    for _krylov, f in gens:
        coeffs = []
        for c in f:
            if c.im != 0:
                raise ValueError(
                    "matrix has complex invariant factors; the Frobenius stage "
                    "only supports matrices whose invariant factors are real"
                )
            if c.re.denominator != 1:
                raise AssertionError("invariant factor of an integer matrix "
                                     "came out non-integral")
            coeffs.append(mpz(c.re.numerator))
        blocks.append(CompanionBlock(IntPolynomial(coeffs)))

    dec = FrobeniusDecomposition(u, u_inv, tuple(blocks))
    # contract checks: exact similarity, invertibility, char poly product
    if (a @ u) != (u @ dec.f_matrix()):
        raise AssertionError("Frobenius similarity A U = U F failed exactly")
    if (u @ u_inv) != RatMatrix.identity(n):
        raise AssertionError("U inverse failed exactly")
    prod = IntPolynomial([1])
    for b in blocks:
        prod = prod * b.poly
    if prod != char_poly(a):
        raise AssertionError("invariant factors do not multiply to char poly")
    return dec


def _primitive_integral(u: RatMatrix) -> RatMatrix:
    """Scale a matrix by a positive rational so entries are coprime integers.

    A scalar rescaling of U preserves A U = U F, so this is free; it keeps
    the downstream dyadic products integer-by-dyadic."""
    g = mpz(0)
    for grid in (u.re, u.im):
        for row in grid:
            for x in row:
                g = gcd_mpz(g, x)
    if g == 0:
        raise ValueError("zero matrix cannot be normalized")
    return RatMatrix(
        [[x // g for x in row] for row in u.re],
        [[x // g for x in row] for row in u.im],
        1,
        _normalized=True,
    )
