"""Approximate Jordan Normal Form with forward error certified in dyadic arithmetic.

The pipeline glues together the exact and certified pieces:

1. exact Frobenius normal form A = U F U^-1 over the rationals;
2. certified roots-with-multiplicities of every companion block's
   polynomial at an enlarged working precision b';
3. a confluent Vandermonde similarity per block (Brand's construction)
   that takes the *row* companion matrix to its Jordan form; our companion
   blocks use the column convention, so each block is first conjugated by
   the Hankel symmetrizer of its polynomial (an exact unimodular integer
   matrix H with H^-1 C_col H = C_row);
4. assembly V_hat = (U * diag(H_i)) * W_hat in exact integer x dyadic
   arithmetic, so V_hat carries the shared exponent b' untouched.

Eigenvalues shared by several companion blocks are clustered jointly: each
smaller block's root is matched to the corresponding root of the largest
block (the minimal polynomial) and replaced by that bit-identical value, so
equal true eigenvalues never diverge in the output.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from gmpy2 import bincoef, mpq, mpz

from .frobenius import CompanionBlock, frobenius_form, hankel_symmetrizer
from .linalg import (
    DyadicComplexMatrix,
    RatMatrix,
    kappa_enclosure_norm,
    matmul_int_dyadic,
    max_norm,
)
from .rootfinder import RootCluster, approx_roots_with_mults, min_working_bits
from .scalars import DyadicComplex, ceil_log2

__all__ = [
    "JordanBlockSpec",
    "ApproxJNF",
    "approx_powers",
    "brand_similarity",
    "jnf",
    "jnf_rational",
    "DEFAULT_BPRIME_CONSTANT",
]

#: Multiplier in the working-precision formula
#: b' = b + C * a * n^3 * ceil(log2(n+1)); validated empirically at desk scale.
DEFAULT_BPRIME_CONSTANT = 8


@dataclass(frozen=True)
class JordanBlockSpec:
    """One Jordan block: eigenvalue (dyadic, exponent b'), size, origin."""

    eigenvalue: DyadicComplex
    size: int
    source_block: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("Jordan block size must be >= 1")


class ApproxJNF:
    """Blocks (defining J_hat) plus the dyadic similarity V_hat.

    ``accuracy_bits`` is the requested forward accuracy b; ``working_bits``
    is the enlarged precision b' every dyadic quantity is expressed at.
    ``eigen_den`` is 1 for integer inputs; for the rational path A/q the
    stored eigenvalues are numerators over q * 2^b'.

    Diagnostics (condition-number enclosure for V_hat and the exact
    reconstruction residual) are comparatively expensive, so they are
    computed on first access and cached.
    """

    __slots__ = (
        "blocks",
        "v_hat",
        "accuracy_bits",
        "working_bits",
        "eigen_den",
        "_input",
        "_diag_cache",
    )

    def __init__(
        self,
        blocks: Sequence[JordanBlockSpec],
        v_hat: DyadicComplexMatrix,
        accuracy_bits: int,
        working_bits: int,
        eigen_den=1,
        _input: Optional[RatMatrix] = None,
    ):
        self.blocks = tuple(blocks)
        self.v_hat = v_hat
        self.accuracy_bits = int(accuracy_bits)
        self.working_bits = int(working_bits)
        self.eigen_den = mpz(eigen_den)
        self._input = _input
        self._diag_cache = None
        n = v_hat.rows
        if sum(blk.size for blk in self.blocks) != n:
            raise ValueError("block sizes must sum to the matrix dimension")

    @property
    def dimension(self) -> int:
        return self.v_hat.rows

    def j_matrix(self) -> DyadicComplexMatrix:
        """J_hat as a dyadic matrix at exponent ``working_bits``.

        Only available when ``eigen_den == 1``; the rational path divides
        eigenvalues by q and the result is no longer dyadic.
        """
        if self.eigen_den != 1:
            raise ValueError("j_matrix() requires eigen_den == 1; use j_rational()")
        bp = self.working_bits
        n = self.dimension
        one = mpz(1) << bp
        re = [[mpz(0)] * n for _ in range(n)]
        im = [[mpz(0)] * n for _ in range(n)]
        pos = 0
        for blk in self.blocks:
            lam = blk.eigenvalue.shift_to(bp)
            for k in range(blk.size):
                i = pos + k
                re[i][i] = lam.re_num
                im[i][i] = lam.im_num
                if k + 1 < blk.size:
                    re[i][i + 1] = one
            pos += blk.size
        return DyadicComplexMatrix(re, im, bp)

    def _j_numerator_rational(self) -> RatMatrix:
        """J_hat of the integer matrix eigen_den * (A/eigen_den): diag of stored
        numerators, unit superdiagonal."""
        n = self.dimension
        entries = [[(mpq(0), mpq(0))] * n for _ in range(n)]
        pos = 0
        for blk in self.blocks:
            lr, li = blk.eigenvalue.as_rational_pair()
            for k in range(blk.size):
                i = pos + k
                entries[i][i] = (lr, li)
                if k + 1 < blk.size:
                    entries[i][i + 1] = (mpq(1), mpq(0))
            pos += blk.size
        return RatMatrix.from_rows(entries)

    def j_rational(self) -> RatMatrix:
        """J_hat for A/eigen_den as an exact rational matrix.

        The columns of V_hat are Jordan chains of the *integer* matrix
        q*(A/q), so the matrix similar to A/q through V_hat is the numerator
        Jordan matrix divided entrywise by q: eigenvalues become
        eigenvalue/q and block superdiagonals carry 1/q instead of 1 (a
        diagonal rescaling away from the unit-superdiagonal normal form).
        For eigen_den == 1 this is exactly J_hat.
        """
        j = self._j_numerator_rational()
        if self.eigen_den == 1:
            return j
        return j.scale(mpq(1, self.eigen_den))

    def rational_eigenvalues(self):
        """Eigenvalues of A/eigen_den as exact (re, im) rational pairs, one per block."""
        q = mpq(self.eigen_den)
        out = []
        for blk in self.blocks:
            lr, li = blk.eigenvalue.as_rational_pair()
            out.append((lr / q, li / q))
        return out

    @property
    def diagnostics(self) -> dict:
        """{'kappa_V_enclosure': (lo, hi), 'residual_max_norm': mpq} — lazy."""
        if self._diag_cache is None:
            if self._input is None:
                raise ValueError("diagnostics need the originating matrix")
            resid = _reconstruction_residual(self._input, self)
            kappa = kappa_enclosure_norm(self.v_hat.to_rat())
            self._diag_cache = {
                "kappa_V_enclosure": kappa,
                "residual_max_norm": resid,
            }
        return self._diag_cache

    def __repr__(self) -> str:
        sizes = ",".join(str(b.size) for b in self.blocks)
        return (
            f"ApproxJNF(n={self.dimension}, blocks=[{sizes}], "
            f"b={self.accuracy_bits}, b'={self.working_bits})"
        )


def approx_powers(lambda_hat: DyadicComplex, r: int, b_prime: int) -> list[DyadicComplex]:
    """Rounded powers: result[p] ~ lambda_hat^p for p = 0..r, all at exponent b'.

    result[0] is the exact one, result[1] = lambda_hat; each further power is
    round_{b'}(previous * lambda_hat), so the accumulated forward error after
    p steps stays within p * 2^-b' * max(1, |lambda|)^(p-1) plus rounding.
    A zero input yields exact zeros for every positive power — zero
    eigenvalues never pass through this scheme's error analysis.
    """
    if r < 0:
        raise ValueError("power count must be >= 0")
    lam = lambda_hat.shift_to(b_prime)
    out = [DyadicComplex.one(b_prime)]
    if r == 0:
        return out
    if lam.is_zero():
        zero = DyadicComplex.zero(b_prime)
        out.extend(zero for _ in range(r))
        return out
    out.append(lam)
    for _ in range(2, r + 1):
        out.append((out[-1] * lam).round_to(b_prime))
    return out


def brand_similarity(
    block: CompanionBlock,
    clusters: Sequence[RootCluster],
    b_prime: int,
    *,
    source: int = 0,
) -> tuple[DyadicComplexMatrix, list[JordanBlockSpec]]:
    """Confluent Vandermonde similarity for one companion block.

    Returns (W_hat, jordan_blocks) with W_hat = [W_1 | W_2 | ... | W_k]
    horizontally, one column group of width m_j per cluster; the group for
    eigenvalue lam has entries W[r][c] = binom(r, c) * lam^(r-c) for r >= c
    (zero above), computed with :func:`approx_powers`.  W_hat takes the
    *row*-convention companion matrix of ``block.poly`` to the Jordan matrix
    defined by ``jordan_blocks`` (eigenvalue on the diagonal, superdiagonal
    ones), up to the 2^-b' working error.
    """
    d = block.dimension
    total = sum(c.multiplicity for c in clusters)
    if total != d:
        raise ValueError(
            f"cluster multiplicities sum to {total}, block dimension is {d}"
        )
    col_groups: list[list[list[DyadicComplex]]] = []
    jblocks: list[JordanBlockSpec] = []
    zero = DyadicComplex.zero(b_prime)
    for cl in clusters:
        lam = cl.value.shift_to(b_prime)
        m = cl.multiplicity
        powers = approx_powers(lam, d - 1, b_prime)
        group = []
        for c in range(m):
            col = []
            for r in range(d):
                if r < c:
                    col.append(zero)
                else:
                    col.append(powers[r - c] * bincoef(r, c))
            group.append(col)
        col_groups.append(group)
        jblocks.append(JordanBlockSpec(eigenvalue=lam, size=m, source_block=source))
    grid = [[col_groups[g][c][r] for g in range(len(col_groups)) for c in range(len(col_groups[g]))]
            for r in range(d)]
    # flatten column groups in order; from_entries aligns exponents (all b')
    return DyadicComplexMatrix.from_entries(grid), jblocks


def working_precision(a: int, n: int, b: int, c_bprime: int = DEFAULT_BPRIME_CONSTANT) -> int:
    """b' = b + C * a * n^3 * ceil(log2(n+1))."""
    if n < 1 or b < 1:
        raise ValueError("need n >= 1 and b >= 1")
    return b + c_bprime * max(1, a) * n**3 * int(ceil_log2(mpq(n + 1)))


def _match_to_reference(
    clusters: list[RootCluster], reference: list[RootCluster], b_prime: int
) -> list[RootCluster]:
    """Snap each cluster value to the bit-identical reference value.

    Every root of a smaller invariant factor is a root of the minimal
    polynomial, and both approximations sit within 2^-b' of the same true
    value, so matching within 2^-(b'-2) in each coordinate is unambiguous
    (distinct reference roots are separated far more widely).
    """
    tol = mpq(1, mpz(1) << (b_prime - 2))
    out = []
    for cl in clusters:
        cr, ci = cl.value.as_rational_pair()
        hit = None
        for ref in reference:
            rr, ri = ref.value.as_rational_pair()
            if abs(cr - rr) <= tol and abs(ci - ri) <= tol:
                if hit is not None:
                    raise AssertionError("ambiguous joint clustering match")
                hit = ref
        if hit is None:
            raise AssertionError("invariant-factor root missing from minimal polynomial")
        out.append(RootCluster(value=hit.value, multiplicity=cl.multiplicity))
    return out


def _block_order_key(blk: JordanBlockSpec):
    lr, li = blk.eigenvalue.as_rational_pair()
    return (lr, li, -blk.size)


def _canonical_sort(
    blocks: list[JordanBlockSpec], v_hat: DyadicComplexMatrix
) -> tuple[list[JordanBlockSpec], DyadicComplexMatrix]:
    starts = []
    pos = 0
    for blk in blocks:
        starts.append(pos)
        pos += blk.size
    order = sorted(range(len(blocks)), key=lambda i: _block_order_key(blocks[i]))
    if order == list(range(len(blocks))):
        return blocks, v_hat
    perm: list[int] = []
    for i in order:
        perm.extend(range(starts[i], starts[i] + blocks[i].size))
    return [blocks[i] for i in order], v_hat.select_columns(perm)


def _reconstruction_residual(a: RatMatrix, j: ApproxJNF) -> mpq:
    """Exact ||A V_hat - V_hat J_hat||_max for the integer matrix A.

    ``a`` is always the integer input, so the comparison matrix is the
    numerator Jordan form (unit superdiagonal) regardless of eigen_den.
    """
    v_rat = j.v_hat.to_rat()
    return max_norm(a @ v_rat - v_rat @ j._j_numerator_rational())


def jnf(
    a: RatMatrix, b: int, *, c_bprime: int = DEFAULT_BPRIME_CONSTANT, threads: int = 1
) -> ApproxJNF:
    """Approximate Jordan Normal Form of an integer (or Gaussian-integer) matrix.

    Returns blocks + V_hat with the contract that some exact JNF A = V J V^-1
    satisfies ||J - J_hat|| <= 2^-b ||J|| and ||V - V_hat|| <= 2^-b ||V||; the
    exact reconstruction residual ||A V_hat - V_hat J_hat||_max is available
    through ``diagnostics`` and is checked to satisfy the documented
    2^-b * n^2 * ||V_hat|| * ||J_hat|| ceiling by the test suite on every run.

    ``threads`` > 1 assembles the per-block similarities on a thread pool
    with an ordered map, so the output is bit-identical for any value.
    (Root finding stays serial: its float scratch layer keeps global
    precision state that is not safe to share.)
    """
    if not a.is_square():
        raise ValueError("jnf needs a square matrix")
    if not a.is_integral():
        raise ValueError("jnf needs integral entries; use jnf_rational for A/q")
    if b < 1:
        raise ValueError("accuracy bits must be >= 1")
    n = a.rows
    bits_a = max(1, a.bit_length_a())
    fr = frobenius_form(a)
    polys = [blk.poly for blk in fr.blocks]
    b_prime = working_precision(bits_a, n, b, c_bprime)
    for p in polys:
        if p.degree >= 1:
            b_prime = max(b_prime, min_working_bits(p))

    # roots of the minimal polynomial (last invariant factor) first: it
    # contains every distinct eigenvalue and anchors the joint clustering
    cache: dict[tuple, list[RootCluster]] = {}

    def roots_of(p):
        key = p.coeffs
        if key not in cache:
            cache[key] = approx_roots_with_mults(p, b_prime)
        return cache[key]

    reference = roots_of(polys[-1])
    per_block: list[list[RootCluster]] = []
    for i, p in enumerate(polys):
        cl = reference if i == len(polys) - 1 else roots_of(p)
        if p.coeffs != polys[-1].coeffs:
            cl = _match_to_reference(cl, reference, b_prime)
        per_block.append(cl)

    def assemble(item):
        i, blk, cl = item
        return brand_similarity(blk, cl, b_prime, source=i), hankel_symmetrizer(blk.poly)

    work = [(i, blk, cl) for i, (blk, cl) in enumerate(zip(fr.blocks, per_block))]
    if threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(assemble, work))
    else:
        results = [assemble(item) for item in work]
    w_parts: list[DyadicComplexMatrix] = []
    blocks: list[JordanBlockSpec] = []
    h_parts: list[RatMatrix] = []
    for (w_i, jb_i), h_i in results:
        w_parts.append(w_i)
        blocks.extend(jb_i)
        h_parts.append(h_i)
    w_hat = DyadicComplexMatrix.block_diag(w_parts)
    u_row = fr.U @ RatMatrix.block_diag(h_parts)
    assert u_row.is_integral()
    v_hat = matmul_int_dyadic(u_row, w_hat)
    blocks, v_hat = _canonical_sort(blocks, v_hat)
    return ApproxJNF(
        blocks,
        v_hat,
        accuracy_bits=b,
        working_bits=b_prime,
        eigen_den=1,
        _input=a,
    )


def jnf_rational(
    a: RatMatrix, q, b: int, *, c_bprime: int = DEFAULT_BPRIME_CONSTANT, threads: int = 1
) -> ApproxJNF:
    """Approximate JNF of A/q for integral A and a positive integer q.

    Runs the integer pipeline at b + ceil(log2 q) bits and divides the
    eigenvalues by q exactly: the returned blocks keep their dyadic
    numerators and ``eigen_den`` is set to q, so each eigenvalue of A/q is
    ``block.eigenvalue / q`` as an exact rational
    (see :meth:`ApproxJNF.rational_eigenvalues`).
    """
    q = mpz(q)
    if q < 1:
        raise ValueError("denominator q must be >= 1")
    extra = int(ceil_log2(mpq(q))) if q > 1 else 0
    inner = jnf(a, b + extra, c_bprime=c_bprime, threads=threads)
    if q == 1:
        return inner
    return ApproxJNF(
        inner.blocks,
        inner.v_hat,
        accuracy_bits=b,
        working_bits=inner.working_bits,
        eigen_den=q,
        _input=a,
    )
