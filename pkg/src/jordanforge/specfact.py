"""Spectral factorization P(x) = Q*(x) Q(x) of monic PSD Hermitian matrix polynomials.

The route is eigenstructure surgery on the block companion matrix C_P of the
degree-2d input: compute its certified approximate Jordan form, split the
Jordan blocks into strictly-upper-half-plane, real, and strictly-lower
groups, keep the upper group plus the *first half* of every (necessarily
even-sized) real block's chain, and reassemble a dn x dn companion matrix

    C_Q = V_ge0 * J_ge0 * round(V_ge0^-1)

whose negated last block row is the coefficient list of the factor Q.

A real eigenvalue with an odd-sized Jordan block certifies that P is not
positive semidefinite on the line; the certificate object carries the
offending eigenvalue, size, and the whole companion JNF for audit.  The
same certificate (with a distinct reason tag) is emitted defensively when
the plus/minus groups fail to mirror each other, which valid Hermitian PSD
input cannot produce.

Denominator handling: a rational input with shared denominator q is routed
through the rational-path JNF, so all Jordan data are numerators over
q * 2^(working bits); the companion reassembly uses the exact numerator
Jordan matrix divided by q (1/q on superdiagonals), which is precisely the
matrix similar to C_P through the computed chain columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from gmpy2 import mpq, mpz

from .jnf import (
    DEFAULT_BPRIME_CONSTANT,
    ApproxJNF,
    JordanBlockSpec,
    jnf_rational,
)
from .linalg import (
    DyadicComplexMatrix,
    RatMatrix,
    SingularMatrixError,
    char_poly,
    exact_inverse,
    kappa_enclosure_norm,
    max_norm,
)
from .scalars import DyadicComplex, ceil_log2

__all__ = [
    "MatrixPolynomial",
    "SpectralFactor",
    "NotPsdCertificate",
    "SingularVgeError",
    "ConjugatePairingError",
    "block_companion",
    "classify_eigenvalues",
    "build_half",
    "spectral_factor",
    "nonmonic_spectral_factor",
    "evaluate_and_check_psd_sample",
    "DEFAULT_BPP_CONSTANT",
    "DEFAULT_REAL_THRESHOLD_CONSTANT",
]

#: Multiplier in b'' = C * a * (dn)^3 * ceil(log2(dn+1)) + b.
DEFAULT_BPP_CONSTANT = 8
#: C_real in the real-axis snap threshold tau = 2^(-C_real * a * (nd)^2).
DEFAULT_REAL_THRESHOLD_CONSTANT = 1


class SingularVgeError(ArithmeticError):
    """V_ge0 came out exactly singular: the working-precision budget was
    violated (should not happen for valid PSD input at the default
    constants); retry with a larger --bpp-constant."""


class ConjugatePairingError(ValueError):
    """The plus and minus eigenvalue groups are not mirror images."""

    def __init__(self, message, eigenvalue=None, size=0):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.size = size


class MatrixPolynomial:
    """Matrix polynomial with exact Gaussian-rational coefficients.

    ``coeffs[i]`` is the coefficient of x^i for i = 0..degree-1; a monic
    polynomial has an implicit identity leading coefficient, otherwise
    ``leading`` holds it explicitly.  Factorization inputs must have even
    degree and Hermitian coefficients.
    """

    __slots__ = ("n", "coeffs", "leading")

    def __init__(self, coeffs: Sequence[RatMatrix], leading: Optional[RatMatrix] = None):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        n = coeffs[0].rows
        for c in coeffs:
            if not c.is_square() or c.rows != n:
                raise ValueError("coefficients must be square and same size")
        if leading is not None and (not leading.is_square() or leading.rows != n):
            raise ValueError("leading coefficient shape mismatch")
        self.n = n
        self.coeffs = coeffs
        self.leading = leading

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def monic(self) -> bool:
        return self.leading is None

    @classmethod
    def from_scalars(cls, scalar_coeffs: Sequence, leading=None) -> "MatrixPolynomial":
        """1x1 convenience: x^deg + sum scalar_coeffs[i] x^i."""
        coeffs = [RatMatrix.from_rows([[c]]) for c in scalar_coeffs]
        lead = RatMatrix.from_rows([[leading]]) if leading is not None else None
        return cls(coeffs, lead)

    def all_coeffs(self) -> list[RatMatrix]:
        """Coefficients 0..degree inclusive (leading made explicit)."""
        lead = self.leading if self.leading is not None else RatMatrix.identity(self.n)
        return list(self.coeffs) + [lead]

    def is_hermitian_input(self) -> bool:
        return all(c.is_hermitian() for c in self.all_coeffs())

    def bit_length_a(self) -> int:
        return max(max(c.bit_length_a(), c.den_bit_length()) for c in self.all_coeffs())

    def max_norm(self) -> mpq:
        return max(max_norm(c) for c in self.all_coeffs())

    def evaluate(self, x) -> RatMatrix:
        """Exact P(x) for rational x (Horner)."""
        x = mpq(x)
        acc = self.leading if self.leading is not None else RatMatrix.identity(self.n)
        for c in reversed(self.coeffs):
            acc = acc.scale(x) + c
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        return self.all_coeffs() == other.all_coeffs()

    def __repr__(self) -> str:
        return f"MatrixPolynomial(n={self.n}, degree={self.degree}, monic={self.monic})"


@dataclass(frozen=True)
class NotPsdCertificate:
    """Witness that P is not PSD on the real line.

    For the standard reason ("odd-real-block") the certificate names a real
    eigenvalue of the companion matrix whose Jordan block has odd size —
    impossible for PSD input.  ``real_eigenvalue`` stores the dyadic
    numerator; divide by ``companion_jnf_reference.eigen_den`` for the
    actual value.  The defensive reason "asymmetric-conjugate-pairing"
    reports an unpaired non-real block instead.
    """

    real_eigenvalue: DyadicComplex
    block_size: int
    companion_jnf_reference: ApproxJNF
    reason: str = "odd-real-block"

    def eigenvalue_rational(self):
        q = mpq(self.companion_jnf_reference.eigen_den)
        lr, li = self.real_eigenvalue.as_rational_pair()
        return (lr / q, li / q)


class SpectralFactor:
    """Monic (or V*-led) degree-d factor with dyadic coefficient matrices.

    ``coeffs[i]`` approximates Q_i at the shared working exponent; the
    leading coefficient is the identity unless ``leading`` is set (the
    non-monic reduction sets it to the exact V*).  Diagnostics — the exact
    coefficient-wise residual of P - Q*Q and the condition enclosure of the
    half-spectrum eigenvector matrix — are computed on first access.
    """

    __slots__ = (
        "coeffs",
        "leading",
        "accuracy_bits",
        "working_bits",
        "_input_poly",
        "_vge_rat",
        "_vge_inv",
        "_inner",
        "_selected_blocks",
        "_diag_cache",
    )

    def __init__(
        self,
        coeffs: Sequence[DyadicComplexMatrix],
        accuracy_bits: int,
        working_bits: int,
        leading: Optional[RatMatrix] = None,
        _input_poly: Optional[MatrixPolynomial] = None,
        _vge_rat: Optional[RatMatrix] = None,
        _vge_inv: Optional[RatMatrix] = None,
        _inner: Optional[ApproxJNF] = None,
        _selected_blocks: Sequence[JordanBlockSpec] = (),
    ):
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise ValueError("a factor needs at least its constant coefficient")
        exp = self.coeffs[0].exp
        if any(c.exp != exp for c in self.coeffs):
            raise ValueError("factor coefficients must share one exponent")
        self.leading = leading
        self.accuracy_bits = int(accuracy_bits)
        self.working_bits = int(working_bits)
        self._input_poly = _input_poly
        self._vge_rat = _vge_rat
        self._vge_inv = _vge_inv
        self._inner = _inner
        self._selected_blocks = tuple(_selected_blocks)
        self._diag_cache = None

    @property
    def n(self) -> int:
        return self.coeffs[0].rows

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def all_coeffs_rational(self) -> list[RatMatrix]:
        """Q_0..Q_d as exact rationals (leading made explicit)."""
        lead = self.leading if self.leading is not None else RatMatrix.identity(self.n)
        return [c.to_rat() for c in self.coeffs] + [lead]

    @property
    def diagnostics(self) -> dict:
        if self._diag_cache is None:
            if self._input_poly is None or self._vge_rat is None:
                raise ValueError("diagnostics need the originating polynomial")
            from .certify import factor_residual

            self._diag_cache = {
                "factor_residual": factor_residual(self._input_poly, self),
                "kappa_Vge_enclosure": kappa_enclosure_norm(self._vge_rat, self._vge_inv),
            }
        return self._diag_cache

    def __repr__(self) -> str:
        return (
            f"SpectralFactor(n={self.n}, degree={self.degree}, "
            f"b={self.accuracy_bits}, b''={self.working_bits}, monic={self.leading is None})"
        )


def block_companion(p: MatrixPolynomial) -> RatMatrix:
    """Block companion matrix: identity blocks on the superdiagonal, last
    block row [-P_0, -P_1, ..., -P_{deg-1}]."""
    if not p.monic:
        raise ValueError("block companion needs a monic polynomial")
    n, deg = p.n, p.degree
    if deg < 1:
        raise ValueError("degree must be >= 1")
    size = deg * n
    rows = [[(mpq(0), mpq(0))] * size for _ in range(size)]
    for b in range(deg - 1):
        for k in range(n):
            rows[b * n + k][(b + 1) * n + k] = (mpq(1), mpq(0))
    base = (deg - 1) * n
    for b, c in enumerate(p.coeffs):
        for i in range(n):
            for j in range(n):
                e = c.entry(i, j)
                rows[base + i][b * n + j] = (-e.re, -e.im)
    return RatMatrix.from_rows(rows)


def _real_snap_threshold(a: int, n: int, d: int, c_real: int) -> mpq:
    return mpq(1, mpz(1) << (c_real * max(1, a) * (n * d) ** 2))


def classify_eigenvalues(
    j: ApproxJNF,
    a: int,
    n: int,
    d: int,
    c_real: int = DEFAULT_REAL_THRESHOLD_CONSTANT,
) -> tuple[dict, tuple[JordanBlockSpec, ...]]:
    """Partition Jordan blocks by the sign of Im(eigenvalue).

    Returns ({'plus': [...], 'zero': [...], 'minus': [...]} of block indices,
    snapped_blocks) where a block lands in 'zero' iff |Im| <= tau with
    tau = 2^(-c_real * a * (nd)^2); those eigenvalues have their imaginary
    numerator replaced by exact 0 in ``snapped_blocks``.  The certified
    rootfinder already snaps genuinely real roots and mirrors conjugate
    pairs bitwise, so the threshold is a safety net, not the primary
    mechanism.  Raises :class:`ConjugatePairingError` if plus and minus are
    not exact mirror multisets.
    """
    tau = _real_snap_threshold(a, n, d, c_real)
    q = mpq(j.eigen_den)
    partition = {"plus": [], "zero": [], "minus": []}
    snapped = []
    for idx, blk in enumerate(j.blocks):
        lr, li = blk.eigenvalue.as_rational_pair()
        if abs(li / q) <= tau:
            partition["zero"].append(idx)
            if li != 0:
                blk = JordanBlockSpec(
                    eigenvalue=DyadicComplex(
                        blk.eigenvalue.re_num, 0, blk.eigenvalue.exp
                    ),
                    size=blk.size,
                    source_block=blk.source_block,
                )
            snapped.append(blk)
        else:
            partition["plus" if li > 0 else "minus"].append(idx)
            snapped.append(blk)

    def signature(indices, flip):
        out = []
        for i in indices:
            lr, li = snapped[i].eigenvalue.as_rational_pair()
            out.append((lr, -li if flip else li, snapped[i].size))
        return sorted(out)

    if signature(partition["plus"], False) != signature(partition["minus"], True):
        off = partition["plus"][0] if partition["plus"] else partition["minus"][0]
        raise ConjugatePairingError(
            "plus/minus Jordan blocks are not conjugate mirror images",
            eigenvalue=snapped[off].eigenvalue,
            size=snapped[off].size,
        )
    return partition, tuple(snapped)


def build_half(
    zero_blocks: Sequence[JordanBlockSpec], v0_columns: DyadicComplexMatrix
) -> tuple[list[JordanBlockSpec], Optional[DyadicComplexMatrix]]:
    """Halve real blocks: size 2s -> size s, keeping the first s chain columns.

    ``v0_columns`` holds the real blocks' columns side by side in block
    order.  Raises ValueError on an odd-sized block (the caller must have
    emitted the NotPSD certificate already).
    """
    halved: list[JordanBlockSpec] = []
    keep: list[int] = []
    pos = 0
    for blk in zero_blocks:
        if blk.size % 2:
            raise ValueError(
                f"real-eigenvalue block of odd size {blk.size}: input is not PSD"
            )
        s = blk.size // 2
        halved.append(
            JordanBlockSpec(eigenvalue=blk.eigenvalue, size=s, source_block=blk.source_block)
        )
        keep.extend(range(pos, pos + s))
        pos += blk.size
    if pos != v0_columns.cols:
        raise ValueError("column group does not match the zero blocks")
    if not keep:
        return [], None
    return halved, v0_columns.select_columns(keep)


def _block_column_ranges(j: ApproxJNF) -> list[range]:
    out = []
    pos = 0
    for blk in j.blocks:
        out.append(range(pos, pos + blk.size))
        pos += blk.size
    return out


def _jordan_rational(blocks: Sequence[JordanBlockSpec], den) -> RatMatrix:
    """Direct sum of the blocks as an exact rational matrix over ``den``:
    diagonal eigenvalue/den, superdiagonal 1/den."""
    m = sum(b.size for b in blocks)
    q = mpq(den)
    entries = [[(mpq(0), mpq(0))] * m for _ in range(m)]
    pos = 0
    for blk in blocks:
        lr, li = blk.eigenvalue.as_rational_pair()
        for k in range(blk.size):
            i = pos + k
            entries[i][i] = (lr / q, li / q)
            if k + 1 < blk.size:
                entries[i][i + 1] = (1 / q, mpq(0))
        pos += blk.size
    return RatMatrix.from_rows(entries)


def working_precision_pp(a: int, n: int, d: int, b: int, c_bpp: int = DEFAULT_BPP_CONSTANT) -> int:
    """b'' = C * a * (dn)^3 * ceil(log2(dn+1)) + b."""
    dn = d * n
    return c_bpp * max(1, a) * dn**3 * int(ceil_log2(mpq(dn + 1))) + b


def spectral_factor(
    p: MatrixPolynomial,
    b: int,
    *,
    c_bpp: int = DEFAULT_BPP_CONSTANT,
    c_real: int = DEFAULT_REAL_THRESHOLD_CONSTANT,
    c_bprime: int = DEFAULT_BPRIME_CONSTANT,
    threads: int = 1,
) -> Union[SpectralFactor, NotPsdCertificate]:
    """Factor a monic Hermitian PSD P(x) of even degree 2d as Q*(x)Q(x).

    Contract: the unique monic factor Q with all latent roots in the closed
    upper half plane is recovered coefficient-wise to 2^-b relative accuracy;
    a NotPsdCertificate is returned (not raised) when the companion Jordan
    structure witnesses that P is not PSD.

    The inverse of V_ge0 is computed exactly and then rounded; the final
    coefficients are rounded once more to the shared exponent b''.
    """
    if p.degree % 2 or p.degree == 0:
        raise ValueError("factorization input must have even degree >= 2")
    if not p.monic:
        raise ValueError("use nonmonic_spectral_factor for non-monic input")
    if not p.is_hermitian_input():
        raise ValueError("coefficients must be Hermitian")
    if b < 1:
        raise ValueError("accuracy bits must be >= 1")
    n = p.n
    d = p.degree // 2
    dn = d * n
    a = max(1, p.bit_length_a())
    bpp = working_precision_pp(a, n, d, b, c_bpp)

    c_p = block_companion(p)
    den = c_p.den
    c_int = c_p.scale(den)
    assert c_int.is_integral()
    inner = jnf_rational(c_int, den, bpp, c_bprime=c_bprime, threads=threads)

    try:
        partition, snapped = classify_eigenvalues(inner, a, n, d, c_real)
    except ConjugatePairingError as e:
        return NotPsdCertificate(
            real_eigenvalue=e.eigenvalue,
            block_size=e.size,
            companion_jnf_reference=inner,
            reason="asymmetric-conjugate-pairing",
        )
    for idx in partition["zero"]:
        if snapped[idx].size % 2:
            return NotPsdCertificate(
                real_eigenvalue=snapped[idx].eigenvalue,
                block_size=snapped[idx].size,
                companion_jnf_reference=inner,
                reason="odd-real-block",
            )

    v_hat = inner.v_hat.round_to(bpp) if inner.v_hat.exp > bpp else inner.v_hat
    ranges = _block_column_ranges(inner)
    plus_cols = [c for i in partition["plus"] for c in ranges[i]]
    zero_cols = [c for i in partition["zero"] for c in ranges[i]]
    zero_blocks = [snapped[i] for i in partition["zero"]]
    halved, v0_half = build_half(zero_blocks, v_hat.select_columns(zero_cols)) if zero_cols else ([], None)

    selected_blocks = [snapped[i] for i in partition["plus"]] + halved
    parts = []
    if plus_cols:
        parts.append(v_hat.select_columns(plus_cols))
    if v0_half is not None:
        parts.append(v0_half)
    if not parts:
        raise AssertionError("empty spectrum selection")
    v_ge = parts[0]
    for extra in parts[1:]:
        v_ge = v_ge.hstack(extra)
    if v_ge.cols != dn:
        raise AssertionError(
            f"half-spectrum selection has {v_ge.cols} columns, expected {dn}"
        )
    v_ge_top = v_ge.top_rows(dn)
    v_ge_rat = v_ge_top.to_rat()
    try:
        v_ge_inv = exact_inverse(v_ge_rat)
    except SingularMatrixError as e:
        raise SingularVgeError(
            "V_ge0 is exactly singular at b'' = {}; retry with a larger "
            "bpp constant".format(bpp)
        ) from e
    inv_rounded = DyadicComplexMatrix.from_rat_rounded(v_ge_inv, bpp)
    j_ge = _jordan_rational(selected_blocks, inner.eigen_den)
    c_q = (v_ge_rat @ j_ge) @ inv_rounded.to_rat()

    base = (d - 1) * n
    coeffs = []
    for blk_i in range(d):
        rows = [
            [
                tuple(-x for x in _rc_pair(c_q.entry(base + i, blk_i * n + j)))
                for j in range(n)
            ]
            for i in range(n)
        ]
        coeffs.append(
            DyadicComplexMatrix.from_rat_rounded(RatMatrix.from_rows(rows), bpp)
        )
    return SpectralFactor(
        coeffs,
        accuracy_bits=b,
        working_bits=bpp,
        leading=None,
        _input_poly=p,
        _vge_rat=v_ge_rat,
        _vge_inv=v_ge_inv,
        _inner=inner,
        _selected_blocks=selected_blocks,
    )


def _rc_pair(rc) -> tuple:
    return (rc.re, rc.im)


def nonmonic_spectral_factor(
    p_coeffs: Sequence[RatMatrix],
    v: RatMatrix,
    b: int,
    *,
    c_bpp: int = DEFAULT_BPP_CONSTANT,
    c_real: int = DEFAULT_REAL_THRESHOLD_CONSTANT,
    threads: int = 1,
) -> Union[SpectralFactor, NotPsdCertificate]:
    """Factor a non-monic PSD polynomial whose leading coefficient is V V*.

    ``p_coeffs`` lists all coefficients 0..2d inclusive.  The input is
    rescaled to the monic P~(x) = x^{2d} I + sum x^i V^-1 P_i V^-*, factored,
    and the factor recomposed as Q(x) = Q~(x) V*: then
    Q*(x)Q(x) = V Q~*(x)Q~(x) V* = P(x) coefficient-wise.  The returned
    factor has exact leading coefficient V* and dyadic lower coefficients;
    accuracy degrades by O(bits of V) as the rescaling inflates the input.
    """
    p_coeffs = list(p_coeffs)
    if len(p_coeffs) < 3 or (len(p_coeffs) - 1) % 2:
        raise ValueError("need coefficients 0..2d inclusive with even 2d >= 2")
    lead = p_coeffs[-1]
    v_star = v.conj_transpose()
    if lead != v @ v_star:
        raise ValueError("leading coefficient must equal V V* exactly")
    v_inv = exact_inverse(v)  # raises SingularMatrixError if V is singular
    v_inv_star = v_inv.conj_transpose()
    tilde = [v_inv @ c @ v_inv_star for c in p_coeffs[:-1]]
    p_tilde = MatrixPolynomial(tilde)
    if not p_tilde.is_hermitian_input():
        raise ValueError("rescaled coefficients are not Hermitian")
    inner = spectral_factor(p_tilde, b, c_bpp=c_bpp, c_real=c_real, threads=threads)
    if isinstance(inner, NotPsdCertificate):
        return inner
    bpp = inner.working_bits
    coeffs = [
        DyadicComplexMatrix.from_rat_rounded(c.to_rat() @ v_star, bpp)
        for c in inner.coeffs
    ]
    p_full = MatrixPolynomial(p_coeffs[:-1], leading=lead)
    return SpectralFactor(
        coeffs,
        accuracy_bits=b,
        working_bits=bpp,
        leading=v_star,
        _input_poly=p_full,
        _vge_rat=inner._vge_rat,
        _vge_inv=inner._vge_inv,
        _inner=inner._inner,
        _selected_blocks=inner._selected_blocks,
    )


def evaluate_and_check_psd_sample(p: MatrixPolynomial, x) -> tuple[RatMatrix, bool]:
    """Exact P(x) plus a negative-eigenvalue report.

    A Hermitian matrix has only real eigenvalues, so its characteristic
    polynomial is real-rooted and the sign pattern of the coefficients
    decides semidefiniteness exactly: det(tI - H) has all roots >= 0 iff
    the coefficients of t^i carry signs (-1)^(n-i) (zeros allowed).
    Returns (P(x), has_negative_eigenvalue).
    """
    h = p.evaluate(x)
    if not h.is_hermitian():
        raise ValueError("P(x) is not Hermitian; check the input coefficients")
    scaled = h.scale(h.den)
    cp = char_poly(scaled)
    m = cp.degree
    has_negative = False
    for i, c in enumerate(cp.coeffs):
        want_nonneg = (m - i) % 2 == 0
        if (c > 0 and not want_nonneg) or (c < 0 and want_nonneg):
            has_negative = True
            break
    return h, has_negative
