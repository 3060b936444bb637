"""Exact residuals and certified condition-number checks.

Everything in this module is computed in exact rational arithmetic or as
certified enclosures (intervals with sound endpoints); no plain floating
point enters any comparison.  Two orientations are used consistently:

* ``*_confirmed`` means the inequality was verified with the *strong*
  endpoints (lower endpoint of the large side vs. upper endpoint of the
  small side), i.e. the true inequality certainly holds;
* ``certified_violation`` means the inequality fails even with the *weak*
  endpoints, i.e. the true inequality certainly fails.  For inequalities
  that are theorems, any certified violation is a bug by definition.

An inconclusive middle (neither flag) can only arise from enclosures too
loose for the instance; the randomized suites treat that as a failure of
tightness, not of the theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from gmpy2 import mpq, mpz

from .jnf import ApproxJNF
from .linalg import (
    RatMatrix,
    exact_rank,
    kappa_enclosure_norm,
    kappa_enclosure_sigma,
    max_norm,
    op_norm_bounds,
    sigma_max_estimate,
    sigma_min_estimate,
)
from .scalars import ceil_log2, floor_log2, sqrt_enclosure
from .specfact import MatrixPolynomial, SpectralFactor

__all__ = [
    "DiagnosticsReport",
    "SubmatrixConditionReport",
    "jnf_residual",
    "factor_residual",
    "submatrix_condition_check",
    "kappa_ceilings",
    "eq4_check",
    "DEFAULT_KAPPA_CONSTANT",
]

#: C_kappa in the jnf condition ceiling log2(kappa) <= C * a * n^3 * (1+log2 n)^2.
DEFAULT_KAPPA_CONSTANT = 8


@dataclass(frozen=True)
class DiagnosticsReport:
    """Bundle of certified measurements against their ceilings.

    ``bound_ceilings`` maps a name to (measured_log2, ceiling_log2); the
    ``passed`` flag is the conjunction of every exact ceiling comparison
    (performed on the rational values, not on the logarithms).
    """

    residual_max_norm: Optional[mpq]
    kappa_enclosures: dict
    bound_ceilings: dict
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "residual_max_norm": None
            if self.residual_max_norm is None
            else str(self.residual_max_norm),
            "kappa_enclosures": {
                k: [str(lo), str(hi)] for k, (lo, hi) in self.kappa_enclosures.items()
            },
            "bound_ceilings": {
                k: [int(m), int(c)] for k, (m, c) in self.bound_ceilings.items()
            },
            "pass": self.passed,
        }


def jnf_residual(a: RatMatrix, j: ApproxJNF) -> mpq:
    """Exact ||A V_hat - V_hat J_hat||_max.

    ``a`` must be the integer matrix the JNF was computed for (for the
    rational path, the numerator matrix q * (A/q), matching the numerator
    Jordan form stored in the blocks).
    """
    if a.rows != j.dimension or a.cols != j.dimension:
        raise ValueError("dimension mismatch")
    v = j.v_hat.to_rat()
    return max_norm(a @ v - v @ j._j_numerator_rational())


def factor_residual(p: MatrixPolynomial, q_hat: SpectralFactor) -> mpq:
    """Exact coefficient-wise ||P - Q_hat*(x) Q_hat(x)||_max.

    Q*(x) carries the conjugate-transposed coefficients at the same powers;
    the product is an exact rational convolution, so the returned residual
    has no arithmetic error of its own.
    """
    if p.degree != 2 * q_hat.degree:
        raise ValueError("degree(P) must be twice degree(Q)")
    q = q_hat.all_coeffs_rational()
    qs = [c.conj_transpose() for c in q]
    d = q_hat.degree
    p_all = p.all_coeffs()
    worst = mpq(0)
    for k in range(2 * d + 1):
        acc = None
        for i in range(max(0, k - d), min(d, k) + 1):
            term = qs[i] @ q[k - i]
            acc = term if acc is None else acc + term
        worst = max(worst, max_norm(acc - p_all[k]))
    return worst


@dataclass(frozen=True)
class SubmatrixConditionReport:
    """Certified data for one W_D-vs-W_k smallest-singular-value check."""

    sigma_wd: tuple
    sigma_wk: tuple
    bound_factor: tuple
    rank_deficient: bool
    inequality_confirmed: bool
    certified_violation: bool


def _norm_k_lower_bound(k: RatMatrix, target_bits: int):
    """Certified lower bound for the operator norm ||K||."""
    lo = max_norm(k)  # every entry magnitude bounds ||K|| from below
    if lo >= 1:
        return lo
    s_lo, _ = sigma_max_estimate(k, target_bits=target_bits)
    return max(lo, s_lo)


def submatrix_condition_check(
    y: RatMatrix, k_mat: RatMatrix, k: int, *, target_bits: int = 64
) -> SubmatrixConditionReport:
    """Check sigma_D(W_D) >= sigma_D(W_k) / (sqrt(k) (4||K||)^(D(k-D+1))).

    W_j stacks the block rows Y, YK, ..., YK^(j-1); D is the column count.
    Requires a certified lower bound ||K|| >= 1.  When W_D is exactly rank
    deficient, W_k is too (each extra block row is Y K^j, and K^j acts within
    the same column space by Cayley-Hamilton), so both sides vanish and the
    inequality holds with exact zeros.
    """
    d_dim = k_mat.rows
    if not k_mat.is_square() or y.cols != d_dim:
        raise ValueError("Y must be n x D and K must be D x D")
    if k < d_dim:
        raise ValueError("need k >= D")
    if _norm_k_lower_bound(k_mat, target_bits) < 1:
        raise ValueError("precondition ||K|| >= 1 could not be certified")

    blocks = [y]
    for _ in range(k - 1):
        blocks.append(blocks[-1] @ k_mat)
    w_k = blocks[0]
    for blk in blocks[1:]:
        w_k = w_k.vstack(blk)
    w_d = blocks[0]
    for blk in blocks[1:d_dim]:
        w_d = w_d.vstack(blk)

    if exact_rank(w_d) < d_dim:
        if exact_rank(w_k) >= d_dim:
            # mathematically impossible; would certify a violation
            return SubmatrixConditionReport(
                sigma_wd=(mpq(0), mpq(0)),
                sigma_wk=(mpq(0), mpq(1)),
                bound_factor=(mpq(1), mpq(1)),
                rank_deficient=True,
                inequality_confirmed=False,
                certified_violation=True,
            )
        zero = (mpq(0), mpq(0))
        return SubmatrixConditionReport(
            sigma_wd=zero,
            sigma_wk=zero,
            bound_factor=(mpq(1), mpq(1)),
            rank_deficient=True,
            inequality_confirmed=True,
            certified_violation=False,
        )

    s_wd = sigma_min_estimate(w_d, target_bits=target_bits)
    s_wk = sigma_min_estimate(w_k, target_bits=target_bits)
    nk_lo, nk_hi = sigma_max_estimate(k_mat, target_bits=target_bits)
    nk_lo = max(nk_lo, _norm_k_lower_bound(k_mat, target_bits))
    e = d_dim * (k - d_dim + 1)
    sk_lo, sk_hi = sqrt_enclosure(mpq(k), 64)
    factor = (sk_lo * (4 * nk_lo) ** e, sk_hi * (4 * nk_hi) ** e)

    confirmed = s_wd[0] * factor[0] >= s_wk[1]
    violation = s_wd[1] * factor[1] < s_wk[0]
    return SubmatrixConditionReport(
        sigma_wd=s_wd,
        sigma_wk=s_wk,
        bound_factor=factor,
        rank_deficient=False,
        inequality_confirmed=confirmed,
        certified_violation=violation,
    )


def _log2_int_upper(x: mpq) -> int:
    """Smallest integer e with x <= 2^e (x > 0)."""
    return int(ceil_log2(x))


def kappa_ceilings(
    run: Union[ApproxJNF, SpectralFactor],
    *,
    c_kappa: int = DEFAULT_KAPPA_CONSTANT,
) -> DiagnosticsReport:
    """Measured condition enclosures against the configured ceilings.

    For a JNF run the ceiling is log2(kappa(V_hat)) <= C * a * n^3 *
    (1 + floor(log2 n))^2 (the floor makes the check at least as strict as
    the stated (1+log2 n)^2).  For a factorization run the ceiling is the
    explicit right-hand side kappa(V) * sqrt(2dn) * (4 + 4||C_P||)^(dn(dn+1))
    evaluated with certified upper bounds; kappa(V) is measured on the
    rounded eigenvector matrix the selection actually used.

    The ``passed`` flag compares exact rationals; the log2 fields are
    integer summaries for human consumption.
    """
    if isinstance(run, ApproxJNF):
        if run._input is None:
            raise ValueError("diagnostics need the originating matrix")
        n = run.dimension
        a = max(1, run._input.bit_length_a())
        diag = run.diagnostics
        lo, hi = diag["kappa_V_enclosure"]
        ceiling_log2 = c_kappa * a * n**3 * (1 + int(floor_log2(mpq(n)))) ** 2
        ok = hi <= mpq(mpz(1) << ceiling_log2)
        return DiagnosticsReport(
            residual_max_norm=diag["residual_max_norm"],
            kappa_enclosures={"kappa_V": (lo, hi)},
            bound_ceilings={"kappa_V": (_log2_int_upper(hi), ceiling_log2)},
            passed=ok,
        )
    if isinstance(run, SpectralFactor):
        inner = run._inner
        if inner is None or run._input_poly is None:
            raise ValueError("diagnostics need the originating run data")
        diag = run.diagnostics
        vge_lo, vge_hi = diag["kappa_Vge_enclosure"]
        v_rounded = inner.v_hat.round_to(run.working_bits).to_rat()
        kv_lo, kv_hi = kappa_enclosure_norm(v_rounded)
        dn = run.degree * run.n
        c_p = inner._input.scale(mpq(1, inner.eigen_den))
        _, cp_hi = op_norm_bounds(c_p)
        _, root_hi = sqrt_enclosure(mpq(2 * dn), 64)
        rhs = kv_hi * root_hi * (4 + 4 * cp_hi) ** (dn * (dn + 1))
        ok = vge_hi <= rhs
        return DiagnosticsReport(
            residual_max_norm=diag["factor_residual"],
            kappa_enclosures={
                "kappa_V": (kv_lo, kv_hi),
                "kappa_Vge": (vge_lo, vge_hi),
            },
            bound_ceilings={"kappa_Vge": (_log2_int_upper(vge_hi), _log2_int_upper(rhs))},
            passed=ok,
        )
    raise TypeError("expected an ApproxJNF or SpectralFactor run")


def eq4_check(m: RatMatrix, e: RatMatrix, *, target_bits: int = 64) -> dict:
    """Perturbation inequality kappa(M+E) <= kappa(M)(1+t)/(1-t), t = ||E|| ||M^-1||.

    Uses sigma-based (2-norm) enclosures throughout.  Returns a dict with
    the enclosures plus ``confirmed`` / ``certified_violation`` flags; the
    precondition t <= 1/2 is enforced on the upper endpoint, so instances
    that cannot certify it raise ValueError (regenerate the instance).
    """
    e_lo, e_hi = sigma_max_estimate(e, target_bits=target_bits)
    s_lo, s_hi = sigma_min_estimate(m, target_bits=target_bits)
    if s_lo <= 0:
        raise ValueError("M must be certifiably invertible")
    t_lo, t_hi = e_lo / s_hi, e_hi / s_lo
    if t_hi > mpq(1, 2):
        raise ValueError("precondition ||E|| ||M^-1|| <= 1/2 not certified")
    k_m = kappa_enclosure_sigma(m, target_bits=target_bits)
    k_me = kappa_enclosure_sigma(m + e, target_bits=target_bits)
    rhs_lo = k_m[0] * (1 + t_lo) / (1 - t_lo)
    rhs_hi = k_m[1] * (1 + t_hi) / (1 - t_hi)
    return {
        "kappa_m": k_m,
        "kappa_m_plus_e": k_me,
        "t": (t_lo, t_hi),
        "rhs": (rhs_lo, rhs_hi),
        "confirmed": k_me[1] <= rhs_lo,
        "certified_violation": k_me[0] > rhs_hi,
    }
