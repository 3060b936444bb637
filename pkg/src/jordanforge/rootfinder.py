"""Certified roots with exact multiplicities for integer polynomials.

The pipeline:

1. strip zero roots exactly (trailing coefficients);
2. square-free decomposition (Yun) — multiplicities become exact structure,
   every remaining root problem is simple;
3. per square-free factor: exact closed forms for degree <= 2, a gated
   rational-root pre-pass, and Aberth-Ehrlich simultaneous iteration in
   precision-doubling arbitrary-precision floats for the rest;
4. a posteriori certification that is entirely exact: Weierstrass-style
   inclusion disks D(z_i, n|W_i|) with |W_i| computed from exact dyadic
   evaluation — disk radii and pairwise disjointness are compared through
   squared magnitudes, so no irrational number is ever needed;
5. canonical post-processing: certified snapping of near-real roots to the
   real axis (licensed by the Mahler gap bound), bitwise conjugate pairing
   for real inputs, and a deterministic sort.

Every returned value is a complex dyadic with the shared exponent b'; each
cluster is within 2**-b' of the true root it represents, and multiplicities
are exact, never inferred from proximity.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from gmpy2 import mpq, mpz

from .polynomials import IntPolynomial, square_free_decomposition
from .scalars import DyadicComplex, ceil_log2, sqrt_enclosure

__all__ = [
    "RootCluster",
    "mahler_mingap_bound",
    "root_bound",
    "approx_roots_with_mults",
    "min_working_bits",
]

_RATIONAL_PREPASS_LIMIT = 1 << 20


@dataclass(frozen=True)
class RootCluster:
    """One distinct root: dyadic approximation plus exact multiplicity."""

    value: DyadicComplex
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")


def mahler_mingap_bound(p: IntPolynomial) -> "mpq":
    """Certified lower bound 2**-(a*n + ceil(2n log2 n)) on the minimum gap
    between distinct roots.  Requires degree >= 2."""
    n = p.degree
    if n < 2:
        raise ValueError("minimum-gap bound needs degree >= 2")
    a = p.bit_length_a()
    exponent = a * n + ceil_log2(mpz(n) ** (2 * n))
    return mpq(1, mpz(1) << exponent)


def root_bound(p: IntPolynomial) -> "mpq":
    """Upper bound on root magnitudes: sum of |coefficients| / |leading|."""
    if p.is_zero():
        raise ValueError("root bound of the zero polynomial")
    total = mpz(0)
    for c in p.coeffs:
        total += abs(c)
    return mpq(total, abs(p.leading()))


def min_working_bits(p: IntPolynomial) -> int:
    """Smallest admissible b' for this polynomial: a*n + ceil(4n log2 n)."""
    n = p.degree
    if n < 1:
        raise ValueError("degree must be at least 1")
    a = p.bit_length_a()
    return a * n + ceil_log2(mpz(n) ** (4 * n))


def approx_roots_with_mults(p: IntPolynomial, b_prime: int) -> list[RootCluster]:
    """Certified clusters (value within 2**-b' of a true root, exact
    multiplicity) for a nonzero integer polynomial of degree >= 1.

    Rejects b' below the a*n + 4n*log2(n) precondition.
    """
    if p.is_zero() or p.degree < 1:
        raise ValueError("root finding needs a nonzero polynomial of degree >= 1")
    need = min_working_bits(p)
    if b_prime < need:
        raise ValueError(
            f"b' = {b_prime} is below the admissible minimum {need} "
            "(= a*n + ceil(4*n*log2(n)) for this polynomial)"
        )
    degree = p.degree
    clusters: list[RootCluster] = []
    k = p.trailing_zero_count()
    if k:
        clusters.append(RootCluster(DyadicComplex.zero(b_prime), k))
        p = p.shift_down(k)
    if p.degree >= 1:
        for factor, mult in square_free_decomposition(p):
            if factor.degree < 1:
                continue
            for value in _simple_roots(factor, b_prime):
                clusters.append(RootCluster(value, mult))
    total = sum(c.multiplicity for c in clusters)
    if total != degree:
        raise AssertionError("cluster multiplicities do not sum to the degree")
    clusters.sort(key=lambda c: c.value.as_rational_pair())
    return clusters


# ---------------------------------------------------------------------------
# Simple roots of a primitive square-free integer polynomial.
# ---------------------------------------------------------------------------

def _simple_roots(f: IntPolynomial, b_prime: int) -> list[DyadicComplex]:
    values: list[DyadicComplex] = []
    rationals, f = _rational_root_prepass(f)
    for r in rationals:
        values.append(DyadicComplex.from_rationals(r, mpq(0), b_prime))
    if f.degree == 1:
        values.append(
            DyadicComplex.from_rationals(mpq(-f[0], f[1]), mpq(0), b_prime)
        )
    elif f.degree == 2:
        values.extend(_quadratic_roots(f, b_prime))
    elif f.degree >= 3:
        values.extend(_aberth_certified(f, b_prime))
    return values


def _divisors(n) -> list:
    n = abs(mpz(n))
    out = []
    d = mpz(1)
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
        d += 1
    return sorted(out)


def _rational_root_prepass(f: IntPolynomial):
    """Divide out exact rational roots when the constant/leading coefficients
    are small enough to enumerate divisors.  Returns (roots, deflated)."""
    roots: list = []
    while f.degree >= 1:
        p0, lead = f[0], f.leading()
        if p0 == 0:
            # square-free factors are never divisible by x here (zero roots
            # were stripped from the original polynomial), but guard anyway
            roots.append(mpq(0))
            f = f.shift_down(1)
            continue
        if abs(p0) > _RATIONAL_PREPASS_LIMIT or abs(lead) > _RATIONAL_PREPASS_LIMIT:
            break
        found = None
        for num in _divisors(p0):
            for den in _divisors(lead):
                for sign in (1, -1):
                    cand = mpq(sign * num, den)
                    if f(cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        f = _deflate(f, found)
    return roots, f


def _deflate(f: IntPolynomial, root) -> IntPolynomial:
    """Exact synthetic division by (x - root), then primitivize."""
    coeffs = [mpq(c) for c in f.coeffs]
    out = []
    acc = mpq(0)
    for c in reversed(coeffs):
        acc = acc * root + c if out else mpq(c)
        out.append(acc)
    # out holds Horner partial sums high-to-low; the last is f(root) == 0
    if out[-1] != 0:
        raise AssertionError("deflation by a non-root")
    quotient = list(reversed(out[:-1]))
    den = mpz(1)
    for q in quotient:
        den = den * q.denominator // _gcd(den, q.denominator)
    ints = [mpz(q * den) for q in quotient]
    return IntPolynomial(ints).primitive()


def _gcd(a, b):
    from .polynomials import gcd_mpz

    return gcd_mpz(a, b)


def _quadratic_roots(f: IntPolynomial, b_prime: int) -> list[DyadicComplex]:
    """Exact quadratic formula with certified square-root enclosures."""
    c, b, a = mpq(f[0]), mpq(f[1]), mpq(f[2])
    disc = b * b - 4 * a * c
    bits = b_prime + 6
    if disc >= 0:
        lo, hi = sqrt_enclosure(disc, bits)
        mid = (lo + hi) / 2
        r1 = (-b + mid) / (2 * a)
        r2 = (-b - mid) / (2 * a)
        # |mid - sqrt(disc)| <= 2**-(bits+1); division by 2a >= 2 shrinks it
        return [
            DyadicComplex.from_rationals(r1, mpq(0), b_prime),
            DyadicComplex.from_rationals(r2, mpq(0), b_prime),
        ]
    lo, hi = sqrt_enclosure(-disc, bits)
    mid = (lo + hi) / 2
    re = -b / (2 * a)
    im = mid / (2 * abs(a))
    z = DyadicComplex.from_rationals(re, im, b_prime)
    zbar = DyadicComplex(z.re_num, -z.im_num, z.exp)
    if a < 0:
        return [zbar, z]
    return [z, zbar]


# ---------------------------------------------------------------------------
# Aberth-Ehrlich iteration with exact Weierstrass-disk certification.
# ---------------------------------------------------------------------------

def _mpf_exact(x) -> "tuple[mpz, int]":
    """mpmath mpf -> (numerator, nonnegative exponent) with x = num * 2**-exp."""
    sign, man, e, _bc = x._mpf_
    man = mpz(man)
    if sign:
        man = -man
    if e >= 0:
        return (man << e, 0)
    return (man, -e)


def _zs_to_dyadic(zs) -> list[DyadicComplex]:
    pairs = []
    max_exp = 0
    for z in zs:
        rn, re_ = _mpf_exact(z.real)
        inn, ie = _mpf_exact(z.imag)
        pairs.append((rn, re_, inn, ie))
        max_exp = max(max_exp, re_, ie)
    out = []
    for rn, re_, inn, ie in pairs:
        out.append(
            DyadicComplex(rn << (max_exp - re_), inn << (max_exp - ie), max_exp)
        )
    return out


def _aberth_certified(f: IntPolynomial, b_prime: int) -> list[DyadicComplex]:
    n = f.degree
    radius = root_bound(f)
    coeffs = [int(c) for c in f.coeffs]
    dcoeffs = [int(c) * (i + 1) for i, c in enumerate(coeffs[1:])]
    prec = 192
    zs = None
    cap = 64 * (b_prime + f.bit_length_a() * n + 64)
    while prec <= cap:
        with mpmath.workprec(prec):
            if zs is None:
                zs = _initial_ring(n, radius)
            else:
                zs = [mpmath.mpc(z.real, z.imag) for z in zs]
            zs = _aberth_iterate(coeffs, dcoeffs, zs, prec, n)
        if prec >= b_prime + 32:
            certified = _certify_disks(f, zs, b_prime)
            if certified is not None:
                return certified
        prec *= 2
    raise RuntimeError(
        "root certification did not converge; this indicates a bug, not an "
        "unlucky input (the precision ladder is bounded by theory)"
    )


def _initial_ring(n: int, radius) -> list:
    r = (mpmath.mpf(int(radius.numerator)) / int(radius.denominator)) * mpmath.mpf("1.1")
    out = []
    for j in range(n):
        theta = mpmath.pi * (2 * j + 1) / n + mpmath.mpf(1) / (3 * n + 1)
        out.append(r * mpmath.mpc(mpmath.cos(theta), mpmath.sin(theta)))
    return out


def _poly_eval_mpc(coeffs, z):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _aberth_iterate(coeffs, dcoeffs, zs, prec, n):
    tol = mpmath.mpf(2) ** (-(prec - 16 - n))
    tiny = mpmath.mpf(2) ** (-(prec // 2))
    max_iter = 60 + 12 * n
    for _ in range(max_iter):
        new = list(zs)
        worst = mpmath.mpf(0)
        for i in range(n):
            zi = zs[i]
            fv = _poly_eval_mpc(coeffs, zi)
            dv = _poly_eval_mpc(dcoeffs, zi)
            if dv == 0:
                new[i] = zi + tiny
                worst = max(worst, abs(tiny))
                continue
            newton = fv / dv
            s = mpmath.mpc(0)
            collide = False
            for j in range(n):
                if i == j:
                    continue
                diff = zi - zs[j]
                if diff == 0:
                    collide = True
                    break
                s += 1 / diff
            if collide:
                new[i] = zi + tiny
                worst = max(worst, abs(tiny))
                continue
            denom = 1 - newton * s
            step = newton if denom == 0 else newton / denom
            new[i] = zi - step
            worst = max(worst, abs(step))
        zs = new
        if worst < tol:
            break
    return zs


def _certify_disks(f: IntPolynomial, zs, b_prime: int):
    """Exact Weierstrass-disk certification; returns canonical dyadic values
    (rounded to b', snapped, conjugate-paired) or None if not yet certified."""
    n = f.degree
    if any(not (mpmath.isfinite(z.real) and mpmath.isfinite(z.imag)) for z in zs):
        return None
    centers = _zs_to_dyadic(zs)
    lead2 = mpq(f.leading()) ** 2
    # squared disk radii R_i^2 = n^2 |f(z_i)|^2 / (lead^2 prod |z_i - z_j|^2)
    rad2: list = []
    for i in range(n):
        num = f.eval_dyadic_complex(centers[i]).abs_squared().as_rational()
        den = lead2
        for j in range(n):
            if j == i:
                continue
            d2 = (centers[i] - centers[j]).abs_squared().as_rational()
            if d2 == 0:
                return None
            den = den * d2
        rad2.append(mpq(n * n) * num / den)
    limit2 = mpq(1, mpz(1) << (2 * (b_prime + 2)))
    if any(r2 >= limit2 for r2 in rad2):
        return None
    for i in range(n):
        for j in range(i + 1, n):
            d2 = (centers[i] - centers[j]).abs_squared().as_rational()
            if d2 <= 2 * (rad2[i] + rad2[j]):
                return None
    return _canonical_values(f, centers, rad2, b_prime)


def _canonical_values(f, centers, rad2, b_prime):
    n = f.degree
    # certified real snap: if the whole disk is closer to the axis than half
    # the minimum gap, the enclosed root cannot be one of a conjugate pair
    if n >= 2:
        gap = mahler_mingap_bound(f)
        # enclosure width gap/2^64 suffices: a true real root clears the
        # test by ~gap/2 while a complex one misses by ~gap/2, so the
        # coarser (still certified) upper bound cannot flip the decision
        snap_bits = gap.denominator.bit_length() + 64
        snapped = []
        for c, r2 in zip(centers, rad2):
            im = abs(c.im.as_rational())
            _, r_hi = sqrt_enclosure(r2, snap_bits)
            if 2 * (im + r_hi) < gap:
                snapped.append(DyadicComplex(c.re_num, mpz(0), c.exp))
            else:
                snapped.append(c)
        centers = snapped
    values = [c.round_to(b_prime) for c in centers]
    # bitwise conjugate pairing (input has real coefficients by type)
    paired: list = [None] * n
    used = [False] * n
    order = sorted(range(n), key=lambda i: (values[i].as_rational_pair()))
    close = mpq(1, mpz(1) << max(b_prime - 3, 0))
    for i in order:
        if used[i]:
            continue
        vi = values[i]
        if vi.is_real():
            paired[i] = vi
            used[i] = True
            continue
        conj_target = vi.conj().as_rational_pair()
        best = None
        best_d = None
        for j in range(n):
            if used[j] or j == i:
                continue
            rj, ij = values[j].as_rational_pair()
            d = abs(rj - conj_target[0]) + abs(ij - conj_target[1])
            if best is None or d < best_d:
                best, best_d = j, d
        if best is None or best_d >= close:
            raise AssertionError("conjugate partner missing for a complex root")
        if vi.im_num > 0:
            canon, mirror = i, best
        else:
            canon, mirror = best, i
        cv = values[canon]
        paired[canon] = cv
        paired[mirror] = cv.conj()
        used[i] = used[best] = True
    return paired
