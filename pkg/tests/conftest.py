"""Shared instance builders for the test suite.

Everything here is exact: random integer matrices, integer similarity
conjugations with unit determinant, and Gaussian-integer matrix
polynomials whose determinant provably has all roots in the open upper
half plane (built by conjugating upper-triangular matrices whose diagonal
already lives there).
"""

import random

from gmpy2 import mpq, mpz

from jordanforge import (
    IntMatrix,
    IntPolynomial,
    MatrixPolynomial,
    RatMatrix,
    exact_inverse,
)


def pow2(k: int) -> mpq:
    """2**k as an exact rational (k may be negative)."""
    if k >= 0:
        return mpq(mpz(1) << k)
    return mpq(1, mpz(1) << (-k))


def rand_int_matrix(rng: random.Random, n: int, bound: int) -> IntMatrix:
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)])


def unimodular_int_matrix(rng: random.Random, n: int, shears: int = 6, bound: int = 2) -> IntMatrix:
    """Product of integer shear matrices: always det = +-1."""
    rows = [[mpq(1 if i == j else 0) for j in range(n)] for i in range(n)]
    m = RatMatrix.from_rows(rows)
    for _ in range(shears):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        c = rng.randint(-bound, bound)
        shear = [[mpq(1 if r == s else 0) for s in range(n)] for r in range(n)]
        shear[i][j] = mpq(c)
        m = m @ RatMatrix.from_rows(shear)
    return IntMatrix([[int(m.entry(i, j).re) for j in range(n)] for i in range(n)])


def jordan_block_matrix(eigenvalues_sizes) -> RatMatrix:
    """Exact integer Jordan matrix from a [(eigenvalue, size), ...] list."""
    n = sum(s for _, s in eigenvalues_sizes)
    rows = [[mpq(0)] * n for _ in range(n)]
    at = 0
    for lam, size in eigenvalues_sizes:
        for r in range(size):
            rows[at + r][at + r] = mpq(lam)
            if r + 1 < size:
                rows[at + r][at + r + 1] = mpq(1)
        at += size
    return RatMatrix.from_rows(rows)


def sjs_instance(rng: random.Random, max_blocks: int = 3):
    """A = S J S^-1 with integer S of unit determinant and prescribed J."""
    spec = []
    n = 0
    for _ in range(rng.randint(1, max_blocks)):
        size = rng.randint(1, 3)
        if n + size > 6:
            break
        spec.append((rng.randint(-4, 4), size))
        n += size
    if not spec:
        spec = [(rng.randint(-4, 4), 1)]
        n = 1
    j = jordan_block_matrix(spec)
    s = unimodular_int_matrix(rng, n)
    a = s @ j @ exact_inverse(s)
    assert a.is_integral()
    return IntMatrix([[int(a.entry(i, k).re) for k in range(n)] for i in range(n)]), spec


# ---------------------------------------------------------------------------
# Gaussian-integer matrices with spectrum in the open upper half plane.
# ---------------------------------------------------------------------------

_UHP_DIAGONAL = [(0, 1), (1, 1), (-1, 1), (0, 2), (1, 2), (-1, 2), (2, 1)]


def uhp_gaussian_matrix(rng: random.Random, n: int) -> RatMatrix:
    """Gaussian-integer matrix whose eigenvalues all have Im >= 1.

    Upper triangular with diagonal drawn from a fixed upper-half-plane set,
    then conjugated by a Gaussian-integer unit-determinant shear so the
    result is not trivially triangular. Conjugation preserves the spectrum
    and integrality.
    """
    grid = [[(mpq(0), mpq(0)) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        re, im = rng.choice(_UHP_DIAGONAL)
        grid[i][i] = (mpq(re), mpq(im))
        for j in range(i + 1, n):
            grid[i][j] = (mpq(rng.randint(-1, 1)), mpq(rng.randint(-1, 1)))
    t = RatMatrix.from_rows(grid)
    if n == 1:
        return t
    shear = [[(mpq(1 if r == s else 0), mpq(0)) for s in range(n)] for r in range(n)]
    i = rng.randrange(n)
    j = (i + 1 + rng.randrange(n - 1)) % n
    shear[i][j] = (mpq(rng.randint(-1, 1)), mpq(rng.randint(-1, 1)))
    u = RatMatrix.from_rows(shear)
    out = u @ t @ exact_inverse(u)
    assert out.den == 1
    return out


def _poly_coeff_mul(a, b, n):
    """Convolution of two lists of n x n RatMatrix coefficients."""
    out = [RatMatrix.zeros(n, n) for _ in range(len(a) + len(b) - 1)]
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai @ bj
    return out


def monic_uhp_factor(rng: random.Random, n: int, d: int):
    """Monic degree-d Gaussian-integer Q(x) with det Q roots in the open UHP.

    Returns the full coefficient list [Q_0, ..., Q_{d-1}, I].
    """
    factors = []
    for _ in range(d):
        m = uhp_gaussian_matrix(rng, n)
        factors.append([m.scale(mpq(-1)), RatMatrix.identity(n)])
    coeffs = factors[0]
    for f in factors[1:]:
        coeffs = _poly_coeff_mul(coeffs, f, n)
    return coeffs


def psd_from_factor(q_full):
    """P = Q* Q as a monic MatrixPolynomial, from Q's full coefficient list."""
    n = q_full[0].rows
    q_star = [c.conj_transpose() for c in q_full]
    p_full = _poly_coeff_mul(q_star, q_full, n)
    assert p_full[-1] == RatMatrix.identity(n)
    return MatrixPolynomial(p_full[:-1])


def int_poly_from_root_plan(rng: random.Random):
    """Integer polynomial with constructed roots of known kinds.

    Mixes rational roots, quadratic irrationals x^2 - k, and complex
    conjugate pairs, with multiplicities up to 3, keeping the degree small.

    Returns (polynomial, plan) where plan maps a symbolic root identity to
    its total multiplicity:

        ("rat", r)          the integer root r
        ("sqrt", k, s)      s * sqrt(k), s in {+1, -1}
        ("cpair", b, c, s)  root of x^2 + b x + c with sign(Im) = s

    Distinct identities name distinct true roots, so the plan is an exact
    independent record of the root structure.
    """
    p = IntPolynomial([1])
    plan = {}
    degree = 0
    while degree < 4:
        kind = rng.randrange(3)
        mult = rng.randint(1, 3)
        if kind == 0:
            r = rng.randint(-5, 5)
            f = IntPolynomial([-r, 1])
            ids = [("rat", r)]
        elif kind == 1:
            k = rng.choice([2, 3, 5, 6, 7])
            f = IntPolynomial([-k, 0, 1])
            ids = [("sqrt", k, 1), ("sqrt", k, -1)]
        else:
            b = rng.randint(-3, 3)
            c = rng.randint(1, 9)
            if b * b >= 4 * c:
                c = b * b // 4 + rng.randint(1, 3)
            f = IntPolynomial([c, b, 1])
            ids = [("cpair", b, c, 1), ("cpair", b, c, -1)]
        taken = 0
        for _ in range(mult):
            if degree + f.degree > 7:
                break
            p = p * f
            degree += f.degree
            taken += 1
        for root_id in ids:
            if taken:
                plan[root_id] = plan.get(root_id, 0) + taken
    return p, plan
