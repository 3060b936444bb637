"""
Spectral factorization P(x) = Q*(x) Q(x) with certificates
==========================================================

"""

from gmpy2 import mpq

from jordanforge import (
    MatrixPolynomial,
    NotPsdCertificate,
    RatMatrix,
    evaluate_and_check_psd_sample,
    factor_residual,
    spectral_factor,
)

# --- a PSD example ------------------------------------------------------------------
# P(x) = (x^2+1) I_2 + a Hermitian cross term; built as Q*Q with
# Q(x) = x I - M for M = [[i, 1], [0, i]], so the true factor is known.
m_re = [[0, 1], [0, 0]]
m_im = [[1, 0], [0, 1]]
q0 = RatMatrix(m_re, m_im, 1).scale(-1)          # Q = xI + Q0 with Q0 = -M
q0_star = q0.conj_transpose()
p0 = q0_star @ q0
p1 = q0 + q0_star                                 # coefficient of x in Q*Q
p = MatrixPolynomial([p0, p1])

def fmt(matrix):
    def one(i, j):
        e = matrix.entry(i, j)
        sign = "+" if e.im >= 0 else "-"
        return f"{e.re}{sign}{abs(e.im)}i"

    return [[one(i, j) for j in range(matrix.cols)] for i in range(matrix.rows)]


print("P coefficients (exact rationals):")
for k, c in enumerate(p.all_coeffs()):
    print(f"  x^{k}: {fmt(c)}")

fac = spectral_factor(p, 64)
print(fac)

# The computed factor's constant coefficient should match Q0 to ~64 bits;
# here the arithmetic closes exactly because the eigenvalues are Gaussian
# integers.
err = max(
    abs(x) for row in (fac.coeffs[0].to_rat() - q0).re for x in row
)
print("constant-coefficient error:", float(err))
print("factor residual ||P - Q*Q||:", float(factor_residual(p, fac)))

# --- a rejected example ---------------------------------------------------------------
# P(x) = x^2 - 1 dips negative on (-1, 1), so no factorization exists.  The
# solver returns a certificate instead: an odd-size Jordan block at a real
# latent root, which is impossible for PSD input.
bad = MatrixPolynomial.from_scalars([-1, 0])
out = spectral_factor(bad, 64)
assert isinstance(out, NotPsdCertificate)
lam_re, lam_im = out.eigenvalue_rational()
print("certificate:", out.reason, "block size", out.block_size, "at x =", float(lam_re))

# The certificate names a point where indefiniteness is checkable by exact
# arithmetic: x^2 - 1 dips negative just inside whichever root the
# certificate reports, so probe a quarter step toward the origin.
probe = lam_re + mpq(1, 4) if lam_re < 0 else lam_re - mpq(1, 4)
value, has_negative = evaluate_and_check_psd_sample(bad, probe)
print(f"P({probe}) = {value.entry(0, 0).re} -> negative eigenvalue: {has_negative}")
