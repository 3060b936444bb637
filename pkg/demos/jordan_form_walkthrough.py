"""
Certified Jordan form of an integer matrix, step by step
========================================================

"""

from gmpy2 import mpq

from jordanforge import IntMatrix, jnf, jnf_rational, jnf_residual, kappa_ceilings, max_norm

# A small matrix built to have interesting structure: eigenvalue 2 with a
# size-2 Jordan block, eigenvalue 2 again as a separate 1x1 block, and a
# pair of irrational eigenvalues +-sqrt(3) hiding in the lower corner.
a = IntMatrix(
    [
        [2, 1, 0, 0, 0],
        [0, 2, 0, 0, 0],
        [0, 0, 2, 0, 0],
        [0, 0, 0, 0, 3],
        [0, 0, 0, 1, 0],
    ]
)

# Ask for 64 accurate bits.  The working precision is raised internally far
# beyond that so the forward error provably stays under 2^-64.
run = jnf(a, 64)
print(run)
print("working bits:", run.working_bits)

# The block list is the whole story: (eigenvalue, size) pairs in a canonical
# order, eigenvalues as exact dyadic numbers.
for blk in run.blocks:
    re, im = blk.eigenvalue.as_rational_pair()
    print(f"  block size {blk.size} at {float(re):+.12f}{float(im):+.12f}i")

# Everything is exact rational arithmetic underneath, so the reconstruction
# residual ||A V - V J||_max is a concrete rational number we can look at --
# not a float estimate.  It is far too small for a float, so report its
# magnitude as a power of two.
resid = jnf_residual(a, run)
if resid == 0:
    print("residual: exactly 0")
else:
    log2_resid = resid.numerator.bit_length() - resid.denominator.bit_length()
    print(f"residual: about 2^{log2_resid} (exact rational underneath)")

tol = mpq(1, 2**60) * a.rows**2 * max_norm(run.v_hat) * max_norm(run._j_numerator_rational())
print("documented ceiling:", float(tol), "->", "OK" if resid <= tol else "VIOLATED")

# The conditioning of the eigenvector matrix is certified too: an exact
# rational enclosure of kappa(V), compared against the a-priori ceiling.
report = kappa_ceilings(run)
lo, hi = report.kappa_enclosures["kappa_V"]
print(f"kappa(V) in [{float(lo):.6g}, {float(hi):.6g}], ceiling check: {report.passed}")

# Rational matrices go through the same pipeline after scaling by the common
# denominator: here A/2, whose eigenvalues are simply halved (one value per
# Jordan block).
half = jnf_rational(a, 2, 64)
print("per-block eigenvalues of A/2:", [(float(r), float(i)) for r, i in half.rational_eigenvalues()])
