"""jordanforge: certified approximate Jordan forms and spectral factorizations.

All arithmetic is exact (gmpy2 integers/rationals) or dyadic fixed point
with explicit exponents, so every error bound a routine reports is a
theorem about the returned bits, not a float estimate.
"""

from .certify import (
    DiagnosticsReport,
    SubmatrixConditionReport,
    eq4_check,
    factor_residual,
    jnf_residual,
    kappa_ceilings,
    submatrix_condition_check,
)
from .frobenius import CompanionBlock, FrobeniusDecomposition, frobenius_form
from .jnf import ApproxJNF, JordanBlockSpec, jnf, jnf_rational, working_precision
from .linalg import (
    DyadicComplexMatrix,
    IntMatrix,
    RatMatrix,
    SingularMatrixError,
    char_poly,
    exact_inverse,
    exact_rank,
    kappa_enclosure_norm,
    kappa_enclosure_sigma,
    max_norm,
    op_norm_bounds,
)
from .polynomials import IntPolynomial, square_free_decomposition
from .rootfinder import (
    RootCluster,
    approx_roots_with_mults,
    mahler_mingap_bound,
    min_working_bits,
    root_bound,
)
from .scalars import Dyadic, DyadicComplex, RationalComplex, sqrt_enclosure
from .specfact import (
    ConjugatePairingError,
    MatrixPolynomial,
    NotPsdCertificate,
    SingularVgeError,
    SpectralFactor,
    evaluate_and_check_psd_sample,
    nonmonic_spectral_factor,
    spectral_factor,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxJNF",
    "CompanionBlock",
    "ConjugatePairingError",
    "DiagnosticsReport",
    "Dyadic",
    "DyadicComplex",
    "DyadicComplexMatrix",
    "FrobeniusDecomposition",
    "IntMatrix",
    "IntPolynomial",
    "JordanBlockSpec",
    "MatrixPolynomial",
    "NotPsdCertificate",
    "RatMatrix",
    "RationalComplex",
    "RootCluster",
    "SingularMatrixError",
    "SingularVgeError",
    "SpectralFactor",
    "SubmatrixConditionReport",
    "approx_roots_with_mults",
    "char_poly",
    "eq4_check",
    "evaluate_and_check_psd_sample",
    "exact_inverse",
    "exact_rank",
    "factor_residual",
    "frobenius_form",
    "jnf",
    "jnf_rational",
    "jnf_residual",
    "kappa_ceilings",
    "kappa_enclosure_norm",
    "kappa_enclosure_sigma",
    "mahler_mingap_bound",
    "max_norm",
    "min_working_bits",
    "nonmonic_spectral_factor",
    "op_norm_bounds",
    "root_bound",
    "spectral_factor",
    "sqrt_enclosure",
    "square_free_decomposition",
    "submatrix_condition_check",
    "working_precision",
    "__version__",
]
