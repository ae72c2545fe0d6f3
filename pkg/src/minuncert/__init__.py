"""Minimum-uncertainty products for multipartite continuous-variable states.

Closed forms, quadrature oracles and spectral tools for the family of
states minimizing products of quadrature-combination variances, with
entanglement detection thresholds for two, four and six parties.
"""

from .bipartite import (
    PRODUCT_INFIMUM_2,
    SEPARABLE_BOUND_2,
    RadialProfile,
    UncertaintyReport,
    XiParameter,
    coeff,
    f_profile,
    fock_coeff,
    fock_normalization_defect,
    overlap,
    r_closed,
    residual_norm_sq,
    shell_identity_check,
    shell_sum,
    uncertainty_product,
    wavefunction,
)
from .multipartite import (
    PRODUCT_INFIMUM_4,
    PRODUCT_INFIMUM_6,
    SEPARABLE_BOUND_4,
    SEPARABLE_BOUND_6,
    OdeFamilyProfile,
    OperatorCoefficients,
    alpha_beta_certificate,
    b_coefficients,
    functional_z,
    g_family,
    h_family,
    pascal_matrix_pair,
    pochhammer_root_residual,
    z4_product,
    z6_product,
)
from .quadrature import (
    IntegrationResult,
    QuadratureError,
    integrate_2d,
    integrate_finite,
    integrate_finite_vector,
    integrate_semi_infinite,
)
from .simple_state import SimpleStateSolution, c1_c2, minimize_q0, q0
from .spectral import (
    BandedSymmetricForm,
    EigenPair,
    build_q_form,
    build_r_form,
    min_eigenpair,
    quadratic_form_value,
)
from .specfun import Tolerance

__version__ = "0.1.0"

__all__ = [
    "Tolerance",
    "XiParameter",
    "RadialProfile",
    "UncertaintyReport",
    "SEPARABLE_BOUND_2",
    "PRODUCT_INFIMUM_2",
    "SEPARABLE_BOUND_4",
    "PRODUCT_INFIMUM_4",
    "SEPARABLE_BOUND_6",
    "PRODUCT_INFIMUM_6",
    "coeff",
    "r_closed",
    "uncertainty_product",
    "residual_norm_sq",
    "f_profile",
    "wavefunction",
    "overlap",
    "fock_coeff",
    "fock_normalization_defect",
    "shell_sum",
    "shell_identity_check",
    "OperatorCoefficients",
    "OdeFamilyProfile",
    "b_coefficients",
    "pascal_matrix_pair",
    "pochhammer_root_residual",
    "functional_z",
    "g_family",
    "h_family",
    "z4_product",
    "z6_product",
    "alpha_beta_certificate",
    "SimpleStateSolution",
    "c1_c2",
    "q0",
    "minimize_q0",
    "BandedSymmetricForm",
    "EigenPair",
    "build_q_form",
    "build_r_form",
    "min_eigenpair",
    "quadratic_form_value",
    "IntegrationResult",
    "QuadratureError",
    "integrate_finite",
    "integrate_finite_vector",
    "integrate_semi_infinite",
    "integrate_2d",
    "__version__",
]
