"""Exact heights, certified angles and exponent experiments for explicitly constructed subspaces."""

from ._kernels import BACKEND
from .angles import AngleReport, omega, psi_min_bruteforce, psi_profile, psi_profile_exact_oracle, truncation_error_bound
from .construction import (
    A_truncated,
    B_subspace,
    C_subspace,
    ConstructionParams,
    D_subspace,
    DigitTable,
    TruncatedA,
    compute_Cd,
    digit_support,
    sigma_trunc,
    validate_alpha,
)
from .experiments import (
    ExponentEstimate,
    ExponentRow,
    best_approx_enum_n2,
    measure_family,
    select_N_large_e,
    select_N_small_e,
    shortest_vector_enum,
    theorem_mu,
    verify_lemmas,
)
from .exterior import Multivector, norm_sq, primitive_normalize, wedge
from .lattice import RationalSubspace, height, ideal_norm, intersect, sum_spaces, z_basis
from .numeric_core import BigFloat, InfeasiblePrecision, PrecisionBudget, PrecisionError, floor_pow, required_precision

__version__ = "0.1.0"

__all__ = [
    "A_truncated",
    "AngleReport",
    "B_subspace",
    "BACKEND",
    "BigFloat",
    "C_subspace",
    "ConstructionParams",
    "D_subspace",
    "DigitTable",
    "ExponentEstimate",
    "ExponentRow",
    "InfeasiblePrecision",
    "Multivector",
    "PrecisionBudget",
    "PrecisionError",
    "RationalSubspace",
    "TruncatedA",
    "best_approx_enum_n2",
    "compute_Cd",
    "digit_support",
    "floor_pow",
    "height",
    "ideal_norm",
    "intersect",
    "measure_family",
    "norm_sq",
    "omega",
    "primitive_normalize",
    "psi_min_bruteforce",
    "psi_profile",
    "psi_profile_exact_oracle",
    "required_precision",
    "select_N_large_e",
    "select_N_small_e",
    "shortest_vector_enum",
    "sigma_trunc",
    "sum_spaces",
    "theorem_mu",
    "truncation_error_bound",
    "validate_alpha",
    "verify_lemmas",
    "wedge",
    "z_basis",
]
