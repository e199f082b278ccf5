"""tdpair: exact construction and verification of tridiagonal pairs.

Builds the second-eigenvalue-type operator pair on the split basis over
exact rationals (or univariate rational functions), diagonalizes both
operators through explicit change-of-basis coefficient families, computes
the biorthogonal multivariate overlap functions T and U by independent
routes, and verifies every structural identity with zero tolerance.
"""

from .exactfield import (
    FieldElement,
    PoleAtZero,
    Rational,
    RationalFunction,
    ZeroDenominatorPochhammer,
    binomial,
    format_scalar,
    limit_at_zero,
    pfq_terminating,
    pochhammer,
    rational,
    variable_t,
)
from .multiindex import (
    IndexOutOfRange,
    MultiIndex,
    Shape,
    enumerate_box,
    level_histogram,
    partial_sum,
    shape_profile,
)
from .report import CheckResult, VerificationReport
from .tdcore import (
    ExactMatrix,
    InvalidParameters,
    OPERATOR_NAMES,
    TDParameters,
    build_operator,
    eigenvalue,
    parameters_from_json_obj,
    parameters_to_json_obj,
    substituted_for_involution,
    validate_parameters,
    xi,
)
from .cob import (
    BLOCK_FORMS,
    COEFFICIENT_KINDS,
    EIGENBASIS_NAMES,
    StructureViolation,
    block_tridiagonal_form,
    cob_coefficient,
    coefficient_matrix,
    eigenbasis_matrix,
)
from .overlap import (
    LIMIT_KINDS,
    T_METHODS,
    U_METHODS,
    overlap_T,
    overlap_U,
    overlap_limit_kind,
    overlap_table,
    univariate_t_racah,
    univariate_u_balanced,
    univariate_u_racah_normalized,
)
from .verify import (
    CHECK_NAMES,
    DEFAULT_CHECKS,
    SamplingExhausted,
    random_valid_parameters,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # exact scalar arithmetic
    "FieldElement",
    "PoleAtZero",
    "Rational",
    "RationalFunction",
    "ZeroDenominatorPochhammer",
    "binomial",
    "format_scalar",
    "limit_at_zero",
    "pfq_terminating",
    "pochhammer",
    "rational",
    "variable_t",
    # multi-index bookkeeping
    "IndexOutOfRange",
    "MultiIndex",
    "Shape",
    "enumerate_box",
    "level_histogram",
    "partial_sum",
    "shape_profile",
    # reports
    "CheckResult",
    "VerificationReport",
    # operators on the split basis
    "ExactMatrix",
    "InvalidParameters",
    "OPERATOR_NAMES",
    "TDParameters",
    "build_operator",
    "eigenvalue",
    "parameters_from_json_obj",
    "parameters_to_json_obj",
    "substituted_for_involution",
    "validate_parameters",
    "xi",
    # change of basis
    "BLOCK_FORMS",
    "COEFFICIENT_KINDS",
    "EIGENBASIS_NAMES",
    "StructureViolation",
    "block_tridiagonal_form",
    "cob_coefficient",
    "coefficient_matrix",
    "eigenbasis_matrix",
    # overlap functions
    "LIMIT_KINDS",
    "T_METHODS",
    "U_METHODS",
    "overlap_T",
    "overlap_U",
    "overlap_limit_kind",
    "overlap_table",
    "univariate_t_racah",
    "univariate_u_balanced",
    "univariate_u_racah_normalized",
    # verification suite
    "CHECK_NAMES",
    "DEFAULT_CHECKS",
    "SamplingExhausted",
    "random_valid_parameters",
    "run_suite",
]
