"""Core solver logic - Liouville series, polynomial systems, certification, tracking."""

from .exceptions import (
    LiouvilleError,
    InvalidSequence,
    InvalidIndex,
    RatioTestFailed,
    DimensionMismatch,
    InvalidSystem,
    NotAZero,
    PrecisionExhausted,
    DistinctnessViolated,
    ZeroPolynomial,
    TrackingError,
    SingularJacobian,
    NoConvergence,
    StartNotFound,
    PathEscapedBall,
    SubstepLimit,
)
from .models import (
    LiouvilleSequence,
    AuditRow,
    AuditReport,
    Tolerances,
    Witness,
    ZeroCertificate,
    StabilityProbe,
    SemicontinuityProbe,
    TrackerConfig,
    PathState,
    LimitRoot,
    SolveReport,
    RunReport,
)
from .numeric import GaussianRational, get_context, parse_exact_complex
from .liouville import (
    make_sequence,
    materialize,
    audit_growth,
    coefficient,
    coefficients,
    eval_partial_sum,
    eval_partial_sum_derivative,
    eval_modified_partial_sum,
    eval_partial_sum_exact,
    extend_sequence,
    eval_modified_partial_sum_exact,
    tail_bound,
)
from .polynomials import (
    Term,
    PolynomialMap,
    ComposedSystem,
    evaluate,
    evaluate_exact,
    jacobian,
    compose_eval,
    compose_jacobian,
    compose_epsilon_derivative,
    y_lipschitz_bound,
    univariate_coefficients,
)
from .certification import (
    certify_regular,
    find_balanced_witness,
    certify_well_balanced,
    augment_for_inverse,
    extend_zero,
    degree_bounds,
    probe_parameter_stability,
)
from .tracker import (
    newton_correct,
    find_start_root,
    find_start_roots,
    track_epsilon,
    track_coefficients,
    solve,
)
from .root_norms import min_isolated_root_norm, semicontinuity_probe

__all__ = [
    # Exceptions
    "LiouvilleError",
    "InvalidSequence",
    "InvalidIndex",
    "RatioTestFailed",
    "DimensionMismatch",
    "InvalidSystem",
    "NotAZero",
    "PrecisionExhausted",
    "DistinctnessViolated",
    "ZeroPolynomial",
    "TrackingError",
    "SingularJacobian",
    "NoConvergence",
    "StartNotFound",
    "PathEscapedBall",
    "SubstepLimit",
    # Models
    "LiouvilleSequence",
    "AuditRow",
    "AuditReport",
    "Tolerances",
    "Witness",
    "ZeroCertificate",
    "StabilityProbe",
    "SemicontinuityProbe",
    "TrackerConfig",
    "PathState",
    "LimitRoot",
    "SolveReport",
    "RunReport",
    # Numbers
    "GaussianRational",
    "get_context",
    "parse_exact_complex",
    # Liouville series
    "make_sequence",
    "materialize",
    "audit_growth",
    "coefficient",
    "coefficients",
    "eval_partial_sum",
    "eval_partial_sum_derivative",
    "eval_modified_partial_sum",
    "eval_partial_sum_exact",
    "extend_sequence",
    "eval_modified_partial_sum_exact",
    "tail_bound",
    # Polynomial systems
    "Term",
    "PolynomialMap",
    "ComposedSystem",
    "evaluate",
    "evaluate_exact",
    "jacobian",
    "compose_eval",
    "compose_jacobian",
    "compose_epsilon_derivative",
    "y_lipschitz_bound",
    "univariate_coefficients",
    # Certification
    "certify_regular",
    "find_balanced_witness",
    "certify_well_balanced",
    "augment_for_inverse",
    "extend_zero",
    "degree_bounds",
    "probe_parameter_stability",
    # Tracking
    "newton_correct",
    "find_start_root",
    "find_start_roots",
    "track_epsilon",
    "track_coefficients",
    "solve",
    "min_isolated_root_norm",
    "semicontinuity_probe",
]
