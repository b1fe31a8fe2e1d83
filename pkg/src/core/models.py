"""Pydantic data models for the Liouville solver."""

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import (
    D_MAX,
    MAX_NEWTON_ITERS,
    MAX_SUBSTEPS_PER_EPSILON,
    MULTISTART_BUDGET,
    PRECISION_BITS,
    R_MAX,
    RESIDUAL_TOL_LOG2,
    RNG_SEED,
    TAIL_PROBE_COUNT,
)

SequenceKind = Literal["default_tower", "factorial_pow2", "user_supplied"]


def default_newton_tol_log2(prec: int) -> int:
    return -((3 * prec) // 4)


class LiouvilleSequence(BaseModel):
    """Integer denominators a_i of H(x) = sum x^i / a_i, stored by log2 magnitude.

    For the recurrence kinds every a_i is a power of two, so the lower and
    upper log2 bounds coincide. User sequences keep their exact integers.
    """

    model_config = ConfigDict(frozen=True)

    kind: SequenceKind = Field(..., description="How the sequence was generated")
    signs: tuple[int, ...] = Field(..., description="Sign of a_i for i = 1, 2, ...")
    log2_magnitudes: tuple[int, ...] = Field(
        ..., description="floor(log2 |a_i|); exact for powers of two"
    )
    log2_upper: tuple[int, ...] = Field(
        ..., description="ceil(log2 |a_i|); equals log2_magnitudes for powers of two"
    )
    values: tuple[int, ...] | None = Field(
        default=None, description="Exact integers a_i (user sequences only)"
    )
    audited_through: int = Field(default=0, description="Largest index covered by audit_growth")

    @model_validator(mode="after")
    def check_entries(self) -> "LiouvilleSequence":
        """Every a_i must be a nonzero integer with consistent bounds."""
        length = len(self.signs)
        if len(self.log2_magnitudes) != length or len(self.log2_upper) != length:
            raise ValueError("signs and log2 bounds must have the same length")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        for lo, hi in zip(self.log2_magnitudes, self.log2_upper):
            if lo < 0 or hi < lo or hi > lo + 1:
                raise ValueError(f"inconsistent log2 bounds ({lo}, {hi})")
        if self.values is not None and len(self.values) != length:
            raise ValueError("values must match the sequence length")
        return self

    @property
    def length(self) -> int:
        return len(self.signs)

    def is_power_of_two(self, i: int) -> bool:
        """Whether |a_i| is an exact power of two (1-based index)."""
        return self.log2_magnitudes[i - 1] == self.log2_upper[i - 1]


class AuditRow(BaseModel):
    """One growth check |a_{i+1}| > |a_i|^(i^l)."""

    i: int = Field(..., description="Index i")
    lhs_log2: int = Field(..., description="log2 |a_{i+1}| (lower bound)")
    rhs_log2: int = Field(..., description="i^l * log2 |a_i| (upper bound)")
    passed: bool = Field(..., description="Whether the check holds")


class AuditReport(BaseModel):
    """Growth audit of a sequence for one exponent l."""

    kind: SequenceKind = Field(..., description="Audited sequence kind")
    l: int = Field(..., description="Exponent l of the growth condition")
    i_max: int = Field(..., description="Last index checked")
    rows: list[AuditRow] = Field(default_factory=list, description="Per-index results")
    least_all_true: int | None = Field(
        default=None, description="Least i from which every check through i_max passes"
    )
    first_failing: int | None = Field(default=None, description="Smallest failing index")
    admissible: bool = Field(
        default=False, description="Checks pass on a suffix ending at i_max"
    )

    @property
    def checks(self) -> list[bool]:
        return [row.passed for row in self.rows]


class Tolerances(BaseModel):
    """Certification thresholds, stored as exact powers of two (log2 exponents)."""

    residual_tol_log2: int = Field(..., description="Largest accepted ||F(point)||_inf")
    rank_rel_tol_log2: int = Field(..., description="Relative singular-value threshold")
    distinctness_tol_log2: int = Field(..., description="Minimum |x_i| and |x_i - x_j|")
    tangent_tol_log2: int = Field(..., description="Minimum x_i-norm on the tangent space")
    det_tol_log2: int = Field(..., description="Minimum |det| of a witness minor")
    newton_tol_log2: int = Field(..., description="Newton residual/step threshold")

    @classmethod
    def for_precision(cls, prec: int = PRECISION_BITS) -> "Tolerances":
        """Defaults scaled to the working precision."""
        return cls(
            residual_tol_log2=-(prec // 2),
            rank_rel_tol_log2=-(prec // 4),
            distinctness_tol_log2=-(prec // 2),
            tangent_tol_log2=-(prec // 4),
            det_tol_log2=-(prec // 4),
            newton_tol_log2=default_newton_tol_log2(prec),
        )

    def value(self, ctx: Any, name: str) -> Any:
        """The tolerance ``name`` (without ``_log2``) as an mpf of ``ctx``."""
        return ctx.ldexp(ctx.one, getattr(self, f"{name}_log2"))


class Witness(BaseModel):
    """Complementary index sets I, J (1-based) with a nonsingular minor."""

    I: list[int] = Field(default_factory=list, description="x-columns of the minor")
    J: list[int] = Field(default_factory=list, description="y-columns of the minor")
    det_abs: Any = Field(..., description="|det dF/d(x_I, y_J)| at the point")

    @model_validator(mode="after")
    def check_partition(self) -> "Witness":
        if set(self.I) & set(self.J):
            raise ValueError("I and J must be disjoint")
        return self


class ZeroCertificate(BaseModel):
    """Regular / balanced / well-balanced status of a candidate zero."""

    x: list[Any] = Field(..., description="x-coordinates of the point")
    y: list[Any] = Field(..., description="y-coordinates of the point")
    z: list[Any] = Field(default_factory=list, description="Parameter values")
    residual_norm: Any = Field(..., description="||F(x, y, z)||_inf")
    jacobian_rank: int = Field(..., description="Numerical rank of the n x 2n Jacobian")
    singular_values: list[Any] = Field(default_factory=list, description="Largest first")
    witness: Witness | None = Field(default=None, description="Witness partition if balanced")
    tangent_margins: list[Any] = Field(
        default_factory=list, description="Norm of each x_i functional on the tangent space"
    )
    regular: bool = Field(default=False)
    balanced: bool = Field(default=False)
    well_balanced: bool = Field(default=False)
    tolerances: Tolerances = Field(..., description="Thresholds used")

    @model_validator(mode="after")
    def check_flags(self) -> "ZeroCertificate":
        """well_balanced implies balanced implies regular."""
        if self.well_balanced and not self.balanced:
            raise ValueError("well_balanced certificate must be balanced")
        if self.balanced and not self.regular:
            raise ValueError("balanced certificate must be regular")
        if self.balanced and self.witness is None:
            raise ValueError("balanced certificate needs a witness")
        if self.witness is not None:
            n = len(self.x)
            if sorted(self.witness.I + self.witness.J) != list(range(1, n + 1)):
                raise ValueError("witness must partition {1..n}")
        return self

    @property
    def sigma_min(self) -> Any:
        return self.singular_values[-1] if self.singular_values else None

    @property
    def sigma_max(self) -> Any:
        return self.singular_values[0] if self.singular_values else None


class StabilityProbe(BaseModel):
    """Pointwise check that a well-balanced zero survives parameter perturbation."""

    radius: Any = Field(..., description="|zeta - z| of each sample")
    samples: int = Field(..., description="Number of sampled parameters")
    converged: int = Field(default=0, description="Samples where Newton re-converged")
    well_balanced: int = Field(default=0, description="Samples still well balanced")
    same_witness: int = Field(default=0, description="Samples with the original witness")
    min_rank_margin: Any = Field(default=None, description="Smallest sigma_min/sigma_max seen")


class SemicontinuityProbe(BaseModel):
    """N_F at a center parameter versus its maximum on a circle around it."""

    z0: Any = Field(..., description="Center parameter (first coordinate probed)")
    radius: Any = Field(..., description="Probe circle radius")
    center_norm: Any = Field(..., description="N_F(z0)")
    norms: list[Any] = Field(default_factory=list, description="N_F on the grid")
    max_norm: Any = Field(..., description="Maximum of N_F on the grid")


class TrackerConfig(BaseModel):
    """Settings for start-root search, path tracking and the stop rule."""

    model_config = ConfigDict(frozen=True)

    precision_bits: int = Field(default=PRECISION_BITS, ge=16)
    d_start: int | Literal["auto"] = Field(default="auto", description="Start degree or 'auto'")
    d_max: int = Field(default=D_MAX, ge=1)
    residual_tol_log2: int = Field(default=RESIDUAL_TOL_LOG2, description="Stop-rule target")
    newton_tol_log2: int | None = Field(
        default=None, description="Newton tolerance; defaults to 2^(-3 prec / 4)"
    )
    max_newton_iters: int = Field(default=MAX_NEWTON_ITERS, ge=1)
    max_substeps_per_epsilon: int = Field(default=MAX_SUBSTEPS_PER_EPSILON, ge=1)
    r_max: float = Field(default=R_MAX, description="Radius of the boundedness ball")
    multistart_budget: int = Field(default=MULTISTART_BUDGET, ge=1)
    rng_seed: int = Field(default=RNG_SEED)
    step_fraction: float = Field(default=0.1, gt=0, le=1, description="Predictor step scale")
    start_pool: int = Field(default=8, ge=1, description="Distinct start roots kept")
    max_restarts: int = Field(default=3, ge=0, description="Restarts after escaping the ball")
    generic_terms: int = Field(default=1, ge=1, description="Generic coefficients for starts")
    tail_probe_count: int = Field(default=TAIL_PROBE_COUNT, ge=2)
    start_strategy: Literal["auto", "multistart", "generic"] = Field(default="auto")
    apply_stop_rule: bool = Field(default=True, description="Stop once the tail is negligible")

    @field_validator("d_start")
    @classmethod
    def check_d_start(cls, v: int | str) -> int | str:
        if v != "auto" and v < 1:
            raise ValueError("d_start must be at least 1")
        return v

    @model_validator(mode="after")
    def check_ranges(self) -> "TrackerConfig":
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if self.d_start != "auto" and self.d_start > self.d_max:
            raise ValueError(f"d_start {self.d_start} exceeds d_max {self.d_max}")
        return self

    @property
    def resolved_newton_tol_log2(self) -> int:
        if self.newton_tol_log2 is not None:
            return self.newton_tol_log2
        return default_newton_tol_log2(self.precision_bits)

    def tolerances(self) -> Tolerances:
        tol = Tolerances.for_precision(self.precision_bits)
        return tol.model_copy(update={"newton_tol_log2": self.resolved_newton_tol_log2})


class PathState(BaseModel):
    """One accepted point of a homotopy path."""

    d: int = Field(..., description="Truncation degree")
    eps: Any = Field(..., description="Perturbation epsilon in [0, 1/a_{d+1}]")
    t: Any = Field(..., description="Homotopy parameter in [0, 1]")
    x: list[Any] = Field(..., description="Current point")
    newton_iters_last: int = Field(default=0)
    norm_x: Any = Field(..., description="||x||_2")
    residual: Any = Field(..., description="||Phi(x)||_inf after correction")
    segment: Literal["start", "epsilon", "coefficients"] = Field(default="epsilon")


class LimitRoot(BaseModel):
    """Approximate zero of F(x, H(x), z) with a certified residual bound."""

    a: list[Any] = Field(..., description="The root")
    final_d: int = Field(..., description="Truncation degree at the end of tracking")
    d_start: int = Field(..., description="Degree the start root was found at")
    residual_truncated: Any = Field(..., description="||F(a, H_d(a), z)||_inf (upper bound)")
    tail_bound: Any = Field(..., description="sup |H - H_d| on the ball of radius ||a|| + 1")
    y_lipschitz: Any = Field(..., description="Bound on ||dF/dy||_inf")
    tail_term: Any = Field(..., description="y_lipschitz * tail_bound")
    total_residual_bound: Any = Field(..., description="residual_truncated + tail_term")
    cauchy_history: list[Any] = Field(default_factory=list, description="||x_{d+1} - x_d||")
    precision_bits: int = Field(..., description="Working precision")
    stop_rule_met: bool = Field(default=False, description="Tail term fell below tol/2")


class SolveReport(BaseModel):
    """Result of solve: the limit root, its path and the optional certificate."""

    limit_root: LimitRoot
    path: list[PathState] = Field(default_factory=list)
    certificate: ZeroCertificate | None = Field(default=None)
    certificate_error: str | None = Field(default=None, description="Why certification failed")
    start_strategy: str = Field(default="multistart")
    restarts: int = Field(default=0)


class RunReport(BaseModel):
    """Machine-readable summary of one command-line invocation."""

    command: str = Field(..., description="Subcommand name")
    config: dict[str, Any] = Field(default_factory=dict, description="Resolved settings")
    input_digests: dict[str, str] = Field(default_factory=dict, description="sha256 per input")
    outcome: str = Field(..., description="ok, certified, not_certified, tracking_failed, input_error")
    exit_code: int = Field(default=0)
    timings: dict[str, float] = Field(default_factory=dict, description="Wall-clock seconds")
    artifacts: dict[str, str] = Field(default_factory=dict, description="Files written")
    result: dict[str, Any] | None = Field(default=None)
    error: str | None = Field(default=None)
