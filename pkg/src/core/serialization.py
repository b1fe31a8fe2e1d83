"""JSON input/output and trace files for the command-line tools.

Numbers never travel as binary floats: inputs are exact rationals or
decimal strings, outputs are decimal strings at the working precision.
"""

import hashlib
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import pandas as pd
from pydantic import BaseModel, Field, ValidationError, field_validator

from .exceptions import InvalidSequence, InvalidSystem
from .liouville import make_sequence
from .models import (
    AuditReport,
    LimitRoot,
    LiouvilleSequence,
    PathState,
    SolveReport,
    ZeroCertificate,
)
from .numeric import (
    GaussianRational,
    complex_to_strings,
    decimal_string,
    get_context,
    log2_abs,
    parse_exact_complex,
)
from .polynomials import ComposedSystem, PolynomialMap

logger = logging.getLogger(__name__)

# Exact rational as ["num", "den"], a bare integer, or a decimal string
RationalInput = list[str | int] | int | str


def _rational(value: RationalInput) -> Fraction:
    if isinstance(value, list):
        if len(value) != 2:
            raise ValueError(f"Rational must be [num, den], got {value}")
        num, den = (int(str(v).strip()) for v in value)
        if den == 0:
            raise ValueError("Zero denominator")
        return Fraction(num, den)
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value.strip())


class TermSpec(BaseModel):
    """One term of a component polynomial as written in a system file."""

    re: RationalInput = Field(default=0, description="Real part of the coefficient")
    im: RationalInput = Field(default=0, description="Imaginary part of the coefficient")
    x: list[int] = Field(default_factory=list, description="Exponents of x_1..x_n")
    y: list[int] = Field(default_factory=list, description="Exponents of y_1..y_n")
    z: list[int] = Field(default_factory=list, description="Exponents of z_1..z_r")

    @field_validator("re", "im")
    @classmethod
    def check_rational(cls, v: RationalInput) -> RationalInput:
        _rational(v)
        return v

    def coefficient(self) -> GaussianRational:
        return GaussianRational(_rational(self.re), _rational(self.im))


class SystemSpec(BaseModel):
    """{"n": int, "r": int, "components": [[term, ...], ...]}."""

    n: int = Field(..., ge=1)
    r: int = Field(default=0, ge=0)
    components: list[list[TermSpec]]


class ComplexSpec(BaseModel):
    """{"re": decimal string, "im": decimal string}."""

    re: str | int = Field(default="0")
    im: str | int = Field(default="0")

    def value(self) -> GaussianRational:
        return GaussianRational(_rational(str(self.re)), _rational(str(self.im)))


class ParameterSpec(BaseModel):
    z: list[ComplexSpec] = Field(default_factory=list)


class PointSpec(BaseModel):
    """Candidate zero: {"x": [...], "y": [...]}."""

    x: list[ComplexSpec]
    y: list[ComplexSpec]


class SequenceSpec(BaseModel):
    """{"kind": ..., "values": [...], "length": ...} for --sequence-file."""

    kind: str = Field(default="default_tower")
    values: list[str | int] | None = Field(default=None)
    length: int | None = Field(default=None, ge=1)


# ==================== LOADING ====================

def load_json(path: str | Path) -> Any:
    """Parse a JSON file.

    Raises:
        InvalidSystem: If the file is missing or not valid JSON.
    """
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to read {path}: {e}")
        raise InvalidSystem(f"Cannot read JSON from {path}: {e}") from e


def _validate(model: type[BaseModel], data: Any, path: str | Path) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise InvalidSystem(f"{path}: {e.errors()[0]['msg']}") from e


def parse_system(data: Any, source: str = "<system>") -> PolynomialMap:
    spec = _validate(SystemSpec, data, source)
    components = [
        [{"coefficient": t.coefficient(), "x": t.x, "y": t.y, "z": t.z} for t in comp]
        for comp in spec.components
    ]
    return PolynomialMap.from_terms(spec.n, spec.r, components)


def load_system(path: str | Path) -> PolynomialMap:
    """Read a system file into a canonical PolynomialMap."""
    F = parse_system(load_json(path), str(path))
    logger.info(f"Loaded system with n={F.n}, r={F.r}, degree {F.degree} from {path}")
    return F


def load_parameters(path: str | Path, r: int | None = None) -> list[GaussianRational]:
    """Read {"z": [...]}; checks the count against r when given."""
    spec = _validate(ParameterSpec, load_json(path), path)
    z = [c.value() for c in spec.z]
    if r is not None and len(z) != r:
        raise InvalidSystem(f"{path}: expected {r} parameters, got {len(z)}")
    return z


def load_point(path: str | Path, n: int) -> list[GaussianRational]:
    """Read a candidate zero and return it flattened as (x, y)."""
    spec = _validate(PointSpec, load_json(path), path)
    if len(spec.x) != n or len(spec.y) != n:
        raise InvalidSystem(f"{path}: point needs {n} x and {n} y coordinates")
    return [c.value() for c in spec.x + spec.y]


def parse_complex_list(values: Sequence[str]) -> list[GaussianRational]:
    """Exact values from command-line literals such as "0.1" or "1-2j"."""
    try:
        return [parse_exact_complex(v) for v in values]
    except ValueError as e:
        raise InvalidSystem(str(e)) from e


def load_sequence(
    kind: str = "default_tower",
    values: Sequence[str] | None = None,
    path: str | Path | None = None,
    length: int | None = None,
) -> LiouvilleSequence:
    """Sequence from command-line pieces, or from a sequence file when given.

    Raises:
        InvalidSequence: On any malformed description.
    """
    if path is not None:
        try:
            spec = SequenceSpec.model_validate(load_json(path))
        except (ValidationError, InvalidSystem) as e:
            raise InvalidSequence(f"Bad sequence file {path}: {e}") from e
        kind, values, length = spec.kind, spec.values, spec.length or length
    if length is None:
        return make_sequence(kind, values)
    return make_sequence(kind, values, length)


def file_digest(path: str | Path) -> str:
    """sha256 of the raw file bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ==================== OUTPUT ====================

def _number(ctx: Any, value: Any, digits: int | None = None) -> str | None:
    if value is None:
        return None
    if value == ctx.inf:
        return "inf"
    return decimal_string(ctx, value, digits)


def _vector(ctx: Any, values: Sequence[Any], digits: int | None = None) -> list[dict[str, str]]:
    return [complex_to_strings(ctx, v, digits) for v in values]


def audit_to_dict(report: AuditReport) -> dict[str, Any]:
    return report.model_dump()


def certificate_to_dict(cert: ZeroCertificate, prec: int) -> dict[str, Any]:
    """Certificate JSON: flags, witness, residual, singular values, tolerances."""
    ctx = get_context(prec)
    return {
        "flags": {
            "regular": cert.regular,
            "balanced": cert.balanced,
            "well_balanced": cert.well_balanced,
        },
        "witness": cert.witness.model_dump(include={"I", "J"}) if cert.witness else None,
        "witness_det_abs": _number(ctx, cert.witness.det_abs) if cert.witness else None,
        "residual": _number(ctx, cert.residual_norm),
        "jacobian_rank": cert.jacobian_rank,
        "singular_values": [_number(ctx, s) for s in cert.singular_values],
        "tangent_margins": [_number(ctx, m) for m in cert.tangent_margins],
        "tolerances": {k: f"2^{v}" for k, v in cert.tolerances.model_dump().items()},
    }


def limit_root_to_dict(root: LimitRoot, seq: LiouvilleSequence) -> dict[str, Any]:
    """LimitRoot fields plus the point (a, H_d(a)) ready for re-certification."""
    ctx = get_context(root.precision_bits)
    return {
        "a": _vector(ctx, root.a),
        "final_d": root.final_d,
        "d_start": root.d_start,
        "residual_truncated": _number(ctx, root.residual_truncated),
        "tail_bound": _number(ctx, root.tail_bound),
        "y_lipschitz": _number(ctx, root.y_lipschitz),
        "tail_term": _number(ctx, root.tail_term),
        "total_residual_bound": _number(ctx, root.total_residual_bound),
        "total_residual_bound_log2": _number(ctx, log2_abs(ctx, root.total_residual_bound), 12),
        "cauchy_history": [_number(ctx, c) for c in root.cauchy_history],
        "precision_bits": root.precision_bits,
        "stop_rule_met": root.stop_rule_met,
        "sequence": seq.kind,
    }


def solve_report_to_dict(
    report: SolveReport, F: PolynomialMap, z: Sequence[Any], seq: LiouvilleSequence
) -> dict[str, Any]:
    root = report.limit_root
    ctx = get_context(root.precision_bits)
    system = ComposedSystem(F, tuple(z), seq, root.final_d, prec=root.precision_bits)
    y, _ = system.inner(root.a)
    result = limit_root_to_dict(root, seq)
    result["point"] = {"x": _vector(ctx, root.a), "y": _vector(ctx, y)}
    result["start_strategy"] = report.start_strategy
    result["restarts"] = report.restarts
    result["path_length"] = len(report.path)
    if report.certificate is not None:
        result["certificate"] = certificate_to_dict(report.certificate, root.precision_bits)
    if report.certificate_error is not None:
        result["certificate_error"] = report.certificate_error
    return result


def dumps(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data))
    logger.info(f"Wrote {path}")
    return path


def trace_frame(path: Sequence[PathState], prec: int) -> pd.DataFrame:
    """One row per accepted path state; the first row is the start root.

    Columns: d, eps_log2, x{k}_re, x{k}_im for each coordinate,
    residual_log2, newton_iters.
    """
    ctx = get_context(prec)
    rows = []
    for state in path:
        row: dict[str, Any] = {"d": state.d, "eps_log2": _number(ctx, log2_abs(ctx, state.eps), 12)}
        for k, value in enumerate(state.x, start=1):
            parts = complex_to_strings(ctx, value)
            row[f"x{k}_re"] = parts["re"]
            row[f"x{k}_im"] = parts["im"]
        row["residual_log2"] = _number(ctx, log2_abs(ctx, state.residual), 12)
        row["newton_iters"] = state.newton_iters_last
        rows.append(row)
    n = len(path[0].x) if path else 0
    columns = (
        ["d", "eps_log2"]
        + [f"x{k}_{part}" for k in range(1, n + 1) for part in ("re", "im")]
        + ["residual_log2", "newton_iters"]
    )
    return pd.DataFrame(rows, columns=columns)


def write_trace(path: str | Path, states: Sequence[PathState], prec: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(states, prec).to_csv(path, index=False)
    logger.info(f"Wrote trace with {len(states)} rows to {path}")
    return path
