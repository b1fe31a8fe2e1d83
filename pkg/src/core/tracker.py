"""Degree-by-degree homotopy tracking toward a zero of F(x, H(x), z).

At degree d the tracked point is a regular root of F(x, H_d(x), z). The
epsilon homotopy H_{d,eps} = H_d + eps x^(d+1) runs eps from 0 to 1/a_{d+1},
where it coincides with H_{d+1}, so the endpoint is a root at degree d+1.
Tracking stops once the certified series tail no longer matters.
"""

import logging
import math
import random
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

from .certification import certify_well_balanced, check_distinct
from .config import VERBOSE_TRACE
from .exceptions import (
    InvalidIndex,
    LiouvilleError,
    NoConvergence,
    PathEscapedBall,
    RatioTestFailed,
    SingularJacobian,
    StartNotFound,
    SubstepLimit,
    TrackingError,
)
from .liouville import coefficient, extend_sequence, make_sequence, tail_bound
from .models import LimitRoot, LiouvilleSequence, PathState, SolveReport, TrackerConfig
from .newton import NewtonResult, newton_iterate
from .numeric import add_up, get_context, mul_up, norm2, norm_inf, to_complex, to_vector
from .polynomials import (
    ComposedSystem,
    PolynomialMap,
    compose_direction_derivative,
    compose_epsilon_derivative,
    compose_eval,
    compose_jacobian,
    residual_upper,
    y_lipschitz_bound,
)

logger = logging.getLogger(__name__)

_TRACE_LEVEL = logging.INFO if VERBOSE_TRACE else logging.DEBUG


@dataclass
class SegmentResult:
    """Endpoint of one homotopy segment and the states accepted on the way."""

    x: list[Any]
    path: list[PathState] = field(default_factory=list)


# ==================== NEWTON ====================

def newton_correct(system: ComposedSystem, x0: Sequence[Any], config: TrackerConfig) -> NewtonResult:
    """Newton on the composed system, doubling precision once if it stalls.

    Raises:
        SingularJacobian: Jacobian numerically singular or linear convergence.
        NoConvergence: Budget exhausted or iterate escaped 4 * r_max.
    """
    ctx = get_context(system.prec)
    tolerances = config.tolerances()

    def run(target: ComposedSystem) -> NewtonResult:
        tctx = get_context(target.prec)
        return newton_iterate(
            tctx,
            lambda x: compose_eval(target, x),
            lambda x: compose_jacobian(target, x),
            to_vector(tctx, x0),
            tol=tctx.ldexp(tctx.one, config.resolved_newton_tol_log2),
            max_iters=config.max_newton_iters,
            singular_tol=tolerances.value(tctx, "rank_rel_tol"),
            escape_radius=4 * tctx.mpf(config.r_max),
        )

    try:
        return run(system)
    except NoConvergence as exc:
        tol = ctx.ldexp(ctx.one, config.resolved_newton_tol_log2)
        if exc.residual is None or not (tol < exc.residual <= ctx.sqrt(tol)):
            raise
        logger.warning(
            f"Newton stalled at residual {ctx.nstr(exc.residual, 5)}; "
            f"retrying at {2 * system.prec} bits"
        )
        result = run(replace(system, prec=2 * system.prec))
        return NewtonResult(
            x=[ctx.mpc(v) for v in result.x],
            iterations=result.iterations,
            residual=ctx.mpf(result.residual),
            steps=result.steps,
        )


# ==================== START ROOTS ====================

def _sample_ball(ctx: Any, rng: random.Random, n: int, radius: float) -> list[Any]:
    """Uniform sample from the ball of the given radius in C^n."""
    coords = [rng.gauss(0.0, 1.0) for _ in range(2 * n)]
    length = math.sqrt(sum(c * c for c in coords)) or 1.0
    scale = radius * rng.random() ** (1.0 / (2 * n)) / length
    return [ctx.mpc(coords[2 * k] * scale, coords[2 * k + 1] * scale) for k in range(n)]


def _sort_key(ctx: Any, x: list[Any]) -> tuple:
    return (norm2(ctx, x),) + tuple(v for c in x for v in (c.real, c.imag))


def _multistart(system: ComposedSystem, config: TrackerConfig, rng: random.Random) -> list[list[Any]]:
    """Distinct admissible roots of ``system`` found from random starts."""
    ctx = get_context(system.prec)
    tolerances = config.tolerances()
    r_max = ctx.mpf(config.r_max)
    dedupe_tol = tolerances.value(ctx, "distinctness_tol")
    roots: list[list[Any]] = []

    for attempt in range(config.multistart_budget):
        x0 = _sample_ball(ctx, rng, system.n, config.r_max)
        try:
            x = newton_correct(system, x0, config).x
        except TrackingError:
            continue
        if norm2(ctx, x) > r_max:
            continue
        try:
            check_distinct(ctx, x, tolerances)
        except LiouvilleError:
            continue
        if any(norm2(ctx, [a - b for a, b in zip(x, r)]) <= dedupe_tol * (1 + norm2(ctx, r)) for r in roots):
            continue
        roots.append(x)
        logger.debug(f"Start root {len(roots)} found after {attempt + 1} attempts")
        if len(roots) >= config.start_pool:
            break

    return sorted(roots, key=lambda x: _sort_key(ctx, x))


def find_start_roots(
    F: PolynomialMap,
    z: Sequence[Any],
    d0: int,
    config: TrackerConfig | None = None,
    seq: LiouvilleSequence | None = None,
    strategy: str = "multistart",
) -> list[list[Any]]:
    """All admissible start roots found at degree d0, smallest norm first.

    Raises:
        StartNotFound: If the search yields nothing.
    """
    config = config or TrackerConfig()
    seq = seq or make_sequence("default_tower")
    if d0 < 1:
        raise StartNotFound(f"Start degree must be >= 1, got {d0}")

    if strategy == "multistart":
        rng = random.Random(f"{config.rng_seed}:{d0}")
        system = ComposedSystem(F, tuple(z), seq, d0, prec=config.precision_bits)
        roots = _multistart(system, config, rng)
    elif strategy == "generic":
        roots = _generic_start_roots(F, z, d0, config, seq)
    else:
        raise ValueError(f"Unknown start strategy: {strategy}")

    if not roots:
        raise StartNotFound(
            f"No admissible start root at degree {d0} with {strategy} search "
            f"({config.multistart_budget} starts, r_max {config.r_max})"
        )
    logger.info(f"Found {len(roots)} start root(s) at degree {d0} ({strategy})")
    return roots


def find_start_root(
    F: PolynomialMap,
    z: Sequence[Any],
    d0: int,
    config: TrackerConfig | None = None,
    seq: LiouvilleSequence | None = None,
    strategy: str = "multistart",
) -> list[Any]:
    """An isolated regular root of the degree-d0 system with nonzero, distinct coordinates.

    Multistart Newton from points drawn uniformly in B(0, r_max), or (with
    ``strategy="generic"``) a root of a modified partial sum with random
    coefficients carried to H_{d0}. Returns the smallest-norm root.
    """
    return find_start_roots(F, z, d0, config, seq, strategy)[0]


def _generic_start_roots(
    F: PolynomialMap, z: Sequence[Any], d0: int, config: TrackerConfig, seq: LiouvilleSequence
) -> list[list[Any]]:
    ctx = get_context(config.precision_bits)
    m = min(config.generic_terms, d0)
    k = d0 - m
    rng = random.Random(f"{config.rng_seed}:generic:{d0}")
    alpha = [ctx.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(m)]
    start_system = ComposedSystem(F, tuple(z), seq, k, 0, (0, *alpha), config.precision_bits)

    carried = []
    for x0 in _multistart(start_system, config, rng):
        try:
            carried.append(track_coefficients(F, z, k, alpha, x0, config, seq).x)
        except TrackingError as e:
            logger.debug(f"Generic start lost on the way to degree {d0}: {e}")
    tolerances = config.tolerances()
    admissible = []
    for x in carried:
        try:
            check_distinct(ctx, x, tolerances)
        except LiouvilleError:
            continue
        admissible.append(x)
    return sorted(admissible, key=lambda x: _sort_key(ctx, x))


# ==================== PATH FOLLOWING ====================

def _follow_path(
    system_at: Callable[[Any], ComposedSystem],
    derivative: Callable[[ComposedSystem, list[Any]], list[Any]],
    x0: Sequence[Any],
    config: TrackerConfig,
    *,
    d: int,
    eps_at: Callable[[Any], Any],
    segment: str,
) -> SegmentResult:
    """Euler-predictor / Newton-corrector over t in [0, 1].

    The Davidenko direction solves J dx/dt = -dPhi/dt. Failed or drifting
    corrections halve the step; accepted steps double it. Every accepted
    point must stay inside the ball of radius r_max.
    """
    prec = config.precision_bits
    ctx = get_context(prec)
    one = ctx.one
    r_max = ctx.mpf(config.r_max)
    tol = ctx.ldexp(one, config.resolved_newton_tol_log2)
    path: list[PathState] = []

    x = newton_correct(system_at(ctx.zero), x0, config).x
    t = ctx.zero
    h = None
    attempts = 0

    while t < one:
        system = system_at(t)
        try:
            v = ctx.lu_solve(compose_jacobian(system, x), ctx.matrix([-r for r in derivative(system, x)]))
        except ZeroDivisionError as e:
            raise SingularJacobian(f"Singular Jacobian on the {segment} path at t = {ctx.nstr(t, 8)}", path) from e
        v = [v[i] for i in range(len(x))]
        v_norm = norm2(ctx, v)
        x_norm = norm2(ctx, x)
        remaining = one - t
        if h is None:
            h = remaining if v_norm == 0 else min(remaining, config.step_fraction * (1 + x_norm) / v_norm)

        while True:
            attempts += 1
            if attempts > config.max_substeps_per_epsilon:
                logger.error(f"Substep limit hit at degree {d}, t = {ctx.nstr(t, 8)}")
                raise SubstepLimit(
                    f"More than {config.max_substeps_per_epsilon} substeps on the {segment} path at degree {d}",
                    path,
                )
            t_next = one if h >= remaining else t + h
            step = t_next - t
            predicted = [xi + step * vi for xi, vi in zip(x, v)]
            try:
                result = newton_correct(system_at(t_next), predicted, config)
            except (NoConvergence, SingularJacobian) as e:
                logger.debug(f"Rejected substep of size {ctx.nstr(step, 5)}: {e}")
                h = step / 2
                continue
            drift = norm2(ctx, [a - b for a, b in zip(result.x, predicted)])
            if drift > step * v_norm / 2 + 2 * tol * (1 + x_norm):
                logger.debug(f"Rejected substep of size {ctx.nstr(step, 5)}: corrector drift")
                h = step / 2
                continue
            break

        x = result.x
        t = t_next
        norm_x = norm2(ctx, x)
        state = PathState(
            d=d,
            eps=eps_at(t),
            t=t,
            x=x,
            newton_iters_last=result.iterations,
            norm_x=norm_x,
            residual=result.residual,
            segment=segment,
        )
        if norm_x > r_max:
            logger.error(f"Path left the ball: ||x|| = {ctx.nstr(norm_x, 8)} > {config.r_max}")
            raise PathEscapedBall(
                f"||x|| = {ctx.nstr(norm_x, 8)} exceeds r_max = {config.r_max} at degree {d}", path
            )
        path.append(state)
        logger.log(
            _TRACE_LEVEL,
            f"d={d} t={ctx.nstr(t, 6)} ||x||={ctx.nstr(norm_x, 10)} newton={result.iterations}",
        )
        h = 2 * step

    return SegmentResult(x=x, path=path)


def track_epsilon(
    F: PolynomialMap,
    z: Sequence[Any],
    d: int,
    x_at_eps0: Sequence[Any],
    config: TrackerConfig | None = None,
    seq: LiouvilleSequence | None = None,
    eps_target: Any | None = None,
) -> SegmentResult:
    """Carry a root at (d, eps=0) to eps_target (default 1/a_{d+1}).

    With the default target the endpoint is a root of the degree-(d+1)
    truncation. A zero target returns the input unchanged.

    Raises:
        PathEscapedBall, SubstepLimit, SingularJacobian: Tracking failures,
            each carrying the accepted states so far.
    """
    config = config or TrackerConfig()
    seq = seq or make_sequence("default_tower")
    prec = config.precision_bits
    ctx = get_context(prec)
    z = tuple(z)
    eps_target = coefficient(seq, d + 1, prec) if eps_target is None else to_complex(ctx, eps_target)
    if eps_target == 0:
        return SegmentResult(x=to_vector(ctx, x_at_eps0))

    def system_at(t: Any) -> ComposedSystem:
        return ComposedSystem(F, z, seq, d, t * eps_target, prec=prec)

    def derivative(system: ComposedSystem, x: list[Any]) -> list[Any]:
        return [eps_target * value for value in compose_epsilon_derivative(system, x)]

    return _follow_path(
        system_at, derivative, x_at_eps0, config, d=d, eps_at=lambda t: t * eps_target, segment="epsilon"
    )


def track_coefficients(
    F: PolynomialMap,
    z: Sequence[Any],
    k: int,
    alpha: Sequence[Any],
    x0: Sequence[Any],
    config: TrackerConfig | None = None,
    seq: LiouvilleSequence | None = None,
) -> SegmentResult:
    """Move generic coefficients alpha_j of x^(k+j) linearly to 1/a_{k+j}.

    Starts from a root of F(x, H_k(x) + sum_j alpha_j x^(k+j), z) and ends at
    a root of the degree-(k+m) truncation, m = len(alpha).
    """
    config = config or TrackerConfig()
    seq = seq or make_sequence("default_tower")
    prec = config.precision_bits
    ctx = get_context(prec)
    z = tuple(z)
    alpha = to_vector(ctx, alpha)
    m = len(alpha)
    targets = [coefficient(seq, k + j, prec) for j in range(1, m + 1)]
    direction = [0] * (k + 1) + [c - a for c, a in zip(targets, alpha)]

    def system_at(t: Any) -> ComposedSystem:
        if t == 1:
            return ComposedSystem(F, z, seq, k + m, prec=prec)
        g = (0,) + tuple((1 - t) * a + t * c for a, c in zip(alpha, targets))
        return ComposedSystem(F, z, seq, k, 0, g, prec)

    def derivative(system: ComposedSystem, x: list[Any]) -> list[Any]:
        return compose_direction_derivative(system, x, direction)

    return _follow_path(
        system_at, derivative, x0, config, d=k + m, eps_at=lambda t: ctx.zero, segment="coefficients"
    )


# ==================== SOLVE ====================

def _stop_rule(
    F: PolynomialMap, z: Sequence[Any], x: list[Any], d: int, config: TrackerConfig, seq: LiouvilleSequence
) -> tuple[bool, Any, Any, Any]:
    """(stop?, tail bound, L_y, L_y * tail) at degree d around the point x."""
    ctx = get_context(config.precision_bits)
    rho_x = add_up(ctx, norm2(ctx, x), 1)
    system = ComposedSystem(F, tuple(z), seq, d, prec=config.precision_bits)
    y, _ = system.inner(x)
    try:
        tail = tail_bound(seq, d, rho_x, config.tail_probe_count, config.precision_bits)
    except (RatioTestFailed, InvalidIndex) as e:
        logger.debug(f"No tail bound at degree {d}: {e}")
        tail = ctx.inf
    rho_y = add_up(ctx, norm_inf(ctx, y), 1)
    if ctx.isfinite(tail):
        rho_y = add_up(ctx, rho_y, tail)
    lipschitz = y_lipschitz_bound(F, z, rho_x, rho_y, config.precision_bits)
    tail_term = ctx.zero if lipschitz == 0 else mul_up(ctx, lipschitz, tail)
    target = ctx.ldexp(ctx.one, config.residual_tol_log2 - 1)
    return tail_term < target, tail, lipschitz, tail_term


def _start_state(ctx: Any, system: ComposedSystem, x: list[Any]) -> PathState:
    return PathState(
        d=system.d,
        eps=ctx.zero,
        t=ctx.zero,
        x=x,
        newton_iters_last=0,
        norm_x=norm2(ctx, x),
        residual=norm_inf(ctx, compose_eval(system, x)),
        segment="start",
    )


def _run_degrees(
    F: PolynomialMap,
    z: Sequence[Any],
    x0: list[Any],
    d0: int,
    config: TrackerConfig,
    seq: LiouvilleSequence,
) -> tuple[LimitRoot, list[PathState]]:
    prec = config.precision_bits
    ctx = get_context(prec)
    path = [_start_state(ctx, ComposedSystem(F, tuple(z), seq, d0, prec=prec), x0)]
    history: list[Any] = []
    x, d = x0, d0

    while True:
        stop, tail, lipschitz, tail_term = _stop_rule(F, z, x, d, config, seq)
        if config.apply_stop_rule and stop:
            logger.info(f"Stop rule met at degree {d}: tail term {ctx.nstr(tail_term, 5)}")
            break
        if d >= config.d_max:
            logger.info(f"Reached d_max = {config.d_max}")
            break
        if d >= seq.length:
            logger.warning(f"Sequence ends at a_{seq.length}; stopping at degree {d}")
            break
        try:
            segment = track_epsilon(F, z, d, x, config, seq)
        except TrackingError as exc:
            exc.path = path + exc.path
            raise
        path.extend(segment.path)
        history.append(norm2(ctx, [a - b for a, b in zip(segment.x, x)]))
        x, d = segment.x, d + 1
        logger.info(f"Advanced to degree {d}, ||x|| = {ctx.nstr(norm2(ctx, x), 12)}")

    final = ComposedSystem(F, tuple(z), seq, d, prec=prec)
    residual_truncated = residual_upper(ctx, compose_eval(final, x))
    limit = LimitRoot(
        a=x,
        final_d=d,
        d_start=d0,
        residual_truncated=residual_truncated,
        tail_bound=tail,
        y_lipschitz=lipschitz,
        tail_term=tail_term,
        total_residual_bound=add_up(ctx, residual_truncated, tail_term),
        cauchy_history=history,
        precision_bits=prec,
        stop_rule_met=bool(stop),
    )
    return limit, path


def _choose_start(
    F: PolynomialMap, z: Sequence[Any], config: TrackerConfig, seq: LiouvilleSequence
) -> tuple[int, list[list[Any]], str]:
    degrees = range(1, min(config.d_max, seq.length) + 1) if config.d_start == "auto" else [config.d_start]
    strategies = ["multistart", "generic"] if config.start_strategy == "auto" else [config.start_strategy]
    for d0 in degrees:
        for strategy in strategies:
            try:
                return d0, find_start_roots(F, z, d0, config, seq, strategy), strategy
            except StartNotFound as e:
                logger.debug(str(e))
    logger.error("Start-root search exhausted")
    raise StartNotFound(
        f"No start root at degrees {list(degrees)} "
        f"(budget {config.multistart_budget}, r_max {config.r_max})"
    )


def solve(
    F: PolynomialMap,
    z: Sequence[Any],
    config: TrackerConfig | None = None,
    seq: LiouvilleSequence | None = None,
    point: Sequence[Any] | None = None,
) -> SolveReport:
    """Find a start root, track it degree by degree, and bound the full residual.

    Stops at the first degree where L_y * tail_bound < residual_tol / 2, or at
    d_max. If ``point`` (a candidate zero (x, y) of F) is given, its
    well-balanced certificate is attached; certification is advisory.

    Args:
        F: Polynomial map with n components.
        z: Parameter values.
        config: Tracker settings.
        seq: Liouville sequence (default tower if omitted).
        point: Optional candidate zero of F to certify.

    Returns:
        SolveReport with the LimitRoot and the accepted path.

    Raises:
        StartNotFound: No start root at any admissible degree.
        PathEscapedBall: Every restart left the ball.
        SubstepLimit, SingularJacobian: Tracking failure; ``path`` holds
            the states accepted before it.
    """
    config = config or TrackerConfig()
    seq = seq or make_sequence("default_tower")
    seq = extend_sequence(seq, config.d_max + config.tail_probe_count + 2)
    z = tuple(z)

    certificate, certificate_error = None, None
    if point is not None:
        try:
            certificate = certify_well_balanced(F, z, point, config.tolerances(), config.precision_bits)
        except LiouvilleError as e:
            certificate_error = f"{type(e).__name__}: {e}"
            logger.warning(f"Candidate zero not certified: {certificate_error}")

    d0, starts, strategy = _choose_start(F, z, config, seq)
    last_error: PathEscapedBall | None = None
    for restart, x0 in enumerate(starts[: config.max_restarts + 1]):
        try:
            limit, path = _run_degrees(F, z, x0, d0, config, seq)
        except PathEscapedBall as exc:
            logger.warning(f"Path escaped the ball; restart {restart + 1} of {config.max_restarts}")
            last_error = exc
            continue
        return SolveReport(
            limit_root=limit,
            path=path,
            certificate=certificate,
            certificate_error=certificate_error,
            start_strategy=strategy,
            restarts=restart,
        )
    raise last_error
