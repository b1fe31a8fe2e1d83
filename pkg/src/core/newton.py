"""Newton's method for square systems at arbitrary precision."""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .exceptions import NoConvergence, SingularJacobian
from .numeric import norm2, norm_inf, singular_values

logger = logging.getLogger(__name__)

# Steps below this (relative) size are expected to shrink quadratically
_LINEAR_WATCH_LOG2 = -20


@dataclass
class NewtonResult:
    """Converged point with iteration statistics."""

    x: list[Any]
    iterations: int
    residual: Any
    steps: list[Any] = field(default_factory=list)


def newton_iterate(
    ctx: Any,
    evaluate: Callable[[list[Any]], list[Any]],
    jacobian: Callable[[list[Any]], Any],
    x0: Sequence[Any],
    *,
    tol: Any,
    max_iters: int,
    singular_tol: Any,
    escape_radius: Any | None = None,
) -> NewtonResult:
    """Run Newton from x0 until the residual and the step are below tol.

    Args:
        ctx: mpmath context the callbacks work in.
        evaluate: x -> F(x).
        jacobian: x -> square Jacobian matrix.
        x0: Start point.
        tol: Residual threshold; steps must also satisfy ||dx|| <= tol (1 + ||x||).
        max_iters: Iteration budget.
        singular_tol: Relative threshold on sigma_min / max(1, sigma_max).
        escape_radius: Give up once ||x|| exceeds this.

    Returns:
        NewtonResult at the converged point.

    Raises:
        SingularJacobian: If the Jacobian is numerically singular, or steps
            shrink only linearly (the signature of a multiple root).
        NoConvergence: If the iterate escapes or the budget runs out.
    """
    x = [ctx.mpc(v) for v in x0]
    steps: list[Any] = []
    watch = ctx.ldexp(ctx.one, _LINEAR_WATCH_LOG2)
    quarter = ctx.mpf(0.25)
    linear_streak = 0
    residual = None

    for iteration in range(1, max_iters + 1):
        values = evaluate(x)
        residual = norm_inf(ctx, values)
        J = jacobian(x)

        sigmas = singular_values(ctx, J)
        if sigmas[-1] <= singular_tol * max(ctx.one, sigmas[0]):
            raise SingularJacobian(
                f"Jacobian singular at iteration {iteration}: "
                f"sigma_min = {ctx.nstr(sigmas[-1], 5)}, sigma_max = {ctx.nstr(sigmas[0], 5)}"
            )
        try:
            step = ctx.lu_solve(J, ctx.matrix([-v for v in values]))
        except ZeroDivisionError as e:
            raise SingularJacobian(f"Jacobian singular at iteration {iteration}") from e

        x = [x[i] + step[i] for i in range(len(x))]
        step_norm = norm2(ctx, [step[i] for i in range(len(x))])
        x_norm = norm2(ctx, x)
        steps.append(step_norm)

        if not ctx.isfinite(x_norm):
            raise NoConvergence("Newton iterate is no longer finite", residual=residual)
        if escape_radius is not None and x_norm > escape_radius:
            raise NoConvergence(
                f"Newton iterate escaped radius {ctx.nstr(escape_radius, 5)}", residual=residual
            )

        scale = 1 + x_norm
        if step_norm <= tol * scale:
            final = norm_inf(ctx, evaluate(x))
            if final <= tol:
                logger.debug(
                    f"Newton converged in {iteration} iterations, residual {ctx.nstr(final, 5)}"
                )
                return NewtonResult(x=x, iterations=iteration, residual=final, steps=steps)
            raise NoConvergence(
                f"Newton stalled with residual {ctx.nstr(final, 5)} above tolerance",
                residual=final,
            )

        if len(steps) >= 2 and steps[-2] > 0 and step_norm < watch * scale:
            if step_norm > quarter * steps[-2]:
                linear_streak += 1
            else:
                linear_streak = 0
            if linear_streak >= 2:
                raise SingularJacobian(
                    f"Newton converging linearly at iteration {iteration} (multiple root?)"
                )

    raise NoConvergence(
        f"Newton did not converge in {max_iters} iterations "
        f"(residual {ctx.nstr(residual, 5) if residual is not None else 'n/a'})",
        residual=residual,
    )
