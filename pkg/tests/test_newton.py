"""Unit tests for Newton's method and the composed-system corrector.

Run with: pytest tests/test_newton.py -v
"""

import pytest

from src.core.exceptions import NoConvergence, SingularJacobian
from src.core.models import TrackerConfig
from src.core.newton import newton_iterate
from src.core.polynomials import ComposedSystem
from src.core.tracker import newton_correct
from tests.conftest import make_system


def scalar_newton(ctx, f, df, x, iterations=60):
    """Independent scalar Newton oracle."""
    for _ in range(iterations):
        x = x - f(x) / df(x)
    return x


@pytest.mark.unit
class TestNewtonIterate:
    """Tests for the generic Newton driver."""

    def test_square_root(self, ctx):
        result = newton_iterate(
            ctx,
            lambda x: [x[0] ** 2 - 2],
            lambda x: ctx.matrix([[2 * x[0]]]),
            [1],
            tol=ctx.ldexp(1, -192),
            max_iters=50,
            singular_tol=ctx.ldexp(1, -64),
        )
        assert abs(result.x[0] - ctx.sqrt(2)) < ctx.ldexp(1, -190)
        assert result.iterations < 12
        # quadratic convergence: late steps shrink much faster than linearly
        assert result.steps[-1] < result.steps[-3] ** 1.5

    def test_budget_exhausted(self, ctx):
        with pytest.raises(NoConvergence) as excinfo:
            newton_iterate(
                ctx,
                lambda x: [x[0] ** 2 - 2],
                lambda x: ctx.matrix([[2 * x[0]]]),
                [1000],
                tol=ctx.ldexp(1, -192),
                max_iters=3,
                singular_tol=ctx.ldexp(1, -64),
            )
        assert excinfo.value.residual is not None

    def test_escape(self, ctx):
        with pytest.raises(NoConvergence):
            newton_iterate(
                ctx,
                lambda x: [x[0] - 100],
                lambda x: ctx.matrix([[1]]),
                [0],
                tol=ctx.ldexp(1, -192),
                max_iters=10,
                singular_tol=ctx.ldexp(1, -64),
                escape_radius=40,
            )

    def test_singular_start(self, ctx):
        with pytest.raises(SingularJacobian):
            newton_iterate(
                ctx,
                lambda x: [x[0] ** 2 + 1],
                lambda x: ctx.matrix([[2 * x[0]]]),
                [0],
                tol=ctx.ldexp(1, -192),
                max_iters=10,
                singular_tol=ctx.ldexp(1, -64),
            )


class TestNewtonCorrect:
    """Tests for Newton on composed systems."""

    def test_degree2_root(self, tower, y_equals_one, ctx):
        result = newton_correct(ComposedSystem(y_equals_one, (), tower, 2), ["1.1"], TrackerConfig())
        assert abs(result.x[0] - 1) < ctx.ldexp(1, -190)

    def test_degree3_root(self, tower, y_equals_one, ctx):
        result = newton_correct(ComposedSystem(y_equals_one, (), tower, 3), [1], TrackerConfig())
        oracle = scalar_newton(
            ctx,
            lambda x: x / 2 + x**2 / 2 + x**3 / 16 - 1,
            lambda x: ctx.mpf(1) / 2 + x + 3 * x**2 / 16,
            ctx.mpf(1),
        )
        assert abs(result.x[0] - oracle) < ctx.ldexp(1, -180)
        assert abs(result.x[0] - ctx.mpf("0.96239")) < 1e-4

    def test_double_root_is_singular(self, tower):
        F = make_system(1, 0, [[(1, [0], [2], [])]])
        with pytest.raises(SingularJacobian):
            newton_correct(ComposedSystem(F, (), tower, 1), ["0.1"], TrackerConfig())
