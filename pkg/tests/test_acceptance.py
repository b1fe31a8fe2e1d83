"""End-to-end solves checked against independent oracles.

Run with: pytest tests/test_acceptance.py -v -m slow
"""

from fractions import Fraction

import pytest

from src.core.certification import certify_well_balanced
from src.core.liouville import eval_partial_sum
from src.core.models import TrackerConfig
from src.core.numeric import get_context
from src.core.polynomials import ComposedSystem
from src.core.serialization import dumps, solve_report_to_dict
from src.core.tracker import solve
from tests.conftest import make_system


def full_series(tower, x):
    """H(x) to working precision: a_6 is already 2^-(8.6e7) small."""
    return eval_partial_sum(tower, 5, 0, x)


@pytest.mark.slow
class TestScalarSolve:
    """F = y1 - 1, i.e. H(x) = 1."""

    def test_matches_scalar_newton(self, y_equals_one, tower, ctx):
        report = solve(y_equals_one, ())
        root = report.limit_root
        oracle = ctx.findroot(lambda x: x / 2 + x**2 / 2 + x**3 / 16 - 1, ctx.mpf(1))
        assert abs(root.a[0] - oracle) < ctx.ldexp(1, -180)
        assert [state.d for state in report.path][-1] == 3

    def test_matches_degree4_oracle_at_512_bits(self, y_equals_one):
        fine = get_context(512)
        oracle = fine.findroot(lambda x: x / 2 + x**2 / 2 + x**3 / 16 + fine.ldexp(x**4, -108) - 1, fine.mpf(1))
        root = solve(y_equals_one, ()).limit_root
        assert root.final_d <= 4
        assert abs(fine.mpc(root.a[0]) - oracle) < 1e-30

    def test_total_residual_bounds_full_series(self, y_equals_one, tower, ctx):
        root = solve(y_equals_one, ()).limit_root
        assert abs(full_series(tower, root.a[0]) - 1) <= root.total_residual_bound

    def test_cauchy_history_shrinks(self, y_equals_one):
        history = solve(y_equals_one, ()).limit_root.cauchy_history
        assert history[1] < history[0]

    def test_limit_point_is_well_balanced(self, y_equals_one, tower):
        report = solve(y_equals_one, ())
        a = report.limit_root.a
        y, _ = ComposedSystem(y_equals_one, (), tower, report.limit_root.final_d).inner(a)
        assert certify_well_balanced(y_equals_one, (), a + y).well_balanced


@pytest.mark.slow
class TestCoupledSolve:
    """F = (y1 - x2, y2 - x1 - 1): x1 is a fixed point of H(H(x1)) - 1."""

    def test_degree_sequence(self, coupled_pair, ctx):
        report = solve(coupled_pair, ())
        start = report.path[0]
        assert start.d == 1
        assert abs(start.x[0] + ctx.mpf(4) / 3) < ctx.ldexp(1, -180)
        assert abs(start.x[1] + ctx.mpf(2) / 3) < ctx.ldexp(1, -180)
        end_of_first = [s for s in report.path if s.d == 1][-1]
        assert abs(end_of_first.x[0] + 1) < ctx.ldexp(1, -180)
        assert abs(end_of_first.x[1]) < ctx.ldexp(1, -180)
        assert report.limit_root.final_d == 3

    def test_matches_fixed_point(self, coupled_pair, tower, ctx):
        root = solve(coupled_pair, ()).limit_root
        x1 = ctx.mpf(-1)
        for _ in range(300):
            x1 = eval_partial_sum(tower, 3, 0, eval_partial_sum(tower, 3, 0, x1)) - 1
        assert abs(root.a[0] - x1) < ctx.ldexp(1, -180)
        assert abs(root.a[1] - eval_partial_sum(tower, 3, 0, x1)) < ctx.ldexp(1, -180)
        assert abs(root.a[0] - ctx.mpf("-1.026")) < 1e-2
        assert abs(root.a[1] - ctx.mpf("-0.056")) < 1e-2

    def test_certified_point(self, coupled_pair, tower):
        root = solve(coupled_pair, ()).limit_root
        y, _ = ComposedSystem(coupled_pair, (), tower, root.final_d).inner(root.a)
        cert = certify_well_balanced(coupled_pair, (), root.a + y)
        assert cert.well_balanced
        assert (cert.witness.I, cert.witness.J) == ([], [1, 2])


@pytest.mark.slow
class TestParameterizedSolve:
    """F = y1 - z1 at z1 = 1/2."""

    def test_residual_bound(self, tower, ctx):
        F = make_system(1, 1, [[(1, [0], [1], [0]), (-1, [0], [0], [1])]])
        root = solve(F, (Fraction(1, 2),)).limit_root
        assert root.stop_rule_met
        assert abs(full_series(tower, root.a[0]) - ctx.mpf(1) / 2) <= root.total_residual_bound


@pytest.mark.slow
class TestDeterminism:
    """Same inputs and seed give byte-identical results."""

    @pytest.mark.parametrize("seed", [0, 17])
    def test_repeat(self, coupled_pair, tower, seed):
        config = TrackerConfig(rng_seed=seed)
        first = dumps(solve_report_to_dict(solve(coupled_pair, (), config), coupled_pair, (), tower))
        second = dumps(solve_report_to_dict(solve(coupled_pair, (), config), coupled_pair, (), tower))
        assert first == second
