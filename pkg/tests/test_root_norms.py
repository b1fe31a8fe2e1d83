"""Unit tests for minimum isolated root norms and the semicontinuity probe.

Run with: pytest tests/test_root_norms.py -v
"""

import pytest

from src.core.exceptions import DimensionMismatch, InvalidSystem
from src.core.polynomials import ComposedSystem
from src.core.root_norms import min_isolated_root_norm, polynomial_roots, semicontinuity_probe
from tests.conftest import make_system


@pytest.mark.unit
class TestPolynomialRoots:
    """Tests for companion-matrix root finding."""

    def test_quadratic(self, ctx):
        roots = sorted(polynomial_roots(ctx, [1, 0, 1]), key=lambda r: r.imag)
        assert abs(roots[0] + 1j) < ctx.ldexp(1, -200)
        assert abs(roots[1] - 1j) < ctx.ldexp(1, -200)

    def test_linear(self, ctx):
        assert polynomial_roots(ctx, [2, -1, 0]) == [2]

    def test_trailing_zeros_are_roots_at_origin(self, ctx):
        assert polynomial_roots(ctx, [0, 0, 1]) == [0, 0]

    def test_constant_and_zero(self, ctx):
        assert polynomial_roots(ctx, [3]) == []
        assert polynomial_roots(ctx, [0, 0, 0]) == []


class TestMinIsolatedRootNorm:
    """Tests for N_F(z) on z x^2 - 2x + 1."""

    def test_degree_drop_at_zero(self, quadratic_family, ctx):
        assert min_isolated_root_norm(quadratic_family, [0]) == ctx.mpf(1) / 2

    def test_small_parameter(self, quadratic_family, ctx):
        # roots (1 +- sqrt(1 - z)) / z
        expected = (1 - ctx.sqrt(ctx.mpf("0.9"))) / ctx.mpf("0.1")
        assert abs(min_isolated_root_norm(quadratic_family, ["0.1"]) - expected) < 1e-30
        assert abs(expected - ctx.mpf("0.5131670")) < 1e-7

    def test_double_root(self, quadratic_family):
        assert abs(min_isolated_root_norm(quadratic_family, [1]) - 1) < 1e-30

    def test_no_roots_is_infinite(self, ctx):
        # F = z1 at z = 0 vanishes identically
        F = make_system(1, 1, [[(1, [0], [0], [1])]])
        assert min_isolated_root_norm(F, [0]) == ctx.inf
        assert min_isolated_root_norm(F, [2]) == ctx.inf

    def test_composed_system(self, tower, y_equals_one):
        # x/2 + x^2/2 - 1 has roots 1 and -2
        norm = min_isolated_root_norm(ComposedSystem(y_equals_one, (), tower, 2))
        assert abs(norm - 1) < 1e-60

    def test_rejects_systems(self, coupled_pair, parabola):
        with pytest.raises(InvalidSystem):
            min_isolated_root_norm(coupled_pair)
        with pytest.raises(InvalidSystem):
            min_isolated_root_norm(parabola)

    def test_parameter_count(self, quadratic_family):
        with pytest.raises(DimensionMismatch):
            min_isolated_root_norm(quadratic_family, [])


class TestSemicontinuityProbe:
    """Upper semicontinuity of N_F around z = 0."""

    def test_small_circle(self, quadratic_family, ctx):
        probe = semicontinuity_probe(quadratic_family, [0], "0.001")
        assert probe.center_norm == ctx.mpf(1) / 2
        assert len(probe.norms) == 16
        assert probe.max_norm <= ctx.mpf("0.501")
        assert probe.max_norm == max(probe.norms)

    def test_radius_one_hundredth(self, quadratic_family, ctx):
        # The small root 1/2 + z/8 + O(z^2) moves by about radius / 8
        probe = semicontinuity_probe(quadratic_family, [0], "0.01")
        assert probe.max_norm <= probe.center_norm + ctx.mpf("0.0025")
        assert min(probe.norms) >= probe.center_norm - ctx.mpf("0.0025")

    def test_point_count(self, quadratic_family):
        assert len(semicontinuity_probe(quadratic_family, [0], "0.01", points=4).norms) == 4

    def test_needs_parameter(self):
        F = make_system(1, 0, [[(1, [1], [0], []), (-1, [0], [0], [])]])
        with pytest.raises(InvalidSystem):
            semicontinuity_probe(F, [], "0.1")

    def test_bad_point_count(self, quadratic_family):
        with pytest.raises(ValueError):
            semicontinuity_probe(quadratic_family, [0], "0.1", points=0)
