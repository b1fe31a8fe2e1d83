"""Unit tests for regular, balanced and well-balanced zero certification.

Run with: pytest tests/test_certification.py -v
"""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from src.core.certification import (
    augment_for_inverse,
    certify_regular,
    certify_well_balanced,
    degree_bounds,
    extend_zero,
    find_balanced_witness,
    probe_parameter_stability,
    tangent_margins,
)
from src.core.exceptions import (
    DimensionMismatch,
    DistinctnessViolated,
    InvalidSystem,
    NotAZero,
    ZeroPolynomial,
)
from src.core.models import Tolerances
from src.core.polynomials import evaluate, jacobian
from tests.conftest import make_system


@pytest.fixture(scope="module")
def shifted_line():
    """F = (x1 - 3)."""
    return make_system(1, 0, [[(1, [1], [0], []), (-3, [0], [0], [])]])


@pytest.fixture(scope="module")
def diagonal():
    """F = (y1 - x1)."""
    return make_system(1, 0, [[(1, [0], [1], []), (-1, [1], [0], [])]])


class TestCertifyRegular:
    """Tests for residual and rank checks."""

    def test_parabola_regular(self, parabola):
        cert = certify_regular(parabola, (), [2, 4])
        assert cert.regular
        assert cert.jacobian_rank == 1
        assert cert.residual_norm == 0

    def test_double_line_not_regular(self):
        F = make_system(1, 0, [[(1, [0], [2], [])]])
        cert = certify_regular(F, (), [1, 0])
        assert not cert.regular
        assert cert.jacobian_rank == 0

    def test_coupled_pair_rank_two(self, coupled_pair, ctx):
        cert = certify_regular(coupled_pair, (), [1, 2, 2, 2])
        assert cert.regular
        assert cert.jacobian_rank == 2
        for sigma in cert.singular_values:
            assert abs(sigma - ctx.sqrt(2)) < ctx.ldexp(1, -200)

    def test_not_a_zero(self, parabola):
        with pytest.raises(NotAZero):
            certify_regular(parabola, (), [2, "4.1"])

    def test_point_size(self, parabola):
        with pytest.raises(DimensionMismatch):
            certify_regular(parabola, (), [2, 4, 1])


class TestBalancedWitness:
    """Tests for the complementary-minor witness."""

    def test_parabola_argmax(self, parabola, ctx):
        witness = find_balanced_witness(parabola, (), [2, 4])
        # |d/dx| = 4 beats |d/dy| = 1
        assert (witness.I, witness.J) == ([1], [])
        assert witness.det_abs == 4

    def test_zero_coordinate(self, diagonal):
        with pytest.raises(DistinctnessViolated):
            find_balanced_witness(diagonal, (), [0, 0])

    def test_coupled_pair_tie_break(self, coupled_pair):
        witness = find_balanced_witness(coupled_pair, (), [1, 2, 2, 2])
        # |det| = 1 for both I = {} and I = {1, 2}; the empty set sorts first
        assert (witness.I, witness.J) == ([], [1, 2])
        assert witness.det_abs == 1

    def test_coinciding_coordinates(self, coupled_pair):
        F = make_system(
            2, 0, [[(1, [0, 0], [1, 0], []), (-1, [1, 0], [0, 0], [])], [(1, [0, 0], [0, 1], []), (-1, [0, 1], [0, 0], [])]]
        )
        with pytest.raises(DistinctnessViolated):
            find_balanced_witness(F, (), [2, 2, 2, 2])

    def test_scaling_keeps_witness(self):
        base = [[(1, [0, 0], [1, 0], []), (-1, [0, 1], [0, 0], []), (2, [1, 0], [0, 0], [])],
                [(1, [0, 0], [0, 1], []), (-1, [1, 0], [0, 0], []), (-1, [0, 0], [0, 0], [])]]
        scaled = [[(7 * c, x, y, z) for c, x, y, z in base[0]], base[1]]
        F = make_system(2, 0, base)
        G = make_system(2, 0, scaled)
        point = [1, 3, 1, 2]
        assert evaluate(F, point[:2], point[2:]) == [0, 0]
        w_f = find_balanced_witness(F, (), point)
        w_g = find_balanced_witness(G, (), point)
        assert (w_f.I, w_f.J) == (w_g.I, w_g.J)


@pytest.mark.slow
class TestWitnessOracle:
    """find_balanced_witness agrees with exact brute-force determinants."""

    @staticmethod
    def _det(rows):
        if not rows:
            return Fraction(1)
        if len(rows) == 1:
            return rows[0][0]
        return sum(
            (-1) ** j * rows[0][j] * TestWitnessOracle._det([row[:j] + row[j + 1:] for row in rows[1:]])
            for j in range(len(rows))
        )

    def test_random_linear_systems(self):
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randint(1, 4)
            C = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            B = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            x = rng.sample([v for v in range(-9, 10) if v != 0], n)
            y = [rng.randint(-5, 5) for _ in range(n)]
            components = []
            for k in range(n):
                comp = [(C[k][j], [int(i == j) for i in range(n)], [0] * n, []) for j in range(n) if C[k][j]]
                comp += [(B[k][j], [0] * n, [int(i == j) for i in range(n)], []) for j in range(n) if B[k][j]]
                constant = -sum(C[k][j] * x[j] + B[k][j] * y[j] for j in range(n))
                if constant:
                    comp.append((constant, [0] * n, [0] * n, []))
                components.append(comp)
            F = make_system(n, 0, components)

            best = None
            for I in sorted(c for size in range(n + 1) for c in combinations(range(1, n + 1), size)):
                cols = [C[k][j - 1] if j in I else B[k][j - 1] for k in range(n) for j in range(1, n + 1)]
                rows = [cols[k * n:(k + 1) * n] for k in range(n)]
                det = abs(self._det(rows))
                if best is None or det > best[1]:
                    best = (list(I), det)

            witness = find_balanced_witness(F, (), x + y)
            if best[1] == 0:
                assert witness is None
            else:
                assert witness.I == best[0]
                assert abs(witness.det_abs - best[1]) < 1e-60


class TestWellBalanced:
    """Tests for the tangent-space condition."""

    def test_parabola(self, parabola, ctx):
        cert = certify_well_balanced(parabola, (), [2, 4])
        assert cert.regular and cert.balanced and cert.well_balanced
        assert abs(cert.tangent_margins[0] - 1 / ctx.sqrt(17)) < ctx.ldexp(1, -200)

    def test_vertical_line(self, shifted_line):
        cert = certify_well_balanced(shifted_line, (), [3, 1])
        assert cert.regular
        assert cert.balanced
        assert not cert.well_balanced
        assert cert.tangent_margins == [0]

    def test_coupled_pair(self, coupled_pair, ctx):
        cert = certify_well_balanced(coupled_pair, (), [1, 2, 2, 2])
        assert cert.well_balanced
        for margin in cert.tangent_margins:
            assert abs(margin - 1 / ctx.sqrt(2)) < ctx.ldexp(1, -200)

    def test_zero_coordinate_rejected(self, diagonal):
        with pytest.raises(DistinctnessViolated):
            certify_well_balanced(diagonal, (), [0, 0])

    def test_not_regular_stops_early(self):
        F = make_system(1, 0, [[(1, [0], [2], [])]])
        cert = certify_well_balanced(F, (), [1, 0])
        assert not cert.regular
        assert not cert.balanced
        assert cert.witness is None

    def test_margins_match_kernel(self, parabola, ctx):
        witness = find_balanced_witness(parabola, (), [2, 4])
        margins = tangent_margins(ctx, jacobian(parabola, [2], [4]), witness, 1)
        assert abs(margins[0] ** 2 - ctx.mpf(1) / 17) < ctx.ldexp(1, -200)

    def test_custom_tolerances(self, parabola):
        # A tangent threshold above 1/sqrt(17) flips the verdict
        tol = Tolerances.for_precision(256).model_copy(update={"tangent_tol_log2": -1})
        cert = certify_well_balanced(parabola, (), [2, 4], tol)
        assert cert.balanced
        assert not cert.well_balanced


class TestAugmentation:
    """Tests for adjoining y_{n+1} = 1/P."""

    def test_extension_is_zero(self, parabola):
        P = [{"coefficient": 1, "x": [1]}]
        G = augment_for_inverse(parabola, P, [1], [])
        point = extend_zero(parabola, P, [1], [], [2, 4], (), 3)
        assert point == [2, 3, 4, 0.5]
        assert evaluate(G, point[:2], point[2:]) == [0, 0]
        assert certify_regular(G, (), point).jacobian_rank == 2

    def test_constant_p(self, parabola):
        G = augment_for_inverse(parabola, [{"coefficient": 1}], [1], [])
        assert extend_zero(parabola, [{"coefficient": 1}], [1], [], [2, 4], (), 5)[-1] == 1
        assert G.n == 2

    def test_zero_p(self, parabola):
        with pytest.raises(ZeroPolynomial):
            augment_for_inverse(parabola, [], [1], [])

    def test_p_outside_witness_variables(self, parabola):
        with pytest.raises(InvalidSystem):
            augment_for_inverse(parabola, [{"coefficient": 1, "y": [1]}], [1], [])

    def test_bad_partition(self, parabola):
        with pytest.raises(InvalidSystem):
            augment_for_inverse(parabola, [{"coefficient": 1}], [1], [1])

    def test_extension_errors(self, parabola):
        with pytest.raises(NotAZero):
            extend_zero(parabola, [{"coefficient": 1, "x": [1]}, {"coefficient": -2}], [1], [], [2, 4], (), 3)
        with pytest.raises(DistinctnessViolated):
            extend_zero(parabola, [{"coefficient": 1, "x": [1]}], [1], [], [2, 4], (), 2)
        with pytest.raises(DistinctnessViolated):
            extend_zero(parabola, [{"coefficient": 1, "x": [1]}], [1], [], [2, 4], (), 0)


@pytest.mark.unit
class TestDegreeBounds:
    """Tests for the degree thresholds."""

    @pytest.mark.parametrize(
        "n,r,expected",
        [(2, 1, (12, 5)), (1, 0, (2, 1)), (3, 2, (36, 11))],
    )
    def test_formulas(self, n, r, expected):
        bounds = degree_bounds(n, r)
        assert (bounds["inductive"], bounds["finiteness"]) == expected

    def test_invalid(self):
        with pytest.raises(InvalidSystem):
            degree_bounds(0, 1)


class TestParameterStability:
    """Tests for the openness probe around a well-balanced zero."""

    def test_parabola_with_parameter(self):
        # y1 - z1 x1^2 at z = 1, point (2, 4)
        F = make_system(1, 1, [[(1, [0], [1], [0]), (-1, [2], [0], [1])]])
        probe = probe_parameter_stability(F, [1], [2, 4], "0.001", samples=8, seed=3)
        assert probe.samples == 8
        assert probe.converged == 8
        assert probe.well_balanced == 8
        assert probe.same_witness == 8
        assert probe.min_rank_margin > 0

    def test_requires_balanced_zero(self):
        # y1^2 - z1 at z = 0 has a singular Jacobian at (1, 0)
        F = make_system(1, 1, [[(1, [0], [2], [0]), (-1, [0], [0], [1])]])
        with pytest.raises(NotAZero):
            probe_parameter_stability(F, [0], [1, 0], "0.01", samples=2)
