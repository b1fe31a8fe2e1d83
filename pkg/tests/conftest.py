"""
Liouville Solver Test Configuration
===================================

Test stages and markers:
- unit: Fast unit tests, no external dependencies
- slow: Full solves and randomized property sweeps

Usage:
    pytest -m unit           # Unit tests only
    pytest -m "not slow"     # Skip full solves
"""

import json

import pytest

from src.core.liouville import make_sequence
from src.core.numeric import get_context
from src.core.polynomials import PolynomialMap


# Register custom markers
def pytest_configure(config):
    config.addinivalue_line("markers", "unit: Unit tests (fast, no dependencies)")
    config.addinivalue_line("markers", "slow: Slow tests (skip with -m 'not slow')")


def make_system(n, r, components):
    """PolynomialMap from lists of (coefficient, x, y, z) tuples."""
    return PolynomialMap.from_terms(
        n,
        r,
        [
            [{"coefficient": c, "x": x, "y": y, "z": z} for c, x, y, z in comp]
            for comp in components
        ],
    )


def system_json(n, r, components):
    """System file payload from (re, x, y, z) tuples with integer coefficients."""
    return {
        "n": n,
        "r": r,
        "components": [
            [{"re": [str(c), "1"], "im": ["0", "1"], "x": x, "y": y, "z": z} for c, x, y, z in comp]
            for comp in components
        ],
    }


@pytest.fixture
def write_json(tmp_path):
    """Write a payload to tmp_path/name and return the path as a string."""

    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return _write


# Sequences and contexts
@pytest.fixture(scope="session")
def tower():
    """Default tower a_1 = 2, a_{i+1} = a_i^(i^i)."""
    return make_sequence("default_tower")


@pytest.fixture(scope="session")
def ctx():
    """256-bit mpmath context."""
    return get_context(256)


# Systems used across modules
@pytest.fixture(scope="session")
def y_equals_one():
    """F = (y1 - 1): solutions satisfy H(x) = 1."""
    return make_system(1, 0, [[(1, [0], [1], []), (-1, [0], [0], [])]])


@pytest.fixture(scope="session")
def parabola():
    """F = (y1 - x1^2)."""
    return make_system(1, 0, [[(1, [0], [1], []), (-1, [2], [0], [])]])


@pytest.fixture(scope="session")
def coupled_pair():
    """F = (y1 - x2, y2 - x1 - 1)."""
    return make_system(
        2,
        0,
        [
            [(1, [0, 0], [1, 0], []), (-1, [0, 1], [0, 0], [])],
            [(1, [0, 0], [0, 1], []), (-1, [1, 0], [0, 0], []), (-1, [0, 0], [0, 0], [])],
        ],
    )


@pytest.fixture(scope="session")
def quadratic_family():
    """F = z x^2 - 2x + 1 (n = 1, r = 1, no y)."""
    return make_system(1, 1, [[(1, [2], [0], [1]), (-2, [1], [0], [0]), (1, [0], [0], [0])]])
