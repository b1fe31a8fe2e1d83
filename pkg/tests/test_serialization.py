"""Unit tests for system, parameter, point and sequence files and trace output.

Run with: pytest tests/test_serialization.py -v
"""

import hashlib
import json
from fractions import Fraction
from pathlib import Path

import pandas as pd
import pytest

from src.core.certification import certify_well_balanced
from src.core.exceptions import InvalidSequence, InvalidSystem
from src.core.models import TrackerConfig
from src.core.numeric import GaussianRational
from src.core.polynomials import evaluate
from src.core.serialization import (
    certificate_to_dict,
    dumps,
    file_digest,
    load_json,
    load_parameters,
    load_point,
    load_sequence,
    load_system,
    parse_complex_list,
    parse_system,
    solve_report_to_dict,
    trace_frame,
    write_trace,
)
from src.core.tracker import solve
from tests.conftest import system_json


@pytest.mark.unit
class TestLoadSystem:
    """Tests for system files."""

    def test_parabola(self, write_json, parabola):
        path = write_json("parabola.json", system_json(1, 0, [[(1, [0], [1], []), (-1, [2], [0], [])]]))
        assert load_system(path) == parabola

    def test_coefficient_forms(self):
        F = parse_system(
            {
                "n": 1,
                "components": [[
                    {"re": ["1", "4"], "y": [1]},
                    {"re": 2, "im": "0.5", "x": [1]},
                    {"re": "-0.25"},
                ]],
            }
        )
        assert evaluate(F, [0], [3]) == [Fraction(1, 2)]
        assert evaluate(F, [1], [0]) == [complex(1.75, 0.5)]

    def test_zero_denominator(self):
        with pytest.raises(InvalidSystem):
            parse_system({"n": 1, "components": [[{"re": ["1", "0"]}]]})

    def test_missing_components(self):
        with pytest.raises(InvalidSystem):
            parse_system({"n": 1})

    def test_component_count(self):
        with pytest.raises(InvalidSystem):
            parse_system({"n": 2, "components": [[{"re": 1}]]})

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InvalidSystem):
            load_json(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidSystem):
            load_system(tmp_path / "absent.json")


@pytest.mark.unit
class TestLoadInputs:
    """Tests for parameter, point and sequence inputs."""

    def test_parameters(self, write_json):
        path = write_json("z.json", {"z": [{"re": "0.1", "im": "-2"}]})
        assert load_parameters(path, 1) == [GaussianRational(Fraction(1, 10), Fraction(-2))]

    def test_parameter_count(self, write_json):
        path = write_json("z.json", {"z": []})
        with pytest.raises(InvalidSystem):
            load_parameters(path, 1)

    def test_point_flattened(self, write_json):
        path = write_json("pt.json", {"x": [{"re": "2"}], "y": [{"re": "4", "im": "0"}]})
        assert load_point(path, 1) == [GaussianRational.of(2), GaussianRational.of(4)]

    def test_point_size(self, write_json):
        path = write_json("pt.json", {"x": [{"re": "2"}], "y": []})
        with pytest.raises(InvalidSystem):
            load_point(path, 1)

    def test_complex_list(self):
        assert parse_complex_list(["1-2j", "3/4"]) == [
            GaussianRational(Fraction(1), Fraction(-2)),
            GaussianRational(Fraction(3, 4), Fraction(0)),
        ]
        with pytest.raises(InvalidSystem):
            parse_complex_list(["one"])

    def test_sequence_from_args(self):
        assert load_sequence("user", ["2", "4"]).log2_magnitudes == (1, 2)
        assert load_sequence("factorial_pow2", length=4).length == 4

    def test_sequence_file(self, write_json):
        path = write_json("seq.json", {"kind": "user", "values": [2, 8, 1024]})
        assert load_sequence(path=path).log2_magnitudes == (1, 3, 10)

    def test_bad_sequence_file(self, write_json):
        path = write_json("seq.json", {"kind": "user", "values": [2, 0]})
        with pytest.raises(InvalidSequence):
            load_sequence(path=path)
        path = write_json("seq2.json", {"length": 0})
        with pytest.raises(InvalidSequence):
            load_sequence(path=path)

    def test_digest(self, tmp_path):
        path = tmp_path / "data.json"
        path.write_bytes(b'{"n": 1}')
        assert file_digest(path) == hashlib.sha256(b'{"n": 1}').hexdigest()


class TestOutput:
    """Tests for result dictionaries and trace files."""

    def test_certificate_dict(self, parabola):
        cert = certify_well_balanced(parabola, (), [2, 4])
        data = certificate_to_dict(cert, 256)
        assert data["flags"] == {"regular": True, "balanced": True, "well_balanced": True}
        assert data["witness"] == {"I": [1], "J": []}
        assert data["witness_det_abs"] == "4.0"
        assert data["residual"] == "0.0"
        assert data["tolerances"]["residual_tol_log2"] == "2^-128"
        json.dumps(data)

    def test_dumps_is_canonical(self):
        assert dumps({"b": 1, "a": [1]}) == '{\n  "a": [\n    1\n  ],\n  "b": 1\n}\n'

    def test_solve_report(self, y_equals_one, tower):
        report = solve(y_equals_one, ())
        data = solve_report_to_dict(report, y_equals_one, (), tower)
        assert data["final_d"] == 3
        assert data["sequence"] == "default_tower"
        assert data["path_length"] == len(report.path)
        # y = H_3(a) = 1 at the returned root
        assert abs(float(data["point"]["y"][0]["re"]) - 1) < 1e-20
        assert "certificate" not in data
        json.dumps(data)

    def test_trace_columns(self, y_equals_one):
        report = solve(y_equals_one, (), TrackerConfig(d_start=1, d_max=2, apply_stop_rule=False))
        frame = trace_frame(report.path, 256)
        assert list(frame.columns) == ["d", "eps_log2", "x1_re", "x1_im", "residual_log2", "newton_iters"]
        assert len(frame) == len(report.path)
        assert frame["d"].iloc[0] == 1
        assert frame["eps_log2"].iloc[0] == "-inf"
        assert abs(float(frame["eps_log2"].iloc[-1]) + 1) < 1e-12

    def test_write_trace(self, tmp_path, y_equals_one):
        report = solve(y_equals_one, (), TrackerConfig(d_start=1, d_max=2, apply_stop_rule=False))
        path = write_trace(tmp_path / "out" / "trace.csv", report.path, 256)
        frame = pd.read_csv(path)
        assert len(frame) == len(report.path)
        assert frame["newton_iters"].iloc[0] == 0

    def test_empty_trace(self):
        frame = trace_frame([], 256)
        assert list(frame.columns) == ["d", "eps_log2", "residual_log2", "newton_iters"]
        assert frame.empty


class TestSampleData:
    """The shipped example files load cleanly."""

    DATA = Path(__file__).parent.parent / "data" / "systems"

    @pytest.mark.parametrize(
        "name,n,r",
        [
            ("y_equals_one.json", 1, 0),
            ("coupled_pair.json", 2, 0),
            ("parabola.json", 1, 0),
            ("quadratic_family.json", 1, 1),
            ("y_equals_z.json", 1, 1),
        ],
    )
    def test_systems(self, name, n, r):
        F = load_system(self.DATA / name)
        assert (F.n, F.r) == (n, r)

    def test_point_parameters_sequence(self, parabola):
        point = load_point(self.DATA / "parabola_point.json", 1)
        assert evaluate(parabola, point[:1], point[1:]) == [0]
        assert load_parameters(self.DATA / "half.json", 1) == [GaussianRational.of(Fraction(1, 2))]
        assert load_sequence(path=self.DATA / "user_sequence.json").values == (2, 8, 1024)
