import io
import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import jsonschema
import pytest

from scissors.assembler import PieceMap, Transform, iet
from scissors.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, parse_gamma, run
from scissors.groups import ScissorsAuto, element_from_json, rotation
from scissors.polytopes import Box, RectPolytope
from scissors.scalars import SQRT2, CoefficientGroup

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "schema.json").read_text())
GAMMA = CoefficientGroup.q_span(1, "sqrt2")


def validate(obj, name):
    jsonschema.validate(obj, {**SCHEMA, "$ref": f"#/$defs/{name}"})


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def rot(tmp_path):
    path = tmp_path / "rot.json"
    path.write_text(json.dumps(rotation(iet(GAMMA), SQRT2 - 1).to_json()))
    return path


@pytest.fixture
def bad(tmp_path):
    # [0,1/2] fixed and [1/2,1] moved onto [1/4,3/4]
    pieces = [PieceMap(Box.of((0, F(1, 2))), Transform.translation([0])),
              PieceMap(Box.of((F(1, 2), 1)), Transform.translation([F(-1, 4)]))]
    obj = ScissorsAuto(iet(GAMMA), RectPolytope.interval(0, 1), pieces).to_json()
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    return path


def test_saf_example(rot):
    code, text = call("saf", "--spec", "iet", "--gamma", "1,sqrt2", "--element", str(rot))
    assert code == EXIT_OK
    assert json.loads(text) == [{"pair": [0, 1], "num": 2, "den": 1}]
    validate(json.loads(text), "wedge")


def test_ktheory_example():
    code, text = call("ktheory-1d", "--multiplier", "[[5]]", "--localize")
    assert code == EXIT_OK and json.loads(text) == {"0": {"torsion": [4]}}
    validate(json.loads(text), "graded_group")


def test_verify_overlapping_images(bad):
    code, text = call("verify", str(bad))
    assert code == EXIT_DOMAIN
    doc = json.loads(text)
    assert doc["error"] == "OverlappingImages"


def test_verify_ok(rot):
    code, text = call("verify", str(rot))
    assert code == EXIT_OK and json.loads(text)["ok"]


@pytest.mark.parametrize("argv", [["bogus"], ["saf", "--unknown-flag"], ["verify", "/nonexistent.json"], []])
def test_usage_errors(argv):
    code, _ = call(*argv)
    assert code == EXIT_USAGE


def test_domain_error_is_structured():
    code, text = call("embed", "--spec", "rec", "--source", "[0,2]", "--target", "[0,1]")
    assert code == EXIT_DOMAIN
    doc = json.loads(text)
    validate(doc, "error")


def test_element_round_trip(rot, tmp_path):
    out = tmp_path / "inv.json"
    code, text = call("invert", str(rot), "--out", str(out))
    assert code == EXIT_OK
    obj = json.loads(out.read_text())
    assert obj == json.loads(text)
    validate(obj, "element")
    f = element_from_json(obj)
    assert f.to_json() == obj
    code, text = call("compose", str(rot), str(out))
    assert code == EXIT_OK and element_from_json(json.loads(text)).is_identity()


def test_compose_orders_differ_only_in_order(rot, tmp_path):
    half = tmp_path / "half.json"
    half.write_text(json.dumps(rotation(iet(GAMMA), "1/2").to_json()))
    _, d = call("compose", str(rot), str(half))
    _, f = call("compose", str(half), str(rot), "--order", "functional")
    assert d == f


def test_apply_point(rot):
    code, text = call("apply", str(rot), "--point", "1/4")
    assert code == EXIT_OK
    assert json.loads(text)["image"] == [str(SQRT2 - 1 + F(1, 4))]


def test_embed_certificate(tmp_path):
    cert = tmp_path / "cert.txt"
    out = tmp_path / "e.json"
    code, text = call("embed", "--spec", "rec", "--source", "[0,1]x[0,1]",
                      "--target", "[0,2]x[0,1]", "--out", str(out), "--certificate", str(cert))
    assert code == EXIT_OK
    doc = json.loads(text)
    assert doc["certificate"]["volume_complement"] == doc["certificate"]["volume_source"]
    assert "pieces:" in cert.read_text()
    validate(json.loads(out.read_text()), "element")


def test_congruence_and_kunneth_and_poincare():
    code, _ = call("congruence", "--spec", "brin-thompson(2)", "--source", "[0,1]x[0,1]", "--target", "[0,1/2]x[0,1]")
    assert code == EXIT_OK
    code, text = call("kunneth", "--left", '{"1":{"torsion":[2]}}', "--power", "3")
    assert json.loads(text) == {"3": {"torsion": [2]}, "4": {"torsion": [2, 2]}, "5": {"torsion": [2]}}
    code, text = call("poincare", "--rank", "3", "--degree", "4")
    assert json.loads(text)["dims"][:5] == [1, 3, 4, 4, 4]


def test_complex_and_pt1d():
    code, text = call("complex", "--model", "finite-set", "--params", "1,4")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["faces"] == [4, 6, 4, 1] and doc["holds"]
    code, text = call("pt1d", "--cuts", "0,1/2,sqrt2")
    doc = json.loads(text)
    assert code == EXIT_OK and doc == {"group": {"rank": 2}, "iso_check": True}


def test_selftest_json_lines():
    code, text = call("selftest", "--only", "3", "--only", "4")
    lines = [json.loads(line) for line in text.splitlines()]
    assert code == EXIT_OK and len(lines) == 2
    for line in lines:
        validate(line, "selftest_line")
        assert line["ok"]


def test_parse_gamma():
    assert parse_gamma("Q") == CoefficientGroup.rationals()
    assert parse_gamma("Z[1/2]") == CoefficientGroup.localization(2)
    assert parse_gamma("Z:1,sqrt2") == CoefficientGroup.lattice(1, "sqrt2")
    assert parse_gamma("1,sqrt2") == GAMMA


def test_deterministic_subprocess(rot):
    argv = [sys.executable, "-m", "scissors", "k1-relations", "--count", "5", "--seed", "3"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and json.loads(first)["ok"]
