from __future__ import annotations

import json
from fractions import Fraction

import pytest

from hurwitz_tr.cli import EXIT_INPUT, EXIT_PRECONDITION, main
from hurwitz_tr.serialize import decode_scalar, tower_from_description


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_analyze_zinv(capsys):
    code, data = run_json(capsys, "analyze", "zinv")
    assert code == 0
    res = data["result"]
    assert res["contours"] == ["type2(2)", "type3(2)"]
    assert res["dominant"] is True and res["compatible"] is True
    assert [b["u"] for b in res["curve"]["branch_points"]] == ["2", "-2"]


def test_invariants_airy(capsys):
    code, data = run_json(capsys, "invariants", "airy", "--g", "1", "--n", "1")
    assert code == 0
    assert data["result"]["entries"] == [{"index": [[0, 1]], "value": "-1/24"}]
    assert data["conventions"]["id"].startswith("kernel=")


def test_invariants_routes_agree(capsys):
    _, a = run_json(capsys, "invariants", "cubic", "--g", "0", "--n", "4")
    _, b = run_json(capsys, "invariants", "cubic", "--g", "0", "--n", "4", "--route", "V")
    assert a["result"]["entries"] == b["result"]["entries"]


def test_correlators_airy(capsys):
    _, data = run_json(capsys, "correlators", "airy", "--g", "1", "--n", "1")
    assert data["result"]["entries"] == [{"index": [[0, 1]], "value": "1/8"}]
    _, data = run_json(capsys, "correlators", "airy", "--g", "1", "--n", "1", "--form", "V")
    assert data["result"]["entries"] == [{"index": [[0, 1]], "value": "-1/24"}]


def test_scalar_round_trip_through_json(capsys, zinv):
    _, data = run_json(capsys, "analyze", "zinv")
    tower = tower_from_description(data["tower"])
    signs = [decode_scalar(s, tower) for s in data["conventions"]["branch_signs"]]
    assert [s * s for s in signs] == [2, -2]
    assert signs == [ch.branch_sign for ch in zinv.charts]


def test_rmatrix_json(capsys, zinv):
    _, data = run_json(capsys, "rmatrix", "zinv", "--kmax", "2")
    tower = tower_from_description(data["tower"])
    R1 = [[decode_scalar(v, tower) for v in row] for row in data["result"]["R"][1]]
    assert R1[0][0] == Fraction(-1, 16) and R1[1][1] == Fraction(1, 16)


def test_frobenius_cubic(capsys):
    _, data = run_json(capsys, "frobenius", "cubic")
    res = data["result"]
    assert res["G"] == [["0", "1/2"], ["1/2", "0"]]
    assert res["eta_canonical"] == ["1/2", "-1/2"]
    assert res["dy_decomposition"] == {"coefficients": ["2", "0"], "dx_coefficient": "0"}


def test_text_and_csv_formats(capsys):
    code, out = run(capsys, "invariants", "zinv", "--g", "1", "--n", "1", "--format", "text")
    assert code == 0 and "result.entries[[[0, 0]]]" in out and "-1/12" in out
    code, out = run(capsys, "invariants", "zinv", "--g", "0", "--n", "3", "--format", "csv")
    assert code == 0 and out.startswith("path,value\n")
    assert '"result.entries[[[0, 0], [1, 0], [1, 0]]]",1' in out


def test_degenerate_curve_exit_code(capsys, tmp_path):
    p = tmp_path / "cube.txt"
    p.write_text("x_num = 0 0 0 1\ndy_num = 1\n")
    code, data = run_json(capsys, "analyze", str(p))
    assert code == EXIT_PRECONDITION
    assert data["error"]["type"] == "DegeneracyError"


def test_bad_input_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("x_num =\ndy_num = 1\n")
    code, data = run_json(capsys, "analyze", str(p))
    assert code == EXIT_INPUT and data["error"]["kind"] == "input"
    code, _ = run(capsys, "analyze", str(tmp_path / "missing.txt"))
    assert code == EXIT_INPUT


def test_unstable_request_is_precondition(capsys):
    code, data = run_json(capsys, "correlators", "airy", "--g", "0", "--n", "2")
    assert code == EXIT_PRECONDITION


def test_verify_needs_target(capsys):
    code, _ = run(capsys, "verify")
    assert code == EXIT_INPUT


@pytest.mark.parametrize("name", ["airy", "cubic"])
def test_verify_curve(capsys, name):
    code, data = run_json(capsys, "verify", name)
    assert code == 0 and data["passed"]
    assert all(c["passed"] for c in data["checks"])


def test_verify_family(capsys):
    code, data = run_json(capsys, "verify", "--family", "cubic")
    assert code == 0 and data["passed"]
    names = {c["check"] for c in data["checks"]}
    assert {"rauch", "vardy", "flatness", "rmatrix_ode", "lg_deformation"} <= names
