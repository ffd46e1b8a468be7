import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from gaussrank.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_analyze_tangential_spec():
    code, text = run("analyze", str(SPECS / "tangential_twisted_cubic.json"))
    assert code == 0
    assert json.loads(text)["f"] == 1


def test_samples_below_minimum_is_usage_error():
    with pytest.raises(SystemExit) as info:
        run("analyze", str(SPECS / "tangential_twisted_cubic.json"), "--samples", "1")
    assert info.value.code == 1


@pytest.mark.parametrize("flag,value", [("--tol-rank", "0"), ("--cluster-tol", "-1"),
                                        ("--seed", "-3"), ("--report", "xml")])
def test_invalid_flags(flag, value):
    with pytest.raises(SystemExit) as info:
        run("suite", flag, value)
    assert info.value.code == 1


def test_malformed_json_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "op": "join",\n  "args": [\n}\n')
    code, _ = run("analyze", str(bad))
    assert code == 1
    assert "line 4" in capsys.readouterr().err


def test_classify_join_spec():
    code, text = run("classify", str(SPECS / "join_two_curves.json"))
    assert code == 0
    rep = json.loads(text)
    assert rep["class"] == "1c"
    assert rep["votes"] == {"1c": 10}


def test_classify_cone_spec():
    code, text = run("classify", str(SPECS / "cone_over_surface.json"))
    assert (code, json.loads(text)["class"]) == (0, "2c")


def test_classify_nondegenerate_spec():
    code, text = run("classify", str(SPECS / "cubic_graph.json"))
    assert (code, json.loads(text)["class"]) == (0, "nondegenerate")


def test_classify_wrong_dimension_exit_code():
    code, _ = run("classify", str(SPECS / "tangential_twisted_cubic.json"))
    assert code == 2


def test_suite_default_run_passes():
    code, text = run("suite")
    assert code == 0
    assert text.rstrip().endswith("16/16 rows pass")


def test_suite_absurd_tolerance_fails(capsys):
    code, _ = run("suite", "--tol-rank", "1e-1", "--report", "json")
    assert code == 2
    assert "failed" in capsys.readouterr().err


def test_suite_csv_matches_json():
    _, as_json = run("suite", "--report", "json", "--fibers", "3")
    _, as_csv = run("suite", "--report", "csv", "--fibers", "3")
    rows = json.loads(as_json)
    parsed = list(csv.DictReader(io.StringIO(as_csv)))
    assert [r["name"] for r in parsed] == [r["name"] for r in rows]
    assert [json.loads(r["pattern"]) for r in parsed] == [r["pattern"] for r in rows]


def test_analyze_csv_report():
    code, text = run("analyze", str(SPECS / "cone_over_surface.json"), "--report", "csv")
    row = next(csv.DictReader(io.StringIO(text)))
    assert (code, row["class"], row["pattern"]) == (0, "2c", "[2]")


def test_byte_identical_output(monkeypatch):
    spec = str(SPECS / "conjugate_lines.json")
    a = subprocess.run([sys.executable, "-m", "gaussrank", "analyze", spec, "--seed", "11"],
                       capture_output=True, check=True).stdout
    monkeypatch.setenv("GAUSSRANK_THREADS", "3")
    b = subprocess.run([sys.executable, "-m", "gaussrank", "analyze", spec, "--seed", "11"],
                       capture_output=True, check=True).stdout
    assert a == b


def test_timings_flag():
    _, text = run("analyze", str(SPECS / "tangential_twisted_cubic.json"), "--timings")
    assert set(json.loads(text)["timings"]) >= {"gauss"}
