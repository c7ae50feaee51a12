"""End-to-end checks of the evint executable.

Run through ctest, which sets EVINT_BIN and EVINT_SOURCE_DIR.
"""

import csv
import io
import json
import os
import pathlib
import subprocess

import jsonschema
import pytest

BIN = os.environ.get("EVINT_BIN", "evint")
SOURCE = pathlib.Path(os.environ.get("EVINT_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
FIXTURE = SOURCE / "tests" / "fixtures" / "case4.csv"
SCHEMAS = SOURCE / "docs" / "schemas"


def run(*args, cwd=None):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def validate(doc):
    schema = json.loads((SCHEMAS / f"{doc['config']['command']}.schema.json").read_text())
    jsonschema.validate(doc, schema)


# Small runs of every command, used for the schema and round-trip checks.
COMMANDS = {
    "analyze": ["analyze", "--input", FIXTURE, "--reference", "x1,x2", "--alternative", "x2,x3", "--B", 500],
    "simulate": ["simulate", "--case", 1, "--case", 4, "--trials", 12, "--B", 150],
    "ratio-sweep": ["ratio-sweep", "--case", 4, "--n", 40, "--n", 80, "--trials", 8, "--B", 150],
    "security": ["security", "--preset", "A", "--preset", "D", "--trials", 10, "--B", 150],
    "lp": ["lp", "--m", 221, "--n2", 131, "--x", 116, "--B", 2000, "--level", 0.95, "--level", 0.8],
    "profile": ["profile", "--input", FIXTURE, "--family", "regression-coefficient", "--covariates", "x1,x2",
                "--interest", "x1", "--lower", 0.2, "--upper", 1.0, "--points", 5, "--B", 100],
}


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_schema_and_round_trip(name, tmp_path):
    first_json, first_csv = tmp_path / "a.json", tmp_path / "a.csv"
    r = run(*COMMANDS[name], "-o", first_json, "--csv", first_csv)
    assert r.returncode == 0, r.stderr
    doc = json.loads(first_json.read_text())
    validate(doc)

    again_json, again_csv = tmp_path / "b.json", tmp_path / "b.csv"
    r = run("--config", first_json, "-o", again_json, "--csv", again_csv, "--threads", 1)
    assert r.returncode == 0, r.stderr
    assert again_json.read_bytes() == first_json.read_bytes()
    if first_csv.exists():
        assert again_csv.read_bytes() == first_csv.read_bytes()


def test_bare_config_is_accepted(tmp_path):
    out = tmp_path / "a.json"
    assert run(*COMMANDS["lp"], "-o", out).returncode == 0
    bare = tmp_path / "config.json"
    bare.write_text(json.dumps(json.loads(out.read_text())["config"]))
    r = run("--config", bare)
    assert r.returncode == 0, r.stderr
    assert r.stdout == out.read_text()


def test_lp_reference_counts():
    r = run("lp", "--m", 221, "--n2", 131, "--x", 116, "--B", 10000)
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    validate(doc)
    assert doc["result"]["estimate"] == 249
    assert abs(doc["result"]["capture_probability"] - 0.5261044) < 5e-7


def test_simulate_case_1_global_coverage(tmp_path):
    out = tmp_path / "cov.csv"
    r = run("simulate", "--case", 1, "--trials", 300, "--n", 100, "--csv", out)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    cell = [x for x in rows if x["kind"] == "global" and abs(float(x["level"]) - 0.95) < 1e-12]
    assert len(cell) == 1
    assert float(cell[0]["coverage"]) < 0.01


def test_case_out_of_range():
    r = run("simulate", "--case", 15)
    assert r.returncode == 2
    assert "case must be 1..14" in r.stderr


def test_fixture_local_shorter_than_global():
    r = run("analyze", "--input", FIXTURE, "--reference", "x1,x2", "--alternative", "x2,x3", "--B", 2000)
    assert r.returncode == 0, r.stderr
    res = json.loads(r.stdout)["result"]

    def length(kind):
        iv = [x for x in res[kind]["intervals"] if x["level"] == 0.95][0]
        return iv["upper"] - iv["lower"]

    assert length("local") < length("global")


def test_identical_spaces_report_a_point_mass():
    r = run("analyze", "--input", FIXTURE, "--reference", "x1", "--alternative", "x1", "--B", 200)
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    validate(doc)
    for kind in ("global", "local"):
        k = doc["result"][kind]
        assert k["point"] == 0
        assert k["category"] == "weak"
        for iv in k["intervals"]:
            assert iv["lower"] == 0 and iv["upper"] == 0
            assert iv["security"] == "WI"
    assert any("identical" in w for w in doc["warnings"])


def test_mode_selects_kinds():
    r = run("analyze", "--input", FIXTURE, "--reference", "x1", "--alternative", "x2", "--B", 200, "--mode", "local")
    res = json.loads(r.stdout)["result"]
    assert "local" in res and "global" not in res


def test_missing_response_column_is_named():
    r = run("analyze", "--input", FIXTURE, "--response", "weight", "--reference", "x1", "--alternative", "x2")
    assert r.returncode == 2
    assert "weight" in r.stderr


def test_missing_covariate_is_named():
    r = run("analyze", "--input", FIXTURE, "--reference", "x1", "--alternative", "x9")
    assert r.returncode == 2
    assert "x9" in r.stderr


def test_input_errors_exit_2(tmp_path):
    assert run("analyze", "--input", tmp_path / "none.csv", "--reference", "x1", "--alternative", "x2").returncode == 2
    assert run("analyze", "--input", FIXTURE, "--reference", "x1", "--alternative", "x2", "--B", 50).returncode == 2
    assert run("analyze", "--input", FIXTURE, "--reference", "x1", "--alternative", "x2", "--level", 1.5).returncode == 2
    assert run("analyze", "--input", FIXTURE, "--reference", "x1", "--alternative", "x2", "--penalty", "bic").returncode == 2
    assert run("lp", "--m", 10).returncode == 2
    assert run("frobnicate").returncode == 2
    assert run().returncode == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"command": "lp", "m": 221, "n2": 131, "x": 116, "colour": "red"}')
    r = run("--config", bad)
    assert r.returncode == 2 and "colour" in r.stderr
    bad.write_text("{not json")
    assert run("--config", bad).returncode == 2


def test_statistical_failures_exit_3(tmp_path):
    r = run("lp", "--m", 20, "--n2", 20, "--x", 0)
    assert r.returncode == 3, r.stderr

    collinear = tmp_path / "collinear.csv"
    lines = ["y,a,b"] + [f"{i * 0.37 % 1.3},{i},{2 * i}" for i in range(30)]
    collinear.write_text("\n".join(lines) + "\n")
    r = run("analyze", "--input", collinear, "--reference", "a", "--alternative", "a,b", "--B", 200)
    assert r.returncode == 3, r.stderr


def test_threads_do_not_change_output():
    a = run(*COMMANDS["simulate"], "--threads", 1)
    b = run(*COMMANDS["simulate"], "--threads", 3)
    assert a.returncode == 0 and a.stdout == b.stdout
