import csv
import json

import pytest

from perco_iso.cli import run


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv("PERCO_ISO_OUT", str(tmp_path))
    return tmp_path


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(l for l in fh if not l.startswith("#")))


def test_estimate_constants(out):
    assert run(["estimate-constants", "--family", "zd:2", "--max-size", "4"]) == 0
    doc = json.loads((out / "estimate-constants.json").read_text())
    recs = {r["constant"]: r for r in doc["records"]}
    assert recs["R"]["exact"] == "8/11" and recs["C"]["exact"] == "2"
    assert recs["R"]["minimizing_set"] == ["0,0", "0,1", "1,0", "1,1"]
    assert doc["manifest"]["tool_version"] and "certified" in recs["R"]


def test_exact_path_and_reproduce(out):
    assert run(["exact", "phi", "--family", "line", "--window", "path:4", "--x", "v1", "--y", "v2",
                "--p", "0.5"]) == 0
    row = _rows(out / "exact.csv")[0]
    assert float(row["value"]) == 0.125 and row["exact"] == "1/8" and row["forms_agree"] == "True"
    assert run(["reproduce", str(out / "manifest.json")]) == 0
    assert run(["reproduce", str(out / "manifest.json"), "--workers", "2"]) == 0


def test_reproduce_detects_tampering(out):
    assert run(["exact", "phi", "--family", "line", "--window", "path:4", "--x", "v1", "--y", "v2",
                "--p", "0.5"]) == 0
    payload = out / "exact.payload"
    payload.write_text(payload.read_text().replace("1/8", "1/9"))
    assert run(["reproduce", str(out / "manifest.json")]) == 4


def test_exit_codes(out):
    assert run(["nonsense"]) == 2
    assert run(["estimate-constants", "--family", "zd:x", "--max-size", "2"]) == 2
    assert run(["exact", "phi", "--family", "zd:2", "--window", "ball:4", "--x", "0,0", "--y", "1,0",
                "--p", "0.5"]) == 3
    assert run(["exact", "phi", "--family", "line", "--window", "path:4", "--x", "v0", "--y", "v2",
                "--p", "0.5"]) == 3


def test_contours_and_distance(out):
    assert run(["enumerate-contours", "--family", "zd:2", "--max-boundary", "8"]) == 0
    counts = {int(r["n"]): int(r["count"]) for r in _rows(out / "enumerate-contours.csv")}
    assert (counts[4], counts[6], counts[8]) == (1, 4, 22)
    assert run(["contour-distance", "--family", "zd:2", "--x", "0,0", "--y", "1,0"]) == 0
    assert _rows(out / "contour-distance.csv")[0]["f"] == "6"


def test_simulate_fit_and_bracket(out):
    assert run(["simulate", "phi", "--family", "line", "--p", "0.5", "--radius", "12", "--samples",
                "20000", "--seed", "3", "--x", "0", "--y", "1;2;3;4;5", "--stem", "line"]) == 0
    assert len(_rows(out / "line.csv")) == 5
    assert run(["fit-decay", "--input", str(out / "line.csv")]) == 0
    labels = {r["classification"] for r in _rows(out / "fit-decay.csv")}
    assert labels == {"exponential"}
    assert run(["peierls-bound", "--family", "wedge:ln", "--max-size", "4", "--with-wedge",
                "--stem", "bundle"]) == 0
    # p = 0.5 lies far outside the validity range
    assert run(["compare-bracket", "--input", str(out / "line.csv"), "--bundle",
                str(out / "bundle.json"), "--f", "2,2,2,2,2"]) == 2


def test_theta_and_families(out):
    assert run(["simulate", "theta", "--family", "zd:2", "--p", "0,1", "--radius", "1,2",
                "--samples", "100", "--seed", "1"]) == 0
    vals = [float(r["value"]) for r in _rows(out / "simulate.csv")]
    assert vals == [0.0, 0.0, 1.0, 1.0]
    assert run(["families"]) == 0
    assert len(_rows(out / "families.csv")) == 6
