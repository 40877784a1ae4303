import json
import subprocess
import sys

import pytest

from bezmap.cli import main


@pytest.fixture(scope="module")
def docs(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    ann, gt = d / "ann.json", d / "gt.json"
    assert main(["synth", "--seed", "2", "--per-class", "30", "--out", str(ann)]) == 0
    assert main(["gengt", str(ann), "--out", str(gt)]) == 0
    return d, ann, gt


def test_pipeline(docs):
    d, ann, gt = docs
    rest = d / "rest.json"
    assert main(["restore", str(gt), "--out", str(rest)]) == 0
    assert main(["eval", str(rest), str(gt), "--out", str(d / "ev.json")]) == 0
    assert json.loads((d / "ev.json").read_text())["mAP"] == 1.0
    assert main(["verify", str(ann), "--gt", str(gt), "--threshold", "0.2", "--out", str(d / "v.json")]) == 0
    v = json.loads((d / "v.json").read_text())
    assert all(x["0.2"] == 1.0 for x in v["ap"].values())


def test_stats_render_raster(docs):
    d, ann, gt = docs
    assert main(["stats", str(ann), str(gt), "--out", str(d / "s.json")]) == 0
    assert json.loads((d / "s.json").read_text())["road-boundary"]["instances"] == 30
    assert main(["render", str(gt), "--gt", str(ann), "--controls", "--out", str(d / "m.svg")]) == 0
    assert "<circle" in (d / "m.svg").read_text()
    assert main(["raster", str(gt), "--omega", "1", "--out", str(d / "mask_")]) == 0
    assert (d / "mask_lane-divider.pgm").read_text().startswith("P2")


def test_losses_with_grad_check(docs):
    d, ann, gt = docs
    out = d / "l.json"
    assert main(["losses", str(gt), str(gt), "--grad-check", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["matched"] == 90 and r["unmatched_pred"] == 0
    assert r["mean"] == {"point": 0.0, "curve": 0.0, "region": 0.0, "pcr": 0.0}


def test_class_override(docs):
    d, ann, _ = docs
    out = d / "gt1.json"
    assert main(["gengt", str(ann), "--classes", "road-boundary=1x1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["taxonomy"][2]["degree"] == 1 and doc["taxonomy"][2]["max_pieces"] == 1


def test_verify_counts_failures(docs):
    d, ann, _ = docs
    out = d / "v1.json"
    assert main(["verify", str(ann), "--classes", "road-boundary=1x1", "--out", str(out)]) == 0
    v = json.loads(out.read_text())
    assert v["failures"]["road-boundary"] == 30
    assert v["ap"]["road-boundary"]["0.5"] == 0.0


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["synth", "--bogus"],
    ["eval", "only-one.json"],
    ["eval", "a", "b", "--thresholds", "x,y"],
    ["gengt", "a", "--classes", "road-boundary=7"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_input_errors(tmp_path, docs):
    _, ann, _ = docs
    assert main(["eval", str(tmp_path / "missing.json"), str(ann)]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["restore", str(bad)]) == 1
    assert main(["gengt", str(ann), "--classes", "nope=1x1"]) == 1
    assert main(["gengt", str(ann), "--epsilon", "-1"]) == 1


def test_module_entry_point_deterministic(tmp_path):
    cmd = [sys.executable, "-m", "bezmap", "synth", "--seed", "9", "--per-class", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"{")
