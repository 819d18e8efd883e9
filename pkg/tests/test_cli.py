import json
from pathlib import Path

import pytest

from polgpr.cli import main
from polgpr.dcpoe import estimate_orientation
from polgpr.io import read_scan

FIX = Path(__file__).parent / "fixtures"


def run(*argv):
    return main([str(a) for a in argv])


def test_estimate_on_closed_form_fixture(tmp_path, capsys):
    rep = tmp_path / "r.json"
    assert run("estimate", FIX / "theta120_I_HV", FIX / "theta120_II_HV", "--report", rep) == 0
    report = json.loads(rep.read_text())
    assert 119.5 <= report["result"]["theta_cal"] <= 120.5
    assert report["format_version"] == 1
    assert report["config"]["th"] == 0.8 and report["config"]["contrast"] == "denser"
    assert len(report["inputs"]) == 4


def test_report_is_rederivable(tmp_path):
    rep = tmp_path / "r.json"
    run("estimate", FIX / "theta120_I_HV", FIX / "theta120_II_HV", "--th", "0.6", "--report", rep)
    report = json.loads(rep.read_text())
    cfg = report["config"]
    again = estimate_orientation(read_scan(cfg["s1"]), read_scan(cfg["s2"]), cfg["th"],
                                 cfg["contrast"], cfg["averaging"])
    assert again.theta_cal == report["result"]["theta_cal"]
    from polgpr.io import file_digest
    assert all(file_digest(p) == d for p, d in report["inputs"].items())


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = tmp_path / "scene.json"
    cfg.write_text(json.dumps({"target": {"theta": 40.0},
                               "clutter": {"noise_std": 0.05, "surface_amplitude": 3.0,
                                           "roughness_std": 0.1}}))
    assert run("simulate", "--config", cfg, "--seed", 7, "--out", a) == 0
    assert run("simulate", "--config", cfg, "--seed", 7, "--out", b) == 0
    names = sorted(p.name for p in a.iterdir())
    assert len(names) == 13 and "ground_truth.json" in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    truth = json.loads((a / "ground_truth.json").read_text())
    assert truth["scene"]["clutter"]["seed"] == 7


def test_pipeline(tmp_path, capsys):
    sim = tmp_path / "sim"
    cfg = tmp_path / "scene.json"
    cfg.write_text(json.dumps({"target": {"theta": 100.0}, "clutter": {"noise_std": 0.02}}))
    assert run("simulate", "--config", cfg, "--out", sim) == 0
    for f in ("I", "II"):
        for ch in ("HH", "HV", "VV"):
            assert run("preprocess", sim / f"{f}_{ch}", "--out", tmp_path / f"p{f}_{ch}") == 0
    assert run("preprocess", sim / "I_HH", "--method", "svd", "--k", "2", "--out", tmp_path / "svd") == 0
    assert run("preprocess", sim / "I_HH", "--background", sim / "I_HH", "--out", tmp_path / "bg") == 0
    assert run("ccp", tmp_path / "pI_HV", tmp_path / "pII_HV", "--out", tmp_path / "ccp") == 0
    assert run("detect", tmp_path / "ccp", "--report", tmp_path / "det.json") == 0
    assert json.loads((tmp_path / "det.json").read_text())["result"]["detected"]
    assert run("estimate", tmp_path / "pI_HV", tmp_path / "pII_HV", "--report", tmp_path / "est.json",
               "--angle-map", tmp_path / "angles.csv") == 0
    theta = json.loads((tmp_path / "est.json").read_text())["result"]["theta_cal"]
    assert abs(theta - 100) < 2
    assert run("alford", tmp_path / "pI_HH", tmp_path / "pI_HV", tmp_path / "pI_VV",
               "--window", "100,170,40,61", "--report", tmp_path / "alf.json") == 0
    alf = json.loads((tmp_path / "alf.json").read_text())["result"]["theta_cal"]
    assert abs(alf - 10) < 3
    assert run("sweep", tmp_path / "pI_HV", tmp_path / "pII_HV", "--theta-real", 100,
               "--out", tmp_path / "sweep.csv") == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "th,theta_cal,error,n_selected,empty" and len(lines) == 8
    assert run("export-heatmap", tmp_path / "ccp", "--out", tmp_path / "h.csv") == 0
    assert run("export-heatmap", tmp_path / "pI_HV", "--angle-map", tmp_path / "pII_HV",
               "--out", tmp_path / "ha.csv") == 0
    assert (tmp_path / "h.csv").read_text().startswith("t_ns,0.0,0.01")


def test_plan_command(tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"theta_list": [0, 45, 120], "depth_list": [0.03], "n_seeds": 2,
                                "estimators": ["DCPOE", "Alford"]}))
    assert run("plan", plan, "--out", tmp_path / "out") == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["result"]["summary"]["DCPOE"]["max"] <= 0.5
    assert summary["config"]["n_seeds"] == 2
    assert len((tmp_path / "out" / "rows.csv").read_text().splitlines()) == 7
    assert len((tmp_path / "out" / "cells.csv").read_text().splitlines()) == 4


def test_exit_codes(tmp_path, capsys):
    assert run("nonsense") == 1
    assert run("estimate", "--bogus") == 1
    assert run() == 1
    # mismatched grids -> alignment error, exit 1
    sim = tmp_path / "s"
    small = tmp_path / "small.json"
    small.write_text(json.dumps({"grid": {"n_traces": 51}, "target": {"x0": 0.25}}))
    run("simulate", "--out", sim)
    run("simulate", "--config", small, "--out", tmp_path / "t")
    assert run("ccp", sim / "I_HV", tmp_path / "t" / "II_HV", "--out", tmp_path / "c") == 1
    assert "AlignmentError" in capsys.readouterr().err
    # missing file and malformed data -> exit 2
    assert run("detect", tmp_path / "missing") == 2
    (tmp_path / "bad.csv").write_text("1,2\n3,oops\n")
    (tmp_path / "bad.json").write_text(json.dumps(
        {"format_version": 1, "dt_ns": 0.01, "dx_m": 0.01, "n_samples": 2, "n_traces": 2,
         "epsilon_r": 3.0, "channel": "CCP", "frame": "I"}))
    assert run("detect", tmp_path / "bad") == 2
    # unknown config key -> exit 1
    cfg = tmp_path / "typo.json"
    cfg.write_text(json.dumps({"target": {"thetaa": 3}}))
    assert run("simulate", "--config", cfg, "--out", tmp_path / "u") == 1
    # an empty mask is a runtime condition -> exit 2
    (tmp_path / "z1.csv").write_text("0,0\n0,0\n")
    (tmp_path / "z2.csv").write_text("0,0\n0,0\n")
    for n, f in (("z1", "I"), ("z2", "II")):
        (tmp_path / f"{n}.json").write_text(json.dumps(
            {"format_version": 1, "dt_ns": 0.01, "dx_m": 0.01, "n_samples": 2, "n_traces": 2,
             "epsilon_r": 3.0, "channel": "HV", "frame": f}))
    assert run("estimate", tmp_path / "z1", tmp_path / "z2") == 2
