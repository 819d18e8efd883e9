"""Command-line front end.

Exit codes: 0 success, 1 validation/usage error, 2 runtime or data error.
"""
from __future__ import annotations

import argparse
from dataclasses import asdict, replace
import json
import logging
from pathlib import Path
import sys

import numpy as np

from . import io
from .alford import DEFAULT_TRACE_THRESHOLD, alford_estimate
from .core import DataError, PolarimetricScan, ValidationError
from .dcpd import ccp, detect, shift_traces
from .dcpoe import DEFAULT_TH, ContrastMode, estimate_orientation, threshold_sweep
from .evaluation import Scene, ccp_constancy, run_plan
from .preprocess import TargetWindow, preprocess
from .simulator import apex_indices, ground_truth_window, scattering_amplitudes

log = logging.getLogger("polgpr")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _report(command: str, config: dict, inputs: dict, result: dict) -> dict:
    return {"format_version": io.FORMAT_VERSION, "command": command,
            "config": config, "inputs": inputs, "result": result}


def _emit(report: dict, path):
    text = io.dumps_json(report)
    if path:
        io.atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _digests(*stems):
    out = {}
    for s in stems:
        out.update(io.scan_digests(s))
    return out


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _window(text):
    if text is None:
        return None
    vals = text.split(",")
    if len(vals) != 4:
        raise UsageError("--window expects t_lo,t_hi,x_lo,x_hi")
    try:
        return TargetWindow(*(int(v) for v in vals))
    except ValueError:
        raise UsageError("--window values must be integers") from None


# ---- subcommands -------------------------------------------------------------

def cmd_simulate(args):
    doc = io.load_json(args.config) if args.config else {}
    scene = io.scene_from_dict(doc)
    if args.seed is not None:
        scene = replace(scene, clutter=replace(scene.clutter, seed=args.seed))
    out = Path(args.out)
    frames = scene.simulate()
    files = []
    for pol in frames:
        for ch, b in pol.channels().items():
            files += [str(p) for p in io.write_scan(b, out / f"{pol.frame}_{ch}")]
    t, g, w = scene.target, scene.grid, scene.wavelet
    i, j = apex_indices(t, g, w)
    truth = {
        "format_version": io.FORMAT_VERSION,
        "scene": io.scene_to_dict(scene),
        "apex_sample": i, "apex_trace": j,
        "window": ground_truth_window(t, g, w).to_dict(),
        "scattering": {f: dict(zip(("HH", "HV", "VV"),
                                   scattering_amplitudes(t.theta, f, t.reflection_sign)))
                       for f in ("I", "II")},
        "files": sorted(Path(f).name for f in files),
    }
    io.atomic_write(out / "ground_truth.json", io.dumps_json(truth))
    log.info("wrote %d files to %s", len(files) + 1, out)


def cmd_preprocess(args):
    b = io.read_scan(args.input)
    bg = io.read_scan(args.background) if args.background else None
    res = preprocess(b, args.method, bg, args.k)
    io.write_scan(res, args.out)


def cmd_ccp(args):
    b1, b2 = io.read_scan(args.s1), io.read_scan(args.s2)
    b2 = shift_traces(b2, args.shift)
    io.write_scan(ccp(b1, b2), args.out)


def cmd_detect(args):
    c = io.read_scan(args.input)
    det = detect(c, args.threshold)
    _emit(_report("detect", {"threshold": args.threshold, "input": str(args.input)},
                  _digests(args.input), det.to_dict()), args.report)


def cmd_estimate(args):
    b1, b2 = io.read_scan(args.s1), io.read_scan(args.s2)
    b2 = shift_traces(b2, args.shift)
    contrast = ContrastMode.parse(args.contrast)
    est = estimate_orientation(b1, b2, args.th, contrast, args.averaging)
    config = {"s1": str(args.s1), "s2": str(args.s2), "th": args.th, "contrast": contrast.label,
              "shift": args.shift, "averaging": args.averaging}
    _emit(_report("estimate", config, _digests(args.s1, args.s2), est.summary()), args.report)
    if args.angle_map:
        io.atomic_write(args.angle_map, io.heatmap_csv(est.angle_map, b1.grid.times, b1.grid.positions))


def cmd_alford(args):
    scan = PolarimetricScan("I", io.read_scan(args.hh), io.read_scan(args.hv), io.read_scan(args.vv))
    window = _window(args.window)
    est = alford_estimate(scan, args.threshold, window, args.averaging)
    config = {"hh": str(args.hh), "hv": str(args.hv), "vv": str(args.vv),
              "threshold": args.threshold, "averaging": args.averaging,
              "window": window.to_dict() if window else None}
    result = est.summary()
    for k in ("sm1", "sm2", "region", "rule"):
        result.pop(k)
    _emit(_report("alford", config, _digests(args.hh, args.hv, args.vv), result), args.report)


def cmd_sweep(args):
    b1, b2 = io.read_scan(args.s1), io.read_scan(args.s2)
    rows = threshold_sweep(b1, b2, _floats(args.th_values), ContrastMode.parse(args.contrast),
                           args.theta_real, args.averaging)
    io.atomic_write(args.out, io.rows_to_csv(rows, ["th", "theta_cal", "error", "n_selected", "empty"]))


def cmd_plan(args):
    plan = io.plan_from_dict(io.load_json(args.plan))
    table = run_plan(plan)
    out = Path(args.out)
    io.atomic_write(out / "rows.csv", io.rows_to_csv(table.rows, _row_columns(plan)))
    cells = table.cells()
    io.atomic_write(out / "cells.csv", io.rows_to_csv(cells))
    summary = table.summary()
    summary["ccp_spread"] = {str(d): ccp_constancy(table, d) for d in plan.depth_list
                             if len(plan.theta_list) >= 2}
    report = _report("plan", plan.to_dict(), {str(args.plan): io.file_digest(args.plan)},
                     {"summary": summary, "cells": cells})
    io.atomic_write(out / "summary.json", io.dumps_json(_jsonable(report)))


def _row_columns(plan):
    cols = ["theta_real", "depth", "seed", "peak_ccp", "detected", "detect_trace"]
    if "DCPOE" in plan.estimators:
        cols += ["theta_dcpoe", "err_dcpoe", "region_dcpoe"]
    if "Alford" in plan.estimators:
        cols += ["theta_alford", "err_alford"]
    return cols + ["status"]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def cmd_export_heatmap(args):
    if args.angle_map:
        b1, b2 = io.read_scan(args.input), io.read_scan(args.angle_map)
        data = estimate_orientation(b1, b2, args.th, ContrastMode.parse(args.contrast)).angle_map
    else:
        b1 = io.read_scan(args.input)
        data = b1.data
    io.atomic_write(args.out, io.heatmap_csv(data, b1.grid.times, b1.grid.positions))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polgpr", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate both frames of a scene")
    s.add_argument("--config", help="scene JSON (target/grid/wavelet/clutter blocks)")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("preprocess", help="background removal")
    s.add_argument("input")
    s.add_argument("--out", required=True)
    s.add_argument("--method", choices=["mean", "svd"], default="mean")
    s.add_argument("--background")
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("ccp", help="combine frame-I and frame-II HV scans")
    s.add_argument("s1")
    s.add_argument("s2")
    s.add_argument("--out", required=True)
    s.add_argument("--shift", type=int, default=0, help="trace shift applied to the frame-II scan")
    s.set_defaults(func=cmd_ccp)

    s = sub.add_parser("detect", help="detect the target in a CCP scan")
    s.add_argument("input")
    s.add_argument("--threshold", type=float, default=0.5)
    s.add_argument("--report")
    s.set_defaults(func=cmd_detect)

    for name, fn, doc in (("estimate", cmd_estimate, "dual-cross-pol orientation estimate"),
                          ("sweep", cmd_sweep, "threshold sweep of the orientation estimate")):
        s = sub.add_parser(name, help=doc)
        s.add_argument("s1", help="frame-I HV scan")
        s.add_argument("s2", help="frame-II HV scan")
        s.add_argument("--contrast", choices=["denser", "rarer"], default="denser")
        s.add_argument("--averaging", choices=["circular", "arithmetic"], default="circular")
        s.set_defaults(func=fn)
        if name == "estimate":
            s.add_argument("--th", type=float, default=DEFAULT_TH)
            s.add_argument("--shift", type=int, default=0)
            s.add_argument("--report")
            s.add_argument("--angle-map", help="write the per-sample angle map as CSV")
        else:
            s.add_argument("--th-values", default="0.3,0.4,0.5,0.6,0.7,0.8,0.9")
            s.add_argument("--theta-real", type=float)
            s.add_argument("--out", required=True)

    s = sub.add_parser("alford", help="Alford-rotation baseline on a frame-I triple")
    s.add_argument("hh")
    s.add_argument("hv")
    s.add_argument("vv")
    s.add_argument("--threshold", type=float, default=DEFAULT_TRACE_THRESHOLD)
    s.add_argument("--window", help="t_lo,t_hi,x_lo,x_hi")
    s.add_argument("--averaging", choices=["circular", "arithmetic"], default="circular")
    s.add_argument("--report")
    s.set_defaults(func=cmd_alford)

    s = sub.add_parser("plan", help="run an experiment plan")
    s.add_argument("plan")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("export-heatmap", help="dense CSV grid of a scan or angle map")
    s.add_argument("input")
    s.add_argument("--angle-map", metavar="S2",
                   help="treat INPUT as the frame-I HV scan and export the angle map with S2")
    s.add_argument("--th", type=float, default=DEFAULT_TH)
    s.add_argument("--contrast", choices=["denser", "rarer"], default="denser")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export_heatmap)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"polgpr: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"polgpr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"polgpr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
