"""Command line interface.

Exit codes: 0 success, 1 invalid input (validation errors), 2 usage errors.
File arguments accept ``-`` for standard input/output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from gridforecast import hgrd, losses, metrics, pipeline, prediction_io, scenario_io, synthetic
from gridforecast.baseline import BaselineConfig, grid_for, predict_heatmap
from gridforecast.errors import ValidationError
from gridforecast.raster import rasterize
from gridforecast.sampler import Heatmap, sample_pipeline

log = logging.getLogger("gridforecast")

POLICIES = ("static", "time", "velocity")
KIND_ALIASES = {"cv": "constant_velocity", "constant_velocity": "constant_velocity",
                "chr": "constant_heading_rate", "constant_heading_rate": "constant_heading_rate"}


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_text(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_raster(path: str) -> hgrd.Raster:
    if path == "-":
        return hgrd.from_bytes(sys.stdin.buffer.read())
    return hgrd.read_hgrd(path)


def _write_raster(path: str | None, raster: hgrd.Raster) -> None:
    data = hgrd.to_bytes(raster)
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _load_scenarios(path: str):
    return scenario_io.scenarios_from_json(_read_text(path), path)


def _pick(scenarios, index: int):
    if not 0 <= index < len(scenarios):
        raise ValidationError(f"scenario index {index} out of range (file has {len(scenarios)})")
    return scenarios[index]


def _track(sc, target):
    try:
        return sc.track(target)
    except KeyError as e:
        raise ValidationError(str(e.args[0])) from None


def cmd_gen(args) -> int:
    mix = synthetic.parse_mix(args.mix) if args.mix else None
    scenarios = synthetic.generate_synthetic(args.seed, args.n, mix)
    _write_text(args.out, scenario_io.dumps_scenarios(scenarios))
    return 0


def cmd_rasterize(args) -> int:
    sc = _pick(_load_scenarios(args.scenario), args.scenario_index)
    target = args.target if args.target is not None else sc.targets[0]
    spec = grid_for(_track(sc, target), args.horizon, args.ppm_policy, args.ppm, args.resolution)
    top = rasterize(sc, target, spec)
    _write_raster(args.out, hgrd.Raster(spec, top.channels))
    return 0


def _baseline_cfg(args) -> BaselineConfig:
    base = BaselineConfig(KIND_ALIASES[args.kind])
    return BaselineConfig(base.kind, base.sigma_growth * args.sigma_scale,
                          base.base_sigma * args.sigma_scale)


def cmd_predict_cv(args) -> int:
    scenarios = _load_scenarios(args.scenario)
    cfg = _baseline_cfg(args)
    if args.all:
        horizons = args.horizons or list(metrics.HORIZONS)
        entries = []
        for sid, tid, samples in pipeline.predict_scenarios(
                scenarios, horizons, args.n, policy=args.ppm_policy, ppm=args.ppm, cfg=cfg,
                resolution=args.resolution, normalize=args.normalize):
            entries.append(prediction_io.prediction_entry(tid, sid, samples))
        _write_text(args.out, prediction_io.dumps_predictions(entries))
        return 0
    if args.horizon is None:
        raise ValidationError("--horizon is required unless --all is given")
    sc = _pick(scenarios, args.scenario_index)
    target = args.target if args.target is not None else sc.targets[0]
    track = _track(sc, target)
    spec = grid_for(track, args.horizon, args.ppm_policy, args.ppm, args.resolution)
    heat = predict_heatmap(track, args.horizon, spec, cfg)
    _write_raster(args.out, hgrd.heatmap_raster(heat))
    return 0


def cmd_sample(args) -> int:
    raster = _read_raster(args.heatmap)
    if raster.channels != 1:
        raise ValidationError(f"heatmap must have 1 channel, got {raster.channels}")
    heat = Heatmap(raster.spec, raster.values[0].astype(np.float64))
    samples = sample_pipeline(heat, args.speed, args.horizon, args.n, normalize=args.normalize)
    if args.into:
        path = Path(args.into)
        doc = json.loads(path.read_text()) if path.exists() else {"predictions": []}
        entry = None
        for e in doc["predictions"]:
            if e["target_id"] == args.target and str(e.get("scenario_id", "")) == args.scenario_id:
                entry = e
        if entry is None:
            entry = {"scenario_id": args.scenario_id, "target_id": args.target, "horizons": {}}
            doc["predictions"].append(entry)
        entry["horizons"][f"{args.horizon:g}"] = samples.to_dict()["samples"]
        path.write_text(prediction_io.dumps_predictions(doc["predictions"]))
        return 0
    _write_text(args.out, json.dumps(samples.to_dict(), separators=(",", ":")) + "\n")
    return 0


def _gts_for(preds, scenarios, horizons):
    by_key = {(sc.scenario_id, tid): sc for sc in scenarios for tid in sc.targets}
    gts = []
    for p in preds:
        sc = by_key.get((p.scenario_id, p.target_id))
        if sc is None:
            raise ValidationError(f"prediction for unknown target ({p.scenario_id!r}, {p.target_id})")
        gts.append(pipeline.ground_truth(sc, p.target_id, horizons))
    return gts


def cmd_evaluate(args) -> int:
    horizons = args.horizons or list(metrics.HORIZONS)
    scenarios = _load_scenarios(args.scenarios)
    if args.n_sweep:
        rows = []
        for n in args.n_sweep:
            preds = prediction_io.load_predictions(args.predictions, n, args.use_raw)
            gts = _gts_for(preds, scenarios, horizons)
            for t in horizons:
                rows.append((n, t, metrics.miss_rate(preds, gts, t)))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "horizon_s", "miss_rate"])
        for n, t, mr in rows:
            w.writerow([n, f"{t:g}", f"{mr:.6f}"])
        _write_text(args.out, buf.getvalue())
        return 0
    preds = prediction_io.load_predictions(args.predictions, args.n, args.use_raw)
    gts = _gts_for(preds, scenarios, horizons)
    report = metrics.evaluate(preds, gts, horizons, per_bucket=args.per_bucket)
    _write_text(args.out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_sweep_grid(args) -> int:
    scenarios = _load_scenarios(args.scenarios)
    rows = pipeline.coverage_sweep(scenarios, args.ppm, args.horizons, args.resolution)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ppm", "horizon_s", "coverage_fraction"])
    for ppm, t, frac in rows:
        w.writerow([f"{ppm:g}", f"{t:g}", f"{frac:.6f}"])
    _write_text(args.out, buf.getvalue())
    return 0


def cmd_loss(args) -> int:
    pred, target = _read_raster(args.pred), _read_raster(args.target)
    if pred.values.shape != target.values.shape:
        raise ValidationError(f"shape mismatch {pred.values.shape} vs {target.values.shape}")
    kind = "cross_entropy" if args.kind == "ce" else "focal"
    cfg = losses.LossConfig(kind, args.alpha, args.beta)
    value = losses.loss(pred.values.astype(np.float64), target.values.astype(np.float64), cfg)
    print(f"{value:.10g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridforecast",
                                     description="Heatmap-based motion forecasting toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate synthetic scenarios")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=10, help="number of scenarios")
    p.add_argument("--mix", help="motion mix, e.g. constant_velocity=1,turn_left=0.5")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    def grid_args(p):
        p.add_argument("--ppm-policy", choices=POLICIES, default="velocity")
        p.add_argument("--ppm", type=float, help="pixels per meter for the static policy")
        p.add_argument("--resolution", type=int, default=256)

    p = sub.add_parser("rasterize", help="render the 27-channel top view to HGRD")
    p.add_argument("--scenario", required=True)
    p.add_argument("--scenario-index", type=int, default=0)
    p.add_argument("--target", type=int)
    p.add_argument("--horizon", type=float, default=8.0, help="horizon for the time policy")
    grid_args(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("predict-cv", help="baseline heatmap (HGRD) or, with --all, predictions JSON")
    p.add_argument("--scenario", "--scenarios", dest="scenario", required=True)
    p.add_argument("--scenario-index", type=int, default=0)
    p.add_argument("--target", type=int)
    p.add_argument("--horizon", type=float)
    grid_args(p)
    p.add_argument("--kind", choices=sorted(KIND_ALIASES), default="cv")
    p.add_argument("--sigma-scale", type=float, default=1.0)
    p.add_argument("--all", action="store_true", help="predict every target, write predictions JSON")
    p.add_argument("--horizons", type=_floats)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_predict_cv)

    p = sub.add_parser("sample", help="greedy coordinate sampling from an HGRD heatmap")
    p.add_argument("--heatmap", required=True)
    p.add_argument("--speed", type=float, required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--into", help="merge into this predictions JSON instead of printing")
    p.add_argument("--target", type=int, default=0)
    p.add_argument("--scenario-id", default="0")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="metrics report for a predictions file")
    p.add_argument("--predictions", required=True)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--horizons", type=_floats)
    p.add_argument("--n", type=int, choices=range(1, 31), metavar="1..30")
    p.add_argument("--n-sweep", type=_ints, help="CSV of miss rate per n, e.g. 1,2,3,6,10")
    p.add_argument("--per-bucket", action="store_true")
    p.add_argument("--use-raw", action="store_true", help="rank by raw window sums")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep-grid", help="coverage fraction per (ppm, horizon) as CSV")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--ppm", type=_floats, default=[1.0, 2.0, 3.0])
    p.add_argument("--horizons", type=_floats, default=list(metrics.HORIZONS))
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep_grid)

    p = sub.add_parser("loss", help="grid loss between two HGRD rasters")
    p.add_argument("--pred", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--kind", choices=("focal", "ce"), default="focal")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=4.0)
    p.set_defaults(func=cmd_loss)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
