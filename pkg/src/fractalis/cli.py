"""Command-line front end.

    fractalis curve   --config cfg.json [--out-dir DIR] [--depth N]
    fractalis surface --config cfg.json [--out-dir DIR] [--depth N] [--resolution N]
    fractalis analyze --config cfg.json [--out-dir DIR] [--depth N]

Flags override the matching config fields.  Exit codes: 0 success,
2 configuration/validation error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import dimension, io, surface
from .config import DEFAULT_DEPTH, ConfigError, parse_config
from .dimension import NumericalError
from .rifs import ModelError, contraction_report, merged_curve, refine_attractor

__all__ = ["main"]


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def _out_dir(cfg, args):
    out = Path(args.out_dir or cfg.out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _with_depth(model_cfg, depth):
    if depth is None:
        return model_cfg
    if depth < 0:
        raise ConfigError("--depth: must be >= 0")
    return dataclasses.replace(model_cfg, depth=depth)


def _model_summary(model, sampling):
    report = contraction_report(model)
    return {
        "contraction": report.to_dict(),
        "connection_matrix": model.connection.tolist(),
        "transition_matrix": model.transition.tolist(),
        "depth": sampling.depth,
        "points_per_region": [int(x.size) for x, _ in sampling.regions],
        "points_total": int(merged_curve(sampling)[0].size),
        "y_envelope": list(model.y_envelope),
        "warnings": list(model.warnings),
    }


def _cmd_curve(cfg, args):
    out = _out_dir(cfg, args)
    model_cfg = _with_depth(cfg.curve, args.depth)
    depth = model_cfg.depth if model_cfg.depth is not None else DEFAULT_DEPTH
    model = model_cfg.build()
    sampling = refine_attractor(model, depth)
    gx, gy = merged_curve(sampling)
    io.write_curve_csv(out / "curve.csv", gx, gy)
    io.write_json(out / "report.json", _model_summary(model, sampling))
    print(f"curve: {gx.size} points at depth {depth} -> {out}")
    return 0


def _cmd_analyze(cfg, args):
    out = _out_dir(cfg, args)
    model_cfg = _with_depth(cfg.curve, args.depth)
    model = model_cfg.build()
    r_lo, r_hi = cfg.scales or (2, 6)
    report, sampling = dimension.analyze_curve(model, r_lo, r_hi, depth=model_cfg.depth)
    payload = report.to_dict()
    payload["model"] = _model_summary(model, sampling)
    io.write_json(out / "dimension.json", payload)
    io.write_box_csv(out / "boxcounts.csv", report.series)
    bounds = ("[{:.5f}, {:.5f}]".format(report.lower_bound, report.upper_bound)
              if report.lower_bound is not None else "unavailable")
    print(f"analyze: estimate {report.estimate:.5f} (r^2 {report.r_squared:.5f}), "
          f"bounds {bounds} -> {out}")
    return 0


def _cmd_surface(cfg, args):
    out = _out_dir(cfg, args)
    resolution = args.resolution if args.resolution is not None else cfg.resolution
    if resolution < 2:
        raise ConfigError("resolution: must be >= 2")

    layers = {"x": [], "y": []}
    curve_details = []
    curve_dims = {"lower": [], "upper": [], "exact": []}
    for axis in ("x", "y"):
        entries = cfg.x_curves if axis == "x" else cfg.y_curves
        for model_cfg, coeff in entries:
            model_cfg = _with_depth(model_cfg, args.depth)
            depth = model_cfg.depth if model_cfg.depth is not None else DEFAULT_DEPTH
            model = model_cfg.build()
            samples = surface.CurveSamples.from_model(model, depth)
            layers[axis].append(surface.SurfaceLayer(samples, coeff))
            detail = {"axis": axis, "depth": depth,
                      "points": int(samples.xs.size)}
            try:
                bounds = dimension.curve_dimension_bounds(model)
                detail["dimension_bounds"] = [bounds.lower_bound, bounds.upper_bound]
                detail["dimension_exact"] = bounds.exact
                curve_dims["lower"].append(bounds.lower_bound)
                curve_dims["upper"].append(bounds.upper_bound)
                curve_dims["exact"].append(bounds.exact)
            except dimension.HypothesisError as exc:
                detail["dimension_note"] = f"bounds unavailable: {exc}"
            curve_details.append(detail)

    spec = surface.SurfaceSpec(tuple(layers["x"]), tuple(layers["y"]))
    try:
        field = surface.eval_surface(spec, resolution)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    lo, hi = io.write_pgm(out / "surface.pgm", field.heights)
    if cfg.obj:
        io.write_obj(out / "surface.obj", field)

    formula = None
    n_curves = len(cfg.x_curves) + len(cfg.y_curves)
    if (len(curve_dims["lower"]) == n_curves
            and all(v is not None for v in curve_dims["lower"])):
        formula = {
            "lower": 1.0 + max(curve_dims["lower"]),
            "upper": 1.0 + max(curve_dims["upper"]),
            "exact": (1.0 + max(curve_dims["exact"])
                      if all(v is not None for v in curve_dims["exact"]) else None),
        }
    io.write_json(out / "report.json", {
        "resolution": resolution,
        "height_min": lo,
        "height_max": hi,
        "curves": curve_details,
        "formula_dimension": formula,
        "obj": bool(cfg.obj),
    })
    print(f"surface: {resolution}x{resolution} grid -> {out}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fractalis",
        description="Recurrent fractal curves, composed surfaces, dimension analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("curve", "surface", "analyze"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--depth", type=int, default=None)
        if name == "surface":
            p.add_argument("--resolution", type=int, default=None)
    args = parser.parse_args(argv)

    handlers = {"curve": _cmd_curve, "surface": _cmd_surface, "analyze": _cmd_analyze}
    try:
        cfg = _load_config(args.config)
        if cfg.mode != args.command:
            raise ConfigError(
                f"config mode is {cfg.mode!r} but the {args.command!r} command was invoked")
        return handlers[args.command](cfg, args)
    except (ConfigError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
