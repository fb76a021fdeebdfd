#!/usr/bin/env python3
"""Render every shipped fixture into out/figures/<name>/.

Curve fixtures produce curve.csv + report.json, surface fixtures a PGM
heightmap (and OBJ mesh), analyze fixtures a dimension report.  Pass
--fast to cut depth/resolution for a quick look.
"""
import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from fractalis.cli import main as cli_main  # noqa: E402


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=str(ROOT / "out" / "figures"))
    parser.add_argument("--fast", action="store_true",
                        help="shallow depth / small resolution")
    parser.add_argument("--only", nargs="*", default=None,
                        help="fixture names to render (default: all)")
    args = parser.parse_args(argv)

    failures = 0
    for path in sorted((ROOT / "fixtures").glob("*.json")):
        if args.only and path.stem not in args.only:
            continue
        cfg = json.loads(path.read_text())
        argv = [cfg["mode"], "--config", str(path),
                "--out-dir", str(Path(args.out_dir) / path.stem)]
        if args.fast:
            argv += ["--depth", "6"]
            if cfg["mode"] == "surface":
                argv += ["--resolution", "64"]
        print(f"== {path.stem}")
        code = cli_main(argv)
        if code != 0:
            print(f"   exited {code}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(run())
