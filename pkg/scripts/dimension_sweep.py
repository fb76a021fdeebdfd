#!/usr/bin/env python3
"""Sweep constant vertical scaling factors and compare the closed-form
dimension prediction against the box-count estimate.

For the 4-region whole-interval setup the prediction is exact:
dim = 1 + log_4(4 s) when 4 s > 1, else 1.
"""
import argparse
import math
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

import fractalis as fx  # noqa: E402

DATA = [(0.0, 20.0), (0.25, 30.0), (0.5, 10.0), (0.75, 50.0), (1.0, 10.0)]


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=int, default=9)
    parser.add_argument("--r-hi", type=int, default=6)
    parser.add_argument("--factors", type=float, nargs="*",
                        default=[0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    args = parser.parse_args(argv)

    print(f"{'s':>5} {'predicted':>10} {'estimate':>10} {'error':>8} "
          f"{'r^2':>8} {'time':>7}")
    for s in args.factors:
        model = fx.build_model(DATA, [(0, 4)], [0, 0, 0, 0], fx.Constant(s))
        lam = 4 * s
        predicted = 1.0 + math.log(lam, 4) if lam > 1 else 1.0
        t0 = time.monotonic()
        report, _ = fx.estimate_curve_dimension(model, 2, args.r_hi,
                                                depth=args.depth)
        dt = time.monotonic() - t0
        print(f"{s:5.2f} {predicted:10.5f} {report.estimate:10.5f} "
              f"{report.estimate - predicted:+8.4f} {report.r_squared:8.5f} "
              f"{dt:6.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(run())
