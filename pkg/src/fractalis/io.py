"""Deterministic writers for the CLI artifacts.

CSV is UTF-8, LF, no header.  JSON reports use sorted keys.  PGM is
binary P5 with 16-bit big-endian samples; heights are normalized with
the min/max recorded in the run report.  OBJ is ASCII with one vertex
per grid node (x, height, y) and two counter-clockwise triangles per
cell.
"""
from __future__ import annotations

import json

import numpy as np

__all__ = [
    "format_number",
    "write_curve_csv",
    "write_box_csv",
    "write_json",
    "write_pgm",
    "write_obj",
]


def format_number(v):
    """Shortest round-trip decimal; integral values lose the trailing '.0'."""
    s = repr(float(v))
    if s.endswith(".0"):
        return s[:-2]
    return s


def write_curve_csv(path, xs, ys):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{format_number(x)},{format_number(y)}\n")


def write_box_csv(path, series):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d, c in zip(series.deltas, series.counts):
            fh.write(f"{format_number(d)},{c}\n")


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_pgm(path, heights):
    """P5/65535 heightmap; returns the (min, max) used for normalization.

    Row iy of the image is the grid row y = iy/m; the first pixel is the
    value at (0, 0).
    """
    H = np.asarray(heights, dtype=np.float64)
    lo, hi = float(H.min()), float(H.max())
    if hi > lo:
        norm = (H - lo) / (hi - lo)
    else:
        norm = np.zeros_like(H)
    px = np.rint(norm * 65535.0).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{H.shape[1]} {H.shape[0]}\n65535\n".encode("ascii"))
        fh.write(px.tobytes())
    return lo, hi


def write_obj(path, field):
    """Grid mesh: vertices 'v x height y', faces counter-clockwise."""
    H = field.heights
    m = field.resolution
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for iy in range(m + 1):
            for ix in range(m + 1):
                fh.write(f"v {format_number(ix / m)} {format_number(H[iy, ix])} "
                         f"{format_number(iy / m)}\n")
        stride = m + 1
        for iy in range(m):
            for ix in range(m):
                a = iy * stride + ix + 1
                b = a + 1
                c = a + stride + 1
                d = a + stride
                fh.write(f"f {a} {b} {c}\n")
                fh.write(f"f {a} {c} {d}\n")
