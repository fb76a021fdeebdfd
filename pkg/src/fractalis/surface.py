"""Fractal surfaces composed from curves and Lipschitz coefficients.

A surface is a finite sum of separable layers: coefficient(x, y) times a
curve value read along x or along y.  Curves enter as sampled polylines
(typically attractor samples); the true curves are continuous, so the
lookup error is controlled by the sampling density.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import BivariateSpec
from .dimension import (BoxCountSeries, DimensionReport, DROP_COARSEST_AT,
                        box_count_surface, fit_dimension)
from .rifs import merged_curve, refine_attractor

__all__ = [
    "CurveSamples",
    "SurfaceLayer",
    "SurfaceSpec",
    "HeightField",
    "eval_surface",
    "composed_surface_dimension",
    "estimate_surface_dimension",
]


@dataclass(frozen=True)
class CurveSamples:
    """A curve on [0, 1] as sorted samples, evaluated piecewise-linearly."""
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("curve samples need matching 1-d arrays of length >= 2")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("curve sample x values must be strictly increasing")
        if abs(xs[0]) > 1e-12 or abs(xs[-1] - 1.0) > 1e-12:
            raise ValueError("curve samples must cover [0, 1]; renormalize first")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_model(cls, model, depth):
        """Sample a curve model and renormalize its x range onto [0, 1]."""
        gx, gy = merged_curve(refine_attractor(model, depth))
        x0, x1 = model.data.xs[0], model.data.xs[-1]
        if x0 != 0.0 or x1 != 1.0:
            gx = (gx - x0) / (x1 - x0)
            gx = gx.copy()
            gx[0], gx[-1] = 0.0, 1.0
        return cls(gx, gy)

    def value(self, x):
        return np.interp(x, self.xs, self.ys)

    @property
    def max_gap(self):
        return float(np.diff(self.xs).max())


@dataclass(frozen=True)
class SurfaceLayer:
    curve: CurveSamples
    coeff: BivariateSpec


@dataclass(frozen=True)
class SurfaceSpec:
    """Layers read along x plus layers read along y."""
    x_layers: tuple
    y_layers: tuple = ()

    def __post_init__(self):
        x_layers = tuple(self.x_layers)
        y_layers = tuple(self.y_layers)
        if not x_layers and not y_layers:
            raise ValueError("surface spec needs at least one layer")
        object.__setattr__(self, "x_layers", x_layers)
        object.__setattr__(self, "y_layers", y_layers)


@dataclass(frozen=True)
class HeightField:
    """Heights on the uniform (m+1) x (m+1) grid over [0, 1]^2.

    heights[iy, ix] is the value at (ix/m, iy/m); `flat` gives the
    row-major vector.
    """
    resolution: int
    heights: np.ndarray

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        H = np.asarray(self.heights, dtype=np.float64)
        m = self.resolution
        if H.shape != (m + 1, m + 1):
            raise ValueError(f"heights must be ({m + 1}, {m + 1}), got {H.shape}")
        if not np.all(np.isfinite(H)):
            raise ValueError("heights must be finite")
        object.__setattr__(self, "heights", H)

    @property
    def flat(self):
        return self.heights.reshape(-1)


def eval_surface(spec, resolution):
    """Sum the layers on the grid: coeff(x, y) * curve(x or y).

    Every curve must be sampled finely enough that its largest x gap is
    at most 1/(4 * resolution).
    """
    m = int(resolution)
    if m < 2:
        raise ValueError("resolution must be >= 2")
    limit = 1.0 / (4.0 * m)
    for layer in tuple(spec.x_layers) + tuple(spec.y_layers):
        if layer.curve.max_gap > limit:
            raise ValueError(
                f"curve sampling too coarse for resolution {m}: "
                f"max gap {layer.curve.max_gap:.3g} > {limit:.3g}; refine deeper")
    axis = np.linspace(0.0, 1.0, m + 1)
    H = np.zeros((m + 1, m + 1))
    for layer in spec.x_layers:
        H += layer.coeff.grid(axis, axis) * layer.curve.value(axis)[None, :]
    for layer in spec.y_layers:
        H += layer.coeff.grid(axis, axis) * layer.curve.value(axis)[:, None]
    return HeightField(m, H)


def composed_surface_dimension(x_dims, y_dims):
    """Dimension of a composed surface: 1 + max over the layer curve dimensions."""
    dims = list(x_dims) + list(y_dims)
    if not dims:
        raise ValueError("need at least one curve dimension")
    for d in dims:
        if not 1.0 <= d <= 2.0:
            raise ValueError(f"curve dimension {d} outside [1, 2]")
    return 1.0 + max(dims)


def estimate_surface_dimension(field, deltas):
    """Box-count estimate for a height field over grid-aligned scales.

    Scales must be strictly decreasing, at least 3 of them.  As with the
    curve estimator, the coarsest scale is dropped from the regression
    when five or more scales are given.
    """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 3:
        raise ValueError("need at least 3 scales")
    counts = [box_count_surface(field, d) for d in deltas]
    series = BoxCountSeries(tuple(deltas), tuple(counts))
    notes = []
    if len(deltas) >= DROP_COARSEST_AT:
        fit_series = BoxCountSeries(tuple(deltas[1:]), tuple(counts[1:]))
        notes.append("coarsest scale dropped from the regression")
    else:
        fit_series = series
    estimate, r2 = fit_dimension(fit_series)
    return DimensionReport(series=series, estimate=estimate, r_squared=r2,
                           notes=tuple(notes))
