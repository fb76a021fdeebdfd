"""Dimension analysis.

Connectivity predicates and Perron growth rates for nonnegative matrices,
scaling envelopes, closed-form dimension bounds for uniform models, mesh
box counting for point sets / sampled graphs / height fields, and the
log-log regression estimator.

Mesh convention: cells are half-open and anchored at the origin.  For
point counting, a coordinate sitting exactly on the top boundary of the
occupied range is assigned to the cell below, so counts stay finite and
deterministic.  Graph and height-field counting work per column: the
vertical extent spanned by the samples is covered with floor-indexed
cells, again closing the top edge.  Columns are closed intervals, so
samples on a column boundary extend both neighbours; nested schedules
then give monotone counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import abs_extrema, lipschitz_bound
from .rifs import merged_curve, refine_attractor, _depth_zero, _refine_step

__all__ = [
    "NumericalError",
    "HypothesisError",
    "BoxCountSeries",
    "DimensionReport",
    "VariationCheck",
    "check_irreducible",
    "spectral_radius",
    "nonneg_spectral_radius",
    "scaling_envelopes",
    "nodes_collinear",
    "curve_dimension_bounds",
    "box_count_curve",
    "box_count_graph",
    "box_count_surface",
    "fit_dimension",
    "max_variation",
    "variation_bound_report",
    "curve_scale_schedule",
    "estimate_curve_dimension",
    "analyze_curve",
]

POWER_TOL = 1e-10
POWER_CAP = 100000
GRID_SNAP = 1e-12   # relative; fp noise in coord/delta is ~2e-16 * q
COLLINEAR_TOL = 1e-12
DROP_COARSEST_AT = 5


class NumericalError(RuntimeError):
    """Iteration failed to converge."""


class HypothesisError(ValueError):
    """A requirement of the closed-form dimension bounds is not met."""


# ---------------------------------------------------------------------------
# nonnegative matrices
# ---------------------------------------------------------------------------

def _as_square(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)) or np.any(A < 0):
        raise ValueError("matrix entries must be finite and >= 0")
    return A


def check_irreducible(A):
    """True iff the support digraph is strongly connected.

    Evaluated as positivity of (I + A)^(n-1) on the 0/1 support, with
    boolean matrix powers so large orders cannot overflow.
    """
    A = _as_square(A)
    n = A.shape[0]
    S = (A > 0) | np.eye(n, dtype=bool)
    P = np.eye(n, dtype=bool)
    for _ in range(n - 1):
        P = (P.astype(np.uint8) @ S.astype(np.uint8)) > 0
    return bool(P.all())


def spectral_radius(A, tol=POWER_TOL, max_iter=POWER_CAP):
    """Perron growth rate of an irreducible nonnegative matrix.

    Power iteration from the all-ones vector on the shifted matrix
    A + max(A)*I.  The shift makes the dominant eigenvalue simple and
    well separated even for periodic supports (where plain iteration
    oscillates forever) and is subtracted back exactly, since shifting a
    nonnegative matrix moves its growth rate by exactly the shift.
    Iteration stops once the two-sided ratio bracket
    min_i (Ax)_i/x_i <= rho <= max_i (Ax)_i/x_i is tighter than tol, so
    the returned midpoint carries a certified error bound.
    """
    A = _as_square(A)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not check_irreducible(A):
        raise ValueError("matrix support is not strongly connected (reducible); "
                         "the Perron growth rate is not isolated")
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0])
    shift = float(A.max())
    A = A + shift * np.eye(n)
    x = np.ones(n)
    lo = hi = 0.0
    for _ in range(max_iter):
        y = A @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol * max(hi, 1.0):
            return 0.5 * (lo + hi) - shift
        x = y / np.linalg.norm(y)
    raise NumericalError(
        f"power iteration did not converge in {max_iter} steps "
        f"(last bracket [{lo - shift:.17g}, {hi - shift:.17g}]); "
        "the dominant eigenvalue may be nearly tied")


def nonneg_spectral_radius(A, tol=POWER_TOL):
    """Growth rate for any nonnegative matrix.

    Decomposes the support into strongly connected components and takes
    the largest component rate; block-triangular structure makes this
    exact.  Needed when scaling envelopes put zero rows into an otherwise
    irreducible pattern.
    """
    A = _as_square(A)
    n = A.shape[0]
    S = (A > 0) | np.eye(n, dtype=bool)
    R = np.eye(n, dtype=bool)
    for _ in range(n - 1):
        R = (R.astype(np.uint8) @ S.astype(np.uint8)) > 0
    best = 0.0
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        comp = np.nonzero(R[i] & R[:, i])[0]
        seen[comp] = True
        block = A[np.ix_(comp, comp)]
        if comp.size == 1:
            best = max(best, float(block[0, 0]))
        else:
            best = max(best, spectral_radius(block, tol))
    return best


# ---------------------------------------------------------------------------
# envelopes and closed-form bounds
# ---------------------------------------------------------------------------

def scaling_envelopes(model):
    """Per-region (min, max) of |scaling| over the region, as diagonal vectors."""
    lo = np.empty(model.n_regions)
    hi = np.empty(model.n_regions)
    for i in range(model.n_regions):
        lo[i], hi[i] = abs_extrema(model.scaling[i], model.data.region_bounds(i))
    return lo, hi


def nodes_collinear(data, span):
    """True iff the nodes in the node-index span [start, end] lie on one line."""
    s, e = span
    if e - s < 2:
        raise ValueError("span must hold at least 3 nodes")
    xs = np.array(data.xs[s:e + 1])
    ys = np.array(data.ys[s:e + 1])
    scale = max(float(xs.max() - xs.min()), float(ys.max() - ys.min()), 1e-300)
    # doubled triangle areas of consecutive node triples
    areas = np.abs((xs[1:-1] - xs[:-2]) * (ys[2:] - ys[:-2])
                   - (xs[2:] - xs[:-2]) * (ys[1:-1] - ys[:-2]))
    return bool(np.all(areas <= 2.0 * COLLINEAR_TOL * scale * scale))


@dataclass(frozen=True)
class BoxCountSeries:
    deltas: tuple
    counts: tuple
    mesh: str = "origin-anchored half-open cells, top edge closed"

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.deltas)
        counts = tuple(int(c) for c in self.counts)
        if len(deltas) != len(counts):
            raise ValueError("deltas and counts differ in length")
        if any(b >= a for a, b in zip(deltas, deltas[1:])):
            raise ValueError("deltas must be strictly decreasing")
        if any(c < 1 for c in counts):
            raise ValueError("counts must be >= 1")
        if any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError("counts must not decrease as delta shrinks")
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "counts", counts)

    def to_dict(self):
        return {"deltas": list(self.deltas), "counts": list(self.counts),
                "mesh": self.mesh}


@dataclass(frozen=True)
class DimensionReport:
    spectral_lower: float | None = None
    spectral_upper: float | None = None
    regions_per_domain: int | None = None
    lower_bound: float | None = None
    upper_bound: float | None = None
    exact: float | None = None
    series: BoxCountSeries | None = None
    estimate: float | None = None
    r_squared: float | None = None
    notes: tuple = ()

    def to_dict(self):
        return {
            "spectral_lower": self.spectral_lower,
            "spectral_upper": self.spectral_upper,
            "regions_per_domain": self.regions_per_domain,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "exact": self.exact,
            "series": self.series.to_dict() if self.series else None,
            "estimate": self.estimate,
            "r_squared": self.r_squared,
            "notes": list(self.notes),
        }


def _uniform_geometry(model):
    """(spacing, regions_per_domain); raises HypothesisError naming the failure."""
    xs = np.array(model.data.xs)
    gaps = np.diff(xs)
    span = float(xs[-1] - xs[0])
    if float(gaps.max() - gaps.min()) > 1e-12 * max(span, 1.0):
        raise HypothesisError("nodes are not uniformly spaced")
    widths = {e - s for s, e in model.domains.spans}
    if len(widths) != 1:
        raise HypothesisError("domains do not all span the same number of regions")
    return float(gaps.mean()), widths.pop()


def curve_dimension_bounds(model, tol=POWER_TOL):
    """Closed-form box-dimension bounds for a uniform model.

    Requires uniformly spaced nodes, equal-width domains of a >= 2
    regions, an identity range map, an irreducible connection pattern and
    at least one domain whose nodes are not collinear.  The bounds come
    from growth rates of the envelope-weighted connection matrix:
    1 + log_a(rate) for the min/max envelopes.  A max rate <= 1 forces
    dimension exactly 1, and coinciding envelopes with rate > 1 give an
    exact value.
    """
    _, a = _uniform_geometry(model)

    env = model.y_envelope
    probe = np.linspace(env[0], env[1], 17)
    if np.max(np.abs(model.range_map(probe) - probe)) > 1e-12 * (1.0 + np.abs(probe).max()):
        raise HypothesisError("range map is not the identity")
    if not check_irreducible(model.connection):
        raise HypothesisError("connection matrix is not irreducible")
    if all(nodes_collinear(model.data, span) for span in model.domains.spans):
        raise HypothesisError("every domain's nodes are collinear")

    s_lo, s_hi = scaling_envelopes(model)
    C = model.connection.astype(np.float64)
    lam_hi = nonneg_spectral_radius(np.diag(s_hi) @ C, tol)
    lam_lo = nonneg_spectral_radius(np.diag(s_lo) @ C, tol)

    if lam_hi <= 1.0:
        return DimensionReport(
            spectral_lower=lam_lo, spectral_upper=lam_hi, regions_per_domain=a,
            lower_bound=1.0, upper_bound=1.0, exact=1.0,
            notes=("max-envelope growth rate <= 1: dimension is exactly 1",))
    notes = []
    upper = 1.0 + math.log(lam_hi, a)
    if lam_lo > 1.0:
        lower = 1.0 + math.log(lam_lo, a)
    else:
        lower = 1.0
        notes.append(
            f"min-envelope growth rate {lam_lo:.6g} <= 1: the logarithmic lower-bound "
            "formula only applies above 1, so the trivial lower bound 1 is reported")
    exact = None
    if lam_lo > 1.0 and abs(lam_hi - lam_lo) <= 1e-12 * lam_hi:
        exact = upper
        notes.append("scaling envelopes coincide: bounds collapse to an exact value")
    return DimensionReport(spectral_lower=lam_lo, spectral_upper=lam_hi,
                           regions_per_domain=a, lower_bound=lower,
                           upper_bound=upper, exact=exact, notes=tuple(notes))


# ---------------------------------------------------------------------------
# box counting
# ---------------------------------------------------------------------------

def _snapped_floor(q):
    """floor, with values within GRID_SNAP of an integer rounded to it first."""
    r = np.rint(q)
    near = np.abs(q - r) <= GRID_SNAP * np.maximum(1.0, np.abs(q))
    return np.where(near, r, np.floor(q)).astype(np.int64)


def _on_gridline(q):
    r = np.rint(q)
    return np.abs(q - r) <= GRID_SNAP * np.maximum(1.0, np.abs(q))


def box_count_curve(points, delta):
    """Number of delta-mesh squares containing at least one point.

    Cells are half-open; a coordinate equal to the point set's maximum
    and sitting exactly on a mesh line drops into the cell below, so a
    closed unit segment costs 1/delta cells, not one more.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a nonempty (n, 2) array")
    idx = np.empty(pts.shape, dtype=np.int64)
    for axis in range(2):
        c = pts[:, axis]
        q = c / delta
        ix = _snapped_floor(q)
        cmax = float(c.max())
        qm = cmax / delta
        if abs(qm - round(qm)) <= GRID_SNAP * max(1.0, abs(qm)):
            ix = np.where(c == cmax, int(round(qm)) - 1, ix)
        idx[:, axis] = ix
    return int(np.unique(idx, axis=0).shape[0])


def _vspan_cells(vmin, vmax, delta):
    """Cells covering [vmin, vmax], top edge closed, at least 1 per column."""
    bot = _snapped_floor(np.asarray(vmin) / delta)
    qt = np.asarray(vmax) / delta
    top = np.where(_on_gridline(qt), np.rint(qt) - 1, np.floor(qt)).astype(np.int64)
    return np.maximum(top - bot + 1, 1)


def box_count_graph(xs, ys, delta):
    """Mesh cells met by the sampled graph of a function.

    xs must be sorted ascending.  Each closed x column contributes the
    floor-indexed cover of the vertical extent of its samples; samples
    exactly on a column boundary extend both neighbouring columns.  This
    saturates for graphs where raw point counting would need one sample
    per cell.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size == 0:
        raise ValueError("empty sample set")
    q = xs / delta
    col = _snapped_floor(q)
    grid = _on_gridline(q)
    # top-edge closure in x: when the rightmost samples sit exactly on a
    # mesh line, fold that final run into the column below instead of
    # opening a new one
    folded = np.zeros(col.shape, dtype=bool)
    if grid[-1]:
        folded = col == col[-1]
        col = col - folded.astype(np.int64)
    # per-column extents of the primary assignment (col is non-decreasing)
    change = np.nonzero(np.diff(col))[0] + 1
    starts = np.concatenate(([0], change))
    occ = col[starts]
    base, last = int(occ[0]), int(occ[-1])
    cmin = np.full(last - base + 1, np.inf)
    cmax = np.full(last - base + 1, -np.inf)
    cmin[occ - base] = np.minimum.reduceat(ys, starts)
    cmax[occ - base] = np.maximum.reduceat(ys, starts)
    # closed columns: interior boundary samples also extend the column below
    dup = grid & ~folded & (col > base)
    if np.any(dup):
        k = col[dup] - 1 - base
        np.minimum.at(cmin, k, ys[dup])
        np.maximum.at(cmax, k, ys[dup])
    hit = np.isfinite(cmin)
    return int(_vspan_cells(cmin[hit], cmax[hit], delta).sum())


def box_count_surface(field, delta):
    """Mesh cubes met by the sampled graph of a height field.

    delta must be an integer multiple of the grid step that tiles the
    unit square.  Each closed delta x delta column contributes the
    floor-indexed cover of the height range over its (m+1)^2 samples.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    H = field.heights
    res = field.resolution
    m = int(round(delta * res))
    if m < 1 or abs(delta * res - m) > 1e-9 * max(1.0, delta * res):
        raise ValueError(f"delta {delta} is not aligned to the grid step 1/{res}")
    if res % m != 0:
        raise ValueError(f"delta {delta} does not tile the unit square on a 1/{res} grid")
    cuts = np.arange(0, res, m)
    # closed blocks: min/max over rows [I*m, (I+1)*m] inclusive, both axes
    rmin = np.minimum(np.minimum.reduceat(H, cuts, axis=0), H[m::m, :])
    rmax = np.maximum(np.maximum.reduceat(H, cuts, axis=0), H[m::m, :])
    cmin = np.minimum(np.minimum.reduceat(rmin, cuts, axis=1), rmin[:, m::m])
    cmax = np.maximum(np.maximum.reduceat(rmax, cuts, axis=1), rmax[:, m::m])
    return int(_vspan_cells(cmin, cmax, delta).sum())


def fit_dimension(series):
    """Least-squares slope of log(count) against -log(delta), with r^2."""
    if len(series.deltas) < 3:
        raise ValueError("need at least 3 scales to fit")
    x = -np.log(np.array(series.deltas))
    y = np.log(np.array(series.counts, dtype=np.float64))
    vx = float(np.var(x))
    if vx == 0.0:
        raise ValueError("degenerate scale schedule: zero variance in log delta")
    slope = float(np.cov(x, y, bias=True)[0, 1] / vx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return slope, r2


def max_variation(xs, ys, lo, hi):
    """max - min of the samples with x in the closed interval [lo, hi]."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    mask = (xs >= lo) & (xs <= hi)
    if not np.any(mask):
        raise ValueError(f"no samples in [{lo}, {hi}]")
    sel = ys[mask]
    return float(sel.max() - sel.min())


# ---------------------------------------------------------------------------
# oscillation bound diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariationCheck:
    region: int
    lhs: float
    rhs: float
    ok: bool

    def to_dict(self):
        return {"region": self.region, "lhs": self.lhs, "rhs": self.rhs, "ok": self.ok}


def variation_bound_report(model, sampling):
    """Per-region check that the curve's oscillation obeys its contraction bound.

    For region i fed from domain D: the oscillation of the curve on the
    region must not exceed s_max * L_range * osc(D) plus |D| times the
    coupling of the scaling and offset terms.  All constants are the
    certified catalog bounds, the oscillations come from the samples.
    """
    gx, gy = merged_curve(sampling)
    env = model.y_envelope
    scale = max(1.0, env[1] - env[0])
    L_a = lipschitz_bound(model.range_map, env)
    rows = []
    for i in range(model.n_regions):
        reg = model.data.region_bounds(i)
        dom = model.domain_bounds(i)
        lhs = max_variation(gx, gy, reg[0], reg[1])
        r_dom = max_variation(gx, gy, dom[0], dom[1])
        in_dom = (gx >= dom[0]) & (gx <= dom[1])
        a_f = float(np.max(np.abs(model.range_map(gy[in_dom]))))
        s_hi = abs_extrema(model.scaling[i], reg)[1]
        c_s = lipschitz_bound(model.scaling[i], reg)
        c = abs(model.map_ratio(i))
        L_b = (c_s * c * abs_extrema(model.base, dom)[1]
               + s_hi * lipschitz_bound(model.base, dom)
               + lipschitz_bound(model.interpolant, reg) * c)
        rhs = s_hi * L_a * r_dom + (dom[1] - dom[0]) * (c_s * a_f + L_b)
        rows.append(VariationCheck(i, lhs, rhs, bool(lhs <= rhs + 1e-9 * scale)))
    return rows


# ---------------------------------------------------------------------------
# estimation pipeline
# ---------------------------------------------------------------------------

def curve_scale_schedule(model, r_lo=2, r_hi=6):
    """Geometric mesh schedule delta_r = span * a^(-r) / n for r in [r_lo, r_hi].

    The ratio a is the common domain width in regions when the geometry
    is uniform, else 2.
    """
    if r_hi < r_lo:
        raise ValueError("r_hi must be >= r_lo")
    try:
        _, a = _uniform_geometry(model)
    except HypothesisError:
        a = 2
    xs = model.data.xs
    span = xs[-1] - xs[0]
    n = model.n_regions
    return [span * float(a) ** (-r) / n for r in range(r_lo, r_hi + 1)]


def _auto_depth_sampling(model, delta_min, max_points):
    """Refine until the x spacing is at most delta_min/4 (or the budget is hit)."""
    sampling = _depth_zero(model)
    note = None
    while True:
        gx, _ = merged_curve(sampling)
        gap = float(np.diff(gx).max())
        if gap <= delta_min / 4.0:
            break
        if gx.size * max(len(model.feeders(i)) for i in range(model.n_regions)) > max_points:
            note = (f"sampling budget of {max_points} points reached at depth "
                    f"{sampling.depth}; finest scales may be under-resolved")
            break
        sampling = _refine_step(model, sampling)
    return sampling, note


def estimate_curve_dimension(model, r_lo=2, r_hi=6, depth=None, max_points=2 ** 23):
    """Box-count estimate of the curve's dimension over a geometric schedule.

    Counts use per-column vertical covers of the sampled graph (raw point
    counting cannot saturate fine meshes at any practical depth).  When
    five or more scales are available the coarsest is dropped from the
    regression, where boundary effects dominate.

    Returns (report, sampling).
    """
    deltas = curve_scale_schedule(model, r_lo, r_hi)
    notes = []
    if depth is None:
        sampling, note = _auto_depth_sampling(model, min(deltas), max_points)
        if note:
            notes.append(note)
    else:
        sampling = refine_attractor(model, depth)
    gx, gy = merged_curve(sampling)
    # drop scales the sampling cannot saturate (spacing must be <= delta/4);
    # counts there would flatten and can even lose monotonicity
    max_gap = float(np.diff(gx).max())
    usable = [d for d in deltas if 4.0 * max_gap <= d * (1.0 + 1e-9)]
    if len(usable) < 3:
        raise ValueError(
            f"sampling too coarse for the requested scales: x spacing {max_gap:.3g} "
            f"saturates only {len(usable)} of {len(deltas)} scales; "
            "raise the depth or the point budget")
    if len(usable) < len(deltas):
        dropped = len(deltas) - len(usable)
        notes.append(f"dropped {dropped} under-resolved scale{'s' if dropped > 1 else ''} "
                     f"(x spacing {max_gap:.3g})")
        deltas = usable
    counts = [box_count_graph(gx, gy, d) for d in deltas]
    series = BoxCountSeries(tuple(deltas), tuple(counts))
    if len(deltas) >= DROP_COARSEST_AT:
        fit_series = BoxCountSeries(tuple(deltas[1:]), tuple(counts[1:]))
        notes.append("coarsest scale dropped from the regression")
    else:
        fit_series = series
    estimate, r2 = fit_dimension(fit_series)
    report = DimensionReport(series=series, estimate=estimate, r_squared=r2,
                             notes=tuple(notes))
    return report, sampling


def analyze_curve(model, r_lo=2, r_hi=6, depth=None, max_points=2 ** 23):
    """Theoretical bounds (when the hypotheses hold) merged with an estimate."""
    empirical, sampling = estimate_curve_dimension(model, r_lo, r_hi, depth, max_points)
    notes = list(empirical.notes)
    bounds = None
    try:
        bounds = curve_dimension_bounds(model)
        notes.extend(bounds.notes)
    except HypothesisError as exc:
        notes.append(f"closed-form bounds unavailable: {exc}")
    report = DimensionReport(
        spectral_lower=bounds.spectral_lower if bounds else None,
        spectral_upper=bounds.spectral_upper if bounds else None,
        regions_per_domain=bounds.regions_per_domain if bounds else None,
        lower_bound=bounds.lower_bound if bounds else None,
        upper_bound=bounds.upper_bound if bounds else None,
        exact=bounds.exact if bounds else None,
        series=empirical.series,
        estimate=empirical.estimate,
        r_squared=empirical.r_squared,
        notes=tuple(notes),
    )
    return report, sampling
