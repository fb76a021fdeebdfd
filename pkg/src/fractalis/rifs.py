"""Recurrent-IFS fractal interpolation curves.

A model bundles interpolation data, domain/region wiring, per-region
vertical scaling functions and the base/interpolant pair.  Curve points
are produced by exact forward refinement: every emitted point is the
image of attractor points under the region maps, so no convergence
tolerance is involved.  Region-endpoint samples are pinned to the exact
data nodes (their map images agree with the nodes up to rounding); this
keeps interpolation exact and makes refinement bit-stable across depths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import catalog
from .catalog import ScalarSpec, abs_extrema, identity, lipschitz_bound

__all__ = [
    "ModelError",
    "InterpolationData",
    "DomainSpec",
    "RegionAssignment",
    "RifsModel",
    "AttractorSampling",
    "ContractionReport",
    "default_interpolant",
    "default_base",
    "derive_connectivity",
    "build_model",
    "eval_F",
    "refine_attractor",
    "merged_curve",
    "functional_residual",
    "contraction_report",
]

NODE_TOL = 1e-9          # relative tolerance for node-value checks
SCALE_GRID = 4097        # samples for the measure-zero scaling-bound probe
SCALE_FRACTION = 1.0 / 64


class ModelError(ValueError):
    """Invalid model configuration."""


@dataclass(frozen=True)
class InterpolationData:
    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(v) for v in self.xs)
        ys = tuple(float(v) for v in self.ys)
        if len(xs) != len(ys):
            raise ModelError("data: x and y lists differ in length")
        if len(xs) < 3:
            raise ModelError("data: need at least 3 nodes (2 regions)")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ModelError("data: x values must be strictly increasing")
        if not all(math.isfinite(v) for v in xs + ys):
            raise ModelError("data: values must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n_regions(self):
        return len(self.xs) - 1

    def region_bounds(self, i):
        return self.xs[i], self.xs[i + 1]


@dataclass(frozen=True)
class DomainSpec:
    spans: tuple  # ((start_node, end_node), ...)

    def __post_init__(self):
        spans = tuple((int(s), int(e)) for s, e in self.spans)
        if len(spans) < 1:
            raise ModelError("domains: need at least one domain")
        for k, (s, e) in enumerate(spans):
            if e - s < 2:
                raise ModelError(
                    f"domains[{k}]: must span at least 2 regions (end - start >= 2), "
                    f"got [{s}, {e}]")
            if s < 0:
                raise ModelError(f"domains[{k}]: start node {s} out of range")
        object.__setattr__(self, "spans", spans)


@dataclass(frozen=True)
class RegionAssignment:
    domain_of: tuple  # per region, 0-based domain index

    def __post_init__(self):
        object.__setattr__(self, "domain_of", tuple(int(k) for k in self.domain_of))


@dataclass(frozen=True)
class RifsModel:
    data: InterpolationData
    domains: DomainSpec
    assignment: RegionAssignment
    scaling: tuple            # per region ScalarSpec
    range_map: ScalarSpec     # applied to y inside the vertical map
    base: ScalarSpec          # matches node values at domain endpoints
    interpolant: ScalarSpec   # passes through every node
    flip: tuple               # per region bool, orientation of the x map
    connection: np.ndarray    # 0/1, row i marks regions feeding region i
    transition: np.ndarray    # row-stochastic companion matrix
    y_envelope: tuple         # (lo, hi)
    warnings: tuple = ()

    @property
    def n_regions(self):
        return self.data.n_regions

    def domain_bounds(self, i):
        s, e = self.domains.spans[self.assignment.domain_of[i]]
        return self.data.xs[s], self.data.xs[e]

    def map_ratio(self, i):
        rl, rh = self.data.region_bounds(i)
        dl, dh = self.domain_bounds(i)
        return (rh - rl) / (dh - dl)

    def map_apply(self, i, x):
        """Region i's contraction from its domain onto the region."""
        rl, rh = self.data.region_bounds(i)
        dl, _ = self.domain_bounds(i)
        c = self.map_ratio(i)
        x = np.asarray(x, dtype=np.float64)
        if self.flip[i]:
            return rh - c * (x - dl)
        return rl + c * (x - dl)

    def map_invert(self, i, x):
        rl, rh = self.data.region_bounds(i)
        dl, _ = self.domain_bounds(i)
        c = self.map_ratio(i)
        x = np.asarray(x, dtype=np.float64)
        if self.flip[i]:
            return dl + (rh - x) / c
        return dl + (x - rl) / c

    def feeders(self, i):
        """Regions whose content refines region i (a contiguous run)."""
        s, e = self.domains.spans[self.assignment.domain_of[i]]
        return range(s, e)


@dataclass(frozen=True)
class AttractorSampling:
    depth: int
    regions: tuple  # per region (xs, ys) arrays sorted by x


@dataclass(frozen=True)
class ContractionReport:
    map_contraction: float     # worst |ratio| of the x maps
    scale_lipschitz: float     # worst Lipschitz constant of a scaling function
    offset_lipschitz: float    # worst Lipschitz constant of the x-only offset term
    range_abs_max: float       # max |range_map| over the y envelope
    scale_abs_max: float       # worst max |scaling| over its region
    range_lipschitz: float     # Lipschitz constant of range_map on the envelope
    weight_limit: float        # metric weights below this make every map contract
    weight_used: float
    overall_factor: float
    contractive: bool

    def to_dict(self):
        return {
            "map_contraction": self.map_contraction,
            "scale_lipschitz": self.scale_lipschitz,
            "offset_lipschitz": self.offset_lipschitz,
            "range_abs_max": self.range_abs_max,
            "scale_abs_max": self.scale_abs_max,
            "range_lipschitz": self.range_lipschitz,
            "weight_limit": self.weight_limit,
            "weight_used": self.weight_used,
            "overall_factor": self.overall_factor,
            "contractive": self.contractive,
        }


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def default_interpolant(data):
    """Polynomial through every node."""
    return catalog.lagrange_from_nodes(list(zip(data.xs, data.ys)))


def default_base(data, domains):
    """Polynomial through the nodes used as domain endpoints.

    Distinct from the full interpolant on purpose: with base == interpolant
    the vertical map cancels and the fixed curve degenerates to the
    interpolant itself.
    """
    idx = sorted({s for s, _ in domains.spans} | {e for _, e in domains.spans})
    return catalog.lagrange_from_nodes([(data.xs[i], data.ys[i]) for i in idx])


def derive_connectivity(data, domains, assignment):
    """Connection matrix C and row-stochastic companion M.

    C[i, j] = 1 iff region j lies inside region i's source domain;
    M[i, j] = 1/a_i over the a_i regions j whose source domain contains
    region i.  Containment is index arithmetic, so both are exact.
    """
    n = data.n_regions
    dom = assignment.domain_of
    if len(dom) != n:
        raise ModelError(
            f"region assignment: expected {n} entries (one per region), got {len(dom)}")
    for i, k in enumerate(dom):
        if not 0 <= k < len(domains.spans):
            raise ModelError(f"region assignment[{i}]: domain index {k} out of range")
    for k, (s, e) in enumerate(domains.spans):
        if e > n:
            raise ModelError(f"domains[{k}]: end node {e} exceeds node count")

    def contains(region, k):
        s, e = domains.spans[k]
        return s <= region and region + 1 <= e

    C = np.zeros((n, n), dtype=np.int64)
    M = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            C[i, j] = 1 if contains(j, dom[i]) else 0
    for i in range(n):
        hits = [j for j in range(n) if contains(i, dom[j])]
        if not hits:
            raise ModelError(
                f"region {i} is contained in no assigned domain; "
                "its content would never be used")
        for j in hits:
            M[i, j] = 1.0 / len(hits)
    return C, M


def build_model(data, domains, assignment, scaling, range_map=None,
                base=None, interpolant=None, flip=None):
    """Validate the ingredients and assemble a RifsModel.

    Endpoint identities (base/interpolant node values and the endpoint
    behaviour of the composed vertical map) are checked numerically; the
    y envelope is then sized to provably (or, for marginal scalings,
    empirically) contain the fixed curve.
    """
    if not isinstance(data, InterpolationData):
        data = InterpolationData(tuple(p[0] for p in data), tuple(p[1] for p in data))
    if not isinstance(domains, DomainSpec):
        domains = DomainSpec(tuple(domains))
    if not isinstance(assignment, RegionAssignment):
        assignment = RegionAssignment(tuple(assignment))
    n = data.n_regions
    scaling = tuple(scaling) if isinstance(scaling, (list, tuple)) else (scaling,)
    if len(scaling) == 1:
        scaling = scaling * n
    if len(scaling) != n:
        raise ModelError(f"scaling: expected 1 or {n} function specs, got {len(scaling)}")
    range_map = range_map if range_map is not None else identity()
    interpolant = interpolant if interpolant is not None else default_interpolant(data)
    base = base if base is not None else default_base(data, domains)
    flip = tuple(bool(f) for f in flip) if flip is not None else (False,) * n
    if len(flip) != n:
        raise ModelError(f"flip: expected {n} entries, got {len(flip)}")

    C, M = derive_connectivity(data, domains, assignment)

    ys = np.array(data.ys)
    spread = float(ys.max() - ys.min())
    margin = 0.5 * spread + 1.0
    envelope = (float(ys.min() - margin), float(ys.max() + margin))
    model = RifsModel(data, domains, assignment, scaling, range_map, base,
                      interpolant, flip, C, M, envelope)

    for i in range(n):
        if not abs(model.map_ratio(i)) < 1.0:
            raise ModelError(
                f"region {i}: x map ratio {model.map_ratio(i):.6g} is not a contraction "
                "(domain must be wider than the region)")

    for i, x in enumerate(data.xs):
        got = float(interpolant(np.float64(x)))
        if abs(got - data.ys[i]) > NODE_TOL * (1.0 + abs(data.ys[i])):
            raise ModelError(
                f"interpolant misses node {i}: f({x}) = {got}, expected {data.ys[i]}")
    endpoint_nodes = sorted({s for s, _ in domains.spans} | {e for _, e in domains.spans})
    for i in endpoint_nodes:
        got = float(base(np.float64(data.xs[i])))
        if abs(got - data.ys[i]) > NODE_TOL * (1.0 + abs(data.ys[i])):
            raise ModelError(
                f"base misses domain-endpoint node {i}: f({data.xs[i]}) = {got}, "
                f"expected {data.ys[i]}")

    # endpoint identity of the composed vertical map: the x map carries the
    # domain endpoints onto the region endpoints, and the vertical map must
    # carry the matching node heights along
    for i in range(n):
        s, e = domains.spans[assignment.domain_of[i]]
        pairs = [(s, i + 1), (e, i)] if flip[i] else [(s, i), (e, i + 1)]
        for node, target in pairs:
            xa, ya = data.xs[node], data.ys[node]
            expect = data.ys[target]
            got = float(_eval_region_map(model, i, np.float64(xa), np.float64(ya)))
            if abs(got - expect) > NODE_TOL * (1.0 + abs(expect)):
                raise ModelError(
                    f"region {i}: vertical map sends node {node} to {got}, "
                    f"expected {expect} (base/interpolant/range_map endpoint mismatch)")

    # only a structurally sound system reaches envelope sizing (the marginal
    # branch refines it, which diverges for broken map families)
    envelope, env_warnings = _size_envelope(model, margin)
    model = RifsModel(data, domains, assignment, scaling, range_map, base,
                      interpolant, flip, C, M, envelope)
    warnings = list(env_warnings)

    # scaling bound |s| * L_a < 1, with a measure-zero allowance at isolated points
    L_a = lipschitz_bound(range_map, envelope)
    for i in range(n):
        lo, hi = data.region_bounds(i)
        s_hi = abs_extrema(scaling[i], (lo, hi))[1]
        if s_hi * L_a < 1.0:
            continue
        grid = np.linspace(lo, hi, SCALE_GRID)
        frac = float(np.mean(np.abs(scaling[i](grid)) * L_a >= 1.0 - 1e-12))
        if frac > SCALE_FRACTION:
            raise ModelError(
                f"region {i}: |scaling| * range Lipschitz reaches "
                f"{s_hi * L_a:.6g} >= 1 on {frac:.1%} of the region")
        warnings.append(
            f"region {i}: |scaling| * range Lipschitz touches {s_hi * L_a:.6g} >= 1 "
            "at isolated points; contraction is marginal there")

    return RifsModel(data, domains, assignment, scaling, range_map, base,
                     interpolant, flip, C, M, envelope, tuple(warnings))


def _signed_range(spec, lo, hi, grid=4097):
    """Certified enclosure of the range of a catalog spec on [lo, hi]."""
    xs = np.linspace(lo, hi, grid)
    vals = spec(xs)
    slack = lipschitz_bound(spec, (lo, hi)) * (hi - lo) / (grid - 1) * 0.5
    return float(vals.min()) - slack, float(vals.max()) + slack


def _size_envelope(model, margin):
    """Envelope wide enough to hold the fixed curve.

    With strict vertical contraction (max|s| * L_range < 1) the fixed
    point satisfies sup|f - interpolant| <= s_max * sup|range(interpolant)
    - base| / (1 - s_max * L_range), which gives a certified range.  In
    the marginal case (|s| touching 1) that bound is void, so the range
    of a deep refinement sample is padded instead.
    """
    data = model.data
    lo, hi = data.xs[0], data.xs[-1]
    h_lo, h_hi = _signed_range(model.interpolant, lo, hi)
    base_lo = min(h_lo, min(data.ys))
    base_hi = max(h_hi, max(data.ys))
    s_max = max(abs_extrema(model.scaling[i], data.region_bounds(i))[1]
                for i in range(model.n_regions))

    env = (base_lo - margin, base_hi + margin)
    for _ in range(2):
        L_a = lipschitz_bound(model.range_map, env)
        if s_max * L_a >= 1.0:
            break
        xs = np.linspace(lo, hi, 4097)
        gap = model.range_map(model.interpolant(xs)) - model.base(xs)
        slack = (L_a * lipschitz_bound(model.interpolant, (lo, hi))
                 + lipschitz_bound(model.base, (lo, hi))) * (hi - lo) / 4096 * 0.5
        detail = s_max * (float(np.abs(gap).max()) + slack) / (1.0 - s_max * L_a)
        new_env = (base_lo - detail - margin, base_hi + detail + margin)
        if new_env[0] >= env[0] - 1e-12 and new_env[1] <= env[1] + 1e-12:
            return new_env, ()
        env = new_env
    else:
        return env, ()

    # marginal contraction: pad the range of a deep sample
    a = max(len(model.feeders(i)) for i in range(model.n_regions))
    depth = max(6, min(16, int(math.log(2e5 / model.n_regions, a))))
    sampling = refine_attractor(model, depth)
    ys = np.concatenate([ry for _, ry in sampling.regions])
    if not np.all(np.isfinite(ys)):
        raise ModelError("vertical maps diverge under refinement; "
                         "|scaling| must stay below 1/L_range on the regions")
    obs_lo, obs_hi = float(ys.min()), float(ys.max())
    pad = 0.25 * (obs_hi - obs_lo) + margin
    note = (f"vertical contraction is marginal; y envelope sized from a depth-{depth} "
            "sample with 25% padding, not from a certified bound")
    return (min(base_lo, obs_lo) - pad, max(base_hi, obs_hi) + pad), (note,)


# ---------------------------------------------------------------------------
# evaluation and refinement
# ---------------------------------------------------------------------------

def _eval_region_map(model, i, x, y):
    """Vertical component for region i: s(L(x)) * (a(y) - base(x)) + interpolant(L(x))."""
    lx = model.map_apply(i, x)
    s = model.scaling[i](lx)
    return s * (model.range_map(y) - model.base(x)) + model.interpolant(lx)


def eval_F(model, i, x, y):
    """Vertical map of region i at (x, y); x must lie in the region's domain."""
    dl, dh = model.domain_bounds(i)
    xs = np.asarray(x, dtype=np.float64)
    tol = 1e-12 * max(1.0, abs(dl), abs(dh))
    if np.any(xs < dl - tol) or np.any(xs > dh + tol):
        raise ModelError(f"x outside region {i}'s domain [{dl}, {dh}]")
    out = _eval_region_map(model, i, xs, np.asarray(y, dtype=np.float64))
    return float(out) if np.ndim(x) == 0 and np.ndim(y) == 0 else out


def _depth_zero(model):
    pts = []
    for i in range(model.n_regions):
        xs = np.array(model.data.region_bounds(i))
        ys = np.array([model.data.ys[i], model.data.ys[i + 1]])
        pts.append((xs, ys))
    return AttractorSampling(0, tuple(pts))


def _merge_run(sampling, regions):
    """Concatenate a run of adjacent region samplings, dropping shared endpoints."""
    regions = list(regions)
    xs = [sampling.regions[regions[0]][0]]
    ys = [sampling.regions[regions[0]][1]]
    for j in regions[1:]:
        xj, yj = sampling.regions[j]
        xs.append(xj[1:])
        ys.append(yj[1:])
    return np.concatenate(xs), np.concatenate(ys)


def _refine_step(model, sampling):
    out = []
    for i in range(model.n_regions):
        ux, uy = _merge_run(sampling, model.feeders(i))
        nx = model.map_apply(i, ux)
        ny = _eval_region_map(model, i, ux, uy)
        if model.flip[i]:
            nx = nx[::-1]
            ny = ny[::-1]
        nx = np.ascontiguousarray(nx)
        ny = np.ascontiguousarray(ny)
        rl, rh = model.data.region_bounds(i)
        nx[0], nx[-1] = rl, rh
        ny[0], ny[-1] = model.data.ys[i], model.data.ys[i + 1]
        out.append((nx, ny))
    return AttractorSampling(sampling.depth + 1, tuple(out))


def refine_attractor(model, depth):
    """Exact attractor samples after `depth` refinement rounds.

    Depth 0 is the data nodes grouped by region; each round maps the
    content of every region's source domain through that region's maps.
    """
    if depth < 0:
        raise ModelError("depth must be >= 0")
    sampling = _depth_zero(model)
    for _ in range(depth):
        sampling = _refine_step(model, sampling)
    return sampling


def merged_curve(sampling):
    """Global (xs, ys) for the sampled curve, region boundaries deduplicated."""
    xs = [sampling.regions[0][0]]
    ys = [sampling.regions[0][1]]
    for rx, ry in sampling.regions[1:]:
        xs.append(rx[1:])
        ys.append(ry[1:])
    return np.concatenate(xs), np.concatenate(ys)


def functional_residual(model, sampling):
    """Worst self-consistency defect of the sampled curve.

    Every emitted point (x, y) of region i must satisfy
    y = F_i(Linv(x), f(Linv(x))) with f the piecewise-linear interpolant
    of the global point set; the maximum |difference| is returned.
    """
    gx, gy = merged_curve(sampling)
    worst = 0.0
    for i, (xs, ys) in enumerate(sampling.regions):
        u = model.map_invert(i, xs)
        dl, dh = model.domain_bounds(i)
        if model.flip[i]:
            u[0], u[-1] = dh, dl
        else:
            u[0], u[-1] = dl, dh
        fhat = np.interp(u, gx, gy)
        r = np.abs(ys - _eval_region_map(model, i, u, fhat))
        worst = max(worst, float(r.max()))
    return worst


def contraction_report(model):
    """Constants showing the region maps contract in a weighted metric.

    The x part contracts at map_contraction; the vertical part couples x
    and y through the scaling, range and offset terms.  With a metric
    |dx| + w*|dy| and any weight 0 < w < weight_limit the joint factor is
    max(map_contraction + w*coupling, scale_abs_max*range_lipschitz),
    which stays below 1 exactly when scale_abs_max*range_lipschitz < 1.
    """
    data, env = model.data, model.y_envelope
    c_L = max(abs(model.map_ratio(i)) for i in range(model.n_regions))
    a_bar = abs_extrema(model.range_map, env)[1]
    L_a = lipschitz_bound(model.range_map, env)

    c_s = s_bar = L_b = 0.0
    for i in range(model.n_regions):
        reg = data.region_bounds(i)
        dom = model.domain_bounds(i)
        c = abs(model.map_ratio(i))
        lip_s = lipschitz_bound(model.scaling[i], reg)
        max_s = abs_extrema(model.scaling[i], reg)[1]
        g_max = abs_extrema(model.base, dom)[1]
        lip_g = lipschitz_bound(model.base, dom)
        lip_h = lipschitz_bound(model.interpolant, reg)
        # offset term b(x) = -s(L(x))*base(x) + interpolant(L(x)) on the domain
        L_b_i = lip_s * c * g_max + max_s * lip_g + lip_h * c
        c_s = max(c_s, lip_s)
        s_bar = max(s_bar, max_s)
        L_b = max(L_b, L_b_i)

    coupling = c_s * c_L * a_bar + L_b
    if coupling > 0.0:
        weight_limit = (1.0 - c_L) / coupling
        weight = 0.5 * weight_limit
    else:
        weight_limit = math.inf
        weight = 1.0
    overall = max(c_L + weight * coupling, s_bar * L_a)
    return ContractionReport(
        map_contraction=c_L,
        scale_lipschitz=c_s,
        offset_lipschitz=L_b,
        range_abs_max=a_bar,
        scale_abs_max=s_bar,
        range_lipschitz=L_a,
        weight_limit=weight_limit,
        weight_used=weight,
        overall_factor=overall,
        contractive=bool(overall < 1.0),
    )
