"""Measured Gromov-Hausdorff collapse of [surface x S^1(r)] / Z_p.

The surface piece is discretized as an 8-neighbor grid graph in (rho, theta)
with edge weights sqrt(drho^2 + f(rho_mid)^2 dtheta^2); exact shortest paths
on that graph stand in for geodesic distance.  Product distances split as
sqrt(d_P^2 + d_S1^2) (exact for Riemannian products, with the circle factor
analytic), and the Z_p quotient distance minimizes over group translates.

Distances to points between grid angles are served by adding a virtual
vertex on the ring edge (min-plus rule d = min(d0 + t*arc, d1 + (1-t)*arc)),
which keeps every produced matrix an exact metric: it is the shortest-path
metric of the subdivided graph.  The first-order cost of the rule is part of
the discretization error that the refinement floor measures.

collapse_experiment compares the quotient against the transformed limit
surface through the correspondence (rho, theta, s) -> (rho, theta - kappa s)
and reports, per p, the distortion, the implied GH upper bound
(distortion / 2), and a grid-floor estimate obtained by recomputing the
limit-surface distances on a 2x refined grid.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _dijkstra

from .errors import ConfigError, ConnectivityError, DomainError
from .warped_metric import (
    RotSymMetric,
    TransformParams,
    WarpCurve,
    metric_from_warp,
    quotient_transform,
    warp_from_json,
)

TWO_PI = 2.0 * math.pi

THREADS_ENV = "COLLAPSE_LAB_THREADS"


# ---------------------------------------------------------------------------
# surface graphs
# ---------------------------------------------------------------------------

@dataclass
class SurfaceGraph:
    """8-neighbor grid graph over (rho, theta); theta wraps modulo 2 pi.

    When the metric caps at rho = 0 the whole first grid row is one pole
    node, connected radially to every node of the first ring.
    """
    rho_values: np.ndarray          # (n_rho,) including the pole row
    n_theta: int
    pole: bool
    ring_f: np.ndarray              # (n_rho,) f at the grid rho values
    csr: csr_matrix

    @property
    def n_rho(self) -> int:
        return self.rho_values.size

    @property
    def n_nodes(self) -> int:
        if self.pole:
            return 1 + (self.n_rho - 1) * self.n_theta
        return self.n_rho * self.n_theta

    @property
    def delta_theta(self) -> float:
        return TWO_PI / self.n_theta

    def node_index(self, i_rho, j_theta):
        """Flat node index; every (0, j) maps to the single pole node."""
        i = np.asarray(i_rho)
        j = np.asarray(j_theta) % self.n_theta
        if self.pole:
            return np.where(i == 0, 0, 1 + (i - 1) * self.n_theta + j)[()]
        return (i * self.n_theta + j)[()]


def build_surface_graph(metric: RotSymMetric, n_rho: int,
                        n_theta: int) -> SurfaceGraph:
    """Discretize the surface of revolution on an n_rho x n_theta grid.

    Edge weights are sqrt(drho^2 + f(rho_mid)^2 dtheta^2) with f evaluated
    at segment midpoints for radial/diagonal edges and at the node row for
    ring edges.  All weights must be positive, so f may vanish only at a
    capped origin (where the row degenerates to the pole node); truncate
    before any other zero of f.
    """
    if n_rho < 8 or n_theta < 8:
        raise DomainError("need at least an 8 x 8 grid")
    rho = np.linspace(metric.rho_min, metric.rho_max, n_rho)
    w = metric.warp
    f_nodes = np.asarray(w.f(rho), dtype=float)
    pole = bool(metric.capped_at_origin)
    dtheta = TWO_PI / n_theta
    drho = np.diff(rho)
    mid_f = np.asarray(w.f(0.5 * (rho[:-1] + rho[1:])), dtype=float)

    ring_rows = np.arange(1 if pole else 0, n_rho)
    if np.any(f_nodes[ring_rows] <= 0) or np.any(mid_f <= 0):
        raise DomainError("warp must be positive away from the capped pole; "
                          "truncate the interval before f vanishes")

    def idx(i, j):
        j = np.asarray(j) % n_theta
        if pole:
            return np.where(np.asarray(i) == 0, 0,
                            1 + (np.asarray(i) - 1) * n_theta + j)
        return np.asarray(i) * n_theta + j

    js = np.arange(n_theta)
    rows, cols, wts = [], [], []

    def add(u, v, weight):
        u = np.broadcast_to(u, np.broadcast(u, v, weight).shape).ravel()
        v = np.broadcast_to(v, u.shape).ravel()
        weight = np.broadcast_to(weight, u.shape).ravel()
        rows.append(u)
        cols.append(v)
        wts.append(weight)

    # ring edges
    for i in ring_rows:
        add(idx(i, js), idx(i, js + 1), f_nodes[i] * dtheta)

    # radial and diagonal edges between consecutive ring rows
    first_ring = 1 if pole else 0
    for i in range(first_ring, n_rho - 1):
        diag_w = math.hypot(drho[i], mid_f[i] * dtheta)
        add(idx(i, js), idx(i + 1, js), drho[i])
        add(idx(i, js), idx(i + 1, js + 1), diag_w)
        add(idx(i, js), idx(i + 1, js - 1), diag_w)

    if pole:
        add(np.zeros(n_theta, dtype=int), idx(np.ones(n_theta, dtype=int), js),
            drho[0])

    u = np.concatenate(rows)
    v = np.concatenate(cols)
    weight = np.concatenate(wts).astype(float)
    n = int(1 + (n_rho - 1) * n_theta) if pole else int(n_rho * n_theta)
    mat = csr_matrix((np.concatenate([weight, weight]),
                      (np.concatenate([u, v]), np.concatenate([v, u]))),
                     shape=(n, n))
    return SurfaceGraph(rho_values=rho, n_theta=n_theta, pole=pole,
                        ring_f=f_nodes, csr=mat)


def surface_distances(graph: SurfaceGraph, sources) -> np.ndarray:
    """Exact shortest-path distances from the given node indices to all
    nodes; raises ConnectivityError if anything is unreachable."""
    sources = np.atleast_1d(np.asarray(sources, dtype=int))
    d = _dijkstra(graph.csr, directed=False, indices=sources)
    if np.any(np.isinf(d)):
        raise ConnectivityError("surface graph is disconnected")
    return d


@dataclass
class SurfaceDistanceField:
    """Distances from sources at (rho_row, theta = 0), exposed at arbitrary
    ring angles through the subdivided-graph rule.

    Rotational symmetry of the graph turns one field per source rho row into
    distances between any pair of angular positions.
    """
    n_theta: int
    source_rows: np.ndarray         # (S,)
    rings: np.ndarray               # (S, n_rho, n_theta)
    ring_arc: np.ndarray            # (n_rho,) angular edge weight per row

    @property
    def delta_theta(self) -> float:
        return TWO_PI / self.n_theta

    def lookup(self, src_slot, rho_row, dtheta):
        """Distance from source src_slot to the point on ring rho_row at
        angle offset dtheta from the source's angular position."""
        x = (np.asarray(dtheta, dtype=float) / self.delta_theta) % self.n_theta
        j0 = np.floor(x).astype(int) % self.n_theta
        t = x - np.floor(x)
        j1 = (j0 + 1) % self.n_theta
        arc = self.ring_arc[rho_row]
        d0 = self.rings[src_slot, rho_row, j0]
        d1 = self.rings[src_slot, rho_row, j1]
        return np.minimum(d0 + t * arc, d1 + (1.0 - t) * arc)[()]


def distance_field(graph: SurfaceGraph, rho_rows) -> SurfaceDistanceField:
    """Run Dijkstra from (row, theta=0) for each requested rho row."""
    rho_rows = np.asarray(rho_rows, dtype=int)
    sources = [int(graph.node_index(int(i), 0)) for i in rho_rows]
    dist = surface_distances(graph, sources)
    s = len(sources)
    n_r, n_t = graph.n_rho, graph.n_theta
    rings = np.empty((s, n_r, n_t))
    if graph.pole:
        rings[:, 0, :] = dist[:, :1]
        rings[:, 1:, :] = dist[:, 1:].reshape(s, n_r - 1, n_t)
    else:
        rings[:] = dist.reshape(s, n_r, n_t)
    arc = graph.ring_f * graph.delta_theta
    if graph.pole:
        arc = arc.copy()
        arc[0] = 0.0
    return SurfaceDistanceField(n_theta=n_t, source_rows=rho_rows,
                                rings=rings, ring_arc=arc)


# ---------------------------------------------------------------------------
# finite metric spaces, quotients, correspondences
# ---------------------------------------------------------------------------

@dataclass
class FiniteMetricSpace:
    """Point labels plus a distance matrix.

    Construction checks the cheap axioms (zero diagonal, symmetry to 1e-12);
    triangle_defect() reports the worst triangle violation for tests.
    """
    labels: list
    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        n = len(self.labels)
        if d.shape != (n, n):
            raise DomainError("distance matrix shape must match labels")
        scale = max(1.0, float(d.max(initial=0.0)))
        if np.max(np.abs(np.diag(d))) > 1e-12 * scale:
            raise DomainError("diagonal must vanish")
        if np.max(np.abs(d - d.T)) > 1e-12 * scale:
            raise DomainError("distance matrix must be symmetric")
        if np.any(d < 0):
            raise DomainError("distances must be nonnegative")
        self.d = d

    @property
    def n(self) -> int:
        return len(self.labels)

    def triangle_defect(self) -> float:
        """max over (i,j,k) of d(i,k) - d(i,j) - d(j,k); <= 0 for a metric."""
        d = self.d
        worst = -math.inf
        for j in range(self.n):
            via = d[:, j][:, None] + d[j, :][None, :]
            worst = max(worst, float(np.max(d - via)))
        return worst


@dataclass(frozen=True)
class QuotientSpec:
    """Diagonal circle action on (surface) x S^1(r): theta advances by
    m1 tau, the circle coordinate s by m2 tau.

    group = "zp" restricts tau to the cyclic subgroup of order p;
    group = "s1" samples the full circle on a T-point grid (default 512).
    """
    r: float
    m1: int
    m2: int
    group: str = "zp"
    p: int = 2
    t_steps: int = 512

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError("need r > 0")
        if self.m1 < 0 or self.m2 < 1:
            raise DomainError("need m1 >= 0 and m2 >= 1")
        if self.group not in ("zp", "s1"):
            raise DomainError("group must be 'zp' or 's1'")
        if self.group == "zp" and self.p < 1:
            raise DomainError("need p >= 1")
        if self.group == "s1" and self.t_steps < 8:
            raise DomainError("need t_steps >= 8")

    @property
    def kappa(self) -> float:
        return self.m1 / self.m2

    def group_angles(self) -> np.ndarray:
        n = self.p if self.group == "zp" else self.t_steps
        return TWO_PI * np.arange(n) / n


def circle_distance(s_a, s_b, r: float):
    """Arc distance on S^1(r) between angular coordinates."""
    delta = np.abs(np.asarray(s_b, dtype=float) - np.asarray(s_a, dtype=float)) % TWO_PI
    return (r * np.minimum(delta, TWO_PI - delta))[()]


def product_distance(d_p, d_s1):
    """Distance in a Riemannian product: the factor distances add in
    quadrature."""
    return np.hypot(d_p, d_s1)[()]


def quotient_distance(spec: QuotientSpec, a, b, dp_lookup) -> float:
    """Quotient pseudodistance between a = (p_a, s_a) and b = (p_b, s_b).

    dp_lookup(p_a, p_b, rot) must return the surface distance from p_a to
    b's surface point rotated by the angle rot.  The group element tau acts
    by (m1 tau) on the surface angle and (m2 tau) on the circle coordinate.
    """
    (pa, sa), (pb, sb) = a, b
    best = math.inf
    for tau in spec.group_angles():
        dp = float(dp_lookup(pa, pb, spec.m1 * tau))
        ds = float(circle_distance(sa, sb + spec.m2 * tau, spec.r))
        best = min(best, float(product_distance(dp, ds)))
    return best


@dataclass
class Correspondence:
    """Index pairs relating two finite metric spaces; surjective onto both
    index sets when validated."""
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=int)
        self.right = np.asarray(self.right, dtype=int)
        if self.left.shape != self.right.shape or self.left.ndim != 1:
            raise DomainError("correspondence needs parallel index arrays")

    def validate(self, n_left: int, n_right: int):
        if set(self.left.tolist()) != set(range(n_left)):
            raise DomainError("correspondence misses left indices")
        if set(self.right.tolist()) != set(range(n_right)):
            raise DomainError("correspondence misses right indices")


def natural_correspondence(points, spec: QuotientSpec):
    """Slice correspondence (rho, theta, s) -> (rho, theta - kappa s).

    Returns (correspondence, limit_points) where limit_points deduplicates
    coincident images (keys rounded to 1e-12).  Because the s = 0 slice is
    expected among the samples, the correspondence covers the whole sampled
    limit grid.  Group translates of a sample map to the same image point
    whenever m2 = 1; for m2 > 1 residual identifications of the limit
    surface are deliberately ignored and the distortion stays an upper
    bound.
    """
    kappa = spec.kappa
    limit_points = []
    seen = {}
    left, right = [], []
    for i, (rho, theta, s) in enumerate(points):
        phi = (theta - kappa * s) % TWO_PI
        key_phi = round(phi, 12)
        if key_phi >= round(TWO_PI, 12):
            key_phi = 0.0
            phi = 0.0
        key = (round(float(rho), 12), key_phi)
        j = seen.get(key)
        if j is None:
            j = len(limit_points)
            seen[key] = j
            limit_points.append((float(rho), float(phi)))
        left.append(i)
        right.append(j)
    return Correspondence(np.array(left), np.array(right)), limit_points


def distortion(space_x: FiniteMetricSpace, space_y: FiniteMetricSpace,
               corr: Correspondence) -> float:
    """max |d_X(a, a') - d_Y(b, b')| over pairs of correspondence entries.
    Half of this bounds the Gromov-Hausdorff distance from above."""
    corr.validate(space_x.n, space_y.n)
    dx = space_x.d[np.ix_(corr.left, corr.left)]
    dy = space_y.d[np.ix_(corr.right, corr.right)]
    return float(np.max(np.abs(dx - dy)))


# ---------------------------------------------------------------------------
# the collapse experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    n_rho: int
    n_theta: int
    n_s: int

    @classmethod
    def from_json(cls, obj, name):
        if not isinstance(obj, dict):
            raise ConfigError(f"'{name}' must be an object")
        try:
            return cls(int(obj["n_rho"]), int(obj["n_theta"]), int(obj["n_s"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"'{name}' needs integer n_rho, n_theta, n_s") \
                from exc


@dataclass(frozen=True)
class CollapseConfig:
    """Inputs of collapse_experiment; mirrors the JSON schema of the CLI.

    seed is accepted for schema stability but the sampling is a
    deterministic subgrid, so it is currently unused.
    """
    surface: object                 # WarpCurve or its JSON dict
    rho_max: float
    r: float
    m1: int
    m2: int
    p_values: tuple
    grid: GridSpec
    sample: GridSpec
    seed: int = 0

    def __post_init__(self):
        if self.rho_max <= 0 or self.r <= 0:
            raise DomainError("need rho_max > 0 and r > 0")
        if self.m1 < 0 or self.m2 < 1:
            raise DomainError("need m1 >= 0 and m2 >= 1")
        if len(self.p_values) == 0 or any(p < 1 for p in self.p_values):
            raise DomainError("p_values must be positive")
        for want, have in (("rho", (self.sample.n_rho, self.grid.n_rho)),
                           ("theta", (self.sample.n_theta, self.grid.n_theta)),
                           ("s", (self.sample.n_s, self.grid.n_s))):
            if have[0] < 1 or have[0] > have[1]:
                raise DomainError(f"sample n_{want} must lie in [1, grid]")

    @classmethod
    def from_json(cls, obj) -> "CollapseConfig":
        if not isinstance(obj, dict):
            raise ConfigError("collapse config must be an object")
        required = ["surface", "rho_max", "r", "m1", "m2", "p_values",
                    "grid", "sample"]
        missing = [k for k in required if k not in obj]
        if missing:
            raise ConfigError(f"collapse config missing keys: {missing}")
        try:
            p_values = tuple(int(p) for p in obj["p_values"])
            return cls(surface=obj["surface"],
                       rho_max=float(obj["rho_max"]),
                       r=float(obj["r"]),
                       m1=int(obj["m1"]),
                       m2=int(obj["m2"]),
                       p_values=p_values,
                       grid=GridSpec.from_json(obj["grid"], "grid"),
                       sample=GridSpec.from_json(obj["sample"], "sample"),
                       seed=int(obj.get("seed", 0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"collapse config field has wrong type: {exc}") \
                from exc


@dataclass(frozen=True)
class CollapseRow:
    p: int
    distortion: float
    gh_upper_bound: float
    grid_floor_estimate: float


def _subgrid_indices(lo: int, hi: int, count: int) -> np.ndarray:
    return np.unique(np.round(np.linspace(lo, hi, count)).astype(int))


_MAX_RING_NODES = 16384


def _ring_refinement(n_theta: int, denominators) -> int:
    """Smallest angular grid containing the n_theta grid and every angle
    2 pi k / d for the given denominators, capped at _MAX_RING_NODES.

    Aligning all group rotations and slice angles with ring nodes makes the
    rotations exact isometries of the graph length space, which is what
    keeps the produced distance matrices exactly metric.  Configs whose
    common refinement would exceed the cap fall back to the plain grid plus
    ring interpolation; the triangle property then holds only to the
    interpolation tolerance.
    """
    ring = n_theta
    for d in denominators:
        ring = ring * d // math.gcd(ring, d)
    if ring > _MAX_RING_NODES:
        return n_theta
    return ring


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def collapse_experiment(config: CollapseConfig) -> list[CollapseRow]:
    """Distortion of the natural correspondence for each p in the config.

    The surface and its transform are discretized on the same grid; the
    grid-floor estimate is the largest change of the sampled limit-surface
    distances across three refinements of that grid (radial, angular, both)
    and is shared by all rows.  Quotient distances are non-increasing along
    chains p | p' by construction (larger groups minimize over more
    translates).
    """
    warp = config.surface
    if not isinstance(warp, WarpCurve):
        warp = warp_from_json(warp)
    base = metric_from_warp(warp, config.rho_max)
    params = TransformParams.from_slope_pair(config.m1, config.m2, config.r)
    limit = quotient_transform(base, params)

    g, smp = config.grid, config.sample
    # Angular grids are refined to make every group rotation (X side) and
    # every slice angle theta - kappa s (Y side) a node angle; see
    # _ring_refinement.
    if config.m1 > 0:
        dens_x = [p // math.gcd(config.m1, p) for p in config.p_values]
        den_y = config.m2 * g.n_s
        den_y //= math.gcd(config.m1, den_y)
    else:
        dens_x, den_y = [], 1
    ring_x = _ring_refinement(g.n_theta, dens_x)
    ring_y = _ring_refinement(g.n_theta, [den_y])
    graph_p = build_surface_graph(base, g.n_rho, ring_x)
    graph_y = build_surface_graph(limit, g.n_rho, ring_y)

    lo = 1 if graph_p.pole else 0
    rho_rows = _subgrid_indices(lo, g.n_rho - 1, smp.n_rho)
    th_idx = (np.arange(smp.n_theta) * g.n_theta) // smp.n_theta
    s_idx = (np.arange(smp.n_s) * g.n_s) // smp.n_s
    thetas = TWO_PI * th_idx / g.n_theta
    svals = TWO_PI * s_idx / g.n_s

    fld_p = distance_field(graph_p, rho_rows)
    fld_y = distance_field(graph_y, rho_rows)

    # product sample points, rho-major
    slot_of_row = {int(row): k for k, row in enumerate(rho_rows)}
    pts_slot, pts_row, pts_theta, pts_s = [], [], [], []
    points = []
    for k, row in enumerate(rho_rows):
        for th in thetas:
            for sv in svals:
                pts_slot.append(k)
                pts_row.append(int(row))
                pts_theta.append(th)
                pts_s.append(sv)
                points.append((float(graph_p.rho_values[row]), float(th),
                               float(sv)))
    pts_slot = np.array(pts_slot)
    pts_row = np.array(pts_row)
    pts_theta = np.array(pts_theta)
    pts_s = np.array(pts_s)
    n_pts = len(points)

    spec0 = QuotientSpec(r=config.r, m1=config.m1, m2=config.m2,
                         group="zp", p=int(config.p_values[0]))
    corr, limit_points = natural_correspondence(points, spec0)

    # limit-side matrices over the deduplicated image points
    lim_row = np.empty(len(limit_points), dtype=int)
    lim_slot = np.empty(len(limit_points), dtype=int)
    lim_phi = np.empty(len(limit_points))
    row_by_rho = {round(float(graph_p.rho_values[int(r_)]), 12): int(r_)
                  for r_ in rho_rows}
    for j, (rho_v, phi) in enumerate(limit_points):
        row = row_by_rho[round(rho_v, 12)]
        lim_row[j] = row
        lim_slot[j] = slot_of_row[row]
        lim_phi[j] = phi

    dphi = lim_phi[None, :] - lim_phi[:, None]
    d_y = fld_y.lookup(lim_slot[:, None], lim_row[None, :], dphi)
    np.fill_diagonal(d_y, 0.0)

    # Grid floor: refinement study of the limit-surface distances.  The
    # radial-only and angular-only refinements change the cell aspect ratio
    # and so expose the direction-dependent part of the 8-neighbor
    # metrication error; the proportional refinement cancels it and sees
    # only the O(h) part.  The floor is the largest observed change.
    floor = 0.0
    for n_r2, n_t2, rscale in ((2 * g.n_rho - 1, ring_y, 2),
                               (g.n_rho, 2 * ring_y, 1),
                               (2 * g.n_rho - 1, 2 * ring_y, 2)):
        graph_ref = build_surface_graph(limit, n_r2, n_t2)
        fld_ref = distance_field(graph_ref, rscale * rho_rows)
        d_ref = fld_ref.lookup(lim_slot[:, None], rscale * lim_row[None, :],
                               dphi)
        np.fill_diagonal(d_ref, 0.0)
        floor = max(floor, float(np.max(np.abs(d_y - d_ref))))
    space_y = FiniteMetricSpace(labels=limit_points, d=0.5 * (d_y + d_y.T))

    dth_base = pts_theta[None, :] - pts_theta[:, None]
    ds_base = pts_s[None, :] - pts_s[:, None]
    slot_a = pts_slot[:, None]
    row_b = pts_row[None, :]

    def quotient_matrix(p: int) -> np.ndarray:
        best = np.full((n_pts, n_pts), np.inf)
        for q in range(p):
            tau = TWO_PI * q / p
            dp = fld_p.lookup(slot_a, row_b, dth_base + config.m1 * tau)
            ds = circle_distance(0.0, ds_base + config.m2 * tau, config.r)
            np.minimum(best, np.hypot(dp, ds), out=best)
        np.fill_diagonal(best, 0.0)
        return best

    def row_for(p: int) -> tuple:
        d_x = quotient_matrix(p)
        space_x = FiniteMetricSpace(labels=points, d=0.5 * (d_x + d_x.T))
        dist = distortion(space_x, space_y, corr)
        return p, dist

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(row_for, config.p_values))
    else:
        results = [row_for(p) for p in config.p_values]

    return [CollapseRow(p=p, distortion=d, gh_upper_bound=0.5 * d,
                        grid_floor_estimate=floor)
            for p, d in results]
