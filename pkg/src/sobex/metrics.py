"""Grid quasihyperbolic distance fields and the L^q integrability criterion.

The solver is a single-source shortest path on a uniform grid graph. Edge weight is
Euclidean edge length times the harmonic mean of the density 1/d at the endpoints,
i.e. |e| * 2/(d_a + d_b). The stencil includes axis, diagonal and knight moves
(16 neighbors): the plain 8-neighbor stencil has ~5.5% mean direction anisotropy,
which is too coarse for the 2% criterion-integral tolerance; knight moves bring the
worst-case direction error down to ~2.8% and the mean to ~1.4%.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import NumericalError, ValidationError
from .geometry import JordanDomain, _as_xy

_MASK_EPS = 1e-12   # nodes closer than this to the boundary are excluded (keeps d > 0)

# half-stencil: each offset is added in both directions by the undirected graph
_STENCIL = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)]


@dataclass
class MetricGrid:
    """Uniform grid over the domain bounding box; masked-in nodes are strictly interior."""
    domain: JordanDomain
    h: float
    x0: float
    y0: float
    nx: int
    ny: int
    mask: np.ndarray       # (ny, nx) bool
    dist: np.ndarray       # (ny, nx) float, boundary distance (valid on mask)

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y0 + self.h * np.arange(self.ny)

    def node_points(self) -> np.ndarray:
        """(n_masked, 2) coordinates of the masked-in nodes (row-major order)."""
        jj, ii = np.nonzero(self.mask)
        return np.stack([self.x0 + self.h * ii, self.y0 + self.h * jj], axis=1)

    def nearest_node(self, p) -> tuple[int, int]:
        x, y = _as_xy(p)
        i = int(round((x - self.x0) / self.h))
        j = int(round((y - self.y0) / self.h))
        if not (0 <= i < self.nx and 0 <= j < self.ny) or not self.mask[j, i]:
            # search a small neighborhood for the nearest masked node
            best = None
            for dj in range(-3, 4):
                for di in range(-3, 4):
                    i2, j2 = i + di, j + dj
                    if 0 <= i2 < self.nx and 0 <= j2 < self.ny and self.mask[j2, i2]:
                        d2 = (self.x0 + self.h * i2 - x) ** 2 + (self.y0 + self.h * j2 - y) ** 2
                        if best is None or d2 < best[0]:
                            best = (d2, i2, j2)
            if best is None:
                raise ValidationError("no grid node near the requested point")
            return best[1], best[2]
        return i, j


def build_metric_grid(domain: JordanDomain, h: float) -> MetricGrid:
    if h <= 0:
        raise ValidationError("grid spacing must be positive")
    if h > domain.resolution_hint * (1 + 1e-12):
        raise ValidationError(
            f"grid spacing {h} exceeds the domain resolution hint {domain.resolution_hint}")
    xmin, xmax, ymin, ymax = domain.bbox
    x0, y0 = xmin, ymin
    nx = int(math.floor((xmax - xmin) / h)) + 1
    ny = int(math.floor((ymax - ymin) / h)) + 1
    ys = y0 + h * np.arange(ny)
    rows, xs_cross = domain.row_crossings(ys)
    mask = np.zeros((ny, nx), dtype=bool)
    # scanline parity: crossings per row come sorted by (row, x)
    starts = np.searchsorted(rows, np.arange(ny), side="left")
    ends = np.searchsorted(rows, np.arange(ny), side="right")
    for j in range(ny):
        xs_j = xs_cross[starts[j]:ends[j]]
        for k in range(0, len(xs_j) - 1, 2):
            a, b = xs_j[k], xs_j[k + 1]
            i0 = int(math.ceil((a - x0) / h + 1e-12))
            i1 = int(math.floor((b - x0) / h - 1e-12))
            if i1 >= i0:
                mask[j, max(i0, 0):min(i1, nx - 1) + 1] = True
    if not mask.any():
        raise ValidationError("no interior nodes: grid spacing too coarse for this domain")
    dist = np.zeros((ny, nx))
    jj, ii = np.nonzero(mask)
    pts = np.stack([x0 + h * ii, y0 + h * jj], axis=1)
    d = domain.dist_to_boundary_many(pts)
    good = d > _MASK_EPS * max(1.0, domain.diameter)
    mask[jj[~good], ii[~good]] = False
    if not mask.any():
        raise ValidationError("no interior nodes: all candidates sit on the boundary")
    dist[jj[good], ii[good]] = d[good]
    return MetricGrid(domain, float(h), float(x0), float(y0), nx, ny, mask, dist)


@dataclass
class MetricField:
    """Approximate quasihyperbolic distance k(z0, .) sampled on a MetricGrid."""
    grid: MetricGrid
    source: tuple[float, float]
    values: np.ndarray     # (ny, nx), +inf on unreached or masked-out nodes
    reached: np.ndarray    # (ny, nx) bool

    def value_at(self, p) -> float:
        i, j = self.grid.nearest_node(p)
        return float(self.values[j, i])

    def interp(self, pts: np.ndarray) -> np.ndarray:
        """Bilinear interpolation at (n,2) points; inf where any stencil corner is unreached."""
        g = self.grid
        pts = np.asarray(pts, dtype=float)
        fx = (pts[:, 0] - g.x0) / g.h
        fy = (pts[:, 1] - g.y0) / g.h
        i0 = np.clip(np.floor(fx).astype(int), 0, g.nx - 2)
        j0 = np.clip(np.floor(fy).astype(int), 0, g.ny - 2)
        tx = np.clip(fx - i0, 0, 1)
        ty = np.clip(fy - j0, 0, 1)
        v00 = self.values[j0, i0]
        v10 = self.values[j0, i0 + 1]
        v01 = self.values[j0 + 1, i0]
        v11 = self.values[j0 + 1, i0 + 1]
        return (v00 * (1 - tx) * (1 - ty) + v10 * tx * (1 - ty)
                + v01 * (1 - tx) * ty + v11 * tx * ty)

    def dump_csv(self, path):
        g = self.grid
        jj, ii = np.nonzero(g.mask)
        with open(path, "w") as f:
            f.write("x,y,d_boundary,k_value,reached\n")
            for i, j in zip(ii, jj):
                f.write(f"{g.x0 + g.h * i!r},{g.y0 + g.h * j!r},{g.dist[j, i]!r},"
                        f"{self.values[j, i]!r},{int(self.reached[j, i])}\n")


def _grid_graph(grid: MetricGrid):
    """Sparse undirected edge list with harmonic-mean weights; edges must stay inside."""
    g = grid
    node_id = -np.ones((g.ny, g.nx), dtype=np.int64)
    jj, ii = np.nonzero(g.mask)
    n = len(jj)
    node_id[jj, ii] = np.arange(n)
    rows, cols, data = [], [], []
    suspect_src, suspect_dst = [], []
    for di, dj in _STENCIL:
        L = math.hypot(di, dj) * g.h
        src_ok = g.mask.copy()
        # shifted alignment: node (i, j) connects to (i+di, j+dj)
        if di >= 0:
            a_sl = (slice(None), slice(0, g.nx - di))
            b_sl = (slice(None), slice(di, g.nx))
        else:
            a_sl = (slice(None), slice(-di, g.nx))
            b_sl = (slice(None), slice(0, g.nx + di))
        if dj >= 0:
            a_sl = (slice(0, g.ny - dj), a_sl[1])
            b_sl = (slice(dj, g.ny), b_sl[1])
        else:
            a_sl = (slice(-dj, g.ny), a_sl[1])
            b_sl = (slice(0, g.ny + dj), b_sl[1])
        ok = g.mask[a_sl] & g.mask[b_sl]
        if not ok.any():
            continue
        ja, ia = np.nonzero(ok)
        ja_full = ja + (a_sl[0].start or 0)
        ia_full = ia + (a_sl[1].start or 0)
        jb_full = ja_full + dj
        ib_full = ia_full + di
        d_a = g.dist[ja_full, ia_full]
        d_b = g.dist[jb_full, ib_full]
        w = L * 2.0 / (d_a + d_b)
        inside = (d_a + d_b) > L
        # near-boundary edges need an exact segment test against the polyline
        sus = ~inside
        if sus.any():
            pa = np.stack([g.x0 + g.h * ia_full[sus], g.y0 + g.h * ja_full[sus]], axis=1)
            pb = np.stack([g.x0 + g.h * ib_full[sus], g.y0 + g.h * jb_full[sus]], axis=1)
            mid = 0.5 * (pa + pb)
            dmid = g.domain.dist_to_boundary_many(mid)
            # segment inside iff covered by the three balls at endpoints/midpoint
            keep = (d_a[sus] + dmid > 0.5 * L) & (dmid + d_b[sus] > 0.5 * L) & (dmid > 0)
            inside_idx = np.flatnonzero(sus)
            inside[inside_idx[keep]] = True
        rows.append(node_id[ja_full, ia_full][inside])
        cols.append(node_id[jb_full, ib_full][inside])
        data.append(w[inside])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.concatenate(data)
    W = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    return W, node_id


def quasihyperbolic_field(grid: MetricGrid, z0) -> MetricField:
    x, y = _as_xy(z0)
    if not grid.domain.contains((x, y), eps=0.0):
        raise ValidationError("source point is not strictly inside the domain")
    W, node_id = _grid_graph(grid)
    i, j = grid.nearest_node((x, y))
    src = node_id[j, i]
    if src < 0:
        raise ValidationError("source falls in a masked-out pocket of the grid")
    d = dijkstra(W, directed=False, indices=src)
    values = np.full(grid.mask.shape, np.inf)
    jj, ii = np.nonzero(grid.mask)
    values[jj, ii] = d
    reached = np.isfinite(values)
    return MetricField(grid, (x, y), values, reached)


@dataclass
class CriterionReport:
    q: float
    h: float
    estimate: float
    refinement: list      # [(h_i, estimate_i), ...] with h decreasing
    rel_diff: float

    def to_json(self) -> dict:
        return {"q": self.q, "h": self.h, "estimate": self.estimate,
                "refinement": [[h, e] for h, e in self.refinement],
                "rel_diff": self.rel_diff}


def field_integral(field: MetricField, q: float) -> float:
    """Midpoint-rule estimate  h^2 * sum k^q  over the reached nodes."""
    vals = field.values[field.reached]
    if q == 1.0:
        s = math.fsum(vals.tolist())
    else:
        s = math.fsum(np.power(vals, q).tolist())
    return field.grid.h ** 2 * s


def integrate_criterion(field: MetricField, q: float, refine: bool = True) -> CriterionReport:
    """Criterion integral for the field's domain/source, with a coarse/fine refinement pair.

    The refinement pair is (2h, h): the requested spacing is the fine member, so the
    reported estimate is the best one while the pair still witnesses convergence.
    """
    if q < 1.0:
        raise ValidationError("criterion exponent must satisfy q >= 1")
    if not np.all(np.isfinite(field.values[field.grid.mask])):
        # masked pockets are fine; only flag if the source component is incomplete
        pass
    est = field_integral(field, q)
    g = field.grid
    refinement = [(g.h, est)]
    rel = float("nan")
    if refine:
        coarse_grid = build_metric_grid(g.domain, 2 * g.h)
        coarse = quasihyperbolic_field(coarse_grid, field.source)
        est_c = field_integral(coarse, q)
        refinement = [(2 * g.h, est_c), (g.h, est)]
        rel = abs(est - est_c) / max(abs(est), 1e-300)
    return CriterionReport(q=float(q), h=float(g.h), estimate=est,
                           refinement=refinement, rel_diff=rel)


def hyperbolic_dist_via_map(rmap, z, w, check_residual: bool = True) -> float:
    """h_Omega(z, w) by conformal pullback through a RiemannMap."""
    from .geometry import hyperbolic_dist_disk

    zc = complex(*_as_xy(z))
    wc = complex(*_as_xy(w))
    uz, uw = rmap.inverse(np.array([zc, wc]))
    if check_residual:
        back = rmap.forward(np.array([uz, uw]))
        res = max(abs(back[0] - zc), abs(back[1] - wc))
        if res > 1e-5 * max(1.0, rmap.domain.diameter):
            raise NumericalError(f"inverse evaluation residual {res:.3e} too large")
    if abs(uz) >= 1 or abs(uw) >= 1:
        raise NumericalError("inverse evaluation left the open disk")
    return hyperbolic_dist_disk(uz, uw)
