"""Planar primitives: Jordan polylines, Mobius normalization, exact disk/half-plane hyperbolic geometry.

Conventions fixed here and relied on everywhere else:
  * hyperbolic density on the unit disk is 2/(1-|z|^2), on the upper half plane 1/Im z,
    so the two metrics agree under any Mobius map between the models;
  * boundary points count as *outside* in `point_in_domain`;
  * geometric predicates take an absolute tolerance, default `TOL` (domain units).
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ValidationError

TOL = 1e-9

FOUR_PI_BOUND = 4.0 * math.pi / (1.0 + math.pi**2)   # max |xi1 - xi2| in the crosscut length lemma
TWO_PI_BOUND = 2.0 * math.pi / (1.0 + math.pi**2)    # max seed-cycle chord

_DEGENERATE_XI_TOL = 1e-6   # reject xi within this distance of +-1 (implementation choice)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"non-finite point ({self.x}, {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @staticmethod
    def of(p) -> "Point":
        if isinstance(p, Point):
            return p
        if isinstance(p, complex):
            return Point(p.real, p.imag)
        x, y = p
        return Point(float(x), float(y))


def _as_xy(p) -> tuple[float, float]:
    if isinstance(p, Point):
        return p.x, p.y
    if isinstance(p, (complex, float, int, np.complexfloating, np.floating, np.integer)):
        c = complex(p)
        return c.real, c.imag
    x, y = p
    return float(x), float(y)


# ---------------------------------------------------------------------------
# segment predicates (vectorized)

def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _segments_interact(p1, p2, q1, q2):
    """True where segment (p1,p2) and (q1,q2) intersect or touch (any contact).

    All inputs are (n,2) arrays; returns a boolean array of length n.
    """
    d1 = _cross(q1[:, 0], q1[:, 1], q2[:, 0], q2[:, 1], p1[:, 0], p1[:, 1])
    d2 = _cross(q1[:, 0], q1[:, 1], q2[:, 0], q2[:, 1], p2[:, 0], p2[:, 1])
    d3 = _cross(p1[:, 0], p1[:, 1], p2[:, 0], p2[:, 1], q1[:, 0], q1[:, 1])
    d4 = _cross(p1[:, 0], p1[:, 1], p2[:, 0], p2[:, 1], q2[:, 0], q2[:, 1])
    straddle = (d1 * d2 <= 0) & (d3 * d4 <= 0)
    # collinear pairs need an overlap test on top of the sign test
    collinear = (d1 == 0) & (d2 == 0) & (d3 == 0) & (d4 == 0)
    if np.any(collinear):
        lo_px = np.minimum(p1[:, 0], p2[:, 0]); hi_px = np.maximum(p1[:, 0], p2[:, 0])
        lo_qx = np.minimum(q1[:, 0], q2[:, 0]); hi_qx = np.maximum(q1[:, 0], q2[:, 0])
        lo_py = np.minimum(p1[:, 1], p2[:, 1]); hi_py = np.maximum(p1[:, 1], p2[:, 1])
        lo_qy = np.minimum(q1[:, 1], q2[:, 1]); hi_qy = np.maximum(q1[:, 1], q2[:, 1])
        overlap = (hi_px >= lo_qx) & (hi_qx >= lo_px) & (hi_py >= lo_qy) & (hi_qy >= lo_py)
        straddle = np.where(collinear, overlap, straddle)
    return straddle


def _ragged_arange(counts: np.ndarray) -> np.ndarray:
    """Concatenation of arange(c) for c in counts, vectorized."""
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return np.arange(total, dtype=np.int64) - np.repeat(starts, counts)


def polyline_self_intersections(verts: np.ndarray, closed: bool = True, max_report: int = 4):
    """Find contacts between non-adjacent edges of a polyline via a uniform spatial hash.

    Returns a list of offending edge-index pairs (empty when simple).
    """
    v = np.asarray(verts, dtype=float)
    n = len(v)
    a = v
    b = np.roll(v, -1, axis=0) if closed else v[1:]
    if not closed:
        a = v[:-1]
    m = len(a)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    span = max(hi[:, 0].max() - lo[:, 0].min(), hi[:, 1].max() - lo[:, 1].min(), 1e-300)
    seg_len = np.hypot(b[:, 0] - a[:, 0], b[:, 1] - a[:, 1])
    cell = max(np.median(seg_len) * 2.0, span / 4096.0)
    ix0 = np.floor(lo[:, 0] / cell).astype(np.int64)
    ix1 = np.floor(hi[:, 0] / cell).astype(np.int64)
    iy0 = np.floor(lo[:, 1] / cell).astype(np.int64)
    iy1 = np.floor(hi[:, 1] / cell).astype(np.int64)
    counts = (ix1 - ix0 + 1) * (iy1 - iy0 + 1)
    eid = np.repeat(np.arange(m), counts)
    # explode bbox cell ranges
    offs = _ragged_arange(counts)
    w = np.repeat(ix1 - ix0 + 1, counts)
    cx = np.repeat(ix0, counts) + offs % w
    cy = np.repeat(iy0, counts) + offs // w
    key = cx * np.int64(0x9E3779B1) + cy
    order = np.argsort(key, kind="stable")
    key_s = key[order]
    eid_s = eid[order]
    starts = np.flatnonzero(np.r_[True, key_s[1:] != key_s[:-1]])
    ends = np.r_[starts[1:], len(key_s)]
    pairs = []
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        ids = np.sort(eid_s[s:e])
        ii, jj = np.triu_indices(len(ids), k=1)
        pairs.append(np.stack([ids[ii], ids[jj]], axis=1))
    if not pairs:
        return []
    P = np.unique(np.concatenate(pairs, axis=0), axis=0)
    i, j = P[:, 0], P[:, 1]
    adjacent = (j - i == 1)
    if closed:
        adjacent |= (i == 0) & (j == m - 1)
    P = P[~adjacent]
    if not len(P):
        return []
    i, j = P[:, 0], P[:, 1]
    # cheap bbox rejection before the exact test
    ok = (lo[i, 0] <= hi[j, 0]) & (lo[j, 0] <= hi[i, 0]) & (lo[i, 1] <= hi[j, 1]) & (lo[j, 1] <= hi[i, 1])
    P = P[ok]
    if not len(P):
        return []
    i, j = P[:, 0], P[:, 1]
    bad = _segments_interact(a[i], b[i], a[j], b[j])
    hits = P[bad]
    return [tuple(map(int, h)) for h in hits[:max_report]]


# ---------------------------------------------------------------------------
# Jordan domains

class JordanDomain:
    """Oriented simple closed polyline with point-location and boundary-distance queries.

    Vertices must run counterclockwise; boundary points are *outside*.
    """

    def __init__(self, vertices, resolution_hint: float | None = None, validate: bool = True):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValidationError("need at least 3 vertices of shape (n, 2)")
        if not np.all(np.isfinite(v)):
            raise ValidationError("non-finite vertex coordinates")
        if np.allclose(v[0], v[-1]) and len(v) > 3:
            v = v[:-1]
        dup = np.flatnonzero(np.all(v == np.roll(v, -1, axis=0), axis=1))
        if len(dup):
            raise ValidationError(f"consecutive duplicate vertices at index {int(dup[0])}")
        area2 = float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
        if area2 <= 0:
            raise ValidationError("vertices must be counterclockwise (signed area > 0)")
        if validate:
            bad = polyline_self_intersections(v, closed=True)
            if bad:
                raise ValidationError(f"polygon is not simple; offending edge pairs {bad}")
        self.vertices = v
        self.area = 0.5 * area2
        seg = np.roll(v, -1, axis=0) - v
        self._seg_len = np.hypot(seg[:, 0], seg[:, 1])
        self.perimeter = float(self._seg_len.sum())
        if resolution_hint is None:
            resolution_hint = float(self._seg_len.max())
        if resolution_hint <= 0:
            raise ValidationError("resolution_hint must be positive")
        self.resolution_hint = float(resolution_hint)
        self._index = None

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist(), "resolution_hint": self.resolution_hint}

    @classmethod
    def from_json(cls, obj) -> "JordanDomain":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["vertices"], obj.get("resolution_hint"))

    @classmethod
    def load(cls, path) -> "JordanDomain":
        with open(path) as f:
            return cls.from_json(json.load(f))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    # -- geometry -----------------------------------------------------------
    @property
    def bbox(self):
        v = self.vertices
        return v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max()

    @property
    def diameter(self) -> float:
        x0, x1, y0, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    def scaled(self, factor: float) -> "JordanDomain":
        return JordanDomain(self.vertices * factor, self.resolution_hint * factor, validate=False)

    def boundary_index(self) -> "_BoundaryIndex":
        if self._index is None:
            self._index = _BoundaryIndex(self.vertices)
        return self._index

    def dist_to_boundary(self, p) -> float:
        x, y = _as_xy(p)
        return float(self.boundary_index().dist(np.array([[x, y]]))[0])

    def dist_to_boundary_many(self, pts: np.ndarray) -> np.ndarray:
        return self.boundary_index().dist(np.asarray(pts, dtype=float))

    def contains(self, p, eps: float = TOL) -> bool:
        """Strict interior test; points within eps of the boundary are outside."""
        x, y = _as_xy(p)
        if self.dist_to_boundary((x, y)) <= eps:
            return False
        return self._parity_one(x, y)

    def _parity_one(self, x: float, y: float) -> bool:
        v = self.vertices
        x1, y1 = v[:, 0], v[:, 1]
        x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
        straddle = (y1 <= y) != (y2 <= y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        hits = straddle & (xi > x)
        return bool(np.count_nonzero(hits) % 2)

    def row_crossings(self, ys: np.ndarray):
        """x-coordinates where the boundary crosses each horizontal line y=ys[k].

        Returns (row_index, x) arrays sorted lexicographically; used for scanline masking.
        Half-open edge rule (y1 <= y < y2 on the edge's y-span) keeps the parity consistent.
        """
        ys = np.asarray(ys, dtype=float)
        v = self.vertices
        x1, y1 = v[:, 0], v[:, 1]
        x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
        ylo = np.minimum(y1, y2)
        yhi = np.maximum(y1, y2)
        if len(ys) > 1:
            h = ys[1] - ys[0]
            k0 = np.ceil((ylo - ys[0]) / h - 1e-12).astype(np.int64)
            k1 = np.floor((yhi - ys[0]) / h + 1e-12).astype(np.int64)
        else:
            k0 = np.zeros(len(v), np.int64)
            k1 = np.zeros(len(v), np.int64)
        k0 = np.clip(k0, 0, len(ys) - 1)
        k1 = np.clip(k1, -1, len(ys) - 1)
        counts = np.maximum(k1 - k0 + 1, 0)
        eid = np.repeat(np.arange(len(v)), counts)
        offs = _ragged_arange(counts)
        rows = np.repeat(k0, counts) + offs
        yq = ys[rows]
        Y1, Y2 = y1[eid], y2[eid]
        keep = (np.minimum(Y1, Y2) <= yq) & (yq < np.maximum(Y1, Y2))
        eid, rows, yq = eid[keep], rows[keep], yq[keep]
        Y1, Y2 = y1[eid], y2[eid]
        xs = x1[eid] + (yq - Y1) * (x2[eid] - x1[eid]) / (Y2 - Y1)
        order = np.lexsort((xs, rows))
        return rows[order], xs[order]

    def resample_boundary(self, n: int, keep_vertices: bool = True):
        """Approximately n boundary points (complex) with their arclength positions.

        CCW from vertex 0; original vertices are kept unless the polyline is much
        finer than n, in which case a plain uniform-arclength resample is used.
        """
        v = self.vertices
        if keep_vertices and len(v) <= 4 * n:
            target = self.perimeter / n
            pts, ss = [], []
            s_acc = 0.0
            for i in range(len(v)):
                a = v[i]
                b = v[(i + 1) % len(v)]
                L = self._seg_len[i]
                k = max(1, int(math.ceil(L / target)))
                for t in range(k):
                    s = t / k
                    pts.append(complex(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])))
                    ss.append(s_acc + s * L)
                s_acc += L
            return np.array(pts), np.array(ss)
        # coarse uniform-arclength resampling (drops vertices)
        s = np.concatenate([[0.0], np.cumsum(self._seg_len)])
        want = np.linspace(0.0, s[-1], n, endpoint=False)
        idx = np.searchsorted(s, want, side="right") - 1
        idx = np.clip(idx, 0, len(v) - 1)
        t = (want - s[idx]) / np.maximum(self._seg_len[idx], 1e-300)
        a = v[idx]
        b = v[(idx + 1) % len(v)]
        p = a + t[:, None] * (b - a)
        return p[:, 0] + 1j * p[:, 1], want

    def point_at_arclength(self, s):
        """Boundary point(s) at arclength s from vertex 0 (CCW), vectorized."""
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        cs = np.concatenate([[0.0], np.cumsum(self._seg_len)])
        idx = np.clip(np.searchsorted(cs, s, side="right") - 1, 0, len(self.vertices) - 1)
        t = (s - cs[idx]) / np.maximum(self._seg_len[idx], 1e-300)
        a = self.vertices[idx]
        b = self.vertices[(idx + 1) % len(self.vertices)]
        p = a + t[..., None] * (b - a)
        return p[..., 0] + 1j * p[..., 1]

    def arclength_of_point(self, p) -> float:
        """Arclength position of (a point on or near) the boundary."""
        x, y = _as_xy(p)
        idx = self.boundary_index()
        seg, t = idx.project(np.array([[x, y]]))
        cs = np.concatenate([[0.0], np.cumsum(self._seg_len)])
        return float(cs[seg[0]] + t[0] * self._seg_len[seg[0]])


def point_in_domain(domain: JordanDomain, p, eps: float = TOL) -> bool:
    return domain.contains(p, eps)


def dist_to_boundary(domain: JordanDomain, p) -> float:
    return domain.dist_to_boundary(p)


class _BoundaryIndex:
    """Exact batched point-to-polyline distance with a KD-tree candidate filter."""

    _K = 8
    _CHUNK = 200_000

    def __init__(self, verts: np.ndarray):
        self.a = verts
        self.b = np.roll(verts, -1, axis=0)
        d = self.b - self.a
        self.len2 = d[:, 0] ** 2 + d[:, 1] ** 2
        self.d = d
        n = len(verts)
        self._brute = n <= 256
        if not self._brute:
            # dense samples (every vertex plus interior subdivisions) with owning segment ids
            L = np.sqrt(self.len2)
            delta = max(np.percentile(L, 95), 1e-300)
            ks = np.maximum(1, np.ceil(L / delta).astype(np.int64))
            owners = np.repeat(np.arange(n), ks)
            ts = _ragged_arange(ks) / np.repeat(ks, ks)
            pts = self.a[owners] + ts[:, None] * self.d[owners]
            self._owners = owners
            self._tree = cKDTree(pts)
            self._delta = float(np.max(L / ks)) if len(L) else 0.0

    def _exact(self, pts, segs):
        """Distance from pts[i] to segments segs[i] (parallel arrays)."""
        a = self.a[segs]
        d = self.d[segs]
        ap = pts - a
        t = np.clip((ap * d).sum(axis=1) / np.maximum(self.len2[segs], 1e-300), 0.0, 1.0)
        proj = a + t[:, None] * d
        return np.hypot(pts[:, 0] - proj[:, 0], pts[:, 1] - proj[:, 1]), t

    def project(self, pts: np.ndarray):
        """Nearest segment index and parameter along it for each point."""
        pts = np.asarray(pts, dtype=float)
        if self._brute:
            n = len(self.a)
            best_d = np.full(len(pts), np.inf)
            best_seg = np.zeros(len(pts), dtype=int)
            best_t = np.zeros(len(pts))
            for s in range(n):
                dd, tt = self._exact(pts, np.full(len(pts), s))
                upd = dd < best_d
                best_d[upd] = dd[upd]
                best_seg[upd] = s
                best_t[upd] = tt[upd]
            return best_seg, best_t
        seg, _, _ = self._nearest(pts)
        _, t = self._exact(pts, seg)
        return seg, t

    def _nearest(self, pts):
        if len(pts) > self._CHUNK:
            segs, ds, dds = [], [], []
            for lo in range(0, len(pts), self._CHUNK):
                s, d, dd = self._nearest(pts[lo:lo + self._CHUNK])
                segs.append(s); ds.append(d); dds.append(dd)
            return np.concatenate(segs), np.concatenate(ds), np.concatenate(dds)
        k = min(self._K, self._tree.n)
        dd, ii = self._tree.query(pts, k=k, workers=-1)
        if k == 1:
            dd = dd[:, None]
            ii = ii[:, None]
        cand = self._owners[ii]
        e, _ = self._exact(np.repeat(pts, k, axis=0), cand.ravel())
        e = e.reshape(-1, k)
        jbest = np.argmin(e, axis=1)
        ar = np.arange(len(pts))
        best_d = e[ar, jbest]
        best_seg = cand[ar, jbest]
        # completeness: every non-candidate segment keeps all samples at distance >= dd_k,
        # and since vertices are samples, its exact distance is >= sqrt(dd_k^2 - (delta/2)^2)
        if k == self._K:
            slack = (0.5 * self._delta) ** 2
            unsure = best_d**2 > dd[:, -1] ** 2 - slack
        else:
            unsure = np.zeros(len(pts), bool)
        for i in np.flatnonzero(unsure):
            ids = self._tree.query_ball_point(pts[i], math.hypot(best_d[i], 0.5 * self._delta))
            segs = np.unique(self._owners[ids])
            e, _ = self._exact(np.repeat(pts[i][None], len(segs), axis=0), segs)
            j = int(np.argmin(e))
            if e[j] < best_d[i]:
                best_d[i] = e[j]
                best_seg[i] = segs[j]
        return best_seg, best_d, dd

    def dist(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self._brute:
            seg, _ = self.project(pts)
            d, _ = self._exact(pts, seg)
            return d
        _, best_d, _ = self._nearest(pts)
        return best_d


# ---------------------------------------------------------------------------
# Mobius normalization of Lemma-2.1 type and disk automorphisms

@dataclass(frozen=True)
class MobiusTransform:
    """T(z) = a (1-z)/(1+z) with purely imaginary a: disk -> upper half plane.

    T(1) = 0, T(-1) = inf; the unit circle maps to the extended real line.
    """
    a: complex

    def __call__(self, z):
        z = np.asarray(z, dtype=complex) if not np.isscalar(z) else z
        return self.a * (1 - z) / (1 + z)

    def inverse(self, w):
        return (self.a - w) / (self.a + w)


def mobius_for_endpoints(xi1: complex) -> MobiusTransform:
    """Normalized transform for the endpoint pair (xi1, conj(xi1)): T(xi1)=1, T(conj xi1)=-1."""
    xi1 = complex(xi1)
    if abs(abs(xi1) - 1.0) > 1e-9:
        raise ValidationError(f"xi1 must lie on the unit circle, |xi1|={abs(xi1)}")
    if xi1.imag <= 0 or xi1.real <= 0:
        raise ValidationError("normalization requires Re xi1 > 0 and Im xi1 > 0")
    if abs(xi1 - 1) < _DEGENERATE_XI_TOL or abs(xi1 + 1) < _DEGENERATE_XI_TOL:
        raise ValidationError("xi1 too close to +-1 (degenerate normalization)")
    a = 1j * (xi1.imag / (1.0 - xi1.real))
    return MobiusTransform(a)


def disk_automorphism(a: complex):
    """sigma_a(z) = (z - a)/(1 - conj(a) z), the automorphism sending a to 0."""
    ac = complex(a)

    def sigma(z):
        return (z - ac) / (1 - ac.conjugate() * z)

    return sigma


# ---------------------------------------------------------------------------
# exact hyperbolic distances (curvature -1)

def hyperbolic_dist_disk(z, w) -> float:
    z = complex(*_as_xy(z)) if not isinstance(z, complex) else z
    w = complex(*_as_xy(w)) if not isinstance(w, complex) else w
    if abs(z) >= 1 or abs(w) >= 1:
        raise ValidationError("points must lie in the open unit disk")
    num = abs(z - w)
    den = math.sqrt((1 - abs(z) ** 2) * (1 - abs(w) ** 2))
    return 2.0 * math.asinh(num / den)


def hyperbolic_dist_halfplane(z, w) -> float:
    z = complex(*_as_xy(z)) if not isinstance(z, complex) else z
    w = complex(*_as_xy(w)) if not isinstance(w, complex) else w
    if z.imag <= 0 or w.imag <= 0:
        raise ValidationError("points must have positive imaginary part")
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


def hyperbolic_dist_disk_many(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.sqrt((1 - np.abs(z) ** 2) * (1 - np.abs(w) ** 2))
    return 2.0 * np.arcsinh(num / den)


# ---------------------------------------------------------------------------
# hyperbolic geodesics of the disk

@dataclass(frozen=True)
class DiskGeodesic:
    """Geodesic of the Poincare disk between two boundary points.

    Either a diameter (antipodal endpoints) or the arc of the circle through the
    endpoints orthogonal to the unit circle.
    """
    xi1: complex
    xi2: complex
    center: complex | None      # None for a diameter
    radius: float
    sweep0: float               # start angle on the geodesic circle
    sweep: float                # signed sweep towards xi2 through the inside of the disk

    @property
    def is_diameter(self) -> bool:
        return self.center is None

    def euclid_length(self) -> float:
        if self.is_diameter:
            return abs(self.xi2 - self.xi1)
        return self.radius * abs(self.sweep)

    def sample(self, n: int) -> np.ndarray:
        """n+1 points from xi1 to xi2 (complex); polyline length -> euclid_length()."""
        t = np.linspace(0.0, 1.0, n + 1)
        if self.is_diameter:
            return self.xi1 + t * (self.xi2 - self.xi1)
        ang = self.sweep0 + t * self.sweep
        pts = self.center + self.radius * np.exp(1j * ang)
        pts[0] = self.xi1
        pts[-1] = self.xi2
        return pts

    def sample_graded(self, n: int) -> np.ndarray:
        """Like sample() but with endpoints-refined spacing (useful under conformal images)."""
        u = np.linspace(0.0, 1.0, n + 1)
        t = 0.5 - 0.5 * np.cos(np.pi * u)   # Chebyshev-style clustering at both ends
        if self.is_diameter:
            return self.xi1 + t * (self.xi2 - self.xi1)
        ang = self.sweep0 + t * self.sweep
        pts = self.center + self.radius * np.exp(1j * ang)
        pts[0] = self.xi1
        pts[-1] = self.xi2
        return pts


def disk_geodesic(xi1: complex, xi2: complex, atol: float = TOL) -> DiskGeodesic:
    xi1, xi2 = complex(xi1), complex(xi2)
    for xi in (xi1, xi2):
        if abs(abs(xi) - 1.0) > 1e-7:
            raise ValidationError(f"geodesic endpoints must lie on the unit circle, got |xi|={abs(xi)}")
    if abs(xi1 - xi2) <= atol:
        raise ValidationError("coincident geodesic endpoints")
    if abs(xi1 + xi2) <= 1e-12:
        return DiskGeodesic(xi1, xi2, None, 0.0, 0.0, 0.0)
    # center c solves Re(c conj xi_k) = 1 for both endpoints
    det = xi1.real * xi2.imag - xi1.imag * xi2.real
    if abs(det) <= 1e-15:
        return DiskGeodesic(xi1, xi2, None, 0.0, 0.0, 0.0)
    cx = (xi2.imag - xi1.imag) / det
    cy = (xi1.real - xi2.real) / det
    c = complex(cx, cy)
    r = math.sqrt(abs(c) ** 2 - 1.0)
    a1 = cmath.phase(xi1 - c)
    a2 = cmath.phase(xi2 - c)
    am = cmath.phase(-c)
    ccw = (a2 - a1) % (2 * math.pi)
    tm = (am - a1) % (2 * math.pi)
    sweep = ccw if tm <= ccw else ccw - 2 * math.pi
    return DiskGeodesic(xi1, xi2, c, r, a1, sweep)


# ---------------------------------------------------------------------------
# boundary parametrizations

class BoundaryParam:
    """Homeomorphism from the unit circle onto the boundary of a Jordan polyline.

    The default (proportional) parametrization is constant-speed in arclength;
    a custom table of per-vertex angles supports the counterexample parametrization.
    """

    def __init__(self, domain: JordanDomain, vertex_thetas: np.ndarray | None = None):
        self.domain = domain
        n = len(domain.vertices)
        cs = np.concatenate([[0.0], np.cumsum(domain._seg_len)])
        if vertex_thetas is None:
            self.vertex_thetas = 2 * np.pi * cs[:-1] / domain.perimeter
        else:
            th = np.asarray(vertex_thetas, dtype=float)
            if len(th) != n:
                raise ValidationError("vertex_thetas length mismatch")
            if np.any(np.diff(th) <= 0):
                raise ValidationError("vertex_thetas must be strictly increasing")
            if th[0] < 0 or th[-1] >= 2 * np.pi:
                raise ValidationError("vertex_thetas must lie in [0, 2*pi)")
            self.vertex_thetas = th
        self._cs = cs

    def point(self, theta):
        """Boundary point(s) at circle angle theta (radians), vectorized, complex output."""
        th = np.mod(np.asarray(theta, dtype=float), 2 * np.pi)
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        tv = self.vertex_thetas
        idx = np.clip(np.searchsorted(tv, th, side="right") - 1, 0, len(tv) - 1)
        t0 = tv[idx]
        t1 = np.where(idx + 1 < len(tv), tv[(idx + 1) % len(tv)], 2 * np.pi)
        frac = (th - t0) / np.maximum(t1 - t0, 1e-300)
        s = self._cs[idx] + frac * (self._cs[idx + 1] - self._cs[idx])
        out = self.domain.point_at_arclength(s)
        return out[0] if scalar else out

    def point_xy(self, theta):
        z = self.point(theta)
        return np.stack([np.real(z), np.imag(z)], axis=-1)

    def theta_of_point(self, p) -> float:
        """Inverse parametrization for a point on (or numerically near) the boundary."""
        s = self.domain.arclength_of_point(p)
        cs = self._cs
        idx = int(np.clip(np.searchsorted(cs, s, side="right") - 1, 0, len(cs) - 2))
        frac = (s - cs[idx]) / max(cs[idx + 1] - cs[idx], 1e-300)
        tv = self.vertex_thetas
        t0 = tv[idx]
        t1 = tv[idx + 1] if idx + 1 < len(tv) else 2 * np.pi
        return float((t0 + frac * (t1 - t0)) % (2 * np.pi))


# ---------------------------------------------------------------------------
# convenience constructors used across the test-suite and CLI

def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0)) -> JordanDomain:
    th = 2 * np.pi * np.arange(n) / n
    v = np.stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)], axis=1)
    return JordanDomain(v, validate=False)


def unit_square() -> JordanDomain:
    return JordanDomain([(0, 0), (1, 0), (1, 1), (0, 1)])


def rectangle(w: float, h: float, center=(0.0, 0.0)) -> JordanDomain:
    cx, cy = center
    return JordanDomain([(cx - w / 2, cy - h / 2), (cx + w / 2, cy - h / 2),
                         (cx + w / 2, cy + h / 2), (cx - w / 2, cy + h / 2)])


def l_shape() -> JordanDomain:
    return JordanDomain([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
