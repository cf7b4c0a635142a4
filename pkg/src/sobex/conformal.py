"""Numerical Riemann maps via the geodesic zipper and Koebe distortion checks.

The map is built by composing elementary slit maps of the upper half plane: each
boundary sample is absorbed onto the real line by opening the hyperbolic geodesic
from the previous attach point. Forward (disk -> domain) and inverse evaluation are
both exact-to-roundoff compositions of the same chain, so no quadrature or Newton
iteration is involved; accuracy is limited only by how well the geodesic
interpolant of the boundary samples approximates the true polyline.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .geometry import JordanDomain, _as_xy

_IM_FLOOR = 0.0   # interior images have Im >= 0; rounding dips are reflected back


def _clamp_upper(w: np.ndarray) -> np.ndarray:
    return np.real(w) + 1j * np.abs(np.imag(w))


@dataclass
class RiemannMap:
    """Conformal homeomorphism f: disk -> domain with f(0) = center.

    The boundary correspondence table pairs circle angles `thetas` with boundary
    arclength positions `arcs` (both strictly increasing, degree 1).
    """
    domain: JordanDomain
    center: complex
    points: np.ndarray     # boundary samples used in construction (complex)
    arcs: np.ndarray       # arclength of each sample along the boundary
    thetas: np.ndarray     # circle angle of each sample, thetas[0] = 0
    z0p: complex
    z1p: complex
    B: np.ndarray          # slit-step Mobius feet (inf = vertical geodesic)
    C: np.ndarray          # slit-step tip heights
    zeta0: float
    vstar: complex
    rot: complex

    # -- evaluation ---------------------------------------------------------
    def forward(self, omega) -> np.ndarray:
        """f(omega) for |omega| < 1 (vectorized, complex)."""
        om = np.atleast_1d(np.asarray(omega, dtype=complex))
        t = self.rot * om
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (self.vstar - np.conj(self.vstar) * t) / (1.0 - t)
            v = _clamp_upper(v)
            sq = np.sqrt(v)
            u = np.where(sq == 0, np.inf, -1.0 / sq)
            w = np.where(np.isinf(u), self.zeta0 + 0j,
                         u * self.zeta0 / (self.zeta0 + u))
            w = _clamp_upper(w)
            for i in range(len(self.B) - 1, 1, -1):
                b, c = self.B[i], self.C[i]
                s = np.sqrt(w - c) * np.sqrt(w + c)
                s = _clamp_upper(s)
                if math.isfinite(b):
                    w = s * b / (b + s)
                else:
                    w = s
                w = _clamp_upper(w)
            m = -w * w
            z = (m * self.z0p - self.z1p) / (m - 1.0)
        return z if np.ndim(omega) else z[0]

    def inverse(self, z) -> np.ndarray:
        """f^{-1}(z) for z strictly inside the domain (vectorized, complex)."""
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        with np.errstate(divide="ignore", invalid="ignore"):
            m = (zz - self.z1p) / (zz - self.z0p)
            w = 1j * np.sqrt(m)
            w = _clamp_upper(w)
            for i in range(2, len(self.B)):
                b, c = self.B[i], self.C[i]
                if math.isfinite(b):
                    u = w / (1.0 - w / b)
                else:
                    u = w
                v = np.sqrt(u * u + c * c)
                v = np.where(np.imag(v) < 0, -v, v)
                w = _clamp_upper(v)
            u = w * self.zeta0 / (self.zeta0 - w)
            v = 1.0 / (u * u)
            om = ((v - self.vstar) / (v - np.conj(self.vstar))) / self.rot
        return om if np.ndim(z) else om[0]

    def deriv_abs(self, omega, rel_step: float = 1e-5) -> np.ndarray:
        """|f'(omega)| by centered differences of the forward evaluator."""
        om = np.atleast_1d(np.asarray(omega, dtype=complex))
        step = rel_step * np.maximum(1.0 - np.abs(om), 1e-3)
        fp = self.forward(om + step)
        fm = self.forward(om - step)
        out = np.abs(fp - fm) / (2 * step)
        return out if np.ndim(omega) else out[0]

    # -- boundary correspondence ---------------------------------------------
    def boundary_arclength(self, theta) -> np.ndarray:
        """Monotone interpolation circle angle -> boundary arclength."""
        th = np.mod(np.atleast_1d(np.asarray(theta, dtype=float)), 2 * np.pi)
        tk = self.thetas
        sk = self.arcs
        L = self.domain.perimeter
        idx = np.clip(np.searchsorted(tk, th, side="right") - 1, 0, len(tk) - 1)
        t0 = tk[idx]
        t1 = np.where(idx + 1 < len(tk), tk[np.minimum(idx + 1, len(tk) - 1)], 2 * np.pi)
        s0 = sk[idx]
        s1 = np.where(idx + 1 < len(sk), sk[np.minimum(idx + 1, len(sk) - 1)], L)
        frac = (th - t0) / np.maximum(t1 - t0, 1e-300)
        s = s0 + frac * (s1 - s0)
        return s if np.ndim(theta) else s[0]

    def boundary_image(self, xi) -> np.ndarray:
        """Homeomorphic boundary extension evaluated at unit-circle point(s) xi."""
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=complex))
        th = np.mod(np.angle(xi_arr), 2 * np.pi)
        s = self.boundary_arclength(th)
        out = self.domain.point_at_arclength(s)
        return out if np.ndim(xi) else out[0]

    def boundary_angle(self, p) -> float:
        """Circle angle whose boundary image is the given boundary point."""
        s = self.domain.arclength_of_point(p)
        sk = self.arcs
        tk = self.thetas
        L = self.domain.perimeter
        idx = int(np.clip(np.searchsorted(sk, s, side="right") - 1, 0, len(sk) - 1))
        s0 = sk[idx]
        s1 = sk[idx + 1] if idx + 1 < len(sk) else L
        t0 = tk[idx]
        t1 = tk[idx + 1] if idx + 1 < len(tk) else 2 * np.pi
        frac = (s - s0) / max(s1 - s0, 1e-300)
        return float((t0 + frac * (t1 - t0)) % (2 * np.pi))

    def boundary_prevertex(self, p) -> complex:
        return complex(np.exp(1j * self.boundary_angle(p)))

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "schema": "sobex.riemann_map.v1",
            "domain": self.domain.to_json(),
            "center": [self.center.real, self.center.imag],
            "points": [[p.real, p.imag] for p in self.points],
            "arcs": self.arcs.tolist(),
            "thetas": self.thetas.tolist(),
            "z0p": [self.z0p.real, self.z0p.imag],
            "z1p": [self.z1p.real, self.z1p.imag],
            "B": [None if not math.isfinite(b) else b for b in self.B.tolist()],
            "C": self.C.tolist(),
            "zeta0": self.zeta0,
            "vstar": [self.vstar.real, self.vstar.imag],
            "rot": [self.rot.real, self.rot.imag],
        }

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def from_json(cls, obj) -> "RiemannMap":
        if isinstance(obj, str):
            obj = json.loads(obj)
        dom = JordanDomain.from_json(obj["domain"])
        pts = np.array([complex(a, b) for a, b in obj["points"]])
        B = np.array([np.inf if b is None else b for b in obj["B"]], dtype=float)
        return cls(
            domain=dom,
            center=complex(*obj["center"]),
            points=pts,
            arcs=np.asarray(obj["arcs"], dtype=float),
            thetas=np.asarray(obj["thetas"], dtype=float),
            z0p=complex(*obj["z0p"]),
            z1p=complex(*obj["z1p"]),
            B=B,
            C=np.asarray(obj["C"], dtype=float),
            zeta0=float(obj["zeta0"]),
            vstar=complex(*obj["vstar"]),
            rot=complex(*obj["rot"]),
        )

    @classmethod
    def load(cls, path) -> "RiemannMap":
        with open(path) as f:
            return cls.from_json(json.load(f))


def compute_riemann_map(domain: JordanDomain, z0, n_boundary: int = 512) -> RiemannMap:
    """Geodesic-zipper construction of the Riemann map with f(0) = z0.

    The rotational degree of freedom is fixed by sending angle 0 to the boundary
    point nearest the first domain vertex (= the first boundary sample).
    """
    zc = complex(*_as_xy(z0))
    if n_boundary < 64:
        raise ValidationError("n_boundary must be at least 64")
    if not domain.contains(zc):
        raise ValidationError("map center must lie strictly inside the domain")
    pts, arcs = domain.resample_boundary(n_boundary)
    n = len(pts)
    z0p, z1p = complex(pts[0]), complex(pts[1])

    scale = max(domain.diameter, 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (pts - z1p) / (pts - z0p)
        m[0] = np.inf
        w = 1j * np.sqrt(m.astype(complex))
        w[0] = complex(np.inf, np.inf)
        w = _clamp_upper(w)
    wc = 1j * np.sqrt((zc - z1p) / (zc - z0p))
    if wc.imag <= 0:
        wc = -wc

    R = np.full(n, np.nan)          # real positions of absorbed samples
    R[1] = 0.0
    z0_at_inf = True
    B = np.full(n, np.nan)
    C = np.full(n, np.nan)

    for i in range(2, n):
        a = complex(w[i])
        if not (a.imag > 1e-15 * scale):
            raise NumericalError(
                f"zipper step {i}: boundary image left the upper half plane (Im={a.imag:.2e})")
        r2 = abs(a) ** 2
        b = np.inf if abs(a.real) < 1e-14 * abs(a) else r2 / a.real
        c = r2 / a.imag
        B[i], C[i] = b, c

        absorbed = ~np.isnan(R)
        u = R[absorbed] if not math.isfinite(b) else R[absorbed] / (1.0 - R[absorbed] / b)
        R[absorbed] = np.where(u > 0, np.hypot(u, c), -np.hypot(u, c))
        if z0_at_inf:
            u0 = -b if math.isfinite(b) else np.inf
            R[0] = math.copysign(math.hypot(u0, c), u0) if math.isfinite(u0) else np.inf
            if math.isfinite(b):
                z0_at_inf = False
            # b = inf keeps z0 at infinity for this step

        rest = w[i + 1:] if i + 1 < n else w[n:]
        if len(rest):
            ur = rest if not math.isfinite(b) else rest / (1.0 - rest / b)
            vr = np.sqrt(ur * ur + c * c)
            vr = np.where(np.imag(vr) < 0, -vr, vr)
            w[i + 1:] = _clamp_upper(vr)
        uc = wc if not math.isfinite(b) else wc / (1.0 - wc / b)
        vc = np.sqrt(uc * uc + c * c)
        if vc.imag < 0:
            vc = -vc
        wc = complex(vc.real, abs(vc.imag))
        R[i] = 0.0

    if z0_at_inf or not math.isfinite(R[0]):
        raise NumericalError("zipper failed to pull the wrap point off infinity")
    zeta0 = float(R[0])

    with np.errstate(divide="ignore", invalid="ignore"):
        u = R * zeta0 / (zeta0 - R)
        v = np.where(u == 0, np.inf, 1.0 / (u * u))
    v[0] = 0.0
    ucen = wc * zeta0 / (zeta0 - wc)
    vstar = 1.0 / (ucen * ucen)
    if not vstar.imag > 0:
        raise NumericalError(f"center image not in the upper half plane (Im={vstar.imag:.2e})")

    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.where(np.isinf(v), 1.0 + 0j, (v - vstar) / (v - np.conj(vstar)))
    rot = vstar / np.conj(vstar)
    th = np.mod(np.angle(D / rot), 2 * np.pi)
    th[0] = 0.0
    if np.any(np.diff(th) <= 0):
        k = int(np.argmin(np.diff(th)))
        raise NumericalError(
            f"boundary correspondence not monotone near sample {k} (degree-1 violation)")

    rmap = RiemannMap(domain=domain, center=zc, points=pts, arcs=arcs, thetas=th,
                      z0p=z0p, z1p=z1p, B=B, C=C, zeta0=zeta0, vstar=complex(vstar),
                      rot=complex(rot))
    back = rmap.forward(0.0)
    if abs(back - zc) > 1e-6 * scale:
        raise NumericalError(f"normalization failed: |f(0) - z0| = {abs(back - zc):.3e}")
    return rmap


def verify_koebe(rmap: RiemannMap, pairs: int = 1000, seed: int = 0,
                 rmax: float = 0.99) -> dict:
    """Sample interior pairs and check e^{-3h} <= |f'(z)|/|f'(w)| <= e^{3h}.

    Returns violation count (expected 0) and margin statistics. Pairs with a point
    at |z| > rmax are excluded (finite differences degrade at the rim).
    """
    from .geometry import hyperbolic_dist_disk_many

    rng = np.random.default_rng(seed)
    got = 0
    zs = np.empty(pairs, dtype=complex)
    ws = np.empty(pairs, dtype=complex)
    while got < pairs:
        cand = rng.uniform(-rmax, rmax, (2 * pairs, 2))
        cz = cand[:, 0] + 1j * cand[:, 1]
        cz = cz[np.abs(cz) < rmax]
        take = min(len(cz) // 2, pairs - got)
        zs[got:got + take] = cz[:take]
        ws[got:got + take] = cz[take:2 * take]
        got += take
    h = hyperbolic_dist_disk_many(zs, ws)
    fz = rmap.deriv_abs(zs)
    fw = rmap.deriv_abs(ws)
    ratio = fz / fw
    lo = np.exp(-3 * h)
    hi = np.exp(3 * h)
    viol = (ratio < lo) | (ratio > hi)
    margin = np.minimum(np.log(ratio) + 3 * h, 3 * h - np.log(ratio))
    return {
        "pairs": int(pairs),
        "violations": int(np.count_nonzero(viol)),
        "min_margin": float(margin.min()),
        "median_margin": float(np.median(margin)),
        "rmax": rmax,
    }


def conformality_residual(rmap: RiemannMap, points: int = 500, seed: int = 0,
                          rmax: float = 0.95) -> float:
    """Max relative Cauchy-Riemann residual of centered-difference Jacobians."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < points:
        c = rng.uniform(-rmax, rmax, (2 * points, 2))
        z = c[:, 0] + 1j * c[:, 1]
        z = z[np.abs(z) < rmax]
        pts.extend(z.tolist())
    z = np.array(pts[:points])
    step = 1e-5 * np.maximum(1 - np.abs(z), 1e-3)
    fx = (rmap.forward(z + step) - rmap.forward(z - step)) / (2 * step)
    fy = (rmap.forward(z + 1j * step) - rmap.forward(z - 1j * step)) / (2 * step)
    # analyticity: df/dy = i df/dx
    res = np.abs(fy - 1j * fx) / np.maximum(np.abs(fx), 1e-300)
    return float(res.max())


def winding_number(path_pts: np.ndarray, z: complex) -> float:
    """Winding of a closed polyline (complex samples) around z."""
    rel = np.asarray(path_pts, dtype=complex) - z
    ang = np.angle(np.roll(rel, -1) / rel)
    return float(np.sum(ang) / (2 * np.pi))


def rectangle_deriv_oracle(width: float, height: float) -> float:
    """|f'(0)| of the disk -> centered rectangle map, via Schwarz-Christoffel quadrature.

    Independent of the zipper: the map with prevertices +-e^{+-i beta} is
    g(z) = int_0^z (1 - 2 t^2 cos 2beta + t^4)^(-1/2) dt, g'(0) = 1; beta is tuned
    by bisection so that the image rectangle has the requested aspect ratio, and the
    result is scaled to the requested width.
    """
    from scipy.integrate import quad
    from scipy.optimize import brentq

    def half_sides(beta):
        c2 = math.cos(2 * beta)

        def den(t):
            return 1.0 / math.sqrt(max(1 - 2 * c2 * t * t + t ** 4, 1e-300))

        a, _ = quad(den, 0.0, 1.0, limit=200)

        def den_i(t):
            return 1.0 / math.sqrt(max(1 + 2 * c2 * t * t + t ** 4, 1e-300))

        b, _ = quad(den_i, 0.0, 1.0, limit=200)
        return a, b

    target = width / height

    def mismatch(beta):
        a, b = half_sides(beta)
        return a / b - target

    beta = brentq(mismatch, 1e-6, math.pi / 2 - 1e-6, xtol=1e-13)
    a, _ = half_sides(beta)
    return (width / 2) / a
