"""Unit sphere of the polygonal sub-Finsler metric.

The ceiling over a point ``w`` of the disk Q is the height reached by the
trace path ending at ``w``; such paths are indexed by a panel ``(i, j)`` and
two partial-edge parameters ``(r, s)``.  Panels are handled in bulk through
:class:`PanelTable` so that heights and membership vectorize over many points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateMu, NoPanelFound, NotOnSphere, OutsideCone, OutsideDisk
from .heisenberg import as_point, traced_area
from .polygon import PolygonNormData, symplectic

SIDES = ("ceiling", "basement", "wall", "star")
SEAM_TOL = 1e-7


@dataclass(frozen=True)
class PanelCoords:
    i: int
    j: int
    r: float
    s: float
    side: str = "ceiling"

    def label(self) -> str:
        return f"panel_{self.i + 1}_{self.j + 1}_{self.side}"


@dataclass(frozen=True)
class SpherePointClass:
    tag: str
    i: Optional[int] = None
    param: Optional[float] = None
    coords: Optional[PanelCoords] = None

    @property
    def smooth(self) -> bool:
        return self.tag in SMOOTH_TAGS


SMOOTH_TAGS = {"CeilingInterior", "BasementInterior", "WallInterior", "StarTip"}
SEAM_TAGS = (
    "NorthPole",
    "SouthPole",
    "Vertex",
    "NorthStarSeam",
    "SouthStarSeam",
    "WallCeilingSeam",
    "WallBasementSeam",
)


def _offset(g: PolygonNormData, c: PanelCoords) -> int:
    m = g.n_vertices
    if c.side == "star":
        if c.i % m != c.j % m:
            raise ValueError("star panels have j == i")
        return m
    d = (c.j - c.i) % m
    if c.side == "wall" and d != 1:
        raise ValueError("wall panels have j == i + 1")
    if c.side in ("ceiling", "basement") and d < 2:
        raise ValueError("ceiling and basement panels need j not in {i, i+1}")
    return d


class PanelTable:
    """Per-panel constants for every ceiling panel, ordered by (j, offset).

    The height is ``(r*A1 + B + s*A2 + r*s*X) / (2 mu^2)`` with
    ``mu = r*ki + L + s*kj``; the endpoint is ``(r*si + sij + s*sj) / mu``.
    """

    def __init__(self, g: PolygonNormData, offsets=None):
        m = g.n_vertices
        if offsets is None:
            offsets = range(2, m)
        rows = sorted(((i + d) % m, d, i) for i in range(m) for d in offsets)
        self.j = np.array([r[0] for r in rows])
        self.d = np.array([r[1] for r in rows])
        self.i = np.array([r[2] for r in rows])
        sig, kap = g.sigmas, g.sigma_norms
        self.si, self.sj = sig[self.i], sig[self.j]
        self.ki, self.kj = kap[self.i], kap[self.j]
        P = len(rows)
        self.sij = np.zeros((P, 2))
        self.L = np.zeros(P)
        self.B = np.zeros(P)
        for p, (i, d) in enumerate(zip(self.i, self.d)):
            mid = sig[(i + np.arange(1, d)) % m]
            self.sij[p] = mid.sum(axis=0)
            self.L[p] = kap[(i + np.arange(1, d)) % m].sum()
            self.B[p] = traced_area(mid) * 2.0 if len(mid) else 0.0
        self.A1 = symplectic(self.si, self.sij)
        self.A2 = symplectic(self.sij, self.sj)
        self.X = symplectic(self.si, self.sj)

    def __len__(self) -> int:
        return len(self.i)

    def solve(self, w):
        """Invert every panel at every point: returns r, s, violation of shape (n, P)."""
        w = np.asarray(w, dtype=float).reshape(-1, 1, 2)
        a = self.si - self.ki[:, None] * w
        b = self.sj - self.kj[:, None] * w
        rhs = self.L[:, None] * w - self.sij
        det = symplectic(a, b)
        bad = np.abs(det) < 1e-14
        det = np.where(bad, 1.0, det)
        r = symplectic(rhs, b) / det
        s = symplectic(a, rhs) / det
        viol = np.maximum.reduce([-r, r - 1.0, -s, s - 1.0, np.zeros_like(r)])
        viol = np.where(bad, np.inf, viol)
        return r, s, viol

    def height(self, p, r, s):
        mu = r * self.ki[p] + self.L[p] + s * self.kj[p]
        num = r * self.A1[p] + self.B[p] + s * self.A2[p] + r * s * self.X[p]
        return num / (2.0 * mu * mu)

    def locate(self, w, tol: float):
        """First panel (in table order) containing each point, with its (r, s)."""
        r, s, viol = self.solve(w)
        key = np.where(viol <= tol, 0.0, viol)
        p = np.argmin(key, axis=1)
        rows = np.arange(len(p))
        return p, np.clip(r[rows, p], 0.0, 1.0), np.clip(s[rows, p], 0.0, 1.0), viol[rows, p]


def panel_table(g: PolygonNormData) -> PanelTable:
    tab = g._cache.get("panels")
    if tab is None:
        tab = g._cache["panels"] = PanelTable(g)
    return tab


# ---------------------------------------------------------------- single panels


def trace_vectors(g: PolygonNormData, c: PanelCoords) -> np.ndarray:
    """Unscaled traced vectors ``r sigma_i, sigma_{i+1}, ..., s sigma_j``."""
    d = _offset(g, c)
    mid = [g.sigma(c.i + k) for k in range(1, d)]
    return np.array([c.r * g.sigma(c.i), *mid, c.s * g.sigma(c.j)])


def panel_mu(g: PolygonNormData, c: PanelCoords) -> float:
    d = _offset(g, c)
    mid = sum(g.kappa(c.i + k) for k in range(1, d))
    mu = c.r * g.kappa(c.i) + mid + c.s * g.kappa(c.j)
    if mu <= g.tol:
        raise DegenerateMu(f"mu = {mu:.3g} for {c}")
    return mu


def panel_endpoint(g: PolygonNormData, c: PanelCoords) -> np.ndarray:
    mu = panel_mu(g, c)
    return trace_vectors(g, c).sum(axis=0) / mu


def panel_height(g: PolygonNormData, c: PanelCoords) -> float:
    """Balayage area of the unit-length trace path, always reported >= 0."""
    mu = panel_mu(g, c)
    return traced_area(trace_vectors(g, c)) / mu**2


def panel_partials(g: PolygonNormData, c: PanelCoords):
    """Analytic ``du/dr`` and ``du/ds``: ``k_i (v_i - u)/mu`` and ``k_j (v_j - u)/mu``."""
    mu = panel_mu(g, c)
    u = panel_endpoint(g, c)
    return g.kappa(c.i) * (g.v(c.i) - u) / mu, g.kappa(c.j) * (g.v(c.j) - u) / mu


# ---------------------------------------------------------------- walls and cones


def cone_coords(g: PolygonNormData, w):
    """Cone index k and weights (a, b) with ``w = a v_k + b v_{k+1}``, a > 0, b >= 0.

    Works on arrays of points; the origin gets k = 0 and a = b = 0.
    """
    w = np.atleast_2d(np.asarray(w, dtype=float))
    v0 = g.vertices
    v1 = np.roll(g.vertices, -1, axis=0)
    den = symplectic(v0, v1)
    a = symplectic(w[:, None, :], v1) / den
    b = symplectic(v0, w[:, None, :]) / den
    ok = (a > 1e-13 * (1 + np.abs(b))) & (b >= -1e-13 * (1 + np.abs(a)))
    k = np.argmax(ok, axis=1)
    rows = np.arange(len(w))
    return k, np.maximum(a[rows, k], 0.0), np.maximum(b[rows, k], 0.0)


def wall_bound(g: PolygonNormData, i: int, v) -> float:
    """``F_i(v) = omega(v_i, v) omega(v, v_{i+1}) / (2 omega(v_i, v_{i+1}))`` on the cone C_i."""
    v = np.asarray(v, dtype=float)
    vi, vj = g.v(i), g.v(i + 1)
    p, q = symplectic(vi, v), symplectic(v, vj)
    if p < -g.tol or q < -g.tol:
        raise OutsideCone(f"{v.tolist()} is outside cone {i + 1}")
    return float(max(p, 0.0) * max(q, 0.0) / (2.0 * symplectic(vi, vj)))


def wall_bound_array(g: PolygonNormData, w) -> np.ndarray:
    """``F`` of the cone containing each point; this is the ceiling on the boundary of Q."""
    k, a, b = cone_coords(g, w)
    vi, vj = g.vertices[k], g.vertices[(k + 1) % g.n_vertices]
    return 0.5 * a * b * symplectic(vi, vj)


def wall_coords(g: PolygonNormData, w) -> PanelCoords:
    """Wall coordinates of a boundary point, normalized so that ``max(r, s) = 1``."""
    k, a, b = cone_coords(g, w)
    k, a, b = int(k[0]), float(a[0]), float(b[0])
    r, s = a / g.kappa(k), b / g.kappa(k + 1)
    top = max(r, s)
    return PanelCoords(k, (k + 1) % g.n_vertices, r / top, s / top, "wall")


# ---------------------------------------------------------------- stars


def star_extent(g: PolygonNormData, i: int) -> float:
    """The star seam over vertex i is ``{-c v_i : 0 < c <= k_i / (l - k_i)}``."""
    k = g.kappa(i)
    return k / (g.iso_perimeter - k)


def star_r(g: PolygonNormData, i: int, c: float) -> float:
    """Star parameter of ``-c v_i``: r = 1 at the origin, r = 0 at the tip."""
    k, ell = g.kappa(i), g.iso_perimeter
    return (k - c * (ell - k)) / (k * (1.0 + c))


def star_hit(g: PolygonNormData, w, tol: float):
    """Return (i, c) if ``w = -c v_i`` lies on a star seam (origin excluded)."""
    w = np.asarray(w, dtype=float)
    for i in range(g.n_vertices):
        vi = g.v(i)
        c = -float(w @ vi) / float(vi @ vi)
        if c <= tol or c > star_extent(g, i) + tol:
            continue
        if np.linalg.norm(w + c * vi) <= tol:
            return i, c
    return None


# ---------------------------------------------------------------- heights and membership


def ceiling_heights(g: PolygonNormData, w) -> np.ndarray:
    """Vectorized ceiling height; points must satisfy gauge <= 1 (+ roundoff)."""
    w = np.asarray(w, dtype=float).reshape(-1, 2)
    tab = panel_table(g)
    p, r, s, _ = tab.locate(w, g.tol)
    return np.maximum(tab.height(p, r, s), 0.0)


def ceiling_height(g: PolygonNormData, w) -> float:
    w = np.asarray(w, dtype=float)
    if g.gauge(w) > 1 + g.tol:
        raise OutsideDisk(f"gauge {g.gauge(w):.6g} > 1")
    return float(ceiling_heights(g, w)[0])


def unit_ball_mask(g: PolygonNormData, p, tol: float = 0.0) -> np.ndarray:
    """Vectorized membership in the closed unit ball."""
    p = as_point(p).reshape(-1, 3)
    w, t = p[:, :2], p[:, 2]
    inside = g.gauge(w) <= 1.0 + tol
    out = np.zeros(len(p), dtype=bool)
    if np.any(inside):
        out[inside] = np.abs(t[inside]) <= ceiling_heights(g, w[inside]) + tol
    return out


def unit_ball_contains(g: PolygonNormData, p) -> bool:
    return bool(unit_ball_mask(g, p, g.tol)[0])


def locate_panel(g: PolygonNormData, w) -> PanelCoords:
    """Canonical panel coordinates of ``w``: wall, then star, then ceiling panels.

    Ceiling panels are tried in (j, offset) order, so the origin reports the
    full-loop panel ``(1, 0)`` (0-based) with ``r = s = 1``.
    """
    w = np.asarray(w, dtype=float)
    gw = g.gauge(w)
    if gw > 1 + g.tol:
        raise OutsideDisk(f"gauge {gw:.6g} > 1")
    if gw >= 1 - g.tol:
        return wall_coords(g, w)
    hit = star_hit(g, w, g.tol)
    if hit is not None:
        i, c = hit
        return PanelCoords(i, i, float(np.clip(star_r(g, i, c), 0.0, 1.0)), 0.0, "star")
    tab = panel_table(g)
    p, r, s, viol = tab.locate(w[None, :], g.tol)
    p = int(p[0])
    if viol[0] > 1e3 * g.tol:
        raise NoPanelFound(f"no panel contains {w.tolist()} (violation {viol[0]:.3g})")
    return PanelCoords(int(tab.i[p]), int(tab.j[p]), float(r[0]), float(s[0]), "ceiling")


# ---------------------------------------------------------------- classification


def classify_sphere_point(g: PolygonNormData, p, tol: float = 1e-7,
                          on_sphere: bool = False) -> SpherePointClass:
    """Tag a unit-sphere point with its smooth or seam class.

    ``on_sphere=True`` skips the distance check for points normalized by the caller.
    """
    from .distance import d_e

    p = as_point(p)
    if not on_sphere:
        lam = d_e(g, p)
        if abs(lam - 1.0) > tol:
            raise NotOnSphere(f"d_e = {lam:.12g}")
    w, t = p[:2], float(p[2])
    m = g.n_vertices
    if g.gauge(w) >= 1.0 - SEAM_TOL:
        c = wall_coords(g, w)
        k = c.i
        for vid, weight in ((k, c.s), ((k + 1) % m, c.r)):
            if weight <= SEAM_TOL:
                return SpherePointClass("Vertex", vid, None, c)
        top = float(wall_bound_array(g, w)[0])
        if abs(t) < top - SEAM_TOL:
            return SpherePointClass("WallInterior", k, None, c)
        tag = "WallCeilingSeam" if t > 0 else "WallBasementSeam"
        param = c.s if tag == "WallCeilingSeam" else c.r
        return SpherePointClass(tag, k, param, c)
    north = t > 0
    if np.linalg.norm(w) <= SEAM_TOL:
        return SpherePointClass("NorthPole" if north else "SouthPole")
    # basement seams sit over the same planar stars as the ceiling ones
    hit = star_hit(g, w, SEAM_TOL)
    if hit is not None:
        i, cst = hit
        r = float(np.clip(star_r(g, i, cst), 0.0, 1.0))
        coords = PanelCoords(i, i, r, 0.0, "star")
        if r <= SEAM_TOL:
            return SpherePointClass("StarTip", i, 0.0, coords)
        return SpherePointClass("NorthStarSeam" if north else "SouthStarSeam", i, r, coords)
    c = locate_panel(g, w)
    c = PanelCoords(c.i, c.j, c.r, c.s, "ceiling" if north else "basement")
    return SpherePointClass("CeilingInterior" if north else "BasementInterior", None, None, c)


# ---------------------------------------------------------------- Pansu derivatives


def pansu_covector(g: PolygonNormData, c: PanelCoords) -> np.ndarray:
    """Pansu derivative of d_e on a smooth panel, given the panel coordinates."""
    if c.side == "wall":
        return g.alpha(c.i).copy()
    if c.side == "ceiling":
        return (1 - c.s) * g.alpha(c.j - 1) + c.s * g.alpha(c.j)
    if c.side == "basement":
        return (1 - c.r) * g.alpha(c.i) + c.r * g.alpha(c.i - 1)
    raise ValueError("star seams carry no single derivative")


def ceiling_panel_samples(g: PolygonNormData, n: int):
    """Uniform (r, s) grids over every ceiling panel, in table order."""
    tab = panel_table(g)
    t = np.linspace(0.0, 1.0, n)
    R, S = np.meshgrid(t, t, indexing="ij")
    for p in range(len(tab)):
        mu = R * tab.ki[p] + tab.L[p] + S * tab.kj[p]
        u = (R[..., None] * tab.si[p] + tab.sij[p] + S[..., None] * tab.sj[p]) / mu[..., None]
        yield p, R, S, u, tab.height(p, R, S)


def seam_point(g: PolygonNormData, tag: str, i: int = 0, param: float = 0.5) -> np.ndarray:
    """A unit-sphere point of the given class.

    ``param`` is the star coordinate r for star seams and the position along
    edge i for wall seams; poles ignore both arguments.
    """
    A = g.unit_iso_area
    if tag in ("NorthPole", "SouthPole"):
        return np.array([0.0, 0.0, A if tag == "NorthPole" else -A])
    if tag == "Vertex":
        v = g.v(i)
        return np.array([v[0], v[1], 0.0])
    if tag in ("NorthStarSeam", "SouthStarSeam", "StarTip"):
        r = 0.0 if tag == "StarTip" else param
        w = panel_endpoint(g, PanelCoords(i, i, r, 0.0, "star"))
        t = ceiling_height(g, w)
        return np.array([w[0], w[1], t if tag != "SouthStarSeam" else -t])
    if tag in ("WallCeilingSeam", "WallBasementSeam", "WallInterior"):
        w = (1 - param) * g.v(i) + param * g.v(i + 1)
        t = float(wall_bound_array(g, w)[0])
        if tag == "WallInterior":
            t *= 0.5
        return np.array([w[0], w[1], t if tag != "WallBasementSeam" else -t])
    raise ValueError(tag)
