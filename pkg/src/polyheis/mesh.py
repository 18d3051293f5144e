"""Triangulated unit sphere with per-face panel ids and Pansu color keys.

Ceiling panels are sampled on uniform (r, s) grids, basements are their
mirror (u, -phi), and each wall is sampled along its edge in the same trace
coordinates as the neighbouring ceiling panels so that seams share vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polygon import PolygonNormData
from .sphere import PanelCoords, ceiling_panel_samples, pansu_covector, panel_table, wall_bound_array

HUE_BINS = 48
MERGE_DIGITS = 9


@dataclass
class SphereMesh:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3), 0-based
    groups: list  # group label per face
    keys: list  # material key per face
    covectors: dict = field(default_factory=dict)  # key -> representative covector

    def boundary_edges(self) -> list:
        """Edges used by exactly one face."""
        count: dict = {}
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                e = (min(a, b), max(a, b))
                count[e] = count.get(e, 0) + 1
        return sorted(e for e, c in count.items() if c == 1)

    def z_range(self) -> tuple:
        return float(self.vertices[:, 2].min()), float(self.vertices[:, 2].max())


def hue_key(covector) -> str:
    """Material name from the direction of a covector, quantized to HUE_BINS."""
    a, b = float(covector[0]), float(covector[1])
    ang = (np.arctan2(b, a) / (2 * np.pi)) % 1.0
    return f"pd_{int(round(ang * HUE_BINS)) % HUE_BINS:02d}"


def key_hue(key: str) -> float:
    return int(key.split("_")[1]) / HUE_BINS


class _Builder:
    def __init__(self):
        self.index: dict = {}
        self.verts: list = []
        self.faces: list = []
        self.groups: list = []
        self.keys: list = []
        self.covectors: dict = {}

    def vid(self, p) -> int:
        p = np.asarray(p, dtype=float) + 0.0
        k = tuple(np.round(p, MERGE_DIGITS) + 0.0)
        i = self.index.get(k)
        if i is None:
            i = self.index[k] = len(self.verts)
            self.verts.append(tuple(p))
        return i

    def quad_grid(self, P: np.ndarray, group: str, covector_at):
        """Triangulate an (n, m, 3) grid of points; covector_at(a, b) colors cell (a, b)."""
        n, m = P.shape[:2]
        ids = [[self.vid(P[a, b]) for b in range(m)] for a in range(n)]
        for a in range(n - 1):
            for b in range(m - 1):
                key = hue_key(cov := covector_at(a, b))
                self.covectors.setdefault(key, np.asarray(cov, dtype=float))
                q = (ids[a][b], ids[a + 1][b], ids[a + 1][b + 1], ids[a][b + 1])
                for tri in ((q[0], q[1], q[2]), (q[0], q[2], q[3])):
                    if len(set(tri)) < 3:
                        continue
                    x = np.array([self.verts[t] for t in tri])
                    if np.linalg.norm(np.cross(x[1] - x[0], x[2] - x[0])) < 1e-14:
                        continue
                    self.faces.append(tri)
                    self.groups.append(group)
                    self.keys.append(key)


def _wall_curve(g: PolygonNormData, k: int, n: int) -> np.ndarray:
    """Edge k traced as (1, s) then (r, 1) in wall trace coordinates: 2n-1 points."""
    t = np.linspace(0.0, 1.0, n)
    si, sj = g.sigma(k), g.sigma(k + 1)
    ki, kj = g.kappa(k), g.kappa(k + 1)
    first = (si + t[:, None] * sj) / (ki + t * kj)[:, None]
    r = t[::-1][1:]
    second = (r[:, None] * si + sj) / (r * ki + kj)[:, None]
    return np.vstack([first, second])


def sphere_mesh(g: PolygonNormData, samples_per_panel: int) -> SphereMesh:
    """Ceiling, basement and wall surfaces of the unit sphere."""
    n = int(samples_per_panel)
    if n < 2:
        raise ValueError("samples_per_panel must be at least 2")
    tab = panel_table(g)
    b = _Builder()
    for p, R, S, u, phi in ceiling_panel_samples(g, n):
        i, j = int(tab.i[p]), int(tab.j[p])
        rc = 0.5 * (R[:-1, :-1] + R[1:, 1:])
        sc = 0.5 * (S[:-1, :-1] + S[1:, 1:])
        N = g.N
        for side, sign, (pi, pj) in (("ceiling", 1.0, (i, j)),
                                     ("basement", -1.0, ((i + N) % g.n_vertices, (j + N) % g.n_vertices))):
            # the basement over -u is located in the antipodal panel with the same (r, s)
            P = np.concatenate([sign * u, sign * phi[..., None]], axis=-1)

            def cov(a, c, side=side, pi=pi, pj=pj):
                return pansu_covector(g, PanelCoords(pi, pj, rc[a, c], sc[a, c], side))

            b.quad_grid(P, PanelCoords(pi, pj, 0, 0, side).label(), cov)
    rows = np.linspace(-1.0, 1.0, n)
    for k in range(g.n_vertices):
        w = _wall_curve(g, k, n)
        top = wall_bound_array(g, w)
        P = np.empty((len(w), n, 3))
        P[..., :2] = w[:, None, :]
        P[..., 2] = top[:, None] * rows[None, :]
        alpha = g.alpha(k)
        b.quad_grid(P, f"panel_{k + 1}_{(k + 1) % g.n_vertices + 1}_wall", lambda a, c: alpha)
    return SphereMesh(np.array(b.verts), np.array(b.faces, dtype=int), b.groups, b.keys,
                      b.covectors)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_obj(mesh: SphereMesh, obj_path, mtl_name: str | None = None) -> None:
    lines = ["# polyheis unit sphere"]
    if mtl_name:
        lines.append(f"mtllib {mtl_name}")
    for x, y, z in mesh.vertices:
        lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    group = key = None
    for f, grp, k in zip(mesh.faces, mesh.groups, mesh.keys):
        if grp != group:
            lines.append(f"g {grp}")
            group, key = grp, None
        if k != key:
            lines.append(f"usemtl {k}")
            key = k
        lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    with open(obj_path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_mtl(mesh: SphereMesh, mtl_path) -> None:
    from .render import covector_rgb

    lines = ["# Pansu derivative color keys"]
    for key in sorted(mesh.covectors):
        rgb = covector_rgb(mesh.covectors[key], hue=key_hue(key))
        cov = mesh.covectors[key]
        lines += [f"newmtl {key}", f"# covector {_fmt(cov[0])} {_fmt(cov[1])}",
                  "Kd " + " ".join(_fmt(c) for c in rgb), ""]
    with open(mtl_path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))
