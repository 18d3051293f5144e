"""Planar kernel: the polygonal norm, its dual and its isoperimetrix.

Vectors and covectors are numpy arrays whose last axis has length 2.  A
covector ``(a, b)`` is the functional ``(x, y) -> a*x + b*y``.  Indices are
0-based and taken modulo ``2N``; reports shift them to 1-based labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateEdge,
    DegeneratePolygon,
    NotCentrallySymmetric,
    NotConvex,
    WrongOrientation,
)

DEFAULT_TOL = 1e-9


def symplectic(a, b):
    """Standard symplectic form ``a.x*b.y - a.y*b.x``, broadcast over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def symplectic_dual(c):
    """The vector ``c^w`` with ``symplectic(c^w, w) == c(w)`` for every ``w``."""
    c = np.asarray(c, dtype=float)
    return np.stack([c[..., 1], -c[..., 0]], axis=-1)


def rot90(v):
    """Rotation by a quarter turn, ``J(x, y) = (-y, x)``; ``<Jv, w> = omega(v, w)``."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def shoelace(points) -> float:
    p = np.asarray(points, dtype=float)
    return 0.5 * float(np.sum(symplectic(p, np.roll(p, -1, axis=0))))


@dataclass(frozen=True, eq=False)
class PolygonNormData:
    vertices: np.ndarray  # (2N, 2) anticlockwise
    edges: np.ndarray  # e_k = v_{k+1} - v_k
    alphas: np.ndarray  # covectors equal to 1 on edge k
    iso_vertices: np.ndarray  # symplectic duals of the alphas
    sigmas: np.ndarray  # iso_vertices[k] - iso_vertices[k-1]
    sigma_norms: np.ndarray
    iso_area: float
    iso_perimeter: float
    unit_iso_area: float
    tol: float = DEFAULT_TOL
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def N(self) -> int:
        return len(self.vertices) // 2

    def v(self, k: int) -> np.ndarray:
        return self.vertices[k % self.n_vertices]

    def alpha(self, k: int) -> np.ndarray:
        return self.alphas[k % self.n_vertices]

    def sigma(self, k: int) -> np.ndarray:
        return self.sigmas[k % self.n_vertices]

    def kappa(self, k: int) -> float:
        return float(self.sigma_norms[k % self.n_vertices])

    def gauge(self, v) -> np.ndarray | float:
        """Minkowski gauge of Q, ``max_k alpha_k(v)``."""
        v = np.asarray(v, dtype=float)
        out = np.max(v @ self.alphas.T, axis=-1)
        return float(out) if out.ndim == 0 else out

    def dual_gauge(self, c) -> np.ndarray | float:
        """Gauge of the dual ball Q* at a covector: ``max_k c(v_k)``."""
        c = np.asarray(c, dtype=float)
        out = np.max(c @ self.vertices.T, axis=-1)
        return float(out) if out.ndim == 0 else out

    def report(self) -> dict:
        """JSON-ready mirror of the data, indices presented 1-based."""
        m = self.n_vertices
        return {
            "N": self.N,
            "vertices": self.vertices.tolist(),
            "edges": self.edges.tolist(),
            "alphas": self.alphas.tolist(),
            "iso_vertices": self.iso_vertices.tolist(),
            "sigmas": self.sigmas.tolist(),
            "sigma_norms": self.sigma_norms.tolist(),
            "iso_area": self.iso_area,
            "iso_perimeter": self.iso_perimeter,
            "unit_iso_area": self.unit_iso_area,
            "labels": list(range(1, m + 1)),
            "tol": self.tol,
        }


def build_geometry(raw_vertices, tol: float = DEFAULT_TOL) -> PolygonNormData:
    """Validate the 2N anticlockwise vertices of Q and derive all planar data."""
    v = np.asarray(raw_vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise DegeneratePolygon("vertices must be a list of [x, y] pairs")
    if not np.all(np.isfinite(v)):
        raise DegeneratePolygon("vertices must be finite")
    m = len(v)
    if m % 2 or m < 4:
        raise DegeneratePolygon(f"need 2N vertices with N >= 2, got {m}")
    N = m // 2

    edges = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    if np.any(lengths <= tol):
        k = int(np.argmin(lengths))
        raise DegenerateEdge(f"edge {k + 1} has length {lengths[k]:.3g}")
    asym = np.max(np.abs(v[N:] + v[:N]))
    if asym > tol:
        raise NotCentrallySymmetric(f"v_(k+N) + v_k deviates by {asym:.3g}")

    turns = symplectic(edges, np.roll(edges, -1, axis=0))
    if np.all(turns < -tol):
        raise WrongOrientation("vertices are listed clockwise")
    if np.any(turns <= tol):
        k = int(np.argmin(turns))
        raise NotConvex(f"turn at vertex {(k + 1) % m + 1} is {turns[k]:.3g}")

    heights = symplectic(edges, v)  # omega(e_k, v_k) < 0 for anticlockwise Q around 0
    alphas = np.stack([-edges[:, 1], edges[:, 0]], axis=-1) / heights[:, None]
    iso = edges / heights[:, None]
    sigmas = iso - np.roll(iso, 1, axis=0)
    alphas, iso, sigmas = alphas + 0.0, iso + 0.0, sigmas + 0.0  # drop signed zeros
    sigma_norms = np.max(sigmas @ alphas.T, axis=-1)
    iso_area = shoelace(iso)
    iso_perimeter = float(np.sum(sigma_norms))
    return PolygonNormData(
        vertices=v,
        edges=edges,
        alphas=alphas,
        iso_vertices=iso,
        sigmas=sigmas,
        sigma_norms=sigma_norms,
        iso_area=iso_area,
        iso_perimeter=iso_perimeter,
        unit_iso_area=iso_area / iso_perimeter**2,
        tol=tol,
    )


def gauge_norm(g: PolygonNormData, v):
    return g.gauge(v)


def hexagon(tol: float = DEFAULT_TOL) -> PolygonNormData:
    """The hexagon with vertices (1,0),(1,1),(0,1),(-1,0),(-1,-1),(0,-1)."""
    return build_geometry([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)], tol)


def square(tol: float = DEFAULT_TOL) -> PolygonNormData:
    """The diamond with vertices (1,0),(0,1),(-1,0),(0,-1)."""
    return build_geometry([(1, 0), (0, 1), (-1, 0), (0, -1)], tol)
