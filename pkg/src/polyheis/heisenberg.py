"""Heisenberg group in exponential coordinates with the half-symplectic product.

Points are arrays whose last axis is ``(x, y, z)``; every function broadcasts.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPositiveLambda
from .polygon import PolygonNormData, symplectic

IDENTITY = np.zeros(3)


def as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("Heisenberg points need three coordinates")
    return p


def multiply(p, q) -> np.ndarray:
    """(x,y,z)(x',y',z') = (x+x', y+y', z+z'+(xy'-x'y)/2)."""
    p, q = as_point(p), as_point(q)
    out = p + q
    out[..., 2] += 0.5 * symplectic(p[..., :2], q[..., :2])
    return out


def inverse(p) -> np.ndarray:
    return -as_point(p)


def dilate(lam, p) -> np.ndarray:
    """delta_lambda (x, y, z) = (lambda x, lambda y, lambda^2 z)."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise NonPositiveLambda(f"dilation factor must be positive, got {lam}")
    p = as_point(p)
    lam = lam[..., None]
    return p * np.concatenate([lam, lam, lam * lam], axis=-1)


def project(p) -> np.ndarray:
    return as_point(p)[..., :2].copy()


def _segments(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 1:
        raise ValueError("a planar polyline is an (n, 2) array with n >= 1")
    return pts


def balayage_area(points) -> float:
    """Signed area swept against the origin, ``1/2 sum omega(P_k, P_{k+1})``.

    For a path from the origin this equals ``1/2 sum_{a<b} omega(u_a, u_b)``
    over the traced vectors; it is the height gained by the horizontal lift.
    """
    pts = _segments(points)
    return 0.5 * float(np.sum(symplectic(pts[:-1], pts[1:])))


def lift(points, z0: float = 0.0) -> np.ndarray:
    """Horizontal lift through the vertices of a polyline, starting at height z0."""
    pts = _segments(points)
    dz = 0.5 * symplectic(pts[:-1], pts[1:])
    z = z0 + np.concatenate([[0.0], np.cumsum(dz)])
    return np.column_stack([pts, z])


def traced_area(vectors) -> float:
    """Balayage area of the path from the origin with the given traced vectors."""
    u = np.asarray(vectors, dtype=float)
    partial = np.cumsum(u, axis=0) - u
    return 0.5 * float(np.sum(symplectic(partial, u)))


def theta_planar(v, g: PolygonNormData) -> np.ndarray:
    """Reflection fixing the last vertex v_{2N} and negating its orthogonal line."""
    a = g.vertices[-1] / np.linalg.norm(g.vertices[-1])
    v = np.asarray(v, dtype=float)
    return 2.0 * (v @ a)[..., None] * a - v


def theta(p, g: PolygonNormData) -> np.ndarray:
    """Involutive automorphism (v, t) -> (Theta v, -t)."""
    p = as_point(p)
    out = np.empty_like(p)
    out[..., :2] = theta_planar(p[..., :2], g)
    out[..., 2] = -p[..., 2]
    return out


def theta_geometry_vertices(g: PolygonNormData) -> np.ndarray:
    """Vertices of Theta(Q) re-listed anticlockwise, with v_{2N} kept last."""
    w = theta_planar(g.vertices, g)[::-1]
    return np.roll(w, -1, axis=0)
