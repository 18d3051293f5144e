"""Numerical blow-ups: empirical horofunction limits, sequence builders,
Kuratowski set estimators and finite-difference Pansu audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import ndimage

from .distance import d_e_array, distance, fd_directional, pansu_derivatives
from .errors import NotSmoothPoint, UnreachableTarget
from .heisenberg import as_point, dilate, inverse, multiply
from .horo import (
    Horofunction,
    Linear,
    NormType,
    TwoPiece,
    crease_offset,
    evaluate,
    linear,
)
from .polygon import PolygonNormData, rot90, symplectic
from .sphere import classify_sphere_point, pansu_covector

DEFAULT_EPS = tuple(2.0**-n for n in range(4, 17))


@dataclass(frozen=True)
class GridWindow:
    radius: float = 3.0
    spacing: float = 0.1
    z_slices: tuple = (-1.0, 0.0, 1.0)

    def __post_init__(self):
        if not 0 < self.spacing < self.radius:
            raise ValueError("need 0 < spacing < radius")

    def axis(self) -> np.ndarray:
        n = int(round(self.radius / self.spacing))
        return np.arange(-n, n + 1) * self.spacing

    def points(self) -> np.ndarray:
        t = self.axis()
        X, Y, Z = np.meshgrid(t, t, np.asarray(self.z_slices, float), indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])

    def volume_points(self) -> np.ndarray:
        """Full 3D lattice, used by the set estimators."""
        t = self.axis()
        X, Y, Z = np.meshgrid(t, t, t, indexing="ij")
        return np.stack([X, Y, Z], axis=-1)


@dataclass(frozen=True)
class SequenceSpec:
    base: np.ndarray
    w1: np.ndarray = field(default_factory=lambda: np.zeros(3))
    w2: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eps_schedule: tuple = DEFAULT_EPS

    def __post_init__(self):
        e = np.asarray(self.eps_schedule, float)
        if len(e) == 0 or np.any(e <= 0) or np.any(np.diff(e) >= 0):
            raise ValueError("eps schedule must be positive and strictly decreasing")

    def point(self, eps: float) -> np.ndarray:
        """``p_n = p delta_{eps^(3/4)}(w2) delta_eps(w1)``."""
        p = multiply(self.base, dilate(eps**0.75, self.w2))
        return multiply(p, dilate(eps, self.w1))

    def escape_point(self, eps: float) -> np.ndarray:
        """``q_n = delta_{1/eps}(p_n^{-1})``."""
        return dilate(1.0 / eps, inverse(self.point(eps)))


@dataclass
class EmpiricalResult:
    eps: np.ndarray
    deviation: np.ndarray  # sup over the grid per step (nan without prediction)
    points: np.ndarray
    values: np.ndarray  # final table
    predicted: Optional[np.ndarray]

    @property
    def final(self) -> float:
        return float(self.deviation[-1])

    def monotone(self, slack: float = 1e-3) -> bool:
        """Trend audit: the tail never rises above an earlier value by more than slack."""
        d = self.deviation
        return bool(np.all(d[1:] <= np.minimum.accumulate(d)[:-1] + slack))


def empirical_horofunction(
    g: PolygonNormData,
    seq: SequenceSpec,
    grid: GridWindow | np.ndarray,
    predicted: Horofunction | None = None,
) -> EmpiricalResult:
    """Tables of ``f_n(x) = d(q_n, x) - d(q_n, e)`` along the schedule."""
    pts = grid.points() if isinstance(grid, GridWindow) else as_point(grid).reshape(-1, 3)
    pred = evaluate(predicted, pts, g) if predicted is not None else None
    devs, values = [], None
    for eps in seq.eps_schedule:
        q = seq.escape_point(eps)
        values = distance(g, q, pts) - distance(g, q, np.zeros(3))
        devs.append(np.max(np.abs(values - pred)) if pred is not None else np.nan)
    return EmpiricalResult(np.asarray(seq.eps_schedule), np.asarray(devs), pts, values, pred)


# ---------------------------------------------------------------- sequence builder


def _transverse(g: PolygonNormData, i: int) -> np.ndarray:
    """``J v_i / |v_i|^2``, the unit step of ``omega(v_i, .)``."""
    vi = g.v(i)
    return rot90(vi) / float(vi @ vi)


def _lift(v2) -> np.ndarray:
    return np.array([v2[0], v2[1], 0.0]) + 0.0


def build_blowup_sequence(
    g: PolygonNormData,
    p,
    target: Horofunction,
    eps_schedule: Sequence[float] = DEFAULT_EPS,
) -> SequenceSpec:
    """A sequence ``p_n -> p`` whose horofunctions converge to ``target``.

    Along ``p delta_eps(w1)`` the limit is ``w1^{-1}`` acting on the blow-up at
    ``p``, which moves a crease through the origin to ``omega(v_i, .) = C`` when
    ``w1 = -C J v_i/|v_i|^2``.  Infinite C pushes the base off the seam at the
    slower scale ``eps^(3/4)``.  At a pole the base first slides down a star.
    """
    from .horo import blow_up_family_at

    p = as_point(p)
    fam = blow_up_family_at(g, p)
    if not fam.contains(target, g):
        raise UnreachableTarget(f"{target} is not a blow-up at {fam.point_class.tag}")
    eps = tuple(eps_schedule)
    zero = np.zeros(3)
    if fam.singleton is not None:
        return SequenceSpec(p, zero, zero, eps)
    pole = fam.point_class.tag in ("NorthPole", "SouthPole")
    if isinstance(target, NormType):
        return SequenceSpec(p, _lift(-np.asarray(target.w)), zero, eps)
    if isinstance(target, Linear):
        i, sign = fam.linear_side(target, g)
        if pole:
            w2 = -0.5 * (g.v(i) + g.v(i + 1)) if sign > 0 else -0.5 * (g.v(i - 1) + g.v(i))
            return SequenceSpec(p, zero, _lift(w2), eps)
        return SequenceSpec(p, zero, _lift(-sign * _transverse(g, i)), eps)
    C = crease_offset(g, target)
    w1 = _lift(-C * _transverse(g, target.i))
    w2 = _lift(-g.v(target.i)) if pole else zero
    return SequenceSpec(p, w1, w2, eps)


# ---------------------------------------------------------------- vertical sequences


def vertical_sequence_deviation(g: PolygonNormData, w, s_values, probe) -> dict:
    """Sup over probes of ``|d(p_s, x) - d(p_s, e) - (||w|| - ||w - v||)|`` with ``p_s = (w, s)``."""
    w = np.asarray(w, dtype=float)
    probe = as_point(probe).reshape(-1, 3)
    pred = g.gauge(w) - g.gauge(w - probe[:, :2])
    s_values = list(s_values)
    if any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("s values must increase")
    dev = []
    for s in s_values:
        q = np.array([w[0], w[1], s])
        f = distance(g, q, probe) - distance(g, q, np.zeros(3))
        dev.append(float(np.max(np.abs(f - pred))))
    trend = all(b <= a + 1e-3 for a, b in zip(dev, dev[1:]))
    return {"s": s_values, "deviation": dev, "monotone": trend}


def ball_probe(radius: float = 1.0, n: int = 9) -> np.ndarray:
    """Lattice points of the Euclidean 3-ball, including the identity."""
    t = np.linspace(-radius, radius, n)
    X, Y, Z = np.meshgrid(t, t, t, indexing="ij")
    P = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    return P[np.einsum("ij,ij->i", P, P) <= radius**2 + 1e-12]


# ---------------------------------------------------------------- Kuratowski limits

Membership = Callable[[np.ndarray], np.ndarray]


def _distance_fields(sets: Sequence[Membership], grid: GridWindow) -> np.ndarray:
    """Euclidean distance from every lattice point to each set (inf if empty)."""
    P = grid.volume_points()
    out = []
    for member in sets:
        mask = np.asarray(member(P.reshape(-1, 3)), bool).reshape(P.shape[:-1])
        if not mask.any():
            out.append(np.full(mask.shape, np.inf))
        else:
            out.append(ndimage.distance_transform_edt(~mask, sampling=grid.spacing))
    return np.stack(out)


def kuratowski_li(sets: Sequence[Membership], grid: GridWindow, eta: float | None = None):
    """Lattice points within ``eta`` of every set in the tail (lower limit)."""
    eta = 2 * grid.spacing if eta is None else eta
    return np.max(_distance_fields(sets, grid), axis=0) <= eta


def kuratowski_ls(sets: Sequence[Membership], grid: GridWindow, eta: float | None = None):
    """Lattice points within ``eta`` of some set in the tail (upper limit)."""
    eta = 2 * grid.spacing if eta is None else eta
    return np.min(_distance_fields(sets, grid), axis=0) <= eta


def rescaled_sets(omega: Membership, seq: SequenceSpec, tail: Sequence[int]):
    """``C_n = delta_{1/eps_n}(p_n^{-1} Omega)`` as membership predicates."""
    out = []
    for n in tail:
        eps = seq.eps_schedule[n]
        pn = seq.point(eps)

        def member(x, pn=pn, eps=eps):
            return omega(multiply(pn, dilate(eps, x)))

        out.append(member)
    return out


def blow_up_set(omega: Membership, seq: SequenceSpec, grid: GridWindow, tail=None, eta=None):
    """Lower and upper Kuratowski estimates of the blow-up of ``Omega`` along ``seq``."""
    tail = range(len(seq.eps_schedule) - 3, len(seq.eps_schedule)) if tail is None else tail
    sets = rescaled_sets(omega, seq, tail)
    fields = _distance_fields(sets, grid)
    eta = 2 * grid.spacing if eta is None else eta
    return np.max(fields, axis=0) <= eta, np.min(fields, axis=0) <= eta


def mask_distance(a: np.ndarray, b: np.ndarray, spacing: float) -> float:
    """Hausdorff distance between two lattice masks (inf if exactly one is empty)."""
    if not a.any() and not b.any():
        return 0.0
    if not a.any() or not b.any():
        return math.inf
    da = ndimage.distance_transform_edt(~a, sampling=spacing)
    db = ndimage.distance_transform_edt(~b, sampling=spacing)
    return float(max(da[b].max(), db[a].max()))


# ---------------------------------------------------------------- Pansu audit


def smooth_sphere_samples(g: PolygonNormData, count: int, rng: np.random.Generator,
                          margin: float = 0.05) -> np.ndarray:
    """Unit-sphere points comfortably inside smooth panels.

    Ceiling and basement points come from panel parameters in
    ``[margin, 1 - margin]^2``; wall points keep the same margin from seams.
    """
    from .sphere import panel_table, wall_bound_array

    tab = panel_table(g)
    m = g.n_vertices
    pts = []
    while len(pts) < count:
        kind = rng.random()
        if kind < 0.2:
            k = int(rng.integers(m))
            lam = rng.uniform(margin, 1 - margin)
            w = (1 - lam) * g.v(k) + lam * g.v(k + 1)
            top = float(wall_bound_array(g, w)[0])
            t = rng.uniform(-1 + margin, 1 - margin) * top
            pts.append([w[0], w[1], t])
            continue
        p = int(rng.integers(len(tab)))
        r, s = rng.uniform(margin, 1 - margin, 2)
        mu = r * tab.ki[p] + tab.L[p] + s * tab.kj[p]
        w = (r * tab.si[p] + tab.sij[p] + s * tab.sj[p]) / mu
        h = float(tab.height(p, r, s))
        sign = 1.0 if kind < 0.6 else -1.0
        q = np.array([w[0], w[1], h]) * sign
        cls = classify_sphere_point(g, q, on_sphere=True)
        if cls.tag in ("CeilingInterior", "BasementInterior", "WallInterior"):
            pts.append(q.tolist())
    return np.asarray(pts)


def pansu_audit(
    g: PolygonNormData,
    sample_count: int = 1000,
    eps_ladder: Sequence[float] = (1e-4, 5e-5),
    seed: int = 42,
    directions: int = 8,
    noise_floor: float = 1e-8,
) -> list[dict]:
    """Rows of analytic-versus-difference-quotient errors at smooth points.

    Each row carries the error at every rung of the ladder and the ratio of
    successive errors; ratios are only judged above ``noise_floor``, since on
    affine pieces (the walls) the quotient is exact.
    """
    rng = np.random.default_rng(seed)
    pts = smooth_sphere_samples(g, sample_count, rng)
    ang = 2 * np.pi * np.arange(directions) / directions
    dirs = np.column_stack([np.cos(ang), np.sin(ang), np.zeros(directions)])
    cov = pansu_derivatives(g, pts)[0]
    exact = cov @ dirs[:, :2].T  # (n, dirs)
    P = np.repeat(pts, directions, axis=0)
    V = np.tile(dirs, (len(pts), 1))
    errs = []
    for eps in eps_ladder:
        fd = fd_directional(g, P, V, eps).reshape(len(pts), directions)
        errs.append(np.abs(fd - exact))
    rows = []
    for n, p in enumerate(pts):
        for k in range(directions):
            e = [float(err[n, k]) for err in errs]
            ratios = [a / b if b > noise_floor else math.nan for a, b in zip(e, e[1:])]
            judged = [r for r, b in zip(ratios, e[1:]) if b > noise_floor]
            rows.append({
                "sample": n, "x": float(p[0]), "y": float(p[1]), "z": float(p[2]),
                "direction": k, "errors": e, "ratios": ratios,
                "halving_ok": all(1.5 <= r <= 3.0 for r in judged),
                "nonincreasing": all(b <= a + noise_floor for a, b in zip(e, e[1:])),
            })
    return rows
