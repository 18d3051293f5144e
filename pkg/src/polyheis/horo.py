"""Horofunction catalogue: canonical forms, evaluation, action and orbits.

Every horofunction here depends only on the horizontal projection ``v`` of
its argument.  Two-piece functions interpolate between adjacent dual
vertices; with ``L_s = (1-s) alpha_{i-1} + s alpha_i`` and ``a+ = max(a, 0)``,
``a- = min(a, 0)``::

    psi_vee   = max(alpha_{i-1} - a+, L_s + a-)
    psi_wedge = min(alpha_{i-1} - a-, L_s + a+)
    xi_vee    = max(alpha_i - a+,     L_s + a-)
    xi_wedge  = min(alpha_i - a-,     L_s + a+)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidS
from .heisenberg import as_point, inverse, multiply
from .polygon import PolygonNormData, symplectic

FAMILIES = ("psi_vee", "psi_wedge", "xi_vee", "xi_wedge")
ACT_RESIDUAL = 1e-9


@dataclass(frozen=True)
class Linear:
    beta: tuple


@dataclass(frozen=True)
class NormType:
    w: tuple


@dataclass(frozen=True)
class TwoPiece:
    i: int
    family: str
    s: float
    a: float


Horofunction = Union[Linear, NormType, TwoPiece]


def _vec(x) -> tuple:
    return tuple(float(c) + 0.0 for c in np.asarray(x, dtype=float))


def linear(beta) -> Linear:
    return Linear(_vec(beta))


def norm_type(w) -> NormType:
    return NormType(_vec(w))


def planar_horofunction(g: PolygonNormData, i: int, s: float) -> np.ndarray:
    """The covector ``(1-s) alpha_{i-1} + s alpha_i``."""
    if not 0.0 <= s <= 1.0:
        raise InvalidS(f"s = {s} outside [0, 1]")
    return (1.0 - s) * g.alpha(i - 1) + s * g.alpha(i)


def two_piece(g: PolygonNormData, i: int, family: str, s: float, a: float) -> Horofunction:
    """Canonical representative of a two-piece member (may degenerate to Linear).

    ``s = 0`` for psi and ``s = 1`` for xi collapse to one covector, ``a = +-inf``
    keep a single piece, and ``xi(0, a)`` is stored as ``psi(1, -a)``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if not (0.0 <= s <= 1.0) or math.isnan(s):
        raise InvalidS(f"s = {s} outside [0, 1]")
    m = g.n_vertices
    i %= m
    psi = family.startswith("psi")
    vee = family.endswith("vee")
    fixed = g.alpha(i - 1) if psi else g.alpha(i)
    L = planar_horofunction(g, i, s)
    if (psi and s == 0.0) or (not psi and s == 1.0):
        return linear(fixed)
    if math.isinf(a):
        # vee keeps L_s at +inf and the fixed piece at -inf; wedge the reverse
        keep_L = (a > 0) == vee
        return linear(L if keep_L else fixed)
    if not psi and s == 0.0:
        return TwoPiece(i, "psi_" + family[3:], 1.0, -float(a) + 0.0)
    return TwoPiece(i, family, float(s), float(a) + 0.0)


def pieces(g: PolygonNormData, h: TwoPiece):
    """``(fixed covector, L_s, vee)`` of a two-piece member."""
    psi = h.family.startswith("psi")
    fixed = g.alpha(h.i - 1) if psi else g.alpha(h.i)
    return fixed, planar_horofunction(g, h.i, h.s), h.family.endswith("vee")


def evaluate(h: Horofunction, x, g: PolygonNormData) -> np.ndarray | float:
    """Value of ``h`` at Heisenberg point(s) ``x``; the z coordinate is ignored."""
    x = as_point(x)
    v = x[..., :2]
    if isinstance(h, Linear):
        out = v @ np.asarray(h.beta)
    elif isinstance(h, NormType):
        w = np.asarray(h.w)
        out = g.gauge(w) - g.gauge(w - v)
    else:
        fixed, L, vee = pieces(g, h)
        ap, am = max(h.a, 0.0), min(h.a, 0.0)
        if vee:
            out = np.maximum(v @ fixed - ap, v @ L + am)
        else:
            out = np.minimum(v @ fixed - am, v @ L + ap)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- threshold view


def crease_offset(g: PolygonNormData, h: TwoPiece) -> float:
    """The C with crease ``{omega(v_i, .) = C}``."""
    k = g.kappa(h.i)
    if h.family.startswith("psi"):
        return -h.a / (h.s * k)
    return h.a / ((1.0 - h.s) * k)


def two_piece_from_threshold(g: PolygonNormData, i: int, s: float, C: float, family: str):
    """Member of ``family`` at index ``i`` whose crease is ``{omega(v_i, .) = C}``."""
    if not (0.0 <= s <= 1.0):
        raise InvalidS(f"s = {s} outside [0, 1]")
    k = g.kappa(i)
    if family.startswith("psi"):
        a = -s * k * C if s > 0 else 0.0
    else:
        a = (1.0 - s) * k * C if s < 1 else 0.0
    return two_piece(g, i, family, s, a)


def threshold_form(g: PolygonNormData, h: TwoPiece):
    """Piecewise presentation ``beta_lo + c_lo`` on ``theta <= C``, ``beta_hi + c_hi`` above.

    The constants are fixed by continuity along the crease and ``f(0) = 0``.
    """
    fixed, L, vee = pieces(g, h)
    C = crease_offset(g, h)
    # fixed - L is a positive multiple of theta for xi and a negative one for psi
    fixed_below = h.family.startswith("psi") == vee
    lo, hi = (fixed, L) if fixed_below else (L, fixed)
    vi = g.v(h.i)
    x = C * np.array([-vi[1], vi[0]]) / float(vi @ vi)  # theta(J v_i) = |v_i|^2
    if C >= 0:
        c_lo = 0.0
        c_hi = float(lo @ x - hi @ x)
    else:
        c_hi = 0.0
        c_lo = float(hi @ x - lo @ x)
    return C, lo, c_lo, hi, c_hi


def evaluate_threshold(g: PolygonNormData, h: TwoPiece, x) -> np.ndarray:
    C, lo, c_lo, hi, c_hi = threshold_form(g, h)
    v = as_point(x)[..., :2]
    theta = symplectic(g.v(h.i), v)
    return np.where(theta <= C, v @ lo + c_lo, v @ hi + c_hi)


# ---------------------------------------------------------------- action and orbits


def probe_grid(radius: float = 3.0, n: int = 13) -> np.ndarray:
    t = np.linspace(-radius, radius, n)
    X, Y = np.meshgrid(t, t, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel(), np.zeros(X.size)])


def act_pointwise(g_el, h: Horofunction, x, g: PolygonNormData) -> np.ndarray:
    """The defining formula ``(g.h)(x) = h(g^{-1} x) - h(g^{-1})``."""
    gi = inverse(as_point(g_el))
    return evaluate(h, multiply(gi, x), g) - evaluate(h, gi, g)


def act(g_el, h: Horofunction, g: PolygonNormData, verify: bool = True) -> Horofunction:
    """Canonical representative of ``g_el . h``.

    Closed forms: linear functions are fixed, NormType translates by
    ``pi(g_el)`` and two-piece creases move by ``omega(v_i, pi(g_el))``.  The
    result is checked against the defining formula on a probe grid.
    """
    g_el = as_point(g_el)
    shift = g_el[:2]
    if isinstance(h, Linear):
        out = h
    elif isinstance(h, NormType):
        out = norm_type(np.asarray(h.w) + shift)
    else:
        dC = float(symplectic(g.v(h.i), shift))
        k = g.kappa(h.i)
        if h.family.startswith("psi"):
            a = h.a - h.s * k * dC
        else:
            a = h.a + (1.0 - h.s) * k * dC
        out = two_piece(g, h.i, h.family, h.s, a)
    if verify:
        x = probe_grid()
        res = np.max(np.abs(evaluate(out, x, g) - act_pointwise(g_el, h, x, g)))
        scale = 1.0 + float(np.max(np.abs(g_el)))
        if res > ACT_RESIDUAL * scale:
            raise RuntimeError(f"action residual {res:.3g} for {h}")
    return out


def is_busemann(h: Horofunction, g: PolygonNormData, tol: float = 1e-9) -> bool:
    """Blow-ups at wall points and vertices: the dual vertices and vertex families."""
    if isinstance(h, Linear):
        return bool(np.any(np.max(np.abs(g.alphas - np.asarray(h.beta)), axis=1) <= tol))
    if isinstance(h, TwoPiece):
        return h.family == "psi_vee" and abs(h.s - 1.0) <= tol
    return False


def orbit_class(h: Horofunction, g: PolygonNormData, digits: int = 9) -> tuple:
    """Label of the orbit of ``h``, which is also its class in the reduced boundary."""
    if isinstance(h, NormType):
        return ("NormType",)
    if isinstance(h, Linear):
        return ("Linear",) + tuple(round(c, digits) + 0.0 for c in h.beta)
    return (h.family, h.i % g.n_vertices, round(h.s, digits) + 0.0)


def has_finite_orbit(h: Horofunction, g: PolygonNormData) -> bool:
    """Only the linear horofunctions are moved by no group element."""
    return isinstance(h, Linear)


def bounded_difference(h1: Horofunction, h2: Horofunction, g: PolygonNormData,
                       tol: float = 1e-9) -> bool:
    """Whether ``h1 - h2`` is bounded, decided structurally."""
    if isinstance(h1, NormType) and isinstance(h2, NormType):
        return True  # |difference| <= 2 ||w2 - w1||
    if isinstance(h1, Linear) and isinstance(h2, Linear):
        return bool(np.max(np.abs(np.subtract(h1.beta, h2.beta))) <= tol)
    if isinstance(h1, TwoPiece) and isinstance(h2, TwoPiece):
        return (h1.family == h2.family and h1.i % g.n_vertices == h2.i % g.n_vertices
                and abs(h1.s - h2.s) <= tol)
    return False


# ---------------------------------------------------------------- serialization


def to_record(h: Horofunction) -> dict:
    """JSON atlas record; indices 1-based."""
    if isinstance(h, Linear):
        return {"family": "linear", "beta": list(h.beta)}
    if isinstance(h, NormType):
        return {"family": "norm", "w": list(h.w)}
    a = h.a if math.isfinite(h.a) else ("inf" if h.a > 0 else "-inf")
    return {"family": h.family, "i": h.i + 1, "s": h.s, "a": a}


def from_record(rec: dict, g: PolygonNormData) -> Horofunction:
    fam = rec["family"]
    if fam == "linear":
        return linear(rec["beta"])
    if fam == "norm":
        return norm_type(rec["w"])
    return two_piece(g, int(rec["i"]) - 1, fam, float(rec["s"]), float(rec["a"]))


def sample_catalogue(g: PolygonNormData, n: int, rng: np.random.Generator) -> list:
    """A mixed sample of boundary points for partition and Lipschitz audits."""
    m = g.n_vertices
    out = []
    while len(out) < n:
        kind = rng.integers(4)
        if kind == 0:
            out.append(norm_type(rng.uniform(-2, 2, 2)))
        elif kind == 1:
            i = int(rng.integers(m))
            s = float(rng.choice([0.0, 1.0, 0.5, 0.25]))
            out.append(linear(planar_horofunction(g, i, s)))
        else:
            i = int(rng.integers(m))
            fam = FAMILIES[int(rng.integers(4))]
            s = float(rng.choice([1.0, 0.5, 0.25, 0.75]))
            a = float(rng.choice([-1.0, 0.0, 0.5, 2.0]))
            out.append(two_piece(g, i, fam, s, a))
    return out


# ---------------------------------------------------------------- blow-up families


@dataclass(frozen=True)
class TwoPieceFamily:
    """Members ``family_i(s, a)`` over all creases ``C`` in ``[-inf, +inf]``."""

    i: int
    family: str
    s: float

    def member(self, g: PolygonNormData, C: float) -> Horofunction:
        return two_piece_from_threshold(g, self.i, self.s, C, self.family)

    def contains(self, h: Horofunction, g: PolygonNormData, tol: float = 1e-9) -> bool:
        if isinstance(h, TwoPiece):
            c = two_piece(g, self.i, self.family, self.s, 0.0)
            return (isinstance(c, TwoPiece) and c.family == h.family and c.i == h.i
                    and abs(c.s - h.s) <= tol)
        if isinstance(h, Linear):
            ends = (self.member(g, math.inf), self.member(g, -math.inf))
            return any(np.allclose(e.beta, h.beta, atol=tol) for e in ends)
        return False


@dataclass(frozen=True)
class BlowUpFamily:
    point_class: object
    singleton: Horofunction | None = None
    families: tuple = ()
    norm_type: bool = False
    parameter_space: str = ""

    def contains(self, h: Horofunction, g: PolygonNormData, tol: float = 1e-9) -> bool:
        if self.singleton is not None:
            return isinstance(h, Linear) and np.allclose(self.singleton.beta, h.beta, atol=tol)
        if isinstance(h, NormType):
            return self.norm_type
        return any(f.contains(h, g, tol) for f in self.families)

    def linear_side(self, h: Linear, g: PolygonNormData, tol: float = 1e-9):
        """(family index, +1 or -1): the infinite crease producing the linear member."""
        for f in self.families:
            for sign in (1, -1):
                if np.allclose(f.member(g, sign * math.inf).beta, h.beta, atol=tol):
                    return f.i, sign
        raise ValueError(f"{h} is not an end of this family")

    def sample(self, g: PolygonNormData, creases=(-1.0, 0.0, 1.5, math.inf, -math.inf),
               ws=((0.0, 0.0), (0.5, -0.25), (-0.3, 0.6))) -> list:
        if self.singleton is not None:
            return [self.singleton]
        out = [norm_type(w) for w in ws] if self.norm_type else []
        for f in self.families:
            out.extend(f.member(g, C) for C in creases)
        return out


def blow_up_family_at(g: PolygonNormData, p) -> BlowUpFamily:
    """The horofunctions arising as blow-ups of d_e at a unit-sphere point."""
    from .sphere import classify_sphere_point, pansu_covector

    cls = classify_sphere_point(g, p)
    m = g.n_vertices
    tag, i = cls.tag, cls.i
    if tag == "StarTip":
        beta = g.alpha(i - 1) if p[2] > 0 else g.alpha(i)
        return BlowUpFamily(cls, singleton=linear(beta), parameter_space="none")
    if cls.smooth:
        return BlowUpFamily(cls, singleton=linear(pansu_covector(g, cls.coords)),
                            parameter_space="none")
    if tag in ("NorthPole", "SouthPole"):
        fams = tuple(TwoPieceFamily(k, "psi_wedge", 1.0) for k in range(m))
        return BlowUpFamily(cls, families=fams, norm_type=True,
                            parameter_space="w in R^2, or (i, C) with C in [-inf, inf]")
    if tag == "Vertex":
        fam = TwoPieceFamily(i, "psi_vee", 1.0)
    elif tag == "NorthStarSeam":
        fam = TwoPieceFamily(i, "psi_wedge", cls.param)
    elif tag == "SouthStarSeam":
        fam = TwoPieceFamily(i, "xi_wedge", 1.0 - cls.param)
    elif tag == "WallCeilingSeam":
        fam = TwoPieceFamily((i + 1) % m, "psi_vee", cls.param)
    elif tag == "WallBasementSeam":
        fam = TwoPieceFamily(i, "xi_vee", 1.0 - cls.param)
    else:  # pragma: no cover - classification is exhaustive
        raise ValueError(tag)
    return BlowUpFamily(cls, families=(fam,), parameter_space="C in [-inf, inf]")
