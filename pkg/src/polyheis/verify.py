"""Verification suites shared by the CLI and the acceptance tests.

Each suite returns ``(rows, summary)``: rows feed a CSV table, the summary a
JSON verdict with a boolean ``passed``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .blowup import (
    DEFAULT_EPS,
    GridWindow,
    SequenceSpec,
    ball_probe,
    blow_up_set,
    build_blowup_sequence,
    empirical_horofunction,
    mask_distance,
    pansu_audit,
    smooth_sphere_samples,
    vertical_sequence_deviation,
)
from .distance import pansu_derivatives
from .heisenberg import multiply
from .horo import (
    Linear,
    NormType,
    act,
    act_pointwise,
    blow_up_family_at,
    bounded_difference,
    evaluate,
    has_finite_orbit,
    is_busemann,
    linear,
    orbit_class,
    probe_grid,
    sample_catalogue,
    to_record,
    two_piece,
)
from .polygon import PolygonNormData, symplectic
from .sphere import SEAM_TAGS, classify_sphere_point, seam_point, unit_ball_mask, wall_bound_array

EIKONAL_TOL = 1e-9
PANSU_TOL = 1e-3
HALVING = (1.5, 3.0)
VERTICAL_TOL = 1e-2
VERTICAL_S = (1e2, 1e3, 1e4)
BLOWUP_TOL = 1e-2
ACTION_TOL = 1e-9
BLOWUP_GRID = GridWindow(radius=2.0, spacing=0.5, z_slices=(-1.0, 0.0, 1.0))
CREASES = (-1.0, 0.0, 1.5, math.inf, -math.inf)


@dataclass
class SuiteResult:
    name: str
    rows: list
    summary: dict

    @property
    def passed(self) -> bool:
        return bool(self.summary["passed"])


def _timed(name, fn, *args, **kw) -> SuiteResult:
    t0 = time.perf_counter()
    rows, summary = fn(*args, **kw)
    summary = {"suite": name, **summary, "seconds": time.perf_counter() - t0}
    return SuiteResult(name, rows, summary)


# ---------------------------------------------------------------- eikonal


def eikonal_suite(g: PolygonNormData, samples: int = 1000, seed: int = 42):
    """Dual gauge of the Pansu covector at smooth unit-sphere points."""
    rng = np.random.default_rng(seed)
    pts = smooth_sphere_samples(g, samples, rng)
    cov, classes = pansu_derivatives(g, pts)
    rows, worst = [], 0.0
    for p, c, cls in zip(pts, cov, classes):
        dg = float(g.dual_gauge(c))
        worst = max(worst, abs(dg - 1.0))
        rows.append({"x": p[0], "y": p[1], "z": p[2], "tag": cls.tag,
                     "a": c[0], "b": c[1], "dual_gauge": dg})
    return rows, {"samples": len(rows), "max_abs_deviation": worst, "tolerance": EIKONAL_TOL,
                  "passed": worst <= EIKONAL_TOL}


# ---------------------------------------------------------------- pansu


def pansu_suite(g: PolygonNormData, samples: int = 1000, eps_ladder=(1e-4, 5e-5), seed: int = 42):
    """Analytic covector against forward difference quotients in 8 horizontal directions."""
    audit = pansu_audit(g, samples, tuple(eps_ladder), seed=seed)
    rows = []
    for r in audit:
        row = {k: r[k] for k in ("sample", "x", "y", "z", "direction")}
        for n, (e, eps) in enumerate(zip(r["errors"], eps_ladder)):
            row[f"error_{n}"] = e
        for n, q in enumerate(r["ratios"]):
            row[f"ratio_{n}"] = q
        row["halving_ok"] = r["halving_ok"]
        rows.append(row)
    first = max(r["errors"][0] for r in audit)
    ratios = [q for r in audit for q in r["ratios"] if not math.isnan(q)]
    halving = all(r["halving_ok"] for r in audit)
    return rows, {
        "samples": samples, "directions": 8, "eps_ladder": list(eps_ladder),
        "max_error": first, "tolerance": PANSU_TOL,
        "ratio_min": min(ratios) if ratios else math.nan,
        "ratio_max": max(ratios) if ratios else math.nan,
        "halving_ok": halving, "passed": first <= PANSU_TOL and halving,
    }


# ---------------------------------------------------------------- vertical sequences


def random_disk_points(g: PolygonNormData, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of the unit disk Q of the norm, by rejection."""
    out = []
    while len(out) < n:
        w = rng.uniform(-1.0, 1.0, 2)
        if g.gauge(w) <= 1.0:
            out.append(w)
    return np.array(out)


def vertical_suite(g: PolygonNormData, count: int = 10, s_values=VERTICAL_S, seed: int = 42,
                   probe=None):
    """Deviation of ``(w, s)`` horofunctions from NormType{w} on a ball probe."""
    probe = ball_probe(1.0, 9) if probe is None else probe
    rng = np.random.default_rng(seed)
    rows, finals, trends = [], [], []
    for k, w in enumerate(random_disk_points(g, count, rng)):
        res = vertical_sequence_deviation(g, w, s_values, probe)
        for s, d in zip(res["s"], res["deviation"]):
            rows.append({"w_index": k, "wx": w[0], "wy": w[1], "s": s, "deviation": d})
        finals.append(res["deviation"][-1])
        trends.append(res["monotone"])
    worst = max(finals)
    return rows, {"count": count, "s_values": list(s_values), "probe_points": len(probe),
                  "max_final_deviation": worst, "tolerance": VERTICAL_TOL,
                  "monotone": all(trends), "passed": worst <= VERTICAL_TOL and all(trends)}


# ---------------------------------------------------------------- blow-up catalogue


def seam_base_points(g: PolygonNormData, i: int = 1) -> dict:
    """One unit-sphere point of every non-smooth class."""
    params = {"NorthStarSeam": 0.4, "SouthStarSeam": 0.4, "WallCeilingSeam": 0.3,
              "WallBasementSeam": 0.3}
    return {tag: seam_point(g, tag, i, params.get(tag, 0.5)) for tag in SEAM_TAGS}


def blowup_targets(g: PolygonNormData, p) -> list:
    fam = blow_up_family_at(g, p)
    if fam.norm_type:
        members = [NormType((0.5, -0.25)), NormType((-0.3, 0.6)), NormType((0.0, 0.0))]
        for f in (fam.families[0], fam.families[g.N]):
            members.extend(f.member(g, C) for C in CREASES)
        return members
    return fam.sample(g, creases=CREASES)


def blowup_suite(g: PolygonNormData, grid: GridWindow = BLOWUP_GRID, eps_schedule=DEFAULT_EPS,
                 tags=SEAM_TAGS):
    """Empirical horofunctions along built sequences at every seam class."""
    rows, verdicts = [], []
    for tag, p in seam_base_points(g).items():
        if tag not in tags:
            continue
        got = classify_sphere_point(g, p).tag
        for k, h in enumerate(blowup_targets(g, p)):
            seq = build_blowup_sequence(g, p, h, eps_schedule)
            res = empirical_horofunction(g, seq, grid, h)
            ok = res.final <= BLOWUP_TOL and res.monotone()
            verdicts.append({"class": tag, "classified": got, "member": k,
                             "target": to_record(h), "final": res.final,
                             "monotone": res.monotone(), "passed": ok and got == tag})
            for eps, d in zip(res.eps, res.deviation):
                rows.append({"class": tag, "member": k, "eps": eps, "deviation": d})
    per_class = {}
    for v in verdicts:
        per_class.setdefault(v["class"], []).append(v)
    return rows, {
        "grid": {"radius": grid.radius, "spacing": grid.spacing, "z_slices": list(grid.z_slices)},
        "tolerance": BLOWUP_TOL,
        "classes": {c: {"members": len(v), "max_final": max(x["final"] for x in v),
                        "passed": all(x["passed"] for x in v)} for c, v in per_class.items()},
        "max_final": max(v["final"] for v in verdicts),
        "passed": all(v["passed"] for v in verdicts)
        and all(len(v) >= 3 for v in per_class.values()),
        "members": verdicts,
    }


# ---------------------------------------------------------------- action and orbits


def _random_elements(rng, n: int) -> np.ndarray:
    return rng.uniform(-2.0, 2.0, (n, 3))


def busemann_catalogue(g: PolygonNormData, offsets=(-1.0, 0.0, 0.5, 2.0)) -> list:
    """The dual vertices and members of every vertex family."""
    out = [linear(g.alpha(k)) for k in range(g.n_vertices)]
    for k in range(g.n_vertices):
        out.extend(two_piece(g, k, "psi_vee", 1.0, a) for a in offsets)
    return out


def orbit_is_finite(g: PolygonNormData, h, rng, trials: int = 16) -> bool:
    """Empirical orbit finiteness: random translates either all fix h or keep moving it."""
    seen = {to_record_key(act(x, h, g)) for x in _random_elements(rng, trials)}
    return len(seen) < trials // 2


def to_record_key(h) -> str:
    rec = to_record(h)
    return repr(sorted((k, tuple(round(c, 9) for c in v) if isinstance(v, list) else
                        (round(v, 9) if isinstance(v, float) else v)) for k, v in rec.items()))


def action_suite(g: PolygonNormData, catalogue_size: int = 200, seed: int = 42):
    """Fixed points, translations, composition residuals, orbits and the reduced partition."""
    rng = np.random.default_rng(seed)
    cat = sample_catalogue(g, catalogue_size, rng)
    x = probe_grid()
    rows = []
    worst_act = worst_comp = 0.0
    linear_fixed = norm_translates = True
    for n, h in enumerate(cat):
        g1, g2 = _random_elements(rng, 2)
        h1 = act(g1, h, g, verify=False)
        r_act = float(np.max(np.abs(evaluate(h1, x, g) - act_pointwise(g1, h, x, g))))
        h21 = act(g2, h1, g, verify=False)
        h_direct = act(multiply(g2, g1), h, g, verify=False)
        r_comp = float(np.max(np.abs(evaluate(h21, x, g) - evaluate(h_direct, x, g))))
        worst_act, worst_comp = max(worst_act, r_act), max(worst_comp, r_comp)
        if isinstance(h, Linear):
            linear_fixed &= h1 == h and r_act <= ACTION_TOL
        if isinstance(h, NormType):
            norm_translates &= bool(np.allclose(np.subtract(h1.w, h.w), g1[:2], atol=1e-12))
        rows.append({"index": n, "variant": type(h).__name__, "record": to_record(h),
                     "act_residual": r_act, "composition_residual": r_comp})
    # reduced boundary: bounded difference against orbit class, all pairs
    labels = [orbit_class(h, g) for h in cat]
    mismatches = 0
    for a in range(len(cat)):
        for b in range(a, len(cat)):
            if bounded_difference(cat[a], cat[b], g) != (labels[a] == labels[b]):
                mismatches += 1
    bus = busemann_catalogue(g)
    orng = np.random.default_rng(seed + 1)
    finite_classes = {orbit_class(h, g) for h in bus if orbit_is_finite(g, h, orng)}
    structural = {orbit_class(h, g) for h in bus if has_finite_orbit(h, g)}
    all_busemann = all(is_busemann(h, g) for h in bus)
    summary = {
        "catalogue": len(cat),
        "max_act_residual": worst_act,
        "max_composition_residual": worst_comp,
        "tolerance": ACTION_TOL,
        "linear_fixed": linear_fixed,
        "norm_type_translates": norm_translates,
        "partition_mismatches": mismatches,
        "busemann_finite_orbits": len(finite_classes),
        "busemann_finite_orbits_structural": len(structural),
        "expected_finite_orbits": g.n_vertices,
    }
    summary["passed"] = (worst_act <= ACTION_TOL and worst_comp <= ACTION_TOL and linear_fixed
                         and norm_translates and mismatches == 0 and all_busemann
                         and len(finite_classes) == g.n_vertices == len(structural))
    return rows, summary


# ---------------------------------------------------------------- Kuratowski fixtures


def wall_cone(g: PolygonNormData, i: int, tol: float = 0.0):
    """``{omega(v_i, v) >= 0, t <= F_i(v)}`` with the quadratic wall height, closed up by tol."""
    vi, vj = g.v(i), g.v(i + 1)
    om = float(symplectic(vi, vj))

    def member(x):
        v = x[..., :2]
        a = symplectic(vi, v)
        return (a >= -tol) & (x[..., 2] <= a * symplectic(v, vj) / (2 * om) + tol)

    return member


def kuratowski_suite(g: PolygonNormData, grid: GridWindow | None = None, i: int = 0):
    """Half-space, vertex cone and empty blow-ups, with the Li within Ls audit."""
    grid = grid or GridWindow(radius=1.5, spacing=0.1, z_slices=(0.0,))
    P = grid.volume_points()
    ball = lambda x: unit_ball_mask(g, x)  # noqa: E731
    eps = DEFAULT_EPS
    tol = 2 * grid.spacing
    closed = 1e-9  # limits are closed sets: lattice points on their boundary belong to them
    rows = []

    def record(name, li, ls, expected):
        d_li, d_ls = mask_distance(li, expected, grid.spacing), mask_distance(ls, expected, grid.spacing)
        inclusion = bool(np.all(ls[li]))
        rows.append({"fixture": name, "li_points": int(li.sum()), "ls_points": int(ls.sum()),
                     "expected_points": int(expected.sum()), "li_distance": d_li,
                     "ls_distance": d_ls, "li_in_ls": inclusion,
                     "passed": inclusion and d_li <= tol and d_ls <= tol})

    w = 0.5 * (g.v(i) + g.v(i + 1))
    p = np.array([w[0], w[1], 0.5 * float(wall_bound_array(g, w)[0])])
    li, ls = blow_up_set(ball, SequenceSpec(p, eps_schedule=eps), grid)
    record("wall_half_space", li, ls, P[..., :2] @ g.alpha(i) <= closed)

    vertex = np.array([g.v(i)[0], g.v(i)[1], 0.0])
    cone = wall_cone(g, i)
    li, ls = blow_up_set(cone, SequenceSpec(vertex, eps_schedule=eps), grid)
    record("vertex_wall_cone", li, ls, wall_cone(g, i, closed)(P))

    far = np.array([2.0 * g.v(i)[0], 2.0 * g.v(i)[1], 0.0])
    li, ls = blow_up_set(ball, SequenceSpec(far, eps_schedule=eps), grid)
    record("outside_point_empty", li, ls, np.zeros(P.shape[:-1], bool))
    return rows, {"grid": {"radius": grid.radius, "spacing": grid.spacing},
                  "tolerance": tol, "passed": all(r["passed"] for r in rows)}


# ---------------------------------------------------------------- dispatch


SUITES = ("eikonal", "pansu", "vertical", "blowup", "action", "kuratowski")


def run_suite(name: str, g: PolygonNormData, samples: int | None = None, seed: int = 42,
              grid: GridWindow | None = None, eps_schedule=None) -> SuiteResult:
    if name == "eikonal":
        return _timed(name, eikonal_suite, g, samples or 1000, seed)
    if name == "pansu":
        ladder = tuple(eps_schedule) if eps_schedule else (1e-4, 5e-5)
        return _timed(name, pansu_suite, g, samples or 1000, ladder, seed)
    if name == "vertical":
        return _timed(name, vertical_suite, g, samples or 10, VERTICAL_S, seed)
    if name == "blowup":
        sched = _geometric(eps_schedule) if eps_schedule else DEFAULT_EPS
        return _timed(name, blowup_suite, g, grid or BLOWUP_GRID, sched)
    if name == "action":
        return _timed(name, action_suite, g, samples or 200, seed)
    if name == "kuratowski":
        return _timed(name, kuratowski_suite, g, grid)
    raise ValueError(f"unknown suite {name!r}")


def _geometric(bounds) -> tuple:
    """Schedule ``2^-n`` between the two given epsilons (either order)."""
    hi, lo = max(bounds), min(bounds)
    n0, n1 = math.ceil(-math.log2(hi) - 1e-12), math.floor(-math.log2(lo) + 1e-12)
    if n1 <= n0:
        raise ValueError("eps schedule needs at least two dyadic steps")
    return tuple(2.0**-n for n in range(n0, n1 + 1))
