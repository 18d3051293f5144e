import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyheis.distance import distance
from polyheis.errors import InvalidS
from polyheis.heisenberg import multiply
from polyheis.horo import (
    FAMILIES,
    Linear,
    NormType,
    TwoPiece,
    act,
    act_pointwise,
    blow_up_family_at,
    bounded_difference,
    evaluate,
    evaluate_threshold,
    from_record,
    is_busemann,
    linear,
    norm_type,
    orbit_class,
    planar_horofunction,
    probe_grid,
    sample_catalogue,
    threshold_form,
    to_record,
    two_piece,
    two_piece_from_threshold,
)
from polyheis.sphere import seam_point

GRID = np.array([[x, y, z] for x in np.linspace(-3, 3, 21) for y in np.linspace(-3, 3, 21)
                 for z in (-1.0, 0.0, 1.0)])


def test_eval_examples(hexa, rng):
    P = rng.normal(size=(50, 3))
    np.testing.assert_allclose(evaluate(norm_type([0, 0]), P, hexa), -hexa.gauge(P[:, :2]))
    h = two_piece(hexa, 0, "psi_vee", 0.5, 0.0)
    assert evaluate(h, [0, 2, 0], hexa) == pytest.approx(-1)
    assert evaluate(linear([0.3, -2]), [0, 0, 0], hexa) == 0


def test_planar_horofunction(hexa):
    np.testing.assert_allclose(planar_horofunction(hexa, 0, 0.0), hexa.alpha(-1))
    np.testing.assert_allclose(planar_horofunction(hexa, 0, 1.0), hexa.alpha(0))
    np.testing.assert_allclose(planar_horofunction(hexa, 0, 0.5), [1, -0.5])
    with pytest.raises(InvalidS):
        planar_horofunction(hexa, 0, 1.5)
    with pytest.raises(InvalidS):
        two_piece_from_threshold(hexa, 0, -0.1, 1.0, "psi_vee")


def test_threshold_examples(hexa):
    for fam in FAMILIES:
        for C in (math.inf, -math.inf):
            assert isinstance(two_piece_from_threshold(hexa, 0, 0.5, C, fam), Linear)
        h = two_piece_from_threshold(hexa, 0, 0.5, 0.0, fam)
        _, _, c_lo, _, c_hi = threshold_form(hexa, h)
        assert c_lo == 0 and c_hi == 0


@pytest.mark.parametrize("fam", FAMILIES)
@pytest.mark.parametrize("s, C", [(1.0, 1.0), (0.5, -2.0), (0.25, 0.7), (0.9, 3.0)])
def test_threshold_matches_closed_form(hexa, sq, fam, s, C):
    for g in (hexa, sq):
        for i in range(g.n_vertices):
            h = two_piece_from_threshold(g, i, s, C, fam)
            if isinstance(h, Linear):
                continue
            assert np.max(np.abs(evaluate(h, GRID, g) - evaluate_threshold(g, h, GRID))) <= 1e-9
            assert evaluate(h, [0, 0, 0], g) == 0


def test_meridian_identifications(hexa, rng):
    x = probe_grid()
    for fam in FAMILIES:
        for i in range(6):
            s = float(rng.uniform(0.05, 0.95))
            for a in (math.inf, -math.inf):
                big = two_piece(hexa, i, fam, s, math.copysign(1e8, a))
                lim = two_piece(hexa, i, fam, s, a)
                np.testing.assert_allclose(evaluate(big, x, hexa), evaluate(lim, x, hexa), atol=1e-9)
    for fam in ("xi_vee", "xi_wedge"):
        a = float(rng.normal())
        h = two_piece(hexa, 2, fam, 0.0, a)
        assert isinstance(h, TwoPiece) and h.family.startswith("psi") and h.s == 1.0
    assert isinstance(two_piece(hexa, 2, "psi_vee", 0.0, 1.0), Linear)
    assert isinstance(two_piece(hexa, 2, "xi_wedge", 1.0, 1.0), Linear)


def test_pole_family_ends(hexa):
    """Both infinite creases of every pole family are dual vertices."""
    fam = blow_up_family_at(hexa, seam_point(hexa, "NorthPole"))
    assert len(fam.families) == 6 and fam.norm_type
    for f in fam.families:
        for C in (math.inf, -math.inf):
            end = f.member(hexa, C)
            assert isinstance(end, Linear)
            assert is_busemann(end, hexa)


def test_blow_up_family_examples(hexa):
    north = blow_up_family_at(hexa, [0, 0, 1 / 12])
    assert north.contains(norm_type([0.4, -1]), hexa)
    wall = blow_up_family_at(hexa, [1, 0.5, 0.05])
    assert wall.singleton == linear(hexa.alpha(0))
    vert = blow_up_family_at(hexa, [1, 0, 0])
    (f,) = vert.families
    h = f.member(hexa, 1.0)
    assert isinstance(h, TwoPiece) and h.family == "psi_vee" and h.i == 0
    fixed, L = hexa.alpha(-1), planar_horofunction(hexa, 0, h.s)
    np.testing.assert_allclose(L, hexa.alpha(0))
    np.testing.assert_allclose(fixed, [1, -1])


def test_act_examples(hexa, rng):
    h = linear(hexa.alpha(2))
    assert act(rng.normal(size=3), h, hexa) == h
    assert act([0.5, -1, 3], norm_type([1, 2]), hexa) == norm_type([1.5, 1])
    for i in range(6):
        f = blow_up_family_at(hexa, [*hexa.v(i), 0]).families[0]
        C1, C2 = -0.7, 1.3
        # the translate with omega(v_i, pi(g)) = C2 - C1 moves the crease from C1 to C2
        vi = hexa.v(i)
        g_el = np.append((C2 - C1) * np.array([-vi[1], vi[0]]) / float(vi @ vi), 0.4)
        moved = act(g_el, f.member(hexa, C1), hexa)
        target = f.member(hexa, C2)
        assert moved.family == target.family and moved.a == pytest.approx(target.a, abs=1e-12)


def test_busemann_examples(hexa):
    assert is_busemann(linear(hexa.alpha(0)), hexa)
    assert not is_busemann(linear(0.5 * hexa.alpha(-1) + 0.5 * hexa.alpha(0)), hexa)
    assert not is_busemann(norm_type([1, 1]), hexa)
    assert is_busemann(two_piece(hexa, 3, "psi_vee", 1.0, 0.2), hexa)


def test_bounded_difference_examples(hexa):
    assert bounded_difference(norm_type([1, 0]), norm_type([5, 5]), hexa)
    assert bounded_difference(two_piece(hexa, 0, "psi_vee", 0.5, 1.0),
                              two_piece(hexa, 0, "psi_vee", 0.5, -3.0), hexa)
    assert not bounded_difference(linear(hexa.alpha(0)), linear(hexa.alpha(1)), hexa)


def test_orbit_class_examples(hexa, rng):
    assert len({orbit_class(norm_type(w), hexa) for w in rng.normal(size=(10, 2))}) == 1
    h = linear(hexa.alpha(4))
    assert orbit_class(h, hexa) != orbit_class(linear(hexa.alpha(3)), hexa)


def _numeric_bounded(h1, h2, g):
    """Growth test: sup |h1 - h2| on circles of radius 10 and 1000."""
    t = np.linspace(0, 2 * np.pi, 721)
    ring = np.column_stack([np.cos(t), np.sin(t), np.zeros_like(t)])
    sup = [np.max(np.abs(evaluate(h1, R * ring, g) - evaluate(h2, R * ring, g))) for R in (10, 1000)]
    return sup[1] <= 2 * sup[0] + 1e-9


def test_catalogue_invariants(hexa, sq):
    rng = np.random.default_rng(7)
    for g in (hexa, sq):
        cat = sample_catalogue(g, 60, rng)
        P, Q = rng.uniform(-2, 2, (2, 300, 3))
        d = distance(g, P, Q)
        for h in cat:
            assert evaluate(h, [0, 0, 0], g) == 0
            assert np.all(np.abs(evaluate(h, P, g) - evaluate(h, Q, g)) <= d + 1e-9)
            Pz = P.copy()
            Pz[:, 2] += rng.normal(size=len(P))
            np.testing.assert_allclose(evaluate(h, Pz, g), evaluate(h, P, g))
            assert from_record(to_record(h), g) == h


def test_bounded_difference_is_equivalence_matching_growth(hexa, sq):
    rng = np.random.default_rng(3)
    for g in (hexa, sq):
        cat = sample_catalogue(g, 40, rng)
        for a in cat:
            assert bounded_difference(a, a, g)
            for b in cat:
                bd = bounded_difference(a, b, g)
                assert bd == bounded_difference(b, a, g)
                assert bd == (orbit_class(a, g) == orbit_class(b, g))
                assert bd == _numeric_bounded(a, b, g)
                if bd:
                    for c in cat:
                        if bounded_difference(b, c, g):
                            assert bounded_difference(a, c, g)


coord = st.floats(-2, 2, allow_nan=False)
element = st.tuples(coord, coord, coord).map(np.array)


@given(element, element, st.integers(0, 5), st.sampled_from(FAMILIES),
       st.floats(0, 1), st.floats(-3, 3))
def test_action_is_group_action(hexa, g1, g2, i, fam, s, a):
    h = two_piece(hexa, i, fam, s, a)
    x = probe_grid()
    lhs = evaluate(act(g2, act(g1, h, hexa), hexa), x, hexa)
    rhs = evaluate(act(multiply(g2, g1), h, hexa), x, hexa)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9
    assert np.max(np.abs(evaluate(act(g1, h, hexa), x, hexa) - act_pointwise(g1, h, x, hexa))) <= 1e-9
    assert orbit_class(act(g1, h, hexa), hexa) == orbit_class(h, hexa)


@given(element, st.tuples(coord, coord))
def test_norm_type_action(hexa, g_el, w):
    out = act(g_el, norm_type(w), hexa)
    assert isinstance(out, NormType)
    np.testing.assert_allclose(out.w, np.add(w, g_el[:2]), atol=1e-12)
