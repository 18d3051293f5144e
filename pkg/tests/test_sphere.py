import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyheis.errors import DegenerateMu, NotOnSphere, OutsideCone, OutsideDisk
from polyheis.heisenberg import lift, theta, theta_geometry_vertices
from polyheis.polygon import build_geometry
from polyheis.sphere import (
    SEAM_TAGS,
    PanelCoords,
    ceiling_height,
    ceiling_heights,
    classify_sphere_point,
    locate_panel,
    panel_endpoint,
    panel_height,
    panel_partials,
    panel_table,
    seam_point,
    star_extent,
    trace_vectors,
    unit_ball_contains,
    wall_bound,
)


def random_disk(g, n, rng):
    w = rng.uniform(-1, 1, (4 * n, 2))
    return w[g.gauge(w) <= 1][:n]


def test_full_loop_endpoint_is_origin(hexa):
    np.testing.assert_allclose(panel_endpoint(hexa, PanelCoords(1, 0, 1, 1)), [0, 0], atol=1e-15)
    assert panel_height(hexa, PanelCoords(1, 0, 1, 1)) == pytest.approx(1 / 12, abs=1e-15)


def test_wall_endpoint_is_weighted_midpoint(hexa, sq):
    for g in (hexa, sq):
        for i in range(g.n_vertices):
            u = panel_endpoint(g, PanelCoords(i, i + 1, 1, 1, "wall"))
            ki, kj = g.kappa(i), g.kappa(i + 1)
            np.testing.assert_allclose(u, (ki * g.v(i) + kj * g.v(i + 1)) / (ki + kj), atol=1e-12)


def test_star_panel_endpoints(hexa):
    # r = 1 closes the loop at the origin; r = 0 is the far tip of the star
    for i in range(6):
        np.testing.assert_allclose(panel_endpoint(hexa, PanelCoords(i, i, 1, 0, "star")), 0,
                                   atol=1e-15)
        tip = panel_endpoint(hexa, PanelCoords(i, i, 0, 0, "star"))
        np.testing.assert_allclose(tip, -star_extent(hexa, i) * hexa.v(i), atol=1e-12)


def test_degenerate_mu(sq):
    from polyheis.sphere import panel_mu

    with pytest.raises(DegenerateMu):
        panel_mu(sq, PanelCoords(0, 1, 0, 0, "wall"))
    with pytest.raises(ValueError):
        panel_endpoint(sq, PanelCoords(0, 1, 0.5, 0.5, "ceiling"))


def test_panel_height_matches_polyline_oracle(hexa, sq, rng):
    for g in (hexa, sq):
        tab = panel_table(g)
        for _ in range(100):
            p = int(rng.integers(len(tab)))
            c = PanelCoords(int(tab.i[p]), int(tab.j[p]), *rng.uniform(0, 1, 2))
            vec = trace_vectors(g, c)
            mu = float(np.sum(g.gauge(vec)))
            path = np.vstack([[0, 0], np.cumsum(vec / mu, axis=0)])
            assert panel_height(g, c) == pytest.approx(lift(path)[-1, 2], abs=1e-12)
            np.testing.assert_allclose(panel_endpoint(g, c), path[-1], atol=1e-12)


def test_panel_partials_match_central_differences(hexa, sq, rng):
    h = 1e-6
    for g in (hexa, sq):
        tab = panel_table(g)
        for _ in range(50):
            p = int(rng.integers(len(tab)))
            i, j = int(tab.i[p]), int(tab.j[p])
            r, s = rng.uniform(0.1, 0.9, 2)
            dr, ds = panel_partials(g, PanelCoords(i, j, r, s))
            fr = (panel_endpoint(g, PanelCoords(i, j, r + h, s))
                  - panel_endpoint(g, PanelCoords(i, j, r - h, s))) / (2 * h)
            fs = (panel_endpoint(g, PanelCoords(i, j, r, s + h))
                  - panel_endpoint(g, PanelCoords(i, j, r, s - h))) / (2 * h)
            np.testing.assert_allclose(dr, fr, atol=1e-6)
            np.testing.assert_allclose(ds, fs, atol=1e-6)


def test_wall_bound_examples(hexa):
    assert wall_bound(hexa, 0, [1, 0.5]) == pytest.approx(0.125, abs=1e-15)
    assert wall_bound(hexa, 0, hexa.v(0)) == 0
    with pytest.raises(OutsideCone):
        wall_bound(hexa, 0, [-1, 0.5])


@given(st.floats(0.01, 1), st.floats(0, 1), st.floats(0.1, 10))
def test_wall_bound_quadratic(hexa, a, b, lam):
    v = a * hexa.v(1) + b * hexa.v(2)
    assert wall_bound(hexa, 1, lam * v) == pytest.approx(lam**2 * wall_bound(hexa, 1, v),
                                                         rel=1e-9, abs=1e-12)


def test_locate_examples(hexa):
    c = locate_panel(hexa, [0, 0])
    assert (c.i, c.j, c.r, c.s, c.side) == (1, 0, 1.0, 1.0, "ceiling")
    c = locate_panel(hexa, [1, 0.5])
    assert (c.i, c.j, c.side) == (0, 1, "wall")
    for i in range(6):
        c = locate_panel(hexa, -0.1 * hexa.v(i))
        assert (c.i, c.j, c.side) == (i, i, "star")
        np.testing.assert_allclose(panel_endpoint(hexa, c), -0.1 * hexa.v(i), atol=1e-12)
    with pytest.raises(OutsideDisk):
        locate_panel(hexa, [2, 0])


def test_locate_round_trip(hexa, sq, rng):
    for g in (hexa, sq):
        W = random_disk(g, 10_000, rng)
        err = max(np.max(np.abs(panel_endpoint(g, locate_panel(g, w)) - w)) for w in W)
        assert err <= 1e-8


def test_ceiling_height_examples(hexa, sq):
    for g in (hexa, sq):
        assert ceiling_height(g, [0, 0]) == pytest.approx(g.unit_iso_area, abs=1e-15)
        for i in range(g.n_vertices):
            assert ceiling_height(g, g.v(i)) == pytest.approx(0, abs=1e-12)
    with pytest.raises(OutsideDisk):
        ceiling_height(hexa, [1.5, 0])


def test_ceiling_height_equals_wall_bound_on_boundary(hexa, sq):
    for g in (hexa, sq):
        for i in range(g.n_vertices):
            for t in np.linspace(0.05, 0.95, 7):
                v = (1 - t) * g.v(i) + t * g.v(i + 1)
                assert ceiling_height(g, v) == pytest.approx(wall_bound(g, i, v), abs=1e-10)


def test_ceiling_height_continuous_across_panels(hexa, sq):
    """Shared panel edges carry the same height from both sides."""
    for g in (hexa, sq):
        tab = panel_table(g)
        t = np.linspace(0, 1, 41)
        worst = 0.0
        for p in range(len(tab)):
            i, j, d = int(tab.i[p]), int(tab.j[p]), int(tab.d[p])
            if d > 2:  # s = 0 edge of (i, j) is the s = 1 edge of (i, j - 1)
                for r in t:
                    a = panel_height(g, PanelCoords(i, j, r, 0))
                    b = panel_height(g, PanelCoords(i, j - 1, r, 1))
                    worst = max(worst, abs(a - b))
                    u = panel_endpoint(g, PanelCoords(i, j, r, 0))
                    worst = max(worst, abs(ceiling_heights(g, u)[0] - a))
        assert worst <= 1e-8


def test_unit_ball_examples(hexa):
    assert unit_ball_contains(hexa, [0, 0, 0])
    assert unit_ball_contains(hexa, [0, 0, 1 / 12])
    assert not unit_ball_contains(hexa, [0, 0, 1 / 12 + 0.01])
    assert unit_ball_contains(hexa, [1, 0.5, 0])


@given(st.tuples(*[st.floats(-1.5, 1.5)] * 2), st.floats(-0.3, 0.3))
def test_ball_symmetry(hexa, w, t):
    p = np.array([w[0], w[1], t])
    assert unit_ball_contains(hexa, p) == unit_ball_contains(hexa, -p)


def test_theta_conjugation(hexa, sq, rng):
    for g in (hexa, sq):
        gt = build_geometry(theta_geometry_vertices(g))
        W = random_disk(g, 1000, rng)
        base = np.column_stack([W, -ceiling_heights(g, W)])
        up = theta(base, g)
        np.testing.assert_allclose(up[:, 2], ceiling_heights(gt, up[:, :2]), atol=1e-10)


def test_classify_examples(hexa, sq):
    assert classify_sphere_point(hexa, [0, 0, 1 / 12]).tag == "NorthPole"
    assert classify_sphere_point(hexa, [0, 0, -1 / 12]).tag == "SouthPole"
    for i in range(6):
        c = classify_sphere_point(hexa, [*hexa.v(i), 0])
        assert (c.tag, c.i) == ("Vertex", i)
    c = classify_sphere_point(hexa, [1, 0.5, 0.05])
    assert (c.tag, c.i) == ("WallInterior", 0)
    with pytest.raises(NotOnSphere):
        classify_sphere_point(hexa, [0.1, 0, 0])
    for g in (hexa, sq):
        for tag in (*SEAM_TAGS, "StarTip", "WallInterior"):
            for i in range(g.n_vertices):
                assert classify_sphere_point(g, seam_point(g, tag, i, 0.4)).tag == tag


def test_classification_is_exclusive_and_total(hexa, rng):
    from polyheis.blowup import smooth_sphere_samples

    pts = smooth_sphere_samples(hexa, 200, rng, margin=0.0)
    tags = {classify_sphere_point(hexa, p).tag for p in pts}
    assert tags <= {"CeilingInterior", "BasementInterior", "WallInterior"}
