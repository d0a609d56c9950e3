import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

import helpers
from pathset import (
    ConvexPolygon,
    DegeneratePath,
    OverlappingObstacles,
    Polyline,
    closest_points,
    disc_intersects_polygon,
    segment_intersects_polygon,
    segments_intersection,
)
from pathset.geometry import EPS, SceneGeom


def square(x0, y0, side=1.0, poly_id=-1):
    return helpers.rect(x0, y0, x0 + side, y0 + side, poly_id)


# ---------------------------------------------------------------------------
# closest_points
# ---------------------------------------------------------------------------

def test_closest_points_facing_squares():
    a = square(0, 0)
    b = square(3, 0)
    p, q, d = closest_points(a, b)
    assert d == pytest.approx(2.0, abs=1e-12)
    assert p[0] == pytest.approx(1.0, abs=1e-12)
    assert q[0] == pytest.approx(3.0, abs=1e-12)


def test_closest_points_corner_to_corner():
    a = square(0, 0)
    tri = ConvexPolygon(np.array([[1.5, 1.5], [2.2, 1.8], [1.8, 2.2]]))
    p, q, d = closest_points(a, tri)
    assert d == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert np.allclose(p, [1, 1], atol=1e-12)
    assert np.allclose(q, [1.5, 1.5], atol=1e-12)


def test_closest_points_random_vs_sampling_oracle():
    from pathset import GeneratorSpec, generate_scene

    scene = generate_scene(GeneratorSpec(obstacle_count=8, side_length=2.0, seed=5))
    obs = scene.obstacles
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            d = closest_points(obs[i], obs[j]).distance
            assert d == pytest.approx(helpers.brute_min_distance(obs[i], obs[j]), abs=1e-6)
            assert d == pytest.approx(helpers.shapely_distance(obs[i], obs[j]), abs=1e-9)


def test_closest_points_symmetry(rng):
    for k in range(25):
        a = helpers.random_convex_polygon(rng, rng.uniform(0, 10, 2), 2.0)
        b = helpers.random_convex_polygon(rng, rng.uniform(14, 24, 2), 2.0)
        assert closest_points(a, b).distance == pytest.approx(
            closest_points(b, a).distance, abs=1e-12)


def test_closest_points_overlap_raises():
    with pytest.raises(OverlappingObstacles):
        closest_points(square(0, 0, 2), square(1, 1, 2))


def test_touching_polygons_have_zero_distance():
    # shared boundary is not interior overlap
    assert closest_points(square(0, 0), square(1, 0)).distance == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# segment / disc predicates
# ---------------------------------------------------------------------------

def test_segment_crosses_interior():
    assert segment_intersects_polygon((-1, 0.5), (2, 0.5), square(0, 0))


def test_segment_clear_above():
    assert not segment_intersects_polygon((-1, 2), (2, 2), square(0, 0))


def test_segment_grazing_top_edge_counts():
    assert segment_intersects_polygon((-1, 1), (2, 1), square(0, 0))


def test_segment_matches_oracles(rng):
    poly = square(4, 4, 2)
    agree = 0
    for _ in range(300):
        a = rng.uniform(0, 10, 2)
        b = rng.uniform(0, 10, 2)
        ours = segment_intersects_polygon(a, b, poly)
        sampled = helpers.sampled_segment_hits(a, b, poly)
        if sampled:
            assert ours  # the sampling oracle admits no false negatives on our side
        exact = helpers.shapely_segment_hits(a, b, poly)
        if ours == exact:
            agree += 1
        else:
            # disagreement only inside the epsilon band around grazing contact
            line = helpers.LineString([tuple(a), tuple(b)])
            assert helpers.sh_poly(poly).distance(line) <= 1e-7
    assert agree >= 295


def test_disc_reaches_rect():
    assert disc_intersects_polygon((3, 0.5), 2.0, helpers.rect(2.5, 1.2, 3.5, 2.2))


def test_disc_far_away():
    assert not disc_intersects_polygon((0, 0), 1.0, square(5, 5))


def test_disc_center_inside():
    assert disc_intersects_polygon((0.5, 0.5), 0.0, square(0, 0))


@given(st.floats(0, 6), st.floats(0, 6))
@settings(max_examples=60, deadline=None)
def test_zero_radius_disc_equals_containment(x, y):
    poly = square(2, 2, 2)
    assert disc_intersects_polygon((x, y), 0.0, poly) == poly.contains((x, y))


# ---------------------------------------------------------------------------
# segments_intersection
# ---------------------------------------------------------------------------

def test_segments_cross_at_center():
    hit = segments_intersection((0, 0), (2, 2), (0, 2), (2, 0))
    assert np.allclose(hit.point, [1, 1]) and not hit.overlap


def test_segments_parallel_disjoint():
    assert segments_intersection((0, 0), (1, 0), (0, 1), (1, 1)) is None


def test_segments_shared_endpoint():
    hit = segments_intersection((0, 0), (1, 1), (1, 1), (2, 0))
    assert np.allclose(hit.point, [1, 1]) and not hit.overlap


def test_segments_collinear_overlap_midpoint():
    hit = segments_intersection((0, 0), (4, 0), (2, 0), (6, 0))
    assert hit.overlap
    assert np.allclose(hit.point, [3, 0])  # midpoint of [2, 4]


# ---------------------------------------------------------------------------
# Polyline
# ---------------------------------------------------------------------------

def test_polyline_eval_and_normal_straight():
    p = Polyline([[0, 0], [10, 0]])
    assert np.allclose(p.eval(0.3), [3, 0])
    n = p.normal_at(0.3)
    assert abs(abs(n[1]) - 1.0) < 1e-12 and abs(n[0]) < 1e-12


def test_polyline_endpoints():
    p = Polyline([[1, 2], [4, 6], [10, 6]])
    assert np.allclose(p.eval(0), [1, 2])
    assert np.allclose(p.eval(1), [10, 6])


def test_corner_normal_matches_finite_difference():
    p = Polyline([[0, 0], [10, 0], [10, 10]])
    corner_tau = p.params[1]
    t = p.tangent_at(corner_tau)
    fd = helpers.finite_diff_tangent(p, corner_tau)
    assert np.allclose(t, fd, atol=1e-5)
    n = p.normal_at(corner_tau)
    assert abs(np.dot(n, t)) < 1e-12
    assert np.linalg.norm(n) == pytest.approx(1.0)


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=2, max_size=8),
       st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=80, deadline=None)
def test_polyline_lipschitz(points, t1, t2):
    wp = np.array(points)
    if np.linalg.norm(np.diff(wp, axis=0), axis=1).sum() <= 0:
        return
    p = Polyline(wp)
    lhs = np.linalg.norm(p.eval(t1) - p.eval(t2))
    assert lhs <= p.length * abs(t1 - t2) + 1e-9


def test_param_of_point_round_trip():
    p = Polyline([[0, 0], [5, 0], [5, 5]])
    for tau in (0.0, 0.2, 0.5, 0.77, 1.0):
        assert p.param_of_point(p.eval(tau)) == pytest.approx(tau, abs=1e-12)


def test_degenerate_polyline_raises():
    p = Polyline([[1, 1], [1, 1]])
    with pytest.raises(DegeneratePath):
        p.eval(0.5)


def test_scene_geom_clearance_matches_shapely(rng):
    from pathset import GeneratorSpec, generate_scene

    scene = generate_scene(GeneratorSpec(obstacle_count=8, side_length=2.0, seed=9))
    geom = SceneGeom(scene.obstacles)
    pts = rng.uniform([0, 0], [50, 30], size=(100, 2))
    ours = geom.points_clearance(pts)
    for k in range(100):
        ref = min(helpers.sh_poly(o).distance(helpers.ShPoint(tuple(pts[k])))
                  for o in scene.obstacles)
        assert ours[k] == pytest.approx(ref, abs=1e-9)
