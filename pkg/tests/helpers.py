"""Brute-force and third-party oracles shared across the test suite.

These stay independent of the library's own predicates: distances come
from dense boundary sampling (plus shapely as a second opinion), and
containment checks go through shapely.
"""

import numpy as np
import shapely
from scipy.spatial import ConvexHull, cKDTree
from shapely.geometry import LineString, Point as ShPoint, Polygon as ShPolygon

from pathset import ConvexPolygon, Polyline, Scene


def sh_poly(poly: ConvexPolygon) -> ShPolygon:
    return ShPolygon(poly.vertices.tolist())


def boundary_samples(poly: ConvexPolygon, n: int) -> np.ndarray:
    """n points on the polygon boundary, vertices included."""
    verts = poly.vertices
    edges = np.roll(verts, -1, axis=0) - verts
    lens = np.linalg.norm(edges, axis=1)
    per_edge = np.maximum((n * lens / lens.sum()).astype(int), 2)
    pts = [verts]
    for k in range(len(verts)):
        t = np.linspace(0.0, 1.0, per_edge[k], endpoint=False)[:, None]
        pts.append(verts[k] + t * edges[k])
    return np.concatenate(pts)


def brute_min_distance(a: ConvexPolygon, b: ConvexPolygon, n: int = 20000) -> float:
    """Min distance via dense boundary sampling and a KD-tree query."""
    pa = boundary_samples(a, n)
    pb = boundary_samples(b, n)
    d, _ = cKDTree(pa).query(pb)
    return float(d.min())


def sampled_segment_hits(a, b, poly: ConvexPolygon, n: int = 1000) -> bool:
    """Dense point sampling along the segment, shapely containment."""
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = np.asarray(a, dtype=float) + t * (np.asarray(b, dtype=float) - np.asarray(a, dtype=float))
    g = sh_poly(poly)
    return bool(np.any(shapely.intersects_xy(g, pts[:, 0], pts[:, 1])))


def shapely_segment_hits(a, b, poly: ConvexPolygon) -> bool:
    return bool(sh_poly(poly).intersects(LineString([tuple(a), tuple(b)])))


def shapely_distance(a: ConvexPolygon, b: ConvexPolygon) -> float:
    return float(sh_poly(a).distance(sh_poly(b)))


def shapely_disc_hits(center, r, poly: ConvexPolygon) -> bool:
    return bool(sh_poly(poly).distance(ShPoint(tuple(center))) <= r + 1e-12)


def shapely_path_collides(path: Polyline, scene: Scene) -> bool:
    line = LineString([tuple(p) for p in path.waypoints])
    return any(sh_poly(o).intersects(line) for o in scene.obstacles)


def finite_diff_tangent(path: Polyline, tau: float, h: float = 1e-6) -> np.ndarray:
    d = path.eval(min(tau + h, 1.0)) - path.eval(max(tau - h, 0.0))
    return d / np.linalg.norm(d)


def random_convex_polygon(rng, center, radius: float, n_points: int = 8,
                          poly_id: int = -1) -> ConvexPolygon:
    """Convex hull of random points in a disc around the center."""
    while True:
        pts = np.asarray(center, dtype=float) + rng.uniform(-radius, radius, (n_points, 2))
        hull = ConvexHull(pts)
        verts = pts[hull.vertices]
        try:
            return ConvexPolygon(verts, id=poly_id)
        except ValueError:  # nearly collinear hull edge; redraw
            continue


# ---------------------------------------------------------------------------
# Scene fixtures
# ---------------------------------------------------------------------------

def rect(x0, y0, x1, y1, poly_id=-1, height=0.0) -> ConvexPolygon:
    return ConvexPolygon(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]),
                         id=poly_id, height=height)


def two_corridor_scene() -> Scene:
    """Central wall with a width-1 gap on the direct route and a width-5 gap above.

    Start (5, 5) / goal (45, 5): the straight route through the narrow gap
    is about 40 long; the wide-gap detour is about 1.5x longer.
    """
    a = rect(24, 0.0, 26, 4.5)
    b = rect(24, 5.5, 26, 24.5)
    c = rect(24, 29.5, 26, 30.0)
    return Scene(50, 30, [a, b, c], walls_as_obstacles=False)


def gap_scene(gap: float = 3.0) -> Scene:
    """Single corridor of the given width through a central wall."""
    lo = 15.0 - gap / 2.0
    hi = 15.0 + gap / 2.0
    a = rect(24, 0.0, 26, lo)
    b = rect(24, hi, 26, 30.0)
    return Scene(50, 30, [a, b], walls_as_obstacles=False)


def mcpp_corridor_scene() -> Scene:
    """Width-4 corridor on the only route, plus an off-route narrow decoy pair.

    The decoy passage (width 1.5) sets the clearance lower bound below 2,
    and a wide decoy pair sets the upper bound above it, so the bisection
    has room to converge onto the corridor's half width.
    """
    wall_lo = rect(24, 0.0, 26, 13.0)
    wall_hi = rect(24, 17.0, 26, 30.0)
    decoy_a = rect(4, 24.0, 7, 26.0)
    decoy_b = rect(4, 27.5, 7, 29.5)
    far = rect(42, 24.0, 45, 26.0)
    return Scene(50, 30, [wall_lo, wall_hi, decoy_a, decoy_b, far],
                 walls_as_obstacles=False)


def staircase_scene() -> Scene:
    """Three obstacles with heights 1, 2, 3; the short one blocks the tall pair."""
    a = rect(2, 10, 3, 11, height=1.0)
    b = rect(0, 10, 1, 11, height=2.0)
    c = rect(4, 10, 5, 11, height=3.0)
    return Scene(50, 30, [a, b, c], walls_as_obstacles=False, dimension="3d")


def tall_short_tall_scene() -> Scene:
    """Two tall boxes with a short blocker between them."""
    left = rect(10, 14, 12, 16, height=3.0)
    blocker = rect(14, 14.5, 15, 15.5, height=1.0)
    right = rect(17, 14, 19, 16, height=3.0)
    return Scene(50, 30, [left, blocker, right], walls_as_obstacles=False, dimension="3d")
