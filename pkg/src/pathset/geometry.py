"""2D geometric primitives: convex polygons, segments, discs, polylines.

Everything operates on float64 numpy arrays. Incidence decisions use an
epsilon band (EPS) instead of exact arithmetic; boundary contact counts as
intersection throughout. Batch kernels at the bottom serve the planner's
inner loop and keep per-call overhead off the hot path.

All functions are pure; polygons and polylines are immutable after
construction, so everything here is safe to call from parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegeneratePath, OverlappingObstacles

EPS = 1e-9


def as_point(p) -> np.ndarray:
    """Coerce array-like to a finite float64 (2,) point (a trailing z is dropped)."""
    a = np.asarray(p, dtype=float).reshape(-1)
    if a.size == 3:
        a = a[:2]
    if a.size != 2 or not np.all(np.isfinite(a)):
        raise ValueError(f"not a finite planar point: {p!r}")
    return a


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


# ---------------------------------------------------------------------------
# Convex polygon
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Strictly convex polygon with CCW vertices.

    ``height`` is the extrusion height used by 3D passage detection and is
    ignored by planar predicates. ``id`` identifies the obstacle inside a
    scene; boundary walls get ids past the real obstacle count.
    """

    vertices: np.ndarray
    id: int = -1
    height: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("polygon vertices must be finite")
        # normalize to CCW
        area2 = float(np.sum(_cross(v, np.roll(v, -1, axis=0))))
        if area2 < 0:
            v = v[::-1].copy()
        e = np.roll(v, -1, axis=0) - v
        crosses = _cross(e, np.roll(e, -1, axis=0))
        scale = max(1.0, float(np.abs(v).max()))
        if np.any(crosses <= EPS * scale):
            raise ValueError("polygon is not strictly convex (or has repeated vertices)")
        if self.height < 0:
            raise ValueError("polygon height must be nonnegative")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_edges_a", v)
        object.__setattr__(self, "_edges_b", np.roll(v, -1, axis=0))

    def __eq__(self, other):
        return (
            isinstance(other, ConvexPolygon)
            and self.id == other.id
            and self.height == other.height
            and self.vertices.shape == other.vertices.shape
            and np.array_equal(self.vertices, other.vertices)
        )

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self._edges_a, self._edges_b  # type: ignore[attr-defined]

    @property
    def bbox(self) -> np.ndarray:
        v = self.vertices
        return np.array([v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max()])

    def contains(self, p) -> bool:
        """Boundary-inclusive point containment."""
        p = as_point(p)
        a, b = self.edges
        scale = max(1.0, float(np.abs(self.vertices).max()), abs(p[0]), abs(p[1]))
        return bool(np.all(_cross(b - a, p - a) >= -EPS * scale))

    def distance_to_point(self, p) -> tuple[float, np.ndarray]:
        """Distance from ``p`` to the polygon (0 inside) and the closest boundary/interior point."""
        p = as_point(p)
        if self.contains(p):
            return 0.0, p.copy()
        a, b = self.edges
        d, q = _point_segments_closest(p, a, b)
        k = int(np.argmin(d))
        return float(d[k]), q[k]


def point_in_polygon(p, poly: ConvexPolygon) -> bool:
    """True iff ``p`` lies on or inside ``poly``."""
    return poly.contains(p)


def polygons_overlap(p: ConvexPolygon, q: ConvexPolygon) -> bool:
    """True iff the polygon interiors intersect (touching boundaries do not count)."""
    bp, bq = p.bbox, q.bbox
    if bp[2] < bq[0] - EPS or bq[2] < bp[0] - EPS or bp[3] < bq[1] - EPS or bq[3] < bp[1] - EPS:
        return False
    for first, second in ((p, q), (q, p)):
        a, b = first.edges
        normals = np.stack([(b - a)[:, 1], -(b - a)[:, 0]], axis=1)  # outward for CCW
        proj_self = first.vertices @ normals.T
        proj_other = second.vertices @ normals.T
        # separating axis with touching allowed
        if np.any(proj_other.min(axis=0) >= proj_self.max(axis=0) - EPS):
            return False
    return True


class ClosestPair(NamedTuple):
    p: np.ndarray
    q: np.ndarray
    distance: float


def closest_points(p: ConvexPolygon, q: ConvexPolygon) -> ClosestPair:
    """Closest points between two disjoint convex polygons.

    Exact for convex input: the minimum over all boundary edge pairs.
    Ties (parallel facing edges) break to the lexicographically smallest
    ``(p, q)`` pair among edge-pair candidates, so outputs are deterministic.

    Raises:
        OverlappingObstacles: if the polygon interiors intersect.
    """
    if polygons_overlap(p, q):
        raise OverlappingObstacles(f"obstacles {p.id} and {q.id} overlap")
    a1, b1 = p.edges
    a2, b2 = q.edges
    n, m = a1.shape[0], a2.shape[0]
    pa, pb, dist = _segments_closest(
        np.repeat(a1, m, axis=0), np.repeat(b1, m, axis=0),
        np.tile(a2, (n, 1)), np.tile(b2, (n, 1)),
    )
    # quantize distances so exact ties fall through to coordinate ordering
    dq = np.round(dist / EPS)
    order = np.lexsort((pb[:, 1], pb[:, 0], pa[:, 1], pa[:, 0], dq))
    k = order[0]
    return ClosestPair(pa[k], pb[k], float(dist[k]))


def segment_intersects_polygon(a, b, poly: ConvexPolygon) -> bool:
    """True iff segment ab touches or crosses the polygon (boundary contact counts)."""
    a, b = as_point(a), as_point(b)
    if poly.contains(a) or poly.contains(b):
        return True
    ea, eb = poly.edges
    mask = segments_cross_mask(a[None, :], b[None, :], ea, eb)
    return bool(mask.any())


def disc_intersects_polygon(center, r: float, poly: ConvexPolygon) -> bool:
    """True iff the closed disc of radius ``r`` about ``center`` meets the polygon."""
    if r < 0:
        raise ValueError("disc radius must be nonnegative")
    d, _ = poly.distance_to_point(center)
    return d <= r + EPS


class SegmentIntersection(NamedTuple):
    point: np.ndarray
    overlap: bool


def segments_intersection(a1, a2, b1, b2) -> Optional[SegmentIntersection]:
    """Intersection point of two segments, or None.

    Proper and improper (endpoint-touching) intersections both count. For
    collinear overlapping segments the midpoint of the shared interval is
    returned with ``overlap=True``.
    """
    a1, a2, b1, b2 = as_point(a1), as_point(a2), as_point(b1), as_point(b2)
    r = a2 - a1
    s = b2 - b1
    denom = _cross(r, s)
    lr, ls = np.linalg.norm(r), np.linalg.norm(s)
    band = EPS * max(lr, 1.0) * max(ls, 1.0)
    qp = b1 - a1
    if abs(denom) <= band:
        # parallel; collinear only if b1 sits on the a-line
        if abs(_cross(qp, r)) > EPS * max(lr, 1.0) * max(np.linalg.norm(qp), 1.0):
            return None
        if lr <= EPS:  # a is a point
            t = np.dot(qp, s) / max(ls * ls, EPS)
            if -EPS <= t <= 1 + EPS:
                return SegmentIntersection(a1.copy(), False)
            return None
        t0 = np.dot(qp, r) / (lr * lr)
        t1 = t0 + np.dot(s, r) / (lr * lr)
        lo, hi = min(t0, t1), max(t0, t1)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if lo > hi + EPS:
            return None
        if hi - lo <= EPS:
            return SegmentIntersection(a1 + lo * r, False)
        return SegmentIntersection(a1 + 0.5 * (lo + hi) * r, True)
    t = _cross(qp, s) / denom
    u = _cross(qp, r) / denom
    tol = EPS * max(1.0, lr, ls)
    if -tol <= t <= 1 + tol and -tol <= u <= 1 + tol:
        return SegmentIntersection(a1 + np.clip(t, 0.0, 1.0) * r, False)
    return None


# ---------------------------------------------------------------------------
# Polyline
# ---------------------------------------------------------------------------

class Polyline:
    """Ordered waypoints with arc-length parameterization tau in [0, 1]."""

    __slots__ = ("waypoints", "cumulative_lengths", "_params")

    def __init__(self, waypoints):
        wp = np.atleast_2d(np.asarray(waypoints, dtype=float))
        if wp.ndim != 2 or wp.shape[1] != 2 or wp.shape[0] < 1:
            raise ValueError("polyline needs (n, 2) waypoints")
        if not np.all(np.isfinite(wp)):
            raise ValueError("polyline waypoints must be finite")
        self.waypoints = wp
        seg = np.linalg.norm(np.diff(wp, axis=0), axis=1)
        self.cumulative_lengths = np.concatenate([[0.0], np.cumsum(seg)])
        total = self.cumulative_lengths[-1]
        self._params = self.cumulative_lengths / total if total > 0 else None

    @property
    def length(self) -> float:
        return float(self.cumulative_lengths[-1])

    @property
    def params(self) -> np.ndarray:
        """Arc-length parameter of each waypoint."""
        if self._params is None:
            raise DegeneratePath("polyline has zero total length")
        return self._params

    def eval(self, tau):
        """Point(s) at arc-length parameter ``tau`` (scalar or array) in [0, 1]."""
        t = np.clip(np.asarray(tau, dtype=float), 0.0, 1.0)
        p = self.params
        x = np.interp(t, p, self.waypoints[:, 0])
        y = np.interp(t, p, self.waypoints[:, 1])
        out = np.stack([x, y], axis=-1)
        return out if out.ndim > 1 else out.reshape(2)

    def param_of_point(self, point) -> float:
        """Arc-length parameter of the polyline point nearest to ``point``."""
        p = as_point(point)
        a = self.waypoints[:-1]
        b = self.waypoints[1:]
        if a.shape[0] == 0:
            raise DegeneratePath("polyline has zero total length")
        d, q = _point_segments_closest(p, a, b)
        k = int(np.argmin(d))
        along = np.linalg.norm(q[k] - a[k])
        return float((self.cumulative_lengths[k] + along) / self.length)

    def tangent_at(self, tau) -> np.ndarray:
        """Unit tangent; at interior waypoints the two adjacent directions are averaged."""
        p = self.params
        t = float(np.clip(tau, 0.0, 1.0))
        dirs = np.diff(self.waypoints, axis=0)
        lens = np.linalg.norm(dirs, axis=1)
        keep = lens > EPS
        if not keep.any():
            raise DegeneratePath("polyline has zero total length")
        units = dirs[keep] / lens[keep, None]
        starts = p[:-1][keep]
        ends = p[1:][keep]
        at_joint = np.nonzero(np.abs(ends[:-1] - t) <= 1e-12)[0] if units.shape[0] > 1 else []
        if len(at_joint) > 0:
            k = int(at_joint[0])
            v = units[k] + units[k + 1]
            n = np.linalg.norm(v)
            return v / n if n > EPS else units[k]
        k = int(np.clip(np.searchsorted(ends, t, side="left"), 0, units.shape[0] - 1))
        if t < starts[k]:
            k = max(k - 1, 0)
        return units[k]

    def normal_at(self, tau) -> np.ndarray:
        """Left unit normal (tangent rotated +90 degrees)."""
        t = self.tangent_at(tau)
        return np.array([-t[1], t[0]])

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        return self.waypoints[:-1], self.waypoints[1:]

    def __eq__(self, other):
        return isinstance(other, Polyline) and np.array_equal(self.waypoints, other.waypoints)

    def __repr__(self):
        return f"Polyline({self.waypoints.shape[0]} pts, len={self.length:.3f})"


def polyline_eval(path: Polyline, tau):
    if path.length <= 0:
        raise DegeneratePath("polyline has zero total length")
    return path.eval(tau)


def normal_direction_at(path: Polyline, tau) -> np.ndarray:
    return path.normal_at(tau)


# ---------------------------------------------------------------------------
# Batch kernels
# ---------------------------------------------------------------------------

def segments_cross_mask(p1, p2, q1, q2) -> np.ndarray:
    """(n, m) inclusive intersection mask between segment families.

    ``p1, p2`` are (n, 2); ``q1, q2`` are (m, 2). Endpoint and boundary
    touching count as intersection (within the EPS band).
    """
    p1 = np.atleast_2d(p1)[:, None, :]
    p2 = np.atleast_2d(p2)[:, None, :]
    q1 = np.atleast_2d(q1)[None, :, :]
    q2 = np.atleast_2d(q2)[None, :, :]
    rp = p2 - p1
    rq = q2 - q1
    lp = np.linalg.norm(rp, axis=-1)
    lq = np.linalg.norm(rq, axis=-1)
    b1 = EPS * np.maximum(lp, 1.0)
    b2 = EPS * np.maximum(lq, 1.0)
    d1 = _cross(rp, q1 - p1)
    d2 = _cross(rp, q2 - p1)
    d3 = _cross(rq, p1 - q1)
    d4 = _cross(rq, p2 - q1)
    straddle_q = ((d1 >= -b1) & (d2 <= b1)) | ((d1 <= b1) & (d2 >= -b1))
    straddle_p = ((d3 >= -b2) & (d4 <= b2)) | ((d3 <= b2) & (d4 >= -b2))
    # bbox filter rules out collinear-but-disjoint pairs
    pxl = np.minimum(p1[..., 0], p2[..., 0]) - EPS
    pxh = np.maximum(p1[..., 0], p2[..., 0]) + EPS
    pyl = np.minimum(p1[..., 1], p2[..., 1]) - EPS
    pyh = np.maximum(p1[..., 1], p2[..., 1]) + EPS
    qxl = np.minimum(q1[..., 0], q2[..., 0]) - EPS
    qxh = np.maximum(q1[..., 0], q2[..., 0]) + EPS
    qyl = np.minimum(q1[..., 1], q2[..., 1]) - EPS
    qyh = np.maximum(q1[..., 1], q2[..., 1]) + EPS
    boxes = (pxl <= qxh) & (qxl <= pxh) & (pyl <= qyh) & (qyl <= pyh)
    return straddle_q & straddle_p & boxes


def _point_segments_closest(p, a, b):
    """Distances and closest points from one point to (m,) segments."""
    d = b - a
    l2 = np.einsum("ij,ij->i", d, d)
    t = np.where(l2 > 0, np.einsum("ij,j->i", d, p) - np.einsum("ij,ij->i", d, a), 0.0)
    t = np.clip(np.divide(t, l2, out=np.zeros_like(t), where=l2 > 0), 0.0, 1.0)
    q = a + t[:, None] * d
    return np.linalg.norm(q - p, axis=1), q


def points_to_segments_dist(pts, a, b) -> np.ndarray:
    """(n, m) distances from points to segments."""
    pts = np.atleast_2d(pts)[:, None, :]
    a = np.atleast_2d(a)[None, :, :]
    b = np.atleast_2d(b)[None, :, :]
    d = b - a
    l2 = np.einsum("...i,...i->...", d, d)
    t = np.einsum("...i,...i->...", pts - a, d)
    t = np.clip(np.divide(t, l2, out=np.zeros_like(t), where=l2 > 0), 0.0, 1.0)
    q = a + t[..., None] * d
    return np.linalg.norm(q - pts, axis=-1)


def _segments_closest(a1, b1, a2, b2):
    """Closest points between segment arrays (broadcast over leading dims)."""
    d1 = b1 - a1
    d2 = b2 - a2
    r = a1 - a2
    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    f = np.einsum("...i,...i->...", d2, r)
    c = np.einsum("...i,...i->...", d1, r)
    b = np.einsum("...i,...i->...", d1, d2)
    tiny = EPS * EPS
    denom = a * e - b * b
    s = np.where(denom > tiny, (b * f - c * e) / np.where(denom > tiny, denom, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.where(e > tiny, (b * s + f) / np.where(e > tiny, e, 1.0), 0.0)
    tc = np.clip(t, 0.0, 1.0)
    s2 = np.where(a > tiny, (b * tc - c) / np.where(a > tiny, a, 1.0), 0.0)
    s = np.clip(np.where(t != tc, s2, s), 0.0, 1.0)
    p = a1 + s[..., None] * d1
    q = a2 + tc[..., None] * d2
    return p, q, np.linalg.norm(p - q, axis=-1)


def segments_min_distance(a1, b1, a2, b2) -> float:
    """Scalar closest distance between two segments."""
    _, _, d = _segments_closest(as_point(a1), as_point(b1), as_point(a2), as_point(b2))
    return float(d)


# ---------------------------------------------------------------------------
# Scene-level collision accelerator
# ---------------------------------------------------------------------------

class SceneGeom:
    """Flattened edge/vertex arrays for a fixed polygon set.

    Built once per scene; all queries are vectorized numpy over the flat
    arrays, which is what keeps the planner's per-sample cost low.
    """

    def __init__(self, polygons: Sequence[ConvexPolygon]):
        self.polygons = list(polygons)
        m = len(self.polygons)
        if m == 0:
            self.edge_a = np.zeros((0, 2))
            self.edge_b = np.zeros((0, 2))
            self.edge_owner = np.zeros(0, dtype=int)
            self.vmax = 3
            self.verts = np.zeros((0, 3, 2))
            self.evecs = np.zeros((0, 3, 2))
            self.emask = np.zeros((0, 3), dtype=bool)
            self.scale = 1.0
            return
        ea, eb, owner = [], [], []
        for k, poly in enumerate(self.polygons):
            a, b = poly.edges
            ea.append(a)
            eb.append(b)
            owner.append(np.full(a.shape[0], k, dtype=int))
        self.edge_a = np.concatenate(ea)
        self.edge_b = np.concatenate(eb)
        self.edge_owner = np.concatenate(owner)
        self.vmax = max(p.vertices.shape[0] for p in self.polygons)
        self.verts = np.zeros((m, self.vmax, 2))
        self.evecs = np.zeros((m, self.vmax, 2))
        self.emask = np.zeros((m, self.vmax), dtype=bool)
        for k, poly in enumerate(self.polygons):
            n = poly.vertices.shape[0]
            self.verts[k, :n] = poly.vertices
            self.evecs[k, :n] = np.roll(poly.vertices, -1, axis=0) - poly.vertices
            self.emask[k, :n] = True
        self.scale = max(1.0, float(np.abs(self.verts).max()))

    @property
    def n_polygons(self) -> int:
        return len(self.polygons)

    def points_inside_any(self, pts) -> np.ndarray:
        """(n,) mask: point on/inside some polygon."""
        pts = np.atleast_2d(pts)
        if not self.polygons:
            return np.zeros(pts.shape[0], dtype=bool)
        rel = pts[:, None, None, :] - self.verts[None, :, :, :]
        cr = self.evecs[None, :, :, 0] * rel[..., 1] - self.evecs[None, :, :, 1] * rel[..., 0]
        inside_edges = (cr >= -EPS * self.scale) | ~self.emask[None, :, :]
        return inside_edges.all(axis=2).any(axis=1)

    def point_inside_ids(self, p) -> np.ndarray:
        """Indices of polygons containing the point."""
        p = as_point(p)
        if not self.polygons:
            return np.zeros(0, dtype=int)
        rel = p[None, None, :] - self.verts
        cr = self.evecs[..., 0] * rel[..., 1] - self.evecs[..., 1] * rel[..., 0]
        inside = ((cr >= -EPS * self.scale) | ~self.emask).all(axis=1)
        return np.nonzero(inside)[0]

    def segment_blocked(self, a, b, exclude: tuple[int, ...] = ()) -> bool:
        """True iff segment ab touches any polygon (optionally ignoring owners)."""
        a, b = as_point(a), as_point(b)
        if self.edge_a.shape[0] == 0:
            return False
        mask = segments_cross_mask(a[None, :], b[None, :], self.edge_a, self.edge_b)[0]
        if exclude:
            keep = ~np.isin(self.edge_owner, exclude)
            mask = mask & keep
        if mask.any():
            return True
        if exclude:
            inside = self.point_inside_ids(a)
            if np.setdiff1d(inside, exclude).size:
                return True
            inside = self.point_inside_ids(b)
            return bool(np.setdiff1d(inside, exclude).size)
        return bool(self.points_inside_any(np.stack([a, b])).any())

    def fan_blocked(self, starts, end) -> np.ndarray:
        """(k,) mask: segment from each start to the common endpoint hits a polygon.

        Starts and the shared endpoint are assumed free, so edge crossing
        tests alone are sufficient for convex obstacles.
        """
        starts = np.atleast_2d(starts)
        if self.edge_a.shape[0] == 0:
            return np.zeros(starts.shape[0], dtype=bool)
        ends = np.broadcast_to(as_point(end), starts.shape)
        return segments_cross_mask(starts, ends, self.edge_a, self.edge_b).any(axis=1)

    def point_dist_per_polygon(self, p) -> np.ndarray:
        """(M,) distance from a point to each polygon (0 inside)."""
        p = as_point(p)
        m = self.n_polygons
        if m == 0:
            return np.zeros(0)
        d, _ = _point_segments_closest(p, self.edge_a, self.edge_b)
        out = np.full(m, np.inf)
        np.minimum.at(out, self.edge_owner, d)
        out[self.point_inside_ids(p)] = 0.0
        return out

    def points_clearance(self, pts) -> np.ndarray:
        """(n,) distance from each point to the nearest polygon (0 inside)."""
        pts = np.atleast_2d(pts)
        if self.n_polygons == 0:
            return np.full(pts.shape[0], np.inf)
        d = points_to_segments_dist(pts, self.edge_a, self.edge_b).min(axis=1)
        d[self.points_inside_any(pts)] = 0.0
        return d

    def fan_clearance(self, starts, end) -> np.ndarray:
        """(k,) min distance from each fan segment to any polygon (0 when blocked)."""
        starts = np.atleast_2d(starts)
        if self.n_polygons == 0:
            return np.full(starts.shape[0], np.inf)
        k = starts.shape[0]
        ends = np.broadcast_to(as_point(end), starts.shape)
        _, _, d = _segments_closest(
            starts[:, None, :], ends[:, None, :],
            self.edge_a[None, :, :], self.edge_b[None, :, :],
        )
        out = d.min(axis=1)
        out[self.fan_blocked(starts, end)] = 0.0
        return out

    def segment_dist_per_polygon(self, a, b) -> np.ndarray:
        """(M,) distance from segment ab to each polygon (0 on contact)."""
        a, b = as_point(a), as_point(b)
        m = self.n_polygons
        if m == 0:
            return np.zeros(0)
        _, _, d = _segments_closest(a[None, :], b[None, :], self.edge_a, self.edge_b)
        out = np.full(m, np.inf)
        np.minimum.at(out, self.edge_owner, d)
        return out

    def ray_first_hit(self, origin, direction, exclude: tuple[int, ...] = (),
                      bounds: Optional[tuple[float, float, float, float]] = None) -> float:
        """Smallest positive ray parameter hitting any polygon edge or the bounds box."""
        o = as_point(origin)
        u = as_point(direction)
        best = np.inf
        if self.edge_a.shape[0]:
            a, b = self.edge_a, self.edge_b
            e = b - a
            denom = _cross(np.broadcast_to(u, e.shape), e)
            ok = np.abs(denom) > EPS
            qp = a - o
            t = np.where(ok, _cross(qp, e) / np.where(ok, denom, 1.0), np.inf)
            s = np.where(ok, _cross(qp, np.broadcast_to(u, e.shape)) / np.where(ok, denom, 1.0), -1.0)
            valid = ok & (t > EPS) & (s >= -EPS) & (s <= 1 + EPS)
            if exclude:
                valid &= ~np.isin(self.edge_owner, exclude)
            if valid.any():
                best = float(t[valid].min())
        if bounds is not None:
            x0, y0, x1, y1 = bounds
            for plane, comp in ((x0, 0), (x1, 0), (y0, 1), (y1, 1)):
                if abs(u[comp]) > EPS:
                    t = (plane - o[comp]) / u[comp]
                    if t > EPS:
                        best = min(best, float(t))
        return best
