"""Passage enumeration and the pure / extended visibility checks.

A passage is the shortest segment between a pair of obstacles. The pure
check keeps a passage when no third obstacle touches that segment; the
extended check additionally rejects it when a third obstacle enters the
disc whose diameter is the segment, which is what makes the surviving
passage set sparse in cluttered scenes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TYPE_CHECKING

import numpy as np

from .errors import OverlappingObstacles
from .geometry import (
    EPS,
    ConvexPolygon,
    SceneGeom,
    as_point,
    closest_points,
    segments_cross_mask,
)

if TYPE_CHECKING:  # pragma: no cover
    from .scene_io import Scene

# Free-space probe offset for translated segments. Must clear the
# containment epsilon band (EPS * coordinate scale) or oblique edges
# swallow the probe, so 10*EPS is too small at map scale.
OFFSET_DELTA = 1e-6


@dataclass(frozen=True, eq=False)
class Passage:
    """Shortest segment between obstacles ``ids[0] < ids[1]``."""

    ids: tuple[int, int]
    p: np.ndarray  # closest point on the first obstacle
    q: np.ndarray  # closest point on the second obstacle
    width: float

    def __post_init__(self):
        object.__setattr__(self, "p", as_point(self.p))
        object.__setattr__(self, "q", as_point(self.q))
        object.__setattr__(self, "ids", (int(self.ids[0]), int(self.ids[1])))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.p + self.q)

    @property
    def radius(self) -> float:
        return 0.5 * self.width

    @property
    def direction(self) -> np.ndarray:
        """Unit vector from p to q (zero width yields a zero vector)."""
        d = self.q - self.p
        n = np.linalg.norm(d)
        return d / n if n > EPS else d

    def __eq__(self, other):
        return (
            isinstance(other, Passage)
            and self.ids == other.ids
            and self.width == other.width
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.q, other.q)
        )

    def __repr__(self):
        return f"Passage({self.ids[0]},{self.ids[1]} w={self.width:.3f})"

    def to_dict(self) -> dict:
        return {
            "ids": list(self.ids),
            "p": self.p.tolist(),
            "q": self.q.tolist(),
            "width": self.width,
        }

    @staticmethod
    def from_dict(d: dict) -> "Passage":
        return Passage(tuple(d["ids"]), np.array(d["p"]), np.array(d["q"]), float(d["width"]))


@dataclass
class HeightInterval:
    z_low: float
    z_high: float
    passages: list[Passage]


@dataclass
class PassageMap:
    """Valid passages for one scene under one visibility mode."""

    passages: list[Passage]
    mode: str  # "pure" | "extended"
    obstacle_count: int = 0  # real obstacles; ids at or past this are walls
    height_intervals: Optional[list[HeightInterval]] = None
    _seg_a: Optional[np.ndarray] = field(default=None, repr=False)
    _seg_b: Optional[np.ndarray] = field(default=None, repr=False)
    _widths: Optional[np.ndarray] = field(default=None, repr=False)

    def __len__(self):
        return len(self.passages)

    def pair_set(self) -> set[tuple[int, int]]:
        return {p.ids for p in self.passages}

    def obstacle_pairs_only(self) -> list[Passage]:
        """Passages between real obstacles (walls filtered out)."""
        return [p for p in self.passages if p.ids[1] < self.obstacle_count]

    @property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(P,2) endpoints and (P,) widths, cached for the planner."""
        if self._seg_a is None:
            if self.passages:
                self._seg_a = np.array([p.p for p in self.passages])
                self._seg_b = np.array([p.q for p in self.passages])
                self._widths = np.array([p.width for p in self.passages])
            else:
                self._seg_a = np.zeros((0, 2))
                self._seg_b = np.zeros((0, 2))
                self._widths = np.zeros(0)
        return self._seg_a, self._seg_b, self._widths

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "obstacle_count": self.obstacle_count,
            "passages": [p.to_dict() for p in self.passages],
        }
        if self.height_intervals is not None:
            d["height_intervals"] = [
                {
                    "z_low": hi.z_low,
                    "z_high": hi.z_high,
                    "passages": [p.to_dict() for p in hi.passages],
                }
                for hi in self.height_intervals
            ]
        return d

    @staticmethod
    def from_dict(d: dict) -> "PassageMap":
        intervals = None
        if "height_intervals" in d:
            intervals = [
                HeightInterval(h["z_low"], h["z_high"], [Passage.from_dict(x) for x in h["passages"]])
                for h in d["height_intervals"]
            ]
        return PassageMap(
            [Passage.from_dict(x) for x in d["passages"]],
            d["mode"],
            int(d.get("obstacle_count", 0)),
            intervals,
        )

    def __eq__(self, other):
        return (
            isinstance(other, PassageMap)
            and self.mode == other.mode
            and self.obstacle_count == other.obstacle_count
            and self.passages == other.passages
            and (self.height_intervals is None) == (other.height_intervals is None)
            and (
                self.height_intervals is None
                or [(a.z_low, a.z_high, a.passages) for a in self.height_intervals]
                == [(b.z_low, b.z_high, b.passages) for b in other.height_intervals]
            )
        )


@dataclass(frozen=True, eq=False)
class TranslatedSegment:
    """Copy of a passage segment anchored at an obstacle vertex."""

    origin_vertex: np.ndarray
    a: np.ndarray  # equals origin_vertex
    b: np.ndarray
    parent_ids: tuple[int, int]
    owner: int  # obstacle the vertex belongs to

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    @property
    def direction(self) -> np.ndarray:
        d = self.b - self.a
        n = np.linalg.norm(d)
        return d / n if n > EPS else d


# ---------------------------------------------------------------------------
# Enumeration and per-pair checks
# ---------------------------------------------------------------------------

def _pair_indices(m: int, wall_start: Optional[int] = None) -> list[tuple[int, int]]:
    pairs = []
    for i in range(m):
        for j in range(i + 1, m):
            if wall_start is not None and i >= wall_start and j >= wall_start:
                continue  # wall-wall gaps are not traversable passages
            pairs.append((i, j))
    return pairs


def enumerate_generic(scene: "Scene") -> list[tuple[int, int]]:
    """All candidate obstacle-id pairs (i < j), M*(M-1)/2 of them."""
    return _pair_indices(len(scene.obstacles))


def _pure_ok(geom: SceneGeom, i: int, j: int, p: np.ndarray, q: np.ndarray) -> bool:
    if geom.edge_a.shape[0] == 0:
        return True
    mask = segments_cross_mask(p[None, :], q[None, :], geom.edge_a, geom.edge_b)[0]
    mask &= (geom.edge_owner != i) & (geom.edge_owner != j)
    return not mask.any()


def _ext_ok(geom: SceneGeom, i: int, j: int, p: np.ndarray, q: np.ndarray, width: float) -> bool:
    center = 0.5 * (p + q)
    d = geom.point_dist_per_polygon(center)
    d[i] = np.inf
    d[j] = np.inf
    return not np.any(d <= 0.5 * width + EPS)


def pure_visibility_valid(i: int, j: int, scene: "Scene") -> bool:
    """Original visibility check: no third obstacle touches the passage segment."""
    polys = scene.detection_polygons()
    geom = SceneGeom(polys)
    cp = closest_points(polys[i], polys[j])
    return _pure_ok(geom, i, j, cp.p, cp.q)


def extended_visibility_valid(i: int, j: int, scene: "Scene") -> bool:
    """Extended check: no third obstacle enters the passage's constraint disc.

    Implies the pure check because the segment is a subset of the disc.
    """
    polys = scene.detection_polygons()
    geom = SceneGeom(polys)
    cp = closest_points(polys[i], polys[j])
    return _pure_ok(geom, i, j, cp.p, cp.q) and _ext_ok(geom, i, j, cp.p, cp.q, cp.distance)


# ---------------------------------------------------------------------------
# Scene-level detection
# ---------------------------------------------------------------------------

def _detect_core(polys: Sequence[ConvexPolygon], wall_start: Optional[int],
                 want_extended: bool) -> tuple[list[Passage], list[Passage]]:
    geom = SceneGeom(polys)
    pure: list[Passage] = []
    ext: list[Passage] = []
    for i, j in _pair_indices(len(polys), wall_start):
        cp = closest_points(polys[i], polys[j])
        if not _pure_ok(geom, i, j, cp.p, cp.q):
            continue
        passage = Passage((polys[i].id, polys[j].id), cp.p, cp.q, cp.distance)
        pure.append(passage)
        if want_extended and _ext_ok(geom, i, j, cp.p, cp.q, cp.distance):
            ext.append(passage)
    return pure, ext


def detect_both(scene: "Scene", include_walls: Optional[bool] = None) -> tuple[PassageMap, PassageMap]:
    """Pure and extended passage maps in one pass over all pairs."""
    polys = scene.detection_polygons(include_walls)
    n_real = len(scene.obstacles)
    wall_start = n_real if len(polys) > n_real else None
    pure, ext = _detect_core(polys, wall_start, want_extended=True)
    return (
        PassageMap(pure, "pure", n_real),
        PassageMap(ext, "extended", n_real),
    )


def detect_passages(scene: "Scene", mode: str = "extended",
                    include_walls: Optional[bool] = None) -> PassageMap:
    """Passage map for the requested visibility mode."""
    if mode not in ("pure", "extended"):
        raise ValueError(f"unknown visibility mode: {mode!r}")
    polys = scene.detection_polygons(include_walls)
    n_real = len(scene.obstacles)
    wall_start = n_real if len(polys) > n_real else None
    pure, ext = _detect_core(polys, wall_start, want_extended=(mode == "extended"))
    return PassageMap(pure if mode == "pure" else ext, mode, n_real)


def detect_passages_3d(scene: "Scene", mode: str = "extended") -> PassageMap:
    """Height-interval passage detection for extruded obstacles.

    Distinct obstacle heights split [0, max_height) into intervals; each
    interval reruns planar detection over the obstacles taller than its
    floor. Walls are ignored in 3D mode.
    """
    obstacles = scene.obstacles
    if not obstacles:
        return PassageMap([], mode, 0, height_intervals=[])
    heights = [o.height for o in obstacles]
    if any(h <= 0 for h in heights):
        raise ValueError("3D detection requires positive obstacle heights")
    levels = sorted(set(heights))
    boundaries = [0.0] + levels
    intervals: list[HeightInterval] = []
    for z_low, z_high in zip(boundaries[:-1], boundaries[1:]):
        active = [o for o in obstacles if o.height > z_low + EPS]
        pure, ext = _detect_core(active, None, want_extended=(mode == "extended"))
        intervals.append(HeightInterval(z_low, z_high, pure if mode == "pure" else ext))
    base = intervals[0].passages if intervals else []
    return PassageMap(base, mode, len(obstacles), height_intervals=intervals)


# ---------------------------------------------------------------------------
# Translated passage segments
# ---------------------------------------------------------------------------

def translated_segments(passage: Passage, scene: "Scene", d_min: float,
                        only_obstacle: Optional[int] = None) -> list[TranslatedSegment]:
    """Passage copies anchored at obstacle vertices, densifying references.

    For each vertex of the passage pair, a ray in the cross-passage
    direction is emitted when a small free-space offset probe succeeds,
    clipped at the first obstacle or boundary hit. Candidates closer than
    ``d_min`` (orthogonally to the passage direction) to an end already
    kept on the same obstacle are dropped; each obstacle's kept set is
    seeded with its own passage endpoint.
    """
    if d_min <= 0:
        raise ValueError("d_min must be positive")
    polys = scene.detection_polygons()
    geom = SceneGeom(polys)
    bounds = (0.0, 0.0, scene.width, scene.height)
    i, j = passage.ids
    u = passage.direction
    if np.linalg.norm(u) <= EPS:
        return []
    n_perp = np.array([-u[1], u[0]])
    out: list[TranslatedSegment] = []
    plans = [(i, u, passage.p), (j, -u, passage.q)]
    for owner, direction, seed in plans:
        if only_obstacle is not None and owner != only_obstacle:
            continue
        kept = [seed]
        for v in polys[owner].vertices:
            if min(abs(float(np.dot(v - k, n_perp))) for k in kept) < d_min:
                continue
            probe = v + OFFSET_DELTA * direction
            if geom.points_inside_any(probe[None, :])[0]:
                continue
            if not (bounds[0] - EPS <= probe[0] <= bounds[2] + EPS
                    and bounds[1] - EPS <= probe[1] <= bounds[3] + EPS):
                continue
            t = geom.ray_first_hit(v, direction, exclude=(owner,), bounds=bounds)
            if not math.isfinite(t) or t <= EPS:
                continue
            far = v + t * direction
            out.append(TranslatedSegment(v.copy(), v.copy(), far, passage.ids, owner))
            kept.append(v)
    return out
