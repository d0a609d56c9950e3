"""Scene model, random environment generation, and JSON/SVG/CSV emitters."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import OverlappingObstacles, ParseError, PlacementFailure
from .geometry import EPS, ConvexPolygon, closest_points, polygons_overlap

SCHEMA_VERSION = 1
WALL_THICKNESS = 1.0

SHAPES = ("square", "regular_triangle", "rect_2to1")


@dataclass
class Scene:
    """Rectangular workspace with disjoint convex polygonal obstacles.

    Obstacle ids are normalized to list positions. When
    ``walls_as_obstacles`` is set, four boundary rectangles (ids M..M+3)
    join passage detection and collision checking.
    """

    width: float
    height: float
    obstacles: list[ConvexPolygon] = field(default_factory=list)
    walls_as_obstacles: bool = True
    dimension: str = "2d"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("scene dimensions must be positive")
        if self.dimension not in ("2d", "3d"):
            raise ValueError(f"unknown dimension {self.dimension!r}")
        normalized = []
        for k, poly in enumerate(self.obstacles):
            if poly.id != k:
                poly = ConvexPolygon(poly.vertices, id=k, height=poly.height)
            normalized.append(poly)
        self.obstacles = normalized
        for poly in self.obstacles:
            v = poly.vertices
            if (v[:, 0].min() < -EPS or v[:, 1].min() < -EPS
                    or v[:, 0].max() > self.width + EPS or v[:, 1].max() > self.height + EPS):
                raise ValueError(f"obstacle {poly.id} leaves the workspace")
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                if polygons_overlap(self.obstacles[i], self.obstacles[j]):
                    raise ValueError(f"obstacles {i} and {j} overlap")
        self._walls: Optional[list[ConvexPolygon]] = None

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (0.0, 0.0, self.width, self.height)

    def wall_polygons(self) -> list[ConvexPolygon]:
        """Boundary rectangles just outside the workspace (corners overlap)."""
        if self._walls is None:
            w, h, t = self.width, self.height, WALL_THICKNESS
            m = len(self.obstacles)
            rects = [
                [(-t, -t), (w + t, -t), (w + t, 0.0), (-t, 0.0)],    # bottom
                [(-t, h), (w + t, h), (w + t, h + t), (-t, h + t)],  # top
                [(-t, -t), (0.0, -t), (0.0, h + t), (-t, h + t)],    # left
                [(w, -t), (w + t, -t), (w + t, h + t), (w, h + t)],  # right
            ]
            self._walls = [ConvexPolygon(np.array(r), id=m + k) for k, r in enumerate(rects)]
        return self._walls

    def detection_polygons(self, include_walls: Optional[bool] = None) -> list[ConvexPolygon]:
        """Obstacles plus walls when enabled; ids equal list positions."""
        use_walls = self.walls_as_obstacles if include_walls is None else include_walls
        polys = list(self.obstacles)
        if use_walls:
            polys.extend(self.wall_polygons())
        return polys

    def in_bounds(self, p) -> bool:
        return bool(0.0 <= p[0] <= self.width and 0.0 <= p[1] <= self.height)

    def __eq__(self, other):
        return (
            isinstance(other, Scene)
            and self.width == other.width
            and self.height == other.height
            and self.walls_as_obstacles == other.walls_as_obstacles
            and self.dimension == other.dimension
            and self.obstacles == other.obstacles
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "width": self.width,
            "height": self.height,
            "dimension": self.dimension,
            "walls_as_obstacles": self.walls_as_obstacles,
            "obstacles": [
                {"id": o.id, "vertices": o.vertices.tolist(), "height": o.height}
                for o in self.obstacles
            ],
        }


# ---------------------------------------------------------------------------
# Random scene generation
# ---------------------------------------------------------------------------

@dataclass
class GeneratorSpec:
    """Parameters for random obstacle placement."""

    obstacle_count: int
    side_length: float = 1.0
    shapes: tuple[str, ...] = SHAPES
    seed: int = 0
    width: float = 50.0
    height: float = 30.0
    max_rejections: int = 10_000

    def __post_init__(self):
        if self.obstacle_count < 0:
            raise ValueError("obstacle_count must be nonnegative")
        if self.side_length <= 0:
            raise ValueError("side_length must be positive")
        bad = set(self.shapes) - set(SHAPES)
        if bad or not self.shapes:
            raise ValueError(f"unknown shapes: {sorted(bad)}")


def _shape_template(shape: str, side: float) -> np.ndarray:
    if shape == "square":
        h = side / 2.0
        return np.array([(-h, -h), (h, -h), (h, h), (-h, h)])
    if shape == "regular_triangle":
        r = side / math.sqrt(3.0)
        ang = np.deg2rad([90.0, 210.0, 330.0])
        return np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
    if shape == "rect_2to1":
        hx, hy = side / 2.0, side / 4.0
        return np.array([(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)])
    raise ValueError(f"unknown shape {shape!r}")


def generate_scene(spec: GeneratorSpec) -> Scene:
    """Uniformly place random-shape obstacles with random poses; deterministic per seed.

    Raises:
        ValueError: infeasible density (footprint over 60% of the map area).
        PlacementFailure: rejection budget exhausted.
    """
    if spec.obstacle_count * spec.side_length ** 2 >= 0.6 * spec.width * spec.height:
        raise ValueError("obstacle footprint exceeds 60% of the map area")
    rng = np.random.default_rng(spec.seed)
    placed: list[ConvexPolygon] = []
    rejections = 0
    while len(placed) < spec.obstacle_count:
        shape = spec.shapes[int(rng.integers(len(spec.shapes)))]
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        base = _shape_template(shape, spec.side_length)
        rot = np.array([[math.cos(theta), -math.sin(theta)],
                        [math.sin(theta), math.cos(theta)]])
        verts = base @ rot.T
        rad = float(np.linalg.norm(verts, axis=1).max()) + 1e-6
        if 2 * rad >= min(spec.width, spec.height):
            raise ValueError("obstacle too large for the map")
        cx = float(rng.uniform(rad, spec.width - rad))
        cy = float(rng.uniform(rad, spec.height - rad))
        cand = ConvexPolygon(verts + np.array([cx, cy]), id=len(placed))
        ok = True
        for other in placed:
            cb, ob = cand.bbox, other.bbox
            gap = 2 * EPS
            if (cb[0] > ob[2] + gap or ob[0] > cb[2] + gap
                    or cb[1] > ob[3] + gap or ob[1] > cb[3] + gap):
                continue
            try:
                if closest_points(cand, other).distance <= gap:
                    ok = False
                    break
            except OverlappingObstacles:
                ok = False
                break
        if not ok:
            rejections += 1
            if rejections > spec.max_rejections:
                raise PlacementFailure(
                    f"placed {len(placed)}/{spec.obstacle_count} after {rejections} rejections")
            continue
        placed.append(cand)
    return Scene(spec.width, spec.height, placed)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene.to_dict(), indent=1))


def scene_from_dict(data: dict) -> Scene:
    def need(container, key, where):
        if not isinstance(container, dict) or key not in container:
            raise ParseError(f"missing field {where}.{key}" if where else f"missing field {key}")
        return container[key]

    version = need(data, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version: {version!r}")
    obstacles = []
    raw = need(data, "obstacles", "")
    if not isinstance(raw, list):
        raise ParseError("field obstacles must be a list")
    for k, o in enumerate(raw):
        verts = need(o, "vertices", f"obstacles[{k}]")
        try:
            poly = ConvexPolygon(np.array(verts, dtype=float), id=int(o.get("id", k)),
                                 height=float(o.get("height", 0.0)))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"obstacles[{k}].vertices invalid: {exc}") from exc
        obstacles.append(poly)
    try:
        return Scene(
            width=float(need(data, "width", "")),
            height=float(need(data, "height", "")),
            obstacles=obstacles,
            walls_as_obstacles=bool(data.get("walls_as_obstacles", True)),
            dimension=str(data.get("dimension", "2d")),
        )
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from exc


def load_scene(path) -> Scene:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return scene_from_dict(data)


# ---------------------------------------------------------------------------
# SVG rendering
# ---------------------------------------------------------------------------

_SVG_STYLE = """
  .obstacle { fill: #9aa0a6; stroke: #3c4043; stroke-width: 0.05; }
  .passage-ext { stroke: #202124; stroke-width: 0.12; }
  .passage-pure { stroke: #4285f4; stroke-width: 0.07; stroke-dasharray: 0.4 0.3; }
  .path { stroke: #4285f4; stroke-width: 0.14; fill: none; }
  .path-pivot { stroke: #0f9d58; stroke-width: 0.2; fill: none; }
  .chord { stroke: #ea4335; stroke-width: 0.14; }
  .endpoint { fill: #ea4335; }
"""


def render_svg(scene: Scene, passages=None, pure_passages=None,
               path_set=None, plan=None, chords=None) -> str:
    """SVG document for a scene with optional detection / planning overlays.

    Extended (or sole) passages render as solid segments, pure-only ones
    dashed; in a path set the pivot path is green and the rest blue, with
    chords in red.
    """
    margin = 1.0
    w, h = scene.width, scene.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-margin} {-margin} '
        f'{w + 2 * margin} {h + 2 * margin}" width="{int(20 * (w + 2 * margin))}" '
        f'height="{int(20 * (h + 2 * margin))}">',
        f"<style>{_SVG_STYLE}</style>",
        f'<g transform="translate(0,{h}) scale(1,-1)">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff" stroke="#202124" stroke-width="0.1"/>',
    ]
    for poly in scene.obstacles:
        pts = " ".join(f"{x:.6g},{y:.6g}" for x, y in poly.vertices)
        parts.append(f'<polygon class="obstacle" points="{pts}"/>')

    def line(a, b, cls):
        parts.append(
            f'<line class="{cls}" x1="{a[0]:.6g}" y1="{a[1]:.6g}" '
            f'x2="{b[0]:.6g}" y2="{b[1]:.6g}"/>')

    solid_pairs = set()
    if passages is not None:
        for p in passages.passages:
            solid_pairs.add(p.ids)
            line(p.p, p.q, "passage-ext")
    if pure_passages is not None:
        for p in pure_passages.passages:
            if p.ids not in solid_pairs:
                line(p.p, p.q, "passage-pure")

    def draw_path(poly_line, cls):
        pts = " ".join(f"{x:.6g},{y:.6g}" for x, y in poly_line.waypoints)
        parts.append(f'<polyline class="{cls}" points="{pts}"/>')

    if plan is not None:
        draw_path(plan.path if hasattr(plan, "path") else plan, "path")
    if path_set is not None:
        for k, p in enumerate(path_set.paths):
            if k != path_set.pivot:
                draw_path(p, "path")
        draw_path(path_set.paths[path_set.pivot], "path-pivot")
    if chords:
        for a, b in chords:
            line(a, b, "chord")
    parts.append("</g></svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def write_stats_csv(records: Iterable[dict], path, columns: Sequence[str]) -> None:
    """Write records as CSV with a header row; missing keys become blanks."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for rec in records:
            writer.writerow(rec)
