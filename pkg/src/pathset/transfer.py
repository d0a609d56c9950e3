"""Path-set generation by pivot repositioning and deformable path transfer.

One pivot path is planned; every other path is the pivot plus a
tau-interpolated offset vector. Where the transferred bundle does not fit
a passage, the pivot is first repositioned (translate or proportionally
compress the bundle's chord on the passage), the bundle is re-transferred,
and each path is then deformed through per-passage reference points.
Reference points can be densified with passage copies anchored at
obstacle vertices when obstacles are large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    InfeasiblePassage,
    MissingIntersection,
    NoPathFound,
    PassageTooNarrow,
)
from .geometry import (
    EPS,
    Polyline,
    SceneGeom,
    _segments_closest,
    as_point,
    points_to_segments_dist,
    segments_cross_mask,
)
from .passages import Passage, PassageMap, translated_segments
from .planner import (
    CostConfig,
    PlannerConfig,
    PlanResult,
    paopp_plan,
    planning_passages,
    traversal_details,
)
from .scene_io import Scene

CHORD_WINDOW = 0.2          # intersection search window, fraction of arc length
DEFAULT_RESOLUTION = 0.2    # sampling step for collision / homotopy oracles


@dataclass
class TeamConfig:
    """Initial and target positions for K agents, optional fixed pivot."""

    s0: np.ndarray
    sd: np.ndarray
    pivot: Optional[int] = None

    def __post_init__(self):
        self.s0 = np.atleast_2d(np.asarray(self.s0, dtype=float))
        self.sd = np.atleast_2d(np.asarray(self.sd, dtype=float))
        if self.s0.shape != self.sd.shape or self.s0.shape[0] < 1 or self.s0.shape[1] != 2:
            raise ValueError("team needs matching (K, 2) start and target arrays")

    @property
    def size(self) -> int:
        return self.s0.shape[0]


@dataclass
class PathSet:
    """K coordinated paths, the pivot index, and the shared traversal list."""

    paths: list[Polyline]
    pivot: int
    traversal: list[Passage]

    def to_dict(self) -> dict:
        return {
            "paths": [p.waypoints.tolist() for p in self.paths],
            "pivot": self.pivot,
            "traversal": [p.to_dict() for p in self.traversal],
        }

    @staticmethod
    def from_dict(d: dict) -> "PathSet":
        return PathSet(
            [Polyline(np.array(w)) for w in d["paths"]],
            int(d["pivot"]),
            [Passage.from_dict(p) for p in d["traversal"]],
        )

    def __eq__(self, other):
        if not isinstance(other, PathSet):
            return NotImplemented
        return self.to_dict() == other.to_dict()


# ---------------------------------------------------------------------------
# Pivot selection and plain transfer
# ---------------------------------------------------------------------------

def select_pivot(s0, sd) -> int:
    """Index minimizing the worst transfer-vector magnitude (minimax center)."""
    s0 = np.atleast_2d(np.asarray(s0, dtype=float))
    sd = np.atleast_2d(np.asarray(sd, dtype=float))
    d0 = np.linalg.norm(s0[:, None, :] - s0[None, :, :], axis=-1)
    dd = np.linalg.norm(sd[:, None, :] - sd[None, :, :], axis=-1)
    worst = np.maximum(d0, dd).max(axis=1)
    return int(np.argmin(worst))


def transfer_vectors(team: TeamConfig, pivot: int) -> tuple[np.ndarray, np.ndarray]:
    return team.s0 - team.s0[pivot], team.sd - team.sd[pivot]


def transfer_path(pivot_path: Polyline, v0_i, vd_i) -> Polyline:
    """Offset the pivot by the tau-interpolated transfer vector.

    Endpoints land exactly on the agent's start and target, so no
    postprocessing is needed.
    """
    v0 = as_point(v0_i)
    vd = as_point(vd_i)
    taus = pivot_path.params[:, None]
    return Polyline(pivot_path.waypoints + (1.0 - taus) * v0 + taus * vd)


# ---------------------------------------------------------------------------
# Obstacle categorization around the pivot path
# ---------------------------------------------------------------------------

@dataclass
class NearbyObstacles:
    lam: float
    near_ids: set[int]
    passage_ids: set[int]
    isolated_ids: set[int]
    pruned_hits: list  # traversal hits whose passage touches a near obstacle


def _polyline_polygon_distances(path: Polyline, geom: SceneGeom) -> np.ndarray:
    """(M,) min distance from the path to each polygon, with argmin info cached."""
    sa, sb = path.segments()
    if sa.shape[0] == 0 or geom.edge_a.shape[0] == 0:
        return np.full(geom.n_polygons, np.inf)
    _, _, d = _segments_closest(sa[:, None, :], sb[:, None, :],
                                geom.edge_a[None, :, :], geom.edge_b[None, :, :])
    out = np.full(geom.n_polygons, np.inf)
    np.minimum.at(out, np.broadcast_to(geom.edge_owner, d.shape).ravel(), d.ravel())
    return out


def nearby_obstacles(pivot_path: Polyline, scene: Scene, team: TeamConfig,
                     hits: Sequence, pivot: int) -> NearbyObstacles:
    """Split obstacles near the pivot path into passage members and isolated ones.

    The distance filter radius is the team's worst offset magnitude; the
    traversal list is pruned of passages whose obstacles are both outside
    the filter.
    """
    lam = float(np.maximum(
        np.linalg.norm(team.s0 - team.s0[pivot], axis=1),
        np.linalg.norm(team.sd - team.sd[pivot], axis=1),
    ).max())
    geom = SceneGeom(scene.detection_polygons())
    dists = _polyline_polygon_distances(pivot_path, geom)
    near = {int(k) for k in np.nonzero(dists <= lam + EPS)[0]}
    in_passages = set()
    for h in hits:
        in_passages.update(h.passage.ids)
    pruned = [h for h in hits if near.intersection(h.passage.ids)]
    return NearbyObstacles(
        lam=lam,
        near_ids=near,
        passage_ids=near & in_passages,
        isolated_ids=near - in_passages,
        pruned_hits=pruned,
    )


# ---------------------------------------------------------------------------
# Chords
# ---------------------------------------------------------------------------

class ChordPoint(NamedTuple):
    path_index: int
    eta: float
    point: np.ndarray  # on the passage line
    t: float           # scalar coordinate along the passage direction


@dataclass
class Chord:
    """Span of path intersection points mapped onto a passage line."""

    origin: np.ndarray      # passage segment start
    direction: np.ndarray   # unit vector along the passage
    extent: float           # passage width (segment occupies t in [0, extent])
    entries: list[ChordPoint]

    @property
    def t_values(self) -> np.ndarray:
        return np.array([e.t for e in self.entries])

    @property
    def length(self) -> float:
        t = self.t_values
        return float(t.max() - t.min()) if t.size else 0.0

    @property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        t = self.t_values
        return (self.origin + float(t.min()) * self.direction,
                self.origin + float(t.max()) * self.direction)

    def entry_for(self, path_index: int) -> ChordPoint:
        for e in self.entries:
            if e.path_index == path_index:
                return e
        raise KeyError(path_index)


def _line_crossing_near(path: Polyline, origin, direction, center_eta: float,
                        window: float) -> tuple[float, np.ndarray]:
    """Path crossing of an infinite line, closest to ``center_eta``.

    Only crossings with arc parameter within ``window`` of the center are
    considered; raises MissingIntersection when there is none.
    """
    origin = as_point(origin)
    direction = as_point(direction)
    a, b = path.segments()
    sa = np.einsum("j,ij->i", direction, a - origin)
    sb = np.einsum("j,ij->i", direction, b - origin)
    # signed side of each waypoint w.r.t. the line: cross(direction, p - origin)
    ca = direction[0] * (a[:, 1] - origin[1]) - direction[1] * (a[:, 0] - origin[0])
    cb = direction[0] * (b[:, 1] - origin[1]) - direction[1] * (b[:, 0] - origin[0])
    cum = path.cumulative_lengths
    total = path.length
    best = None
    for k in np.nonzero(((ca >= -EPS) & (cb <= EPS)) | ((ca <= EPS) & (cb >= -EPS)))[0]:
        denom = ca[k] - cb[k]
        t = 0.5 if abs(denom) <= EPS else float(np.clip(ca[k] / denom, 0.0, 1.0))
        pt = a[k] + t * (b[k] - a[k])
        eta = float((cum[k] + t * (cum[k + 1] - cum[k])) / total)
        if abs(eta - center_eta) > window:
            continue
        if best is None or abs(eta - center_eta) < abs(best[0] - center_eta):
            best = (eta, pt)
    if best is None:
        raise MissingIntersection(
            f"no line crossing within {window:.3f} of eta={center_eta:.3f}")
    return best


def chord_on_passage(paths: Sequence[Polyline], pivot: int, passage: Passage,
                     center_eta: float, window: float = CHORD_WINDOW) -> Chord:
    """Chord from direct intersections with the passage's full line."""
    u = passage.direction
    entries = []
    for j, path in enumerate(paths):
        eta, pt = _line_crossing_near(path, passage.p, u, center_eta, window)
        entries.append(ChordPoint(j, eta, pt, float(np.dot(pt - passage.p, u))))
    return Chord(passage.p.copy(), u, passage.width, entries)


def chord_via_normal(paths: Sequence[Polyline], pivot: int, pivot_path: Polyline,
                     eta_p: float, passage: Passage,
                     window: float = CHORD_WINDOW) -> Chord:
    """Chord from intersections with the pivot's normal line, rotated onto the passage.

    The rotation goes through the acute angle between the two lines, which
    keeps every intersection on its original side of the pivot.
    """
    u = passage.direction
    c = pivot_path.eval(eta_p)
    n = pivot_path.normal_at(eta_p)
    sign = 1.0 if float(np.dot(n, u)) >= 0.0 else -1.0
    u_signed = sign * u
    entries = []
    for j, path in enumerate(paths):
        if j == pivot:
            eta, offset = eta_p, 0.0
        else:
            eta, pt = _line_crossing_near(path, c, n, eta_p, window)
            offset = float(np.dot(pt - c, n))
        mapped = c + offset * u_signed
        entries.append(ChordPoint(j, eta, mapped, float(np.dot(mapped - passage.p, u))))
    return Chord(passage.p.copy(), u, passage.width, entries)


def _make_chord(method: str, paths, pivot, pivot_path, eta_p, passage, window=CHORD_WINDOW):
    if method == "normal":
        return chord_via_normal(paths, pivot, pivot_path, eta_p, passage, window)
    if method == "passage":
        return chord_on_passage(paths, pivot, passage, eta_p, window)
    raise ValueError(f"unknown chord method {method!r}")


# ---------------------------------------------------------------------------
# Reference-point placement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RefPlacement:
    """Affine map t -> offset + r*t placing chord points inside a passage."""

    case: str  # "inside" | "translate" | "scale"
    r: float
    offset: float

    def apply(self, t: float) -> float:
        return self.offset + self.r * t


def place_reference_point(chord: Chord, delta: float) -> RefPlacement:
    """Decide how the chord must move to fit the passage segment.

    Inside the segment: nothing moves. Protruding but small enough for a
    clearance ``delta`` on both sides: translate the outside end to
    clearance. Otherwise: compress about the delta-offset end with ratio
    (width - 2*delta)/chord_length; both-ends-outside ties pick the end
    protruding farther (then the lower-coordinate end).
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    w = chord.extent
    t = chord.t_values
    t_min, t_max = float(t.min()), float(t.max())
    length = t_max - t_min
    if t_min >= -EPS and t_max <= w + EPS:
        return RefPlacement("inside", 1.0, 0.0)
    if length <= w - 2 * delta:
        d = (delta - t_min) if t_min < 0 else (w - delta) - t_max
        return RefPlacement("translate", 1.0, d)
    if w <= 2 * delta + EPS:
        raise PassageTooNarrow(f"width {w:.4f} cannot host clearance {delta:.4f}")
    out_lo = max(0.0, -t_min)
    out_hi = max(0.0, t_max - w)
    if out_lo >= out_hi:
        t_q, p_delta = t_min, delta
    else:
        t_q, p_delta = t_max, w - delta
    r = (w - 2 * delta) / length
    return RefPlacement("scale", r, p_delta - r * t_q)


def pivot_fixed_placement(chord: Chord, pivot: int, delta: float) -> RefPlacement:
    """Compression about the (already repositioned, hence fixed) pivot point.

    The ratio starts from (width - 2*delta)/length and tightens where the
    pivot sits close to a passage end, so the image always keeps the
    clearance. The map fixes the pivot's own coordinate.
    """
    w = chord.extent
    if w <= 2 * delta + EPS:
        raise InfeasiblePassage(f"width {w:.4f} cannot host clearance {delta:.4f}")
    t = chord.t_values
    t_min, t_max = float(t.min()), float(t.max())
    if t_min >= -EPS and t_max <= w + EPS:
        return RefPlacement("inside", 1.0, 0.0)
    t_c = chord.entry_for(pivot).t
    length = t_max - t_min
    r = 1.0 if length <= EPS else (w - 2 * delta) / length
    if t_min < t_c:
        r = min(r, max(0.0, (t_c - delta) / (t_c - t_min)))
    if t_max > t_c:
        r = min(r, max(0.0, (w - delta - t_c) / (t_max - t_c)))
    r = min(1.0, r)
    return RefPlacement("scale", r, t_c * (1.0 - r))


# ---------------------------------------------------------------------------
# Piecewise-linear repositioning
# ---------------------------------------------------------------------------

def reposition_path(path: Polyline, anchors: Sequence[tuple[float, np.ndarray]]) -> Polyline:
    """Deform a path through anchor points by blending displacements linearly.

    Each anchor is (eta, target); between consecutive anchors the
    displacement interpolates linearly in eta, with zero displacement
    pinned at both endpoints. The output passes exactly through every
    anchor and keeps the original endpoints.
    """
    if not anchors:
        return Polyline(path.waypoints.copy())
    etas = np.array([a[0] for a in anchors], dtype=float)
    if np.any(etas <= EPS) or np.any(etas >= 1.0 - EPS):
        raise ValueError("anchor parameters must lie strictly inside (0, 1)")
    if np.any(np.diff(etas) <= 0):
        raise ValueError("anchor parameters must be strictly increasing")
    targets = np.array([as_point(a[1]) for a in anchors])
    disps = targets - path.eval(etas)
    knots = np.concatenate([[0.0], etas, [1.0]])
    knot_disp = np.vstack([np.zeros(2), disps, np.zeros(2)])
    taus = np.union1d(path.params, etas)
    base = path.eval(taus)
    dx = np.interp(taus, knots, knot_disp[:, 0])
    dy = np.interp(taus, knots, knot_disp[:, 1])
    return Polyline(base + np.stack([dx, dy], axis=1))


# ---------------------------------------------------------------------------
# Collision and homotopy oracles
# ---------------------------------------------------------------------------

def _sample_path(path: Polyline, resolution: float) -> np.ndarray:
    n = max(2, int(math.ceil(path.length / max(resolution, 1e-6))) + 1)
    return path.eval(np.linspace(0.0, 1.0, n))


def path_collides(path: Polyline, scene: Scene, resolution: float = DEFAULT_RESOLUTION,
                  geom: Optional[SceneGeom] = None) -> bool:
    """Dense-sampling collision check, including workspace bounds."""
    pts = _sample_path(path, resolution)
    if (pts[:, 0].min() < -EPS or pts[:, 1].min() < -EPS
            or pts[:, 0].max() > scene.width + EPS or pts[:, 1].max() > scene.height + EPS):
        return True
    geom = geom or SceneGeom(scene.detection_polygons())
    return bool(geom.points_inside_any(pts).any())


def strong_homotopic_like(path1: Polyline, path2: Polyline, scene: Scene,
                          resolution: float = DEFAULT_RESOLUTION,
                          geom: Optional[SceneGeom] = None) -> bool:
    """True iff the straight-line homotopy surface between the paths is free.

    The surface is sampled on an (x, tau) grid whose spacing is at most
    ``resolution`` in both the arc direction and the blend direction.
    """
    geom = geom or SceneGeom(scene.detection_polygons())
    l_max = max(path1.length, path2.length)
    n_tau = max(2, int(math.ceil(l_max / resolution)) + 1)
    taus = np.linspace(0.0, 1.0, n_tau)
    p1 = path1.eval(taus)
    p2 = path2.eval(taus)
    gap = float(np.linalg.norm(p1 - p2, axis=1).max())
    n_x = max(2, int(math.ceil(gap / resolution)) + 1)
    xs = np.linspace(0.0, 1.0, n_x)[:, None, None]
    surface = ((1.0 - xs) * p1[None, :, :] + xs * p2[None, :, :]).reshape(-1, 2)
    if (surface[:, 0].min() < -EPS or surface[:, 1].min() < -EPS
            or surface[:, 0].max() > scene.width + EPS
            or surface[:, 1].max() > scene.height + EPS):
        return False
    for chunk in np.array_split(surface, max(1, surface.shape[0] // 200_000 + 1)):
        if geom.points_inside_any(chunk).any():
            return False
    return True


def verify_path_set(ps: PathSet, scene: Scene, resolution: float = DEFAULT_RESOLUTION) -> None:
    """Raise InfeasiblePassage unless all paths are free and pairwise homotopic-like."""
    geom = SceneGeom(scene.detection_polygons())
    for k, p in enumerate(ps.paths):
        if path_collides(p, scene, resolution, geom):
            raise InfeasiblePassage(f"path {k} collides")
    for i in range(len(ps.paths)):
        for j in range(i + 1, len(ps.paths)):
            if not strong_homotopic_like(ps.paths[i], ps.paths[j], scene, resolution, geom):
                raise InfeasiblePassage(f"paths {i} and {j} fail the homotopy check")


# ---------------------------------------------------------------------------
# Coordinated deformation
# ---------------------------------------------------------------------------

def _chord_anchor_pass(paths, pivot, pivot_path, hits, delta, method,
                       ref_lines=None) -> tuple[dict[int, list], list[Chord]]:
    """Per-passage reference points with the pivot entry held fixed.

    ``hits`` are the pivot's traversal hits. ``ref_lines`` optionally adds
    translated segments as pseudo passages; those are always intersected
    directly (each path crosses the translated line at its own parameter),
    and a pseudo line some path never reaches is skipped.
    Returns anchors per path index and the chords used.
    """
    anchors: dict[int, list] = {j: [] for j in range(len(paths)) if j != pivot}
    chords: list[Chord] = []
    lines = ref_lines if ref_lines is not None else [(h, None) for h in hits]
    for h, pseudo in lines:
        if pseudo is None:
            chord = _make_chord(method, paths, pivot, pivot_path, h.tau, h.passage)
        else:
            try:
                center, _ = _line_crossing_near(pivot_path, pseudo.p, pseudo.direction,
                                                h.tau, CHORD_WINDOW)
                chord = chord_on_passage(paths, pivot, pseudo, center)
            except MissingIntersection:
                continue
        chords.append(chord)
        placement = pivot_fixed_placement(chord, pivot, delta)
        if placement.case == "inside":
            continue
        for e in chord.entries:
            if e.path_index == pivot:
                continue
            t_new = placement.apply(e.t)
            target = chord.origin + t_new * chord.direction
            anchors[e.path_index].append((e.eta, target))
    return anchors, chords


def _merged_anchor_list(items: list) -> list:
    """Sort anchors by eta, dropping near-duplicates and endpoint conflicts."""
    items = sorted(items, key=lambda a: a[0])
    out = []
    for eta, target in items:
        if eta <= 10 * EPS or eta >= 1.0 - 10 * EPS:
            continue
        if out and eta - out[-1][0] <= 1e-9:
            continue
        out.append((eta, target))
    return out


def coordinated_deform(scene: Scene, paths: list[Polyline], pivot: int,
                       hits: Sequence, delta: float, method: str = "normal",
                       d_min: Optional[float] = None,
                       resolution: float = DEFAULT_RESOLUTION) -> list[Polyline]:
    """Deform transferred paths through passage reference points.

    The pivot path (already repositioned) stays fixed. If any deformed
    path still collides, references are densified once with translated
    passage segments on the colliding side; a second failure raises
    InfeasiblePassage.
    """
    geom = SceneGeom(scene.detection_polygons())
    pivot_path = paths[pivot]
    anchors, chords = _chord_anchor_pass(paths, pivot, pivot_path, hits, delta, method)

    def build(anchor_map):
        out = list(paths)
        for j, items in anchor_map.items():
            out[j] = reposition_path(paths[j], _merged_anchor_list(items))
        return out

    deformed = build(anchors)
    colliding = [j for j, p in enumerate(deformed)
                 if j != pivot and path_collides(p, scene, resolution, geom)]
    if not colliding:
        return deformed

    # densify once: translate the passage to vertices on the colliding side
    extra_lines = []
    for h, chord in zip(hits, chords):
        sides = []
        t_c = chord.entry_for(pivot).t
        for j in colliding:
            try:
                sides.append(math.copysign(1.0, chord.entry_for(j).t - t_c))
            except KeyError:
                continue
        if not sides:
            continue
        majority = 1.0 if sum(sides) >= 0 else -1.0
        owner = h.passage.ids[1] if majority > 0 else h.passage.ids[0]
        for ts in translated_segments(h.passage, scene, d_min or delta, only_obstacle=owner):
            if ts.length <= 2 * delta + EPS:
                continue
            pseudo = Passage(h.passage.ids, ts.a, ts.b, ts.length)
            extra_lines.append((h, pseudo))
    if extra_lines:
        dens_anchors, _ = _chord_anchor_pass(paths, pivot, pivot_path, hits, delta,
                                             method, ref_lines=extra_lines)
        for j, items in dens_anchors.items():
            anchors[j].extend(items)
        deformed = build(anchors)
        colliding = [j for j, p in enumerate(deformed)
                     if j != pivot and path_collides(p, scene, resolution, geom)]
    if colliding:
        raise InfeasiblePassage(f"paths {colliding} still collide after densification")
    return deformed


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

def default_clearance(hits: Sequence) -> float:
    """0.1 x narrowest traversed passage width, clamped away from degeneracy."""
    widths = [h.passage.width for h in hits]
    if not widths:
        return 0.1
    w = min(widths)
    return float(np.clip(0.1 * w, EPS, w / 2 - EPS))


def generate_path_set(scene: Scene, team: TeamConfig, cost: Optional[CostConfig] = None,
                      mode: str = "extended", n_samples: int = 3000, seed: int = 0,
                      config: Optional[PlannerConfig] = None, chord_method: str = "normal",
                      delta: Optional[float] = None, d_min: Optional[float] = None,
                      resolution: float = DEFAULT_RESOLUTION, verify: bool = False,
                      ) -> tuple[PathSet, PlanResult]:
    """Plan the pivot, transfer, reposition, and coordinately deform a path set.

    Returns the path set together with the pivot's plan. Runtime is
    dominated by the single planner call; the transfer stages are linear
    in the path node count.
    """
    pivot = team.pivot if team.pivot is not None else select_pivot(team.s0, team.sd)
    if not 0 <= pivot < team.size:
        raise ValueError("pivot index out of range")
    plan = paopp_plan(scene, team.s0[pivot], team.sd[pivot], cost=cost, mode=mode,
                      n_samples=n_samples, seed=seed, config=config)
    pmap = planning_passages(scene, mode, team.s0[pivot], team.sd[pivot])
    v0, vd = transfer_vectors(team, pivot)

    if team.size == 1:
        ps = PathSet([plan.path], 0, list(plan.traversal))
        if verify:
            verify_path_set(ps, scene, resolution)
        return ps, plan

    sigma_p = plan.path
    transferred = [transfer_path(sigma_p, v0[i], vd[i]) for i in range(team.size)]
    hits = traversal_details(sigma_p, pmap)
    near = nearby_obstacles(sigma_p, scene, team, hits, pivot)
    hits = near.pruned_hits
    dlt = delta if delta is not None else default_clearance(hits)

    # pivot anchors: passage cases plus isolated-obstacle pushes
    pivot_anchors = []
    for h in hits:
        chord = _make_chord(chord_method, transferred, pivot, sigma_p, h.tau, h.passage)
        placement = place_reference_point(chord, dlt)
        if placement.case == "inside":
            continue
        t_new = placement.apply(chord.entry_for(pivot).t)
        pivot_anchors.append((h.tau, chord.origin + t_new * chord.direction))
    pivot_anchors.extend(
        _isolated_pushes(scene, sigma_p, near, v0, vd, dlt))

    sigma_star = reposition_path(sigma_p, _merged_anchor_list(pivot_anchors))
    re_transferred = [transfer_path(sigma_star, v0[i], vd[i]) for i in range(team.size)]
    pruned_map = PassageMap([h.passage for h in hits], pmap.mode, pmap.obstacle_count)
    hits_star = traversal_details(sigma_star, pruned_map)
    deformed = coordinated_deform(scene, re_transferred, pivot, hits_star, dlt,
                                  method=chord_method, d_min=d_min, resolution=resolution)
    ps = PathSet(deformed, pivot, [h.passage for h in hits_star])
    if verify:
        verify_path_set(ps, scene, resolution)
    return ps, plan


def _isolated_pushes(scene: Scene, sigma_p: Polyline, near: NearbyObstacles,
                     v0: np.ndarray, vd: np.ndarray, delta: float) -> list:
    """Push anchors away from isolated obstacles that intrude the transfer tunnel."""
    if not near.isolated_ids:
        return []
    geom = SceneGeom(scene.detection_polygons())
    out = []
    sa, sb = sigma_p.segments()
    for k in sorted(near.isolated_ids):
        poly = geom.polygons[k]
        ea, eb = poly.edges
        _, _, d = _segments_closest(sa[:, None, :], sb[:, None, :],
                                    ea[None, :, :], eb[None, :, :])
        si, ei = np.unravel_index(int(np.argmin(d)), d.shape)
        p_path, p_obs, dist = _segments_closest(sa[si], sb[si], ea[ei], eb[ei])
        tau = sigma_p.param_of_point(p_path)
        radius = float(np.linalg.norm((1.0 - tau) * v0 + tau * vd, axis=1).max())
        if dist > radius:
            continue  # outside the transfer tunnel
        direction = p_path - p_obs
        nrm = float(np.linalg.norm(direction))
        if nrm <= EPS:
            continue
        push = (radius - float(dist)) + delta
        out.append((float(tau), p_path + (push / nrm) * direction))
    return out


# ---------------------------------------------------------------------------
# Separately-planning baseline
# ---------------------------------------------------------------------------

def _tube_constraint(pivot_path: Polyline, lam: float, geom: SceneGeom):
    sa, sb = pivot_path.segments()

    def ok(pts: np.ndarray) -> np.ndarray:
        d = points_to_segments_dist(pts, sa, sb)
        seg = np.argmin(d, axis=1)
        dmin = d[np.arange(pts.shape[0]), seg]
        mask = dmin <= lam
        if not mask.any():
            return mask
        # connecting segment to the nearest pivot point must be obstacle-free
        a = sa[seg]
        b = sb[seg]
        ab = b - a
        l2 = np.einsum("ij,ij->i", ab, ab)
        t = np.clip(np.divide(np.einsum("ij,ij->i", pts - a, ab), l2,
                              out=np.zeros(pts.shape[0]), where=l2 > 0), 0.0, 1.0)
        proj = a + t[:, None] * ab
        blocked = segments_cross_mask(pts, proj, geom.edge_a, geom.edge_b).any(axis=1)
        return mask & ~blocked

    return ok


def separately_plan(scene: Scene, team: TeamConfig, cost: Optional[CostConfig] = None,
                    mode: str = "extended", n_samples: int = 3000, seed: int = 0,
                    config: Optional[PlannerConfig] = None) -> tuple[PathSet, PlanResult]:
    """Baseline: plan each path independently, constrained near the pivot path.

    The pivot is planned as usual; every other agent gets its own planner
    run whose samples must stay within the team radius of the pivot path
    and see it without obstruction.
    """
    pivot = team.pivot if team.pivot is not None else select_pivot(team.s0, team.sd)
    plan = paopp_plan(scene, team.s0[pivot], team.sd[pivot], cost=cost, mode=mode,
                      n_samples=n_samples, seed=seed, config=config)
    if team.size == 1:
        return PathSet([plan.path], 0, list(plan.traversal)), plan
    lam = float(np.maximum(
        np.linalg.norm(team.s0 - team.s0[pivot], axis=1),
        np.linalg.norm(team.sd - team.sd[pivot], axis=1),
    ).max())
    geom = SceneGeom(scene.detection_polygons())
    constraint = _tube_constraint(plan.path, lam, geom)
    paths: list[Optional[Polyline]] = [None] * team.size
    paths[pivot] = plan.path
    for i in range(team.size):
        if i == pivot:
            continue
        sub_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        try:
            res = paopp_plan(scene, team.s0[i], team.sd[i], cost=cost, mode=mode,
                             n_samples=n_samples, seed=sub_seed, config=config,
                             sample_constraint=constraint)
        except NoPathFound as exc:
            raise NoPathFound(f"agent {i}: {exc}") from exc
        paths[i] = res.path
    return PathSet(paths, pivot, list(plan.traversal)), plan
