"""Passage-aware optimal path planning on an RRT* backbone.

The tree carries three attributes per node: the cost of the best known
path from the root (``f``), the minimum passage width that path traverses
(``f_P``, +inf until a passage is crossed), and the minimum width crossed
by the incoming edge alone (``f_cur``). Both parent selection and rewiring
go through the same single-candidate update rule so the attributes stay
consistent under the min/concatenation algebra.

A max-clearance planner (binary search over a clearance-constrained RRT)
is included as the classical baseline.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import InvalidEndpoint, NoPathFound
from .geometry import EPS, Polyline, SceneGeom, as_point, segments_cross_mask
from .passages import Passage, PassageMap, detect_both, detect_passages
from .scene_io import Scene

try:  # compiled fan-query kernel; the numpy fallback is semantically identical
    import numba
except ImportError:  # pragma: no cover
    numba = None

FP_UNSET = 1e7  # stand-in for "no passage traversed yet" in weighted costs
_REF_DIAG = math.hypot(50.0, 30.0)


if numba is not None:
    @numba.njit(cache=True)
    def _fan_query_jit(sx, sy, ex, ey, qax, qay, rqx, rqy, band,
                       qxl, qxh, qyl, qyh, widths, n_obs, blocked, cross):
        for i in range(sx.shape[0]):
            rpx = ex - sx[i]
            rpy = ey - sy[i]
            b1 = EPS * max(math.hypot(rpx, rpy), 1.0)
            pxl = min(sx[i], ex) - EPS
            pxh = max(sx[i], ex) + EPS
            pyl = min(sy[i], ey) - EPS
            pyh = max(sy[i], ey) + EPS
            hit = False
            cmin = np.inf
            for q in range(qax.shape[0]):
                if qxh[q] < pxl or qxl[q] > pxh or qyh[q] < pyl or qyl[q] > pyh:
                    continue
                ax = qax[q] - sx[i]
                ay = qay[q] - sy[i]
                d1 = rpx * ay - rpy * ax
                d2 = rpx * (ay + rqy[q]) - rpy * (ax + rqx[q])
                if not ((d1 >= -b1 and d2 <= b1) or (d1 <= b1 and d2 >= -b1)):
                    continue
                d3 = rqy[q] * ax - rqx[q] * ay
                d4 = rqx[q] * (ey - qay[q]) - rqy[q] * (ex - qax[q])
                if not ((d3 >= -band[q] and d4 <= band[q]) or (d3 <= band[q] and d4 >= -band[q])):
                    continue
                if q < n_obs:
                    hit = True
                    break
                w = widths[q - n_obs]
                if w < cmin:
                    cmin = w
            blocked[i] = hit
            cross[i] = cmin

    @numba.njit(cache=True)
    def _scan_jit(pos, n, x, y, rr, mask):
        imin = 0
        dmin = np.inf
        for i in range(n):
            dx = pos[i, 0] - x
            dy = pos[i, 1] - y
            d = dx * dx + dy * dy
            mask[i] = d <= rr
            if d < dmin:
                dmin = d
                imin = i
        return imin, dmin


class _EdgeBank:
    """Obstacle edges and passage segments fused into one crossing query.

    All segment-side constants are precomputed once per plan so that each
    sample costs a single vectorized pass over the combined array: the
    first block answers "does this tree edge hit an obstacle", the second
    "what is the narrowest passage it crosses".
    """

    def __init__(self, geom: SceneGeom, pa: np.ndarray, pb: np.ndarray, widths: np.ndarray):
        qa = np.concatenate([geom.edge_a, pa]) if pa.size else geom.edge_a.copy()
        qb = np.concatenate([geom.edge_b, pb]) if pb.size else geom.edge_b.copy()
        self.n_obs = geom.edge_a.shape[0]
        self.widths = widths
        self.qax = qa[:, 0].copy()
        self.qay = qa[:, 1].copy()
        rq = qb - qa
        self.rqx = rq[:, 0].copy()
        self.rqy = rq[:, 1].copy()
        self.band = EPS * np.maximum(np.hypot(self.rqx, self.rqy), 1.0)
        self.qxl = np.minimum(qa[:, 0], qb[:, 0]) - EPS
        self.qxh = np.maximum(qa[:, 0], qb[:, 0]) + EPS
        self.qyl = np.minimum(qa[:, 1], qb[:, 1]) - EPS
        self.qyh = np.maximum(qa[:, 1], qb[:, 1]) + EPS

    def query(self, starts: np.ndarray, end: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(blocked, narrowest crossed width) for fan edges starts[i] -> end."""
        if numba is not None:
            k = starts.shape[0]
            blocked = np.zeros(k, dtype=np.bool_)
            cross = np.full(k, np.inf)
            _fan_query_jit(np.ascontiguousarray(starts[:, 0]), np.ascontiguousarray(starts[:, 1]),
                           float(end[0]), float(end[1]), self.qax, self.qay,
                           self.rqx, self.rqy, self.band, self.qxl, self.qxh,
                           self.qyl, self.qyh, self.widths, self.n_obs, blocked, cross)
            return blocked, cross
        sx = starts[:, 0:1]
        sy = starts[:, 1:2]
        ex, ey = float(end[0]), float(end[1])
        rpx = ex - sx
        rpy = ey - sy
        b1 = EPS * np.maximum(np.hypot(rpx, rpy), 1.0)
        ax = self.qax[None, :] - sx
        ay = self.qay[None, :] - sy
        d1 = rpx * ay - rpy * ax
        d2 = rpx * (ay + self.rqy[None, :]) - rpy * (ax + self.rqx[None, :])
        d3 = self.rqy[None, :] * ax - self.rqx[None, :] * ay  # cross(rq, s - qa)
        d4 = self.rqx[None, :] * (ey - self.qay[None, :]) - self.rqy[None, :] * (ex - self.qax[None, :])
        mask = (((d1 >= -b1) & (d2 <= b1)) | ((d1 <= b1) & (d2 >= -b1))) \
            & (((d3 >= -self.band) & (d4 <= self.band)) | ((d3 <= self.band) & (d4 >= -self.band)))
        pxl = np.minimum(sx, ex)
        pxh = np.maximum(sx, ex)
        pyl = np.minimum(sy, ey)
        pyh = np.maximum(sy, ey)
        mask &= (pxl - EPS <= self.qxh[None, :]) & (self.qxl[None, :] <= pxh + EPS) \
            & (pyl - EPS <= self.qyh[None, :]) & (self.qyl[None, :] <= pyh + EPS)
        blocked = mask[:, :self.n_obs].any(axis=1)
        pmask = mask[:, self.n_obs:]
        if pmask.shape[1]:
            cross_min = np.where(pmask, self.widths[None, :], np.inf).min(axis=1)
        else:
            cross_min = np.full(starts.shape[0], np.inf)
        return blocked, cross_min


@dataclass(frozen=True)
class CostConfig:
    """Path cost: length/width ratio, or length minus weighted width."""

    kind: str = "weighted"  # "ratio" | "weighted"
    k_p: float = 10.0

    def __post_init__(self):
        if self.kind not in ("ratio", "weighted"):
            raise ValueError(f"unknown cost kind {self.kind!r}")
        if self.kind == "weighted" and self.k_p <= 0:
            raise ValueError("k_p must be positive")

    def value(self, length, f_p):
        """Cost of a path with the given length and min traversed width.

        Vectorized over numpy inputs. With no passage traversed the ratio
        cost degenerates to the plain length; the weighted cost treats the
        width as a large constant so passage-free prefixes stay comparable.
        """
        length = np.asarray(length, dtype=float)
        f_p = np.asarray(f_p, dtype=float)
        if self.kind == "ratio":
            safe = np.maximum(f_p, EPS)
            out = np.where(np.isinf(f_p), length, length / safe)
        else:
            out = length - self.k_p * np.minimum(f_p, FP_UNSET)
        return float(out) if out.ndim == 0 else out


@dataclass
class PlannerConfig:
    """RRT* parameters; None fields are derived from the scene scale."""

    step: Optional[float] = None       # 2.0 on a 50x30 map, scaled by diagonal
    goal_bias: float = 0.05
    gamma: Optional[float] = None      # near-radius coefficient
    connect_radius: Optional[float] = None
    pool_size: int = 128

    def resolved(self, scene: Scene) -> "PlannerConfig":
        diag = math.hypot(scene.width, scene.height)
        step = self.step if self.step is not None else 2.0 * diag / _REF_DIAG
        gamma = self.gamma if self.gamma is not None else 2.0 * math.sqrt(
            1.5 * scene.width * scene.height / math.pi)
        connect = self.connect_radius if self.connect_radius is not None else step
        return PlannerConfig(step, self.goal_bias, gamma, connect, self.pool_size)


class NodeView(NamedTuple):
    position: np.ndarray
    parent: int
    f: float
    f_p: float
    f_cur: float
    length: float


class PlanningTree:
    """Array-backed search tree with passage-aware cost bookkeeping."""

    def __init__(self, capacity: int, root, cost: CostConfig):
        self.cost = cost
        self.pos = np.zeros((capacity, 2))
        self.parent = np.full(capacity, -1, dtype=int)
        self.edge_len = np.zeros(capacity)
        self.length = np.zeros(capacity)
        self.f = np.zeros(capacity)
        self.f_p = np.full(capacity, np.inf)
        self.f_cur = np.full(capacity, np.inf)
        self.children: list[list[int]] = [[] for _ in range(capacity)]
        self.pos[0] = as_point(root)
        self.f[0] = cost.value(0.0, np.inf)
        self.n = 1

    def node(self, i: int) -> NodeView:
        return NodeView(self.pos[i].copy(), int(self.parent[i]), float(self.f[i]),
                        float(self.f_p[i]), float(self.f_cur[i]), float(self.length[i]))

    def add(self, position, parent: int, edge_len: float, cross_min: float) -> int:
        i = self.n
        self.pos[i] = position
        self.parent[i] = parent
        self.edge_len[i] = edge_len
        self.f_cur[i] = cross_min
        self.length[i] = self.length[parent] + edge_len
        self.f_p[i] = min(self.f_p[parent], cross_min)
        self.f[i] = self.cost.value(self.length[i], self.f_p[i])
        self.children[parent].append(i)
        self.n = i + 1
        return i

    def update_node_cost(self, near: int, node: int, edge_len: float, cross_min: float) -> bool:
        """Adopt ``near`` as the parent of ``node`` if that lowers its cost.

        ``cross_min`` is the minimum width among passages crossed by the
        candidate edge (+inf when it crosses none). On success the node's
        attributes are updated atomically and propagated to its subtree.
        """
        cand_len = self.length[near] + edge_len
        cand_fp = min(self.f_p[near], cross_min)
        cand_f = self.cost.value(cand_len, cand_fp)
        if cand_f >= self.f[node] - 1e-12:
            return False
        old = self.parent[node]
        if old >= 0:
            self.children[old].remove(node)
        self.parent[node] = near
        self.children[near].append(node)
        self.edge_len[node] = edge_len
        self.f_cur[node] = cross_min
        self.length[node] = cand_len
        self.f_p[node] = cand_fp
        self.f[node] = cand_f
        self._propagate(node)
        return True

    def _propagate(self, root: int) -> None:
        stack = list(self.children[root])
        while stack:
            i = stack.pop()
            p = self.parent[i]
            self.length[i] = self.length[p] + self.edge_len[i]
            self.f_p[i] = min(self.f_p[p], self.f_cur[i])
            self.f[i] = self.cost.value(self.length[i], self.f_p[i])
            stack.extend(self.children[i])

    def chain(self, i: int) -> np.ndarray:
        """Waypoints from the root to node ``i``."""
        idx = []
        while i >= 0:
            idx.append(i)
            i = int(self.parent[i])
        return self.pos[idx[::-1]].copy()

    def recompute_chain(self, i: int) -> tuple[float, float, float]:
        """(length, f_p, f) recomputed along the parent chain, for audits."""
        length = 0.0
        f_p = np.inf
        j = i
        rev = []
        while j > 0:
            rev.append(j)
            j = int(self.parent[j])
        for j in reversed(rev):
            length += float(np.linalg.norm(self.pos[j] - self.pos[int(self.parent[j])]))
            f_p = min(f_p, float(self.f_cur[j]))
        return length, f_p, float(self.cost.value(length, f_p))


# ---------------------------------------------------------------------------
# Edge / path passage crossings
# ---------------------------------------------------------------------------

def edge_crossings(a, b, passage_map: PassageMap) -> list[tuple[Passage, np.ndarray]]:
    """Passages whose segment the edge ab touches, ordered along the edge."""
    a, b = as_point(a), as_point(b)
    pa, pb, _ = passage_map.arrays
    if pa.shape[0] == 0:
        return []
    mask = segments_cross_mask(a[None, :], b[None, :], pa, pb)[0]
    hits = []
    r = b - a
    rr = float(r @ r)
    for k in np.nonzero(mask)[0]:
        s = pb[k] - pa[k]
        denom = r[0] * s[1] - r[1] * s[0]
        if abs(denom) > EPS:
            qp = pa[k] - a
            t = (qp[0] * s[1] - qp[1] * s[0]) / denom
        elif rr > 0:
            t = float(np.clip((0.5 * (pa[k] + pb[k]) - a) @ r / rr, 0.0, 1.0))
        else:
            t = 0.0
        t = float(np.clip(t, 0.0, 1.0))
        hits.append((t, k))
    hits.sort()
    return [(passage_map.passages[k], a + t * r) for t, k in hits]


class TraversalHit(NamedTuple):
    passage: Passage
    tau: float
    point: np.ndarray


def traversal_details(path: Polyline, passage_map: PassageMap) -> list[TraversalHit]:
    """Ordered passage crossings of a polyline with arc-length parameters."""
    out: list[TraversalHit] = []
    if path.length <= 0:
        return out
    sa, sb = path.segments()
    cum = path.cumulative_lengths
    total = path.length
    for k in range(sa.shape[0]):
        seg_len = float(np.linalg.norm(sb[k] - sa[k]))
        if seg_len <= EPS:
            continue
        for passage, point in edge_crossings(sa[k], sb[k], passage_map):
            tau = float((cum[k] + np.linalg.norm(point - sa[k])) / total)
            if out and out[-1].passage.ids == passage.ids \
                    and np.linalg.norm(out[-1].point - point) < 1e-7:
                continue  # same crossing seen from both sides of a shared waypoint
            out.append(TraversalHit(passage, tau, point))
    return out


def recompute_traversal(path: Polyline, passage_map: PassageMap) -> list[Passage]:
    """Independent re-derivation of the ordered passage traversal list."""
    return [h.passage for h in traversal_details(path, passage_map)]


# ---------------------------------------------------------------------------
# Plan result
# ---------------------------------------------------------------------------

@dataclass
class PlanResult:
    path: Polyline
    traversal: list[Passage]
    length: float
    min_width: float
    cost: float
    samples_used: int
    wall_time: float
    mode: str = "extended"
    cost_kind: str = "weighted"
    k_p: float = 10.0
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "waypoints": self.path.waypoints.tolist(),
            "traversal": [p.to_dict() for p in self.traversal],
            "length": self.length,
            "min_width": None if math.isinf(self.min_width) else self.min_width,
            "cost": self.cost,
            "samples_used": self.samples_used,
            "wall_time": self.wall_time,
            "mode": self.mode,
            "cost_kind": self.cost_kind,
            "k_p": self.k_p,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "PlanResult":
        return PlanResult(
            Polyline(np.array(d["waypoints"])),
            [Passage.from_dict(p) for p in d["traversal"]],
            float(d["length"]),
            math.inf if d["min_width"] is None else float(d["min_width"]),
            float(d["cost"]), int(d["samples_used"]), float(d["wall_time"]),
            d["mode"], d["cost_kind"], float(d["k_p"]), int(d["seed"]),
        )

    def __eq__(self, other):
        if not isinstance(other, PlanResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

class _SamplePool:
    """Batched rejection sampler over the free workspace (optionally constrained)."""

    def __init__(self, rng, scene: Scene, geom: SceneGeom, goal, bias: float,
                 constraint: Optional[Callable[[np.ndarray], np.ndarray]],
                 batch: int, clearance: float = 0.0):
        self.rng = rng
        self.low = np.zeros(2)
        self.high = np.array([scene.width, scene.height])
        self.geom = geom
        self.goal = as_point(goal)
        self.bias = bias
        self.constraint = constraint
        self.batch = batch
        self.clearance = clearance
        self.buf: list[np.ndarray] = []

    def next(self) -> np.ndarray:
        dry = 0
        while not self.buf:
            u = self.rng.random(self.batch)
            pts = self.rng.uniform(self.low, self.high, size=(self.batch, 2))
            pts[u < self.bias] = self.goal
            if self.clearance > 0:
                free = self.geom.points_clearance(pts) >= self.clearance
            else:
                free = ~self.geom.points_inside_any(pts)
            if self.constraint is not None:
                free &= self.constraint(pts)
            accepted = pts[free]
            self.buf.extend(accepted[::-1])
            dry = dry + 1 if accepted.shape[0] == 0 else 0
            if dry > 2000:
                raise NoPathFound("free-space sampler starved")
        return self.buf.pop()


def _validate_endpoint(name: str, p, scene: Scene, geom: SceneGeom, clearance: float = 0.0):
    p = as_point(p)
    if not scene.in_bounds(p):
        raise InvalidEndpoint(f"{name} {p.tolist()} is outside the workspace")
    if clearance > 0:
        if float(geom.points_clearance(p[None, :])[0]) < clearance:
            raise InvalidEndpoint(f"{name} {p.tolist()} violates the clearance")
    elif geom.points_inside_any(p[None, :])[0]:
        raise InvalidEndpoint(f"{name} {p.tolist()} is inside an obstacle")
    return p


def planning_passages(scene: Scene, mode: str, start, goal) -> PassageMap:
    """Passage set used by the planner for the given visibility mode.

    In extended mode, pure-valid passages whose constraint disc encloses
    the start or goal are kept even though the extended check rejects
    them; dropping those can distort costs for paths that terminate inside
    the enclosed pocket.
    """
    if mode == "pure":
        return detect_passages(scene, "pure")
    if mode != "extended":
        raise ValueError(f"unknown visibility mode {mode!r}")
    pure, ext = detect_both(scene)
    start = as_point(start)
    goal = as_point(goal)
    kept = list(ext.passages)
    have = ext.pair_set()
    for p in pure.passages:
        if p.ids in have:
            continue
        c, r = p.center, p.radius
        if np.linalg.norm(start - c) <= r + EPS or np.linalg.norm(goal - c) <= r + EPS:
            kept.append(p)
    return PassageMap(kept, "extended", ext.obstacle_count)


# ---------------------------------------------------------------------------
# PAOPP
# ---------------------------------------------------------------------------

def paopp_plan(scene: Scene, start, goal, cost: Optional[CostConfig] = None,
               mode: str = "extended", n_samples: int = 3000, seed: int = 0,
               config: Optional[PlannerConfig] = None,
               passage_map: Optional[PassageMap] = None,
               sample_constraint: Optional[Callable[[np.ndarray], np.ndarray]] = None,
               return_tree: bool = False):
    """Plan a single path optimizing the passage-aware cost.

    Runs ``n_samples`` RRT* iterations (one free sample each) and returns
    the best goal-reaching path seen, so the reported cost is monotone
    non-increasing in ``n_samples`` for a fixed seed. Deterministic given
    the seed. With ``return_tree`` the search tree is returned alongside
    the result for audits.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    t0 = time.perf_counter()
    cost = cost or CostConfig()
    cfg = (config or PlannerConfig()).resolved(scene)
    geom = SceneGeom(scene.detection_polygons())
    start = _validate_endpoint("start", start, scene, geom)
    goal = _validate_endpoint("goal", goal, scene, geom)
    if passage_map is None:
        passage_map = planning_passages(scene, mode, start, goal)
    pa, pb, widths = passage_map.arrays

    rng = np.random.default_rng(seed)
    pool = _SamplePool(rng, scene, geom, goal, cfg.goal_bias, sample_constraint, cfg.pool_size)
    tree = PlanningTree(n_samples + 1, start, cost)
    bank = _EdgeBank(geom, pa, pb, widths)
    step = cfg.step
    step22 = (2.0 * step) ** 2

    # goal attachment candidates: tree node, gap length, gap crossing width
    cand_ids: list[int] = []
    cand_d: list[float] = []
    cand_cross: list[float] = []
    best_f = np.inf
    best: Optional[tuple[np.ndarray, float, float, int]] = None

    near_mask = np.zeros(n_samples + 1, dtype=np.bool_)

    def scan(point, n, rr):
        if numba is not None:
            imin, d2min = _scan_jit(tree.pos, n, float(point[0]), float(point[1]),
                                    rr, near_mask)
            return int(imin), float(d2min)
        diff = tree.pos[:n] - point
        d2 = np.einsum("ij,ij->i", diff, diff)
        near_mask[:n] = d2 <= rr
        k = int(np.argmin(d2))
        return k, float(d2[k])

    for it in range(n_samples):
        s_rand = pool.next()
        n = tree.n
        rr = min(cfg.gamma ** 2 * math.log(n + 1) / (n + 1), step22)
        imin, d2min = scan(s_rand, n, rr)
        if d2min < 1e-24:
            continue
        dmin = math.sqrt(d2min)
        steered = dmin > step
        s_new = tree.pos[imin] + (step / dmin) * (s_rand - tree.pos[imin]) if steered else s_rand
        if bank.query(tree.pos[imin:imin + 1], s_new)[0][0]:
            continue
        if steered:
            scan(s_new, n, rr)  # refresh the near mask around the steered point
        near = np.nonzero(near_mask[:n])[0]
        if not near_mask[imin]:
            near = np.append(near, imin)
            near.sort()
        elen = np.linalg.norm(tree.pos[near] - s_new, axis=1)
        blocked, cross_min = bank.query(tree.pos[near], s_new)
        cand_len = tree.length[near] + elen
        cand_fp = np.minimum(tree.f_p[near], cross_min)
        cand_f = np.asarray(cost.value(cand_len, cand_fp), dtype=float)
        cand_f = np.where(blocked | (elen < 1e-12), np.inf, cand_f)
        kbest = int(np.argmin(cand_f))
        if not np.isfinite(cand_f[kbest]):
            continue
        nid = tree.add(s_new, int(near[kbest]), float(elen[kbest]), float(cross_min[kbest]))

        # rewire neighbors through the new node where that lowers their cost
        rew_len = tree.length[nid] + elen
        rew_fp = np.minimum(tree.f_p[nid], cross_min)
        rew_f = np.asarray(cost.value(rew_len, rew_fp), dtype=float)
        improved = (~blocked) & (elen >= 1e-12) & (rew_f < tree.f[near] - 1e-12)
        improved[kbest] = False
        for j in np.nonzero(improved)[0]:
            tree.update_node_cost(nid, int(near[j]), float(elen[j]), float(cross_min[j]))

        d_goal = float(np.linalg.norm(s_new - goal))
        if d_goal <= cfg.connect_radius:
            g_blocked, g_cross = bank.query(s_new[None, :], goal)
            if not g_blocked[0]:
                cand_ids.append(nid)
                cand_d.append(d_goal)
                cand_cross.append(float(g_cross[0]))

        if cand_ids:
            ids = np.asarray(cand_ids)
            g_len = tree.length[ids] + np.asarray(cand_d)
            g_fp = np.minimum(tree.f_p[ids], np.asarray(cand_cross))
            g_f = np.asarray(cost.value(g_len, g_fp), dtype=float)
            k = int(np.argmin(g_f))
            if g_f[k] < best_f - 1e-12:
                best_f = float(g_f[k])
                wps = tree.chain(int(ids[k]))
                if cand_d[k] > 1e-12:
                    wps = np.vstack([wps, goal])
                best = (wps, float(g_len[k]), float(g_fp[k]), it + 1)

    if best is None:
        raise NoPathFound(f"goal not connected within {n_samples} samples")
    wps, length, fp, found_at = best
    path = Polyline(wps)
    traversal = recompute_traversal(path, passage_map)
    result = PlanResult(
        path=path,
        traversal=traversal,
        length=length,
        min_width=fp,
        cost=best_f,
        samples_used=n_samples,
        wall_time=time.perf_counter() - t0,
        mode=mode,
        cost_kind=cost.kind,
        k_p=cost.k_p,
        seed=seed,
    )
    return (result, tree) if return_tree else result


# ---------------------------------------------------------------------------
# Max-clearance baseline
# ---------------------------------------------------------------------------

@dataclass
class McppResult:
    plan: PlanResult
    mc: float
    rounds: int
    wall_time: float


def _plan_with_clearance(scene: Scene, geom: SceneGeom, start, goal, clearance: float,
                         failure_mode: str, budget: float, rng, cfg: PlannerConfig,
                         ) -> tuple[Optional[np.ndarray], int]:
    """Feasibility RRT under a clearance constraint; first path wins.

    Returns (waypoints, samples consumed); waypoints are None once the
    sample/time budget runs out. Clearance is measured to obstacles only,
    never to the map boundary.
    """
    it = 0
    try:
        pool = _SamplePool(rng, scene, geom, goal, cfg.goal_bias, None,
                           cfg.pool_size, clearance=clearance)
        if float(geom.points_clearance(as_point(start)[None, :])[0]) < clearance - 1e-12:
            return None, 0
        cap = int(budget) + 2 if failure_mode == "sample" else 200_000
        tree_pos = np.zeros((cap, 2))
        tree_parent = np.full(cap, -1, dtype=int)
        tree_pos[0] = as_point(start)
        n = 1
        step = cfg.step
        deadline = time.perf_counter() + budget if failure_mode == "time" else None
        while True:
            if failure_mode == "sample":
                if it >= budget:
                    return None, it
            elif time.perf_counter() >= deadline:
                return None, it
            it += 1
            s_rand = pool.next()
            diff = tree_pos[:n] - s_rand
            d2 = np.einsum("ij,ij->i", diff, diff)
            imin = int(np.argmin(d2))
            dmin = math.sqrt(float(d2[imin]))
            if dmin < 1e-12:
                continue
            s_new = s_rand if dmin <= step else tree_pos[imin] + (step / dmin) * (s_rand - tree_pos[imin])
            if float(geom.fan_clearance(tree_pos[imin][None, :], s_new)[0]) < clearance - 1e-12:
                continue
            if n >= cap:
                return None, it
            tree_pos[n] = s_new
            tree_parent[n] = imin
            n += 1
            if np.linalg.norm(s_new - goal) <= cfg.connect_radius \
                    and float(geom.fan_clearance(s_new[None, :], goal)[0]) >= clearance - 1e-12:
                idx = [n - 1]
                while tree_parent[idx[-1]] >= 0:
                    idx.append(int(tree_parent[idx[-1]]))
                wps = tree_pos[idx[::-1]]
                if np.linalg.norm(s_new - goal) > 1e-12:
                    wps = np.vstack([wps, goal])
                return wps, it
    except NoPathFound:
        return None, it


def mcpp_plan(scene: Scene, start, goal, mc_err: float = 0.5,
              failure_mode: str = "sample", budget: float = 20_000,
              seed: int = 0, config: Optional[PlannerConfig] = None) -> McppResult:
    """Max-clearance planning: bisect the largest clearance that still plans.

    Clearance bounds come from half the min/max pure-check passage widths
    over obstacle pairs. Each round plans with a clearance floor and fails
    once the sample or time budget is exhausted; success raises the lower
    bound, failure lowers the upper one.
    """
    if failure_mode not in ("sample", "time"):
        raise ValueError(f"unknown failure mode {failure_mode!r}")
    t0 = time.perf_counter()
    cfg = (config or PlannerConfig()).resolved(scene)
    geom = SceneGeom(scene.detection_polygons())
    start = as_point(start)
    goal = as_point(goal)
    if not scene.in_bounds(start) or not scene.in_bounds(goal):
        raise InvalidEndpoint("start or goal outside the workspace")
    pure = detect_passages(scene, "pure", include_walls=False)
    if not pure.passages:
        raise NoPathFound("no passages to bound the clearance search")
    _, _, widths = pure.arrays
    lower = float(widths.min()) / 2.0
    upper = float(widths.max()) / 2.0
    rng = np.random.default_rng(seed)
    rounds = 1
    wps, used = _plan_with_clearance(scene, geom, start, goal, lower, failure_mode, budget, rng, cfg)
    if wps is None:
        raise NoPathFound(f"no path even at the minimum clearance {lower:.3f}")
    while upper - lower > mc_err:
        rounds += 1
        mid = lower + (upper - lower) / 2.0
        got, it = _plan_with_clearance(scene, geom, start, goal, mid, failure_mode, budget, rng, cfg)
        used += it
        if got is not None:
            lower = mid
            wps = got
        else:
            upper = mid
    path = Polyline(wps)
    traversal = recompute_traversal(path, detect_passages(scene, "pure"))
    min_width = min((p.width for p in traversal), default=math.inf)
    elapsed = time.perf_counter() - t0
    plan = PlanResult(
        path=path,
        traversal=traversal,
        length=path.length,
        min_width=min_width,
        cost=path.length,
        samples_used=used,
        wall_time=elapsed,
        mode="pure",
        cost_kind="length",
        k_p=0.0,
        seed=seed,
    )
    return McppResult(plan=plan, mc=lower, rounds=rounds, wall_time=elapsed)
