"""Benchmark harness reproducing the passage, planning, and path-set statistics.

Every trial owns a recorded seed so any benchmark replays exactly;
wall-clock columns are the only nondeterministic CSV content. Trials can
fan out over a process pool, with results merged in trial-key order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import InvalidEndpoint, NoPathFound, PathsetError
from .geometry import SceneGeom
from .passages import detect_both
from .planner import CostConfig, mcpp_plan, paopp_plan
from .scene_io import GeneratorSpec, Scene, generate_scene
from .transfer import TeamConfig, generate_path_set, separately_plan

PASSAGE_COLUMNS = ("experiment", "obstacle_count", "side_length", "trial", "seed",
                   "pure_count", "ext_count", "detect_ms")
PLAN_COLUMNS = ("experiment", "obstacle_count", "side_length", "trial", "seed",
                "check_mode", "samples", "cost_kind", "k_p", "length", "min_width",
                "cost", "traversal_len", "plan_ms")
PATHSET_COLUMNS = ("experiment", "obstacle_count", "k_paths", "trial", "seed",
                   "method", "plan_cost", "total_ms", "plan_ms")


def trial_seed(master: int, *key: int) -> int:
    """Deterministic per-trial seed derived from the master seed and a key."""
    return int(np.random.SeedSequence([int(master), *map(int, key)]).generate_state(1)[0])


def _run_trials(worker, specs: Sequence[tuple], jobs: int) -> list:
    if jobs <= 1:
        return [worker(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, specs))


# ---------------------------------------------------------------------------
# Passage statistics
# ---------------------------------------------------------------------------

def _passage_trial(spec):
    count, side, trial, seed = spec
    scene = generate_scene(GeneratorSpec(obstacle_count=count, side_length=side, seed=seed))
    t0 = time.perf_counter()
    pure, ext = detect_both(scene, include_walls=False)
    ms = 1000.0 * (time.perf_counter() - t0)
    return {
        "experiment": "passages",
        "obstacle_count": count,
        "side_length": side,
        "trial": trial,
        "seed": seed,
        "pure_count": len(pure.passages),
        "ext_count": len(ext.passages),
        "detect_ms": round(ms, 3),
    }


def bench_passages(counts: Sequence[int], sides: Sequence[float], trials: int,
                   master_seed: int, jobs: int = 1) -> list[dict]:
    specs = [
        (count, side, t, trial_seed(master_seed, ci, si, t))
        for ci, count in enumerate(counts)
        for si, side in enumerate(sides)
        for t in range(trials)
    ]
    return _run_trials(_passage_trial, specs, jobs)


def passage_count_summary(records: Iterable[dict]) -> dict:
    """Linear fits of mean passage counts against obstacle count, plus the ext/pure ratio."""
    by_count: dict[int, list] = {}
    ratios = []
    for r in records:
        by_count.setdefault(r["obstacle_count"], []).append(r)
        if r["pure_count"] > 0:
            ratios.append(r["ext_count"] / r["pure_count"])
    counts = sorted(by_count)
    mean_pure = [float(np.mean([r["pure_count"] for r in by_count[c]])) for c in counts]
    mean_ext = [float(np.mean([r["ext_count"] for r in by_count[c]])) for c in counts]
    out = {
        "counts": counts,
        "mean_pure": mean_pure,
        "mean_ext": mean_ext,
        "mean_ratio": float(np.mean(ratios)) if ratios else math.nan,
    }
    if len(counts) >= 3:
        fit_p = stats.linregress(counts, mean_pure)
        fit_e = stats.linregress(counts, mean_ext)
        out.update(
            slope_pure=fit_p.slope, r2_pure=fit_p.rvalue ** 2,
            slope_ext=fit_e.slope, r2_ext=fit_e.rvalue ** 2,
        )
    return out


def passage_size_summary(records: Iterable[dict]) -> dict:
    """Mean counts per side length and the pure-count monotonicity statistic."""
    by_side: dict[float, list] = {}
    for r in records:
        by_side.setdefault(r["side_length"], []).append(r)
    sides = sorted(by_side)
    mean_pure = [float(np.mean([r["pure_count"] for r in by_side[s]])) for s in sides]
    mean_ext = [float(np.mean([r["ext_count"] for r in by_side[s]])) for s in sides]
    rho = stats.spearmanr(sides, mean_pure).statistic if len(sides) >= 3 else math.nan
    grand = float(np.mean(mean_ext))
    spread = max(abs(m - grand) / grand for m in mean_ext) if grand > 0 else math.nan
    return {
        "sides": sides,
        "mean_pure": mean_pure,
        "mean_ext": mean_ext,
        "pure_spearman": float(rho),
        "ext_rel_spread": float(spread),
    }


# ---------------------------------------------------------------------------
# Planning benchmarks
# ---------------------------------------------------------------------------

def _free_endpoints(scene: Scene, margin: float = 1.5,
                    clearance: float = 0.3) -> tuple[np.ndarray, np.ndarray]:
    """Top-left / bottom-right endpoints, nudged onto clear ground."""
    geom = SceneGeom(scene.detection_polygons())
    lo = np.array([margin, margin])
    hi = np.array([scene.width - margin, scene.height - margin])

    def find(px, py):
        for radius in np.arange(0.0, 12.0, 0.5):
            for ang in np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False):
                cand = np.clip([px + radius * math.cos(ang), py + radius * math.sin(ang)], lo, hi)
                if geom.points_clearance(cand[None, :])[0] > clearance:
                    return cand
        raise InvalidEndpoint(f"no free endpoint near ({px:.1f}, {py:.1f})")

    return find(margin, scene.height - margin), find(scene.width - margin, margin)


def _plan_trial(spec):
    (count, side, trial, seed, samples, kind, k_p) = spec
    scene = generate_scene(GeneratorSpec(obstacle_count=count, side_length=side, seed=seed))
    start, goal = _free_endpoints(scene)
    rows = []
    for mode in ("pure", "extended"):
        try:
            res = paopp_plan(scene, start, goal, CostConfig(kind, k_p), mode=mode,
                             n_samples=samples, seed=seed)
            rows.append({
                "experiment": "plan",
                "obstacle_count": count,
                "side_length": side,
                "trial": trial,
                "seed": seed,
                "check_mode": mode,
                "samples": samples,
                "cost_kind": kind,
                "k_p": k_p,
                "length": round(res.length, 9),
                "min_width": None if math.isinf(res.min_width) else round(res.min_width, 9),
                "cost": round(res.cost, 9),
                "traversal_len": len(res.traversal),
                "plan_ms": round(1000.0 * res.wall_time, 3),
            })
        except (NoPathFound, InvalidEndpoint):
            continue
    return rows


def bench_plan(counts: Sequence[int], trials: int, master_seed: int,
               samples: int = 10_000, cost_kind: str = "weighted", k_p: float = 10.0,
               side: float = 1.0, jobs: int = 1) -> list[dict]:
    specs = [
        (count, side, t, trial_seed(master_seed, ci, t), samples, cost_kind, k_p)
        for ci, count in enumerate(counts)
        for t in range(trials)
    ]
    rows = _run_trials(_plan_trial, specs, jobs)
    return [r for group in rows for r in group]


def plan_speedup_summary(records: Iterable[dict]) -> dict:
    """Mean extended/pure planning-time ratio over trials where both ran."""
    pure: dict[tuple, float] = {}
    ext: dict[tuple, float] = {}
    for r in records:
        key = (r["obstacle_count"], r["trial"])
        (pure if r["check_mode"] == "pure" else ext)[key] = r["plan_ms"]
    keys = sorted(set(pure) & set(ext))
    pure_ms = np.array([pure[k] for k in keys])
    ext_ms = np.array([ext[k] for k in keys])
    return {
        "pairs": len(keys),
        "mean_pure_ms": float(pure_ms.mean()) if keys else math.nan,
        "mean_ext_ms": float(ext_ms.mean()) if keys else math.nan,
        "time_ratio": float(ext_ms.mean() / pure_ms.mean()) if keys else math.nan,
    }


# ---------------------------------------------------------------------------
# Path-set benchmarks
# ---------------------------------------------------------------------------

def random_team(scene: Scene, k: int, seed: int, spread: float = 1.2,
                margin: float = 3.0, clearance: float = 0.8) -> TeamConfig:
    """Clustered start/target formations in free space on opposite map sides."""
    rng = np.random.default_rng(seed)
    geom = SceneGeom(scene.detection_polygons())

    def cluster(x_lo, x_hi):
        for _ in range(4000):
            cx = rng.uniform(x_lo, x_hi)
            cy = rng.uniform(margin + spread, scene.height - margin - spread)
            ang = rng.uniform(0.0, 2.0 * math.pi)
            offs = spread * np.stack([np.cos(ang + 2 * math.pi * np.arange(k) / max(k, 1)),
                                      np.sin(ang + 2 * math.pi * np.arange(k) / max(k, 1))], axis=1)
            if k == 1:
                offs = np.zeros((1, 2))
            pts = np.array([cx, cy]) + offs
            if np.all(geom.points_clearance(pts) > clearance):
                return pts
        raise NoPathFound("could not place a team cluster in free space")

    s0 = cluster(margin, margin + 6.0)
    sd = cluster(scene.width - margin - 6.0, scene.width - margin)
    return TeamConfig(s0, sd)


def _pathset_trial(spec):
    (count, k, trial, seed, samples, k_p, methods) = spec
    scene = generate_scene(GeneratorSpec(obstacle_count=count, side_length=1.5, seed=seed))
    team = random_team(scene, k, trial_seed(seed, 99))
    rows = []
    for method in methods:
        fn = generate_path_set if method == "pt" else separately_plan
        t0 = time.perf_counter()
        try:
            ps, plan = fn(scene, team, CostConfig("weighted", k_p),
                          n_samples=samples, seed=seed)
        except PathsetError as exc:
            rows.append({
                "experiment": "pathset", "obstacle_count": count, "k_paths": k,
                "trial": trial, "seed": seed, "method": method,
                "plan_cost": None, "total_ms": None, "plan_ms": None,
                "error": type(exc).__name__,
            })
            continue
        total_ms = 1000.0 * (time.perf_counter() - t0)
        rows.append({
            "experiment": "pathset", "obstacle_count": count, "k_paths": k,
            "trial": trial, "seed": seed, "method": method,
            "plan_cost": round(plan.cost, 9),
            "total_ms": round(total_ms, 3),
            "plan_ms": round(1000.0 * plan.wall_time, 3),
        })
    return rows


def bench_pathset(counts: Sequence[int], k_values: Sequence[int], trials: int,
                  master_seed: int, samples: int = 3000, k_p: float = 10.0,
                  methods: Sequence[str] = ("pt", "sp"), jobs: int = 1) -> list[dict]:
    specs = [
        (count, k, t, trial_seed(master_seed, ci, ki, t), samples, k_p, tuple(methods))
        for ci, count in enumerate(counts)
        for ki, k in enumerate(k_values)
        for t in range(trials)
    ]
    rows = _run_trials(_pathset_trial, specs, jobs)
    return [r for group in rows for r in group]


def pathset_summary(records: Iterable[dict]) -> dict:
    """Mean PT/SP times per (M, K) plus the PT coefficient of variation across K."""
    times: dict[tuple, list] = {}
    for r in records:
        if r.get("total_ms") is None:
            continue
        times.setdefault((r["method"], r["obstacle_count"], r["k_paths"]), []).append(r["total_ms"])
    mean = {k: float(np.mean(v)) for k, v in times.items()}
    out = {"mean_ms": mean}
    cov = {}
    for m in sorted({k[1] for k in mean if k[0] == "pt"}):
        vals = [v for (meth, mm, _), v in mean.items() if meth == "pt" and mm == m]
        if len(vals) >= 2:
            cov[m] = float(np.std(vals) / np.mean(vals))
    out["pt_cov_across_k"] = cov
    return out


# ---------------------------------------------------------------------------
# MCPP comparison
# ---------------------------------------------------------------------------

def bench_mcpp(counts: Sequence[int], trials: int, master_seed: int,
               samples: int = 2500, mc_budget: int = 5000, mc_err: float = 0.5,
               side: float = 2.0) -> list[dict]:
    rows = []
    for ci, count in enumerate(counts):
        for t in range(trials):
            seed = trial_seed(master_seed, ci, t)
            scene = generate_scene(GeneratorSpec(obstacle_count=count, side_length=side, seed=seed))
            start, goal = _free_endpoints(scene)
            try:
                ext = paopp_plan(scene, start, goal, CostConfig("weighted", 10.0),
                                 mode="extended", n_samples=samples, seed=seed)
                mc = mcpp_plan(scene, start, goal, mc_err=mc_err,
                               failure_mode="sample", budget=mc_budget, seed=seed)
            except (NoPathFound, InvalidEndpoint):
                continue
            rows.append({
                "experiment": "mcpp",
                "obstacle_count": count,
                "trial": t,
                "seed": seed,
                "ext_ms": round(1000.0 * ext.wall_time, 3),
                "mcpp_ms": round(1000.0 * mc.wall_time, 3),
                "mc": round(mc.mc, 6),
                "rounds": mc.rounds,
            })
    return rows
