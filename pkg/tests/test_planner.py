import math

import numpy as np
import pytest

import helpers
from helpers import rect
from pathset import (
    CostConfig,
    GeneratorSpec,
    InvalidEndpoint,
    NoPathFound,
    Passage,
    PassageMap,
    PlanningTree,
    Scene,
    edge_crossings,
    generate_scene,
    mcpp_plan,
    paopp_plan,
    recompute_traversal,
    planning_passages,
)
from pathset.geometry import Polyline


def vertical_passage(x, y0, y1, ids=(0, 1)):
    return Passage(ids, np.array([x, y0]), np.array([x, y1]), y1 - y0)


# ---------------------------------------------------------------------------
# Cost configuration
# ---------------------------------------------------------------------------

def test_ratio_cost_degenerates_to_length_without_passages():
    cost = CostConfig("ratio")
    assert cost.value(40.0, np.inf) == 40.0
    assert cost.value(40.0, 5.0) == pytest.approx(8.0)


def test_weighted_cost_prefers_wider_passages():
    cost = CostConfig("weighted", 10.0)
    assert cost.value(40.0, 5.0) < cost.value(40.0, 1.0)
    assert cost.value(10.0, np.inf) < cost.value(10.0, 100.0)  # untouched beats touched


def test_cost_validation():
    with pytest.raises(ValueError):
        CostConfig("weighted", -1.0)
    with pytest.raises(ValueError):
        CostConfig("nonsense")


# ---------------------------------------------------------------------------
# Edge crossings
# ---------------------------------------------------------------------------

def test_edge_crossing_single_passage():
    pmap = PassageMap([vertical_passage(5, 0, 3)], "pure")
    hits = edge_crossings((0, 1), (10, 1), pmap)
    assert len(hits) == 1
    assert np.allclose(hits[0][1], [5, 1])


def test_edge_parallel_no_crossing():
    pmap = PassageMap([vertical_passage(5, 0, 3)], "pure")
    assert edge_crossings((0, 4), (10, 4), pmap) == []


def test_edge_crossings_ordered_along_edge():
    pmap = PassageMap([vertical_passage(8, 0, 3, (2, 3)), vertical_passage(4, 0, 3, (0, 1))], "pure")
    hits = edge_crossings((0, 1), (10, 1), pmap)
    assert [h[0].ids for h in hits] == [(0, 1), (2, 3)]


def test_recompute_traversal_zigzag_recross():
    pmap = PassageMap([vertical_passage(5, 0, 4)], "pure")
    path = Polyline([[0, 1], [7, 1], [3, 2], [10, 2]])
    trav = recompute_traversal(path, pmap)
    assert [p.ids for p in trav] == [(0, 1), (0, 1), (0, 1)]


def test_recompute_traversal_waypoint_on_passage_counted_once():
    pmap = PassageMap([vertical_passage(5, 0, 4)], "pure")
    path = Polyline([[0, 1], [5, 1], [10, 1]])  # waypoint exactly on the segment
    trav = recompute_traversal(path, pmap)
    assert [p.ids for p in trav] == [(0, 1)]


# ---------------------------------------------------------------------------
# Tree updates
# ---------------------------------------------------------------------------

def test_update_min_rule_on_crossing():
    cost = CostConfig("weighted", 10.0)
    tree = PlanningTree(8, (0, 0), cost)
    a = tree.add(np.array([1.0, 0.0]), 0, 1.0, 5.0)   # crosses width 5
    b = tree.add(np.array([2.0, 0.0]), a, 1.0, 2.0)   # crosses width 2
    assert tree.f_p[a] == 5.0
    assert tree.f_p[b] == 2.0
    c = tree.add(np.array([3.0, 0.0]), b, 1.0, np.inf)  # crosses nothing
    assert tree.f_p[c] == 2.0


def test_update_rejects_worse_candidate():
    cost = CostConfig("weighted", 10.0)
    tree = PlanningTree(8, (0, 0), cost)
    a = tree.add(np.array([1.0, 0.0]), 0, 1.0, np.inf)
    b = tree.add(np.array([2.0, 0.0]), a, 1.0, np.inf)
    f_before = tree.f[b]
    assert not tree.update_node_cost(0, b, 5.0, np.inf)  # longer route, same widths
    assert tree.parent[b] == a and tree.f[b] == f_before


def test_update_adopts_better_parent_and_propagates():
    cost = CostConfig("weighted", 10.0)
    tree = PlanningTree(8, (0, 0), cost)
    a = tree.add(np.array([3.0, 0.0]), 0, 3.0, np.inf)
    b = tree.add(np.array([3.0, 1.0]), a, 1.0, np.inf)
    child = tree.add(np.array([3.0, 2.0]), b, 1.0, np.inf)
    # direct edge root -> b is shorter than via a
    assert tree.update_node_cost(0, b, math.sqrt(10.0), np.inf)
    assert tree.parent[b] == 0
    assert tree.length[child] == pytest.approx(math.sqrt(10.0) + 1.0)
    assert tree.f[child] == pytest.approx(cost.value(tree.length[child], np.inf))


# ---------------------------------------------------------------------------
# Planning behavior
# ---------------------------------------------------------------------------

def test_empty_scene_near_straight():
    scene = Scene(50, 30, [])
    straight = math.hypot(40, 20)
    for seed in range(10):
        res = paopp_plan(scene, (5, 5), (45, 25), CostConfig("weighted", 10.0),
                         n_samples=3000, seed=seed)
        assert res.length <= 1.05 * straight


def test_deterministic_given_seed():
    scene = generate_scene(GeneratorSpec(obstacle_count=12, side_length=1.5, seed=2))
    a = paopp_plan(scene, (3, 27), (47, 3), n_samples=1200, seed=9)
    b = paopp_plan(scene, (3, 27), (47, 3), n_samples=1200, seed=9)
    assert np.array_equal(a.path.waypoints, b.path.waypoints)
    assert a.cost == b.cost


def test_cost_monotone_in_sample_budget():
    scene = generate_scene(GeneratorSpec(obstacle_count=12, side_length=1.5, seed=2))
    costs = [paopp_plan(scene, (3, 27), (47, 3), n_samples=n, seed=4).cost
             for n in (500, 1000, 2000)]
    assert costs[0] >= costs[1] - 1e-12 >= costs[2] - 2e-12


def test_returned_path_collision_free():
    scene = generate_scene(GeneratorSpec(obstacle_count=25, side_length=1.5, seed=6))
    res = paopp_plan(scene, (3, 27), (47, 3), n_samples=1500, seed=1)
    assert not helpers.shapely_path_collides(res.path, scene)
    from pathset import path_collides

    assert not path_collides(res.path, scene, resolution=0.1)


def test_tree_invariants_after_planning():
    scene = generate_scene(GeneratorSpec(obstacle_count=15, side_length=1.5, seed=3))
    res, tree = paopp_plan(scene, (3, 27), (47, 3), n_samples=800, seed=7,
                           return_tree=True)
    assert tree.f[0] == tree.cost.value(0.0, np.inf) and math.isinf(tree.f_p[0])
    for i in range(1, tree.n):
        p = tree.parent[i]
        assert tree.length[i] >= tree.length[p] - 1e-12          # Len non-decreasing
        assert tree.f_p[i] <= tree.f_p[p] + 1e-12                # min width non-increasing
        assert tree.f_p[i] == min(tree.f_p[p], tree.f_cur[i])
        length, f_p, f = tree.recompute_chain(i)
        assert tree.f[i] == pytest.approx(f, abs=1e-6)
        assert tree.length[i] == pytest.approx(length, abs=1e-9)


def test_traversal_consistent_with_tracked_min_width():
    scene = generate_scene(GeneratorSpec(obstacle_count=20, side_length=1.5, seed=9))
    for seed in range(3):
        res = paopp_plan(scene, (3, 27), (47, 3), n_samples=1200, seed=seed)
        pmap = planning_passages(scene, "extended", (3, 27), (47, 3))
        trav = recompute_traversal(res.path, pmap)
        assert [p.ids for p in trav] == [p.ids for p in res.traversal]
        tracked = res.min_width
        recomputed = min((p.width for p in trav), default=math.inf)
        assert tracked == pytest.approx(recomputed, abs=1e-9)


def test_two_corridor_cost_weight_behavior():
    scene = helpers.two_corridor_scene()
    narrow, wide = (0, 1), (1, 2)
    res = paopp_plan(scene, (5, 5), (45, 5), CostConfig("weighted", 1.0),
                     n_samples=4000, seed=3)
    assert narrow in {p.ids for p in res.traversal}
    res = paopp_plan(scene, (5, 5), (45, 5), CostConfig("weighted", 100.0),
                     n_samples=4000, seed=3)
    ids = {p.ids for p in res.traversal}
    assert wide in ids and narrow not in ids
    res = paopp_plan(scene, (5, 5), (45, 5), CostConfig("ratio"),
                     n_samples=4000, seed=3)
    ids = {p.ids for p in res.traversal}
    assert wide in ids and narrow not in ids


def test_pure_and_extended_equivalent_when_endpoints_clear():
    scene = generate_scene(GeneratorSpec(obstacle_count=12, side_length=1.5, seed=17))
    start, goal = (3, 27), (47, 3)
    a = paopp_plan(scene, start, goal, CostConfig("weighted", 10.0), mode="pure",
                   n_samples=1500, seed=11)
    b = paopp_plan(scene, start, goal, CostConfig("weighted", 10.0), mode="extended",
                   n_samples=1500, seed=11)
    assert np.array_equal(a.path.waypoints, b.path.waypoints)
    assert a.cost == pytest.approx(b.cost, abs=1e-6)


def test_no_path_found_when_goal_sealed():
    box = [rect(22, 12, 23, 18), rect(27, 12, 28, 18), rect(23, 12, 27, 13), rect(23, 17, 27, 18)]
    scene = Scene(50, 30, box, walls_as_obstacles=False)
    with pytest.raises(NoPathFound):
        paopp_plan(scene, (5, 5), (25, 15), n_samples=400, seed=0)


def test_invalid_endpoint_raises():
    scene = Scene(50, 30, [rect(20, 10, 30, 20)], walls_as_obstacles=False)
    with pytest.raises(InvalidEndpoint):
        paopp_plan(scene, (25, 15), (45, 25), n_samples=100, seed=0)
    with pytest.raises(InvalidEndpoint):
        paopp_plan(scene, (5, 5), (60, 15), n_samples=100, seed=0)


def test_type4_passages_preserved_for_enclosed_endpoints():
    # endpoint inside the rejected passage's disc keeps that passage in the map
    scene = Scene(50, 30, [rect(10, 10, 12, 20), rect(18, 10, 20, 20),
                           rect(14.5, 13, 15.5, 14)], walls_as_obstacles=False)
    wide_pair = (0, 1)
    base = planning_passages(scene, "extended", (2, 2), (48, 28))
    assert wide_pair not in base.pair_set()
    enclosed = planning_passages(scene, "extended", (15, 17), (48, 28))
    assert wide_pair in enclosed.pair_set()


# ---------------------------------------------------------------------------
# Max-clearance baseline
# ---------------------------------------------------------------------------

def test_mcpp_corridor_converges_to_half_width():
    scene = helpers.mcpp_corridor_scene()
    res = mcpp_plan(scene, (5, 8), (45, 8), mc_err=0.5, failure_mode="sample",
                    budget=20000, seed=2)
    assert res.mc == pytest.approx(2.0, abs=0.5)
    assert not helpers.shapely_path_collides(res.plan.path, scene)


def test_mcpp_two_obstacles_exact_half_width():
    scene = Scene(50, 30, [rect(20, 13, 22, 15), rect(20, 18, 22, 20)],
                  walls_as_obstacles=False)
    res = mcpp_plan(scene, (5, 15), (45, 15), mc_err=0.5, failure_mode="sample",
                    budget=4000, seed=1)
    assert res.mc == pytest.approx(1.5, abs=1e-9)  # passage width 3
    assert res.rounds == 1


def test_mcpp_no_path_when_sealed():
    box = [rect(22, 12, 23, 18), rect(27, 12, 28, 18), rect(23, 12, 27, 13),
           rect(23, 17, 27, 18), rect(40, 5, 41, 6), rect(44, 5, 45, 6)]
    scene = Scene(50, 30, box, walls_as_obstacles=False)
    with pytest.raises(NoPathFound):
        mcpp_plan(scene, (5, 5), (25, 15), mc_err=0.5, failure_mode="sample",
                  budget=500, seed=0)


def test_mcpp_time_budget_mode_runs():
    scene = helpers.mcpp_corridor_scene()
    res = mcpp_plan(scene, (5, 8), (45, 8), mc_err=1.0, failure_mode="time",
                    budget=0.4, seed=3)
    assert res.mc >= 0.75
