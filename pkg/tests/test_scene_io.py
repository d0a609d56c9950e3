import json

import numpy as np
import pytest

import helpers
from pathset import (
    ConvexPolygon,
    GeneratorSpec,
    ParseError,
    PlacementFailure,
    Scene,
    detect_both,
    generate_scene,
    load_scene,
    render_svg,
    save_scene,
    write_stats_csv,
)
from pathset.geometry import polygons_overlap


def test_generator_deterministic():
    spec = GeneratorSpec(obstacle_count=20, side_length=1.0, seed=99)
    assert generate_scene(spec) == generate_scene(spec)


def test_generator_zero_count():
    assert generate_scene(GeneratorSpec(obstacle_count=0, seed=1)).obstacles == []


def test_generator_disjointness_oracle():
    scene = generate_scene(GeneratorSpec(obstacle_count=100, side_length=1.0, seed=4))
    obs = scene.obstacles
    assert len(obs) == 100
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            assert not polygons_overlap(obs[i], obs[j])
            assert helpers.shapely_distance(obs[i], obs[j]) > 0


def test_generator_invariants_fuzz():
    # a slice of the fuzz sweep; the acceptance suite runs the full breadth
    for seed in range(150):
        scene = generate_scene(GeneratorSpec(obstacle_count=12, side_length=1.5, seed=seed))
        assert len(scene.obstacles) == 12  # Scene validation ran in the constructor


def test_generator_density_precondition():
    with pytest.raises(ValueError):
        generate_scene(GeneratorSpec(obstacle_count=2, side_length=6.0, seed=0,
                                     width=10, height=10))


def test_generator_placement_failure():
    with pytest.raises(PlacementFailure):
        generate_scene(GeneratorSpec(obstacle_count=2, side_length=5.4, seed=0,
                                     width=10, height=10, shapes=("square",)))


def test_scene_rejects_out_of_bounds():
    with pytest.raises(ValueError):
        Scene(10, 10, [helpers.rect(8, 8, 12, 12)])


def test_scene_rejects_overlap():
    with pytest.raises(ValueError):
        Scene(10, 10, [helpers.rect(1, 1, 3, 3), helpers.rect(2, 2, 4, 4)])


def test_polygon_rejects_nonconvex():
    with pytest.raises(ValueError):
        ConvexPolygon(np.array([[0, 0], [2, 0], [2, 2], [1, 0.5], [0, 2]]))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_scene_roundtrip_exact(tmp_path):
    scene = generate_scene(GeneratorSpec(obstacle_count=15, side_length=1.3, seed=8))
    path = tmp_path / "scene.json"
    save_scene(scene, path)
    assert load_scene(path) == scene


def test_scene_roundtrip_3d(tmp_path):
    scene = helpers.staircase_scene()
    path = tmp_path / "scene.json"
    save_scene(scene, path)
    back = load_scene(path)
    assert back == scene
    assert [o.height for o in back.obstacles] == [1.0, 2.0, 3.0]


def test_load_malformed_json_names_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema_version": 1, "width": 10, "height": 10}))
    with pytest.raises(ParseError, match="obstacles"):
        load_scene(path)
    path.write_text("{not json")
    with pytest.raises(ParseError, match="line"):
        load_scene(path)
    path.write_text(json.dumps({"schema_version": 99, "width": 10, "height": 10,
                                "obstacles": []}))
    with pytest.raises(ParseError, match="schema_version"):
        load_scene(path)


def test_plan_and_pathset_roundtrip(tmp_path):
    from pathset import PathSet, PlanResult, paopp_plan

    scene = helpers.gap_scene()
    res = paopp_plan(scene, (5, 15), (45, 15), n_samples=600, seed=3)
    back = PlanResult.from_dict(json.loads(json.dumps(res.to_dict())))
    assert back == res

    from pathset import TeamConfig, generate_path_set

    team = TeamConfig(np.array([[5, 14], [5, 16]]), np.array([[45, 14], [45, 16]]))
    ps, _ = generate_path_set(scene, team, n_samples=800, seed=2)
    back = PathSet.from_dict(json.loads(json.dumps(ps.to_dict())))
    assert back == ps


def test_scene_schema_validates():
    import jsonschema
    from pathlib import Path

    schema_path = Path(__file__).resolve().parent.parent / "schema" / "scene.schema.json"
    schema = json.loads(schema_path.read_text())
    scene = generate_scene(GeneratorSpec(obstacle_count=5, seed=0))
    jsonschema.validate(scene.to_dict(), schema)


# ---------------------------------------------------------------------------
# SVG / CSV
# ---------------------------------------------------------------------------

def test_svg_contains_passage_elements():
    scene = Scene(50, 30, [helpers.rect(10, 10, 11, 11), helpers.rect(14, 10, 15, 11)],
                  walls_as_obstacles=False)
    pure, ext = detect_both(scene)
    svg = render_svg(scene, passages=ext, pure_passages=pure)
    assert svg.count('class="passage-ext"') == 1
    assert svg.count("<polygon") == 2
    assert svg.startswith("<svg")


def test_svg_pathset_styles():
    from pathset import PathSet, Polyline

    scene = Scene(20, 20, [])
    ps = PathSet([Polyline([[1, 1], [19, 19]]), Polyline([[1, 2], [19, 18]])], 0, [])
    svg = render_svg(scene, path_set=ps)
    assert svg.count('class="path-pivot"') == 1
    assert svg.count('class="path"') == 1


def test_csv_header_and_rows(tmp_path):
    out = tmp_path / "stats.csv"
    write_stats_csv([{"a": 1, "b": 2.5}, {"a": 3}], out, ("a", "b"))
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "1,2.5"
    assert lines[2] == "3,"
