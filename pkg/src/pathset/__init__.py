"""Homotopic path-set planning toolkit.

Sparse passage detection with an extended visibility check, passage-aware
optimal single-path planning on an RRT* backbone, and coordinated path-set
generation by deformable path transfer, plus a benchmark harness.
"""

from .errors import (
    DegeneratePath,
    InfeasiblePassage,
    InvalidEndpoint,
    MissingIntersection,
    NoPathFound,
    OverlappingObstacles,
    ParseError,
    PassageTooNarrow,
    PathsetError,
    PlacementFailure,
)
from .geometry import (
    EPS,
    ConvexPolygon,
    Polyline,
    SceneGeom,
    closest_points,
    disc_intersects_polygon,
    segment_intersects_polygon,
    segments_intersection,
)
from .passages import (
    Passage,
    PassageMap,
    TranslatedSegment,
    detect_both,
    detect_passages,
    detect_passages_3d,
    enumerate_generic,
    extended_visibility_valid,
    pure_visibility_valid,
    translated_segments,
)
from .planner import (
    CostConfig,
    McppResult,
    PlannerConfig,
    PlanningTree,
    PlanResult,
    edge_crossings,
    mcpp_plan,
    paopp_plan,
    planning_passages,
    recompute_traversal,
    traversal_details,
)
from .scene_io import (
    GeneratorSpec,
    Scene,
    generate_scene,
    load_scene,
    render_svg,
    save_scene,
    write_stats_csv,
)
from .transfer import (
    Chord,
    PathSet,
    TeamConfig,
    chord_on_passage,
    chord_via_normal,
    coordinated_deform,
    generate_path_set,
    nearby_obstacles,
    path_collides,
    place_reference_point,
    reposition_path,
    select_pivot,
    separately_plan,
    strong_homotopic_like,
    transfer_path,
    verify_path_set,
)

__version__ = "0.1.0"
