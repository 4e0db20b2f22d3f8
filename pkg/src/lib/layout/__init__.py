from .decompose import layout_trees, peel_trees, symmetric_tree_layout
from .distribution import (
    NormalizationScale,
    RunResult,
    SpreadStats,
    distribution_phase,
    distribution_runs,
    normalize_ar,
    remove_overlaps,
    run_from,
    spread_stats,
    stress,
    stress_minimize_step,
)
from .geometry import crossing_points, overlapping_pairs, route_length, scale_about, segment_intersection
from .orthogonalize import (
    GridLayout,
    PlanarizedCore,
    align_neighbors,
    grid_pitch,
    orthogonalize_core,
    planarize,
    route_orthogonal,
    snap_to_grid,
)
from .pipeline import STAGES, PipelineError, PipelineResult, run_pipeline
from .refine import final_rescale, force_fit, force_fit_with_report, post_scale_baseline, refine_layout
from .tree_attach import (
    Face,
    PlacementCandidate,
    apply_expansion,
    attach_trees,
    compact_and_route,
    enumerate_candidates,
    enumerate_faces,
    expansion_cost,
    placement_cost,
    projected_ar,
)

__all__ = [
    "layout_trees",
    "peel_trees",
    "symmetric_tree_layout",
    "NormalizationScale",
    "RunResult",
    "SpreadStats",
    "distribution_phase",
    "distribution_runs",
    "normalize_ar",
    "remove_overlaps",
    "run_from",
    "spread_stats",
    "stress",
    "stress_minimize_step",
    "crossing_points",
    "overlapping_pairs",
    "route_length",
    "scale_about",
    "segment_intersection",
    "GridLayout",
    "PlanarizedCore",
    "align_neighbors",
    "grid_pitch",
    "orthogonalize_core",
    "planarize",
    "route_orthogonal",
    "snap_to_grid",
    "STAGES",
    "PipelineError",
    "PipelineResult",
    "run_pipeline",
    "final_rescale",
    "force_fit",
    "force_fit_with_report",
    "post_scale_baseline",
    "refine_layout",
    "Face",
    "PlacementCandidate",
    "apply_expansion",
    "attach_trees",
    "compact_and_route",
    "enumerate_candidates",
    "enumerate_faces",
    "expansion_cost",
    "placement_cost",
    "projected_ar",
]
