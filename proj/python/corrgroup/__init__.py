"""Correspondence grouping for 3D rigid registration."""

from ._corrgroup import (
    ALGORITHMS,
    AlgorithmParams,
    ComputationError,
    Correspondence,
    CorrespondenceSet,
    GroupingResult,
    LocalReferenceFrame,
    PointCloud,
    RigidTransform,
    ValidationError,
    compute_resolution,
    estimate_rigid_transform,
    group,
    load_correspondences,
    load_transform,
    make_test_model,
    otsu_threshold,
    principal_eigenvector,
    read_ply,
    run_sweep,
    save_correspondences,
    save_transform,
    score,
    synthesize,
    write_ply,
)

__all__ = [
    "ALGORITHMS",
    "AlgorithmParams",
    "ComputationError",
    "Correspondence",
    "CorrespondenceSet",
    "GroupingResult",
    "LocalReferenceFrame",
    "PointCloud",
    "RigidTransform",
    "ValidationError",
    "compute_resolution",
    "estimate_rigid_transform",
    "group",
    "load_correspondences",
    "load_transform",
    "make_test_model",
    "otsu_threshold",
    "principal_eigenvector",
    "read_ply",
    "run_sweep",
    "save_correspondences",
    "save_transform",
    "score",
    "synthesize",
    "write_ply",
]
