"""Mesh-free Poisson solver with SIREN networks and recursive error correction."""

from ._core import (
    ArchitectureConfig,
    CorrectionStack,
    GdgmError,
    Network,
    TrainConfig,
    builtin_problem_names,
    evaluation_set,
    exact_solution,
    extend_corrections,
    forward_with_laplacian,
    init_siren,
    load_checkpoint,
    make_network,
    relative_error,
    residual_fk,
    run_error_correction,
    sample_boundary,
    sample_interior,
    save_checkpoint,
    train_from_config,
)

__all__ = [
    "ArchitectureConfig",
    "CorrectionStack",
    "GdgmError",
    "Network",
    "TrainConfig",
    "builtin_problem_names",
    "evaluation_set",
    "exact_solution",
    "extend_corrections",
    "forward_with_laplacian",
    "init_siren",
    "load_checkpoint",
    "make_network",
    "relative_error",
    "residual_fk",
    "run_error_correction",
    "sample_boundary",
    "sample_interior",
    "save_checkpoint",
    "train_from_config",
]
