"""Spectral rounding of approximate PVMs and synchronous correlations of tracial states."""

__version__ = "0.1.0"

from ._config import get_tolerances, set_tolerances, tolerance_context
from .correlations import (
    ConvergenceReport,
    CorrelationTable,
    check_table,
    correlation_from_rep,
    gram_psd_check,
    pipeline_correlations,
    table_distance,
)
from .estimators import CorrelationExtractor, SeesawOptimizer, SpectralRounder
from .games import Game, classical_sync_value, coloring_game, game_value, seesaw_optimize
from .lift import (
    ApproxRepSequence,
    DefectReport,
    MatrixSequence,
    lift_sequence,
    orthogonalize_tuple,
    seq_two_norm_tail,
    spectral_round,
    unitalize_tuple,
)
from .linalg import (
    EigenSystem,
    StateVectorSpec,
    eig_hermitian,
    is_positive_contraction,
    normalized_trace,
    spectral_projection_upper_half,
    state_two_norm,
)
from .player import (
    PlayerRep,
    PositiveTuple,
    TraceSpec,
    apply_trace,
    deterministic_rep,
    perturb_rep,
    random_rep,
    validate_player_rep,
)

__all__ = [
    "CorrelationExtractor",
    "SeesawOptimizer",
    "SpectralRounder",
    "Game",
    "classical_sync_value",
    "coloring_game",
    "game_value",
    "seesaw_optimize",
    "get_tolerances",
    "set_tolerances",
    "tolerance_context",
    "ConvergenceReport",
    "CorrelationTable",
    "check_table",
    "correlation_from_rep",
    "gram_psd_check",
    "pipeline_correlations",
    "table_distance",
    "ApproxRepSequence",
    "DefectReport",
    "MatrixSequence",
    "lift_sequence",
    "orthogonalize_tuple",
    "seq_two_norm_tail",
    "spectral_round",
    "unitalize_tuple",
    "EigenSystem",
    "StateVectorSpec",
    "eig_hermitian",
    "is_positive_contraction",
    "normalized_trace",
    "spectral_projection_upper_half",
    "state_two_norm",
    "PlayerRep",
    "PositiveTuple",
    "TraceSpec",
    "apply_trace",
    "deterministic_rep",
    "perturb_rep",
    "random_rep",
    "validate_player_rep",
]
