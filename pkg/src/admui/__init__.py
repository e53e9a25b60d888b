"""Bivariate partial information decomposition by alternating divergence minimization."""

__version__ = "0.1.0"

from ._kernels import backend_name, set_backend, using_backend
from .core import SolveOutcome, SolverConfig, SolveStatus, StopMode, admui
from .decomposition import DecompositionResult, decompose, decompose_table, unique_information
from .errors import (
    CapReachedWarning,
    DegenerateIterate,
    DimensionMismatch,
    DimensionTooLarge,
    EmptyAfterFiltering,
    InconsistentMarginals,
    MalformedFile,
    NegativeMass,
    NotNormalized,
    PIDError,
    UnknownColumn,
    UnparseableNumeric,
    VanishingIterateWarning,
    ZeroConditioningEvent,
)
from .ingest import ColumnSpec, DatasetConfig, IngestReport, load_joint, load_joint_from_table, save_joint
from .iprojection import DistanceStop, EtaGapStop, ProjectionResult, ProjectionTarget, i_project
from .oracle import brute_force_union_information, surrogate_optimum
from .probkit import (
    Alphabet,
    InfoValue,
    JointDistribution,
    MarginalPair,
    conditional_mutual_information,
    entropy,
    gen_binary_gate,
    gen_copy,
    gen_simplex_uniform,
    mutual_information,
    validate_joint,
)

__all__ = [
    "admui",
    "Alphabet",
    "backend_name",
    "brute_force_union_information",
    "CapReachedWarning",
    "ColumnSpec",
    "conditional_mutual_information",
    "DatasetConfig",
    "decompose",
    "decompose_table",
    "DecompositionResult",
    "DegenerateIterate",
    "DimensionMismatch",
    "DimensionTooLarge",
    "DistanceStop",
    "EmptyAfterFiltering",
    "entropy",
    "EtaGapStop",
    "gen_binary_gate",
    "gen_copy",
    "gen_simplex_uniform",
    "i_project",
    "InconsistentMarginals",
    "InfoValue",
    "IngestReport",
    "JointDistribution",
    "load_joint",
    "load_joint_from_table",
    "MalformedFile",
    "MarginalPair",
    "mutual_information",
    "NegativeMass",
    "NotNormalized",
    "PIDError",
    "ProjectionResult",
    "ProjectionTarget",
    "save_joint",
    "set_backend",
    "SolveOutcome",
    "SolverConfig",
    "SolveStatus",
    "StopMode",
    "surrogate_optimum",
    "unique_information",
    "UnknownColumn",
    "UnparseableNumeric",
    "using_backend",
    "validate_joint",
    "VanishingIterateWarning",
    "ZeroConditioningEvent",
]
