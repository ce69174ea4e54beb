"""latflow: sparsely connected dynamical systems as state + matrix + rule.

A system is a state vector, a sparse adjacency matrix, and an update rule;
one step gathers each cell's neighborhood through the matvec and pushes the
result through the rule.  Cellular automata, random Boolean networks,
coupled map lattices, and echo-state reservoirs all fit this shape.
"""

from .analysis import (
    CycleReport,
    ReadoutModel,
    Trajectory2D,
    detect_cycle,
    pca_project,
    principal_components,
    train_linear_readout,
)
from .backend import BACKEND, compiled_available
from .engine import DynamicalSystem, StateHistory, load_history
from .errors import (
    ArgumentTooSmall,
    BadStateValue,
    ConfigError,
    DegreeTooLarge,
    DimensionMismatch,
    DuplicateEntry,
    FileFormatError,
    IndexOutOfBounds,
    KeyOutOfTable,
    LatflowError,
    NoConvergence,
    NonFiniteWeight,
    NonIntegerKey,
    NotSquare,
    RuleOutOfRange,
    SingularSystem,
    StencilWiderThanGrid,
    TooFewRows,
)
from .rules import (
    MAP_THEN_MIX,
    MIX_THEN_MAP,
    ContinuousMap,
    CountLUT,
    PatternLUT,
    PerNodeLUT,
    apply_rule,
    elementary_rule,
    game_of_life_rule,
    load_rule,
    random_boolean_tables,
    rule_from_text,
    rule_to_text,
    save_rule,
)
from .sparse import (
    PowerIterationResult,
    SparseMatrix,
    from_triplets,
    is_symmetric,
    load_matrix_market,
    matvec,
    power_iteration,
    save_matrix_market,
    spectral_radius,
    to_dense,
)
from .systems import (
    SystemConfig,
    build_system,
    coupled_map_lattice,
    echo_state_network,
    elementary_ca,
    game_of_life,
    random_boolean_network,
    random_sparse_uniform,
)
from .topology import (
    GridSpec,
    NeighborhoodSpec1D,
    NeighborhoodSpec2D,
    PositionalBase,
    UniformWeights,
    generate_ca_1d,
    generate_ca_2d,
    generate_random_digraph,
    pattern_weights,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentTooSmall",
    "BACKEND",
    "BadStateValue",
    "ConfigError",
    "ContinuousMap",
    "CountLUT",
    "CycleReport",
    "DegreeTooLarge",
    "DimensionMismatch",
    "DuplicateEntry",
    "DynamicalSystem",
    "FileFormatError",
    "GridSpec",
    "IndexOutOfBounds",
    "KeyOutOfTable",
    "LatflowError",
    "MAP_THEN_MIX",
    "MIX_THEN_MAP",
    "NeighborhoodSpec1D",
    "NeighborhoodSpec2D",
    "NoConvergence",
    "NonFiniteWeight",
    "NonIntegerKey",
    "NotSquare",
    "PatternLUT",
    "PerNodeLUT",
    "PositionalBase",
    "PowerIterationResult",
    "ReadoutModel",
    "RuleOutOfRange",
    "SingularSystem",
    "SparseMatrix",
    "StateHistory",
    "StencilWiderThanGrid",
    "SystemConfig",
    "TooFewRows",
    "Trajectory2D",
    "UniformWeights",
    "apply_rule",
    "build_system",
    "compiled_available",
    "coupled_map_lattice",
    "detect_cycle",
    "echo_state_network",
    "elementary_ca",
    "elementary_rule",
    "from_triplets",
    "game_of_life",
    "game_of_life_rule",
    "generate_ca_1d",
    "generate_ca_2d",
    "generate_random_digraph",
    "is_symmetric",
    "load_history",
    "load_matrix_market",
    "load_rule",
    "matvec",
    "pattern_weights",
    "pca_project",
    "power_iteration",
    "principal_components",
    "random_boolean_network",
    "random_boolean_tables",
    "random_sparse_uniform",
    "rule_from_text",
    "rule_to_text",
    "save_matrix_market",
    "save_rule",
    "spectral_radius",
    "to_dense",
    "train_linear_readout",
]
