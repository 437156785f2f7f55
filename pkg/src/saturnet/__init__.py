"""Equilibria, uniqueness classification, and shock analysis for saturated
linear flow networks x = clamp(P'x + c, [0, w])."""

__version__ = "0.1.0"

from .decomposition import (
    Decomposition,
    SinkComponent,
    decompose,
    deficiency_set,
    is_out_connected,
    strongly_connected_components,
)
from .dynamics import Trajectory, simulate
from .errors import (
    FileFormatError,
    InputError,
    NonConvergenceError,
    NotCriticalError,
    PartitionInconsistencyError,
    SaturnetError,
)
from .model import (
    EPS_FEAS,
    EquilibriumVector,
    ExogenousFlow,
    LiabilityData,
    Network,
    ValidationReport,
    from_liabilities,
    load_input,
    network_to_dict,
    require_valid,
    saturate,
    validate,
)
from .shocks import (
    CriticalCrossing,
    ShockRay,
    SweepRecord,
    find_critical_eps,
    loss_jump,
    max_jump_norm,
    sweep,
    sweep_to_csv,
    systemic_loss,
)
from .solver import (
    DEFAULT_OPTIONS,
    NodePartition,
    SolveOptions,
    extremal_equilibria,
    fixed_point_map,
    fixed_point_residual,
    iterate,
    maximal_equilibrium,
    minimal_equilibrium,
    node_partition,
    refine,
)
from .structure import (
    EquilibriumSet,
    FixedComponent,
    SegmentComponent,
    SinkAnalysis,
    SinkKind,
    classify,
    equilibrium_set,
    nash_payments,
    particular_solution,
    stationary_distribution,
)

__all__ = [
    "CriticalCrossing",
    "Decomposition",
    "DEFAULT_OPTIONS",
    "EPS_FEAS",
    "EquilibriumSet",
    "EquilibriumVector",
    "ExogenousFlow",
    "FileFormatError",
    "FixedComponent",
    "InputError",
    "LiabilityData",
    "Network",
    "NodePartition",
    "NonConvergenceError",
    "NotCriticalError",
    "PartitionInconsistencyError",
    "SaturnetError",
    "SegmentComponent",
    "ShockRay",
    "SinkAnalysis",
    "SinkComponent",
    "SinkKind",
    "SolveOptions",
    "SweepRecord",
    "Trajectory",
    "ValidationReport",
    "classify",
    "decompose",
    "deficiency_set",
    "equilibrium_set",
    "extremal_equilibria",
    "find_critical_eps",
    "fixed_point_map",
    "fixed_point_residual",
    "from_liabilities",
    "is_out_connected",
    "iterate",
    "load_input",
    "loss_jump",
    "max_jump_norm",
    "maximal_equilibrium",
    "minimal_equilibrium",
    "nash_payments",
    "network_to_dict",
    "node_partition",
    "particular_solution",
    "refine",
    "require_valid",
    "saturate",
    "simulate",
    "stationary_distribution",
    "strongly_connected_components",
    "sweep",
    "sweep_to_csv",
    "systemic_loss",
    "validate",
]
