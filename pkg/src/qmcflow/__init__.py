"""Exact tools for multi-commodity quickest flows over time.

The package models networks whose arcs have capacities and transit
times, flows over time on them (with or without intermediate storage),
a violation checker, a time-expanded LP feasibility solver over exact
rational arithmetic, instance generators including a cycle family whose
storage speed-up approaches 2, and a CLI tying everything together.
"""

from __future__ import annotations

from .checker import (
    CAPACITY,
    CONSERVATION,
    DEMAND,
    STRICT_CONSERVATION,
    Violation,
    ViolationReport,
    check_capacity,
    check_conservation,
    check_demands,
    check_flow,
    cumulative,
)
from .core import (
    Arc,
    Commodity,
    Defect,
    FlowOverTime,
    Instance,
    Network,
    ParseError,
    Piece,
    StepFunction,
    StorageMode,
    ValidationReport,
    format_rational,
    parse_flow,
    parse_instance,
    rational,
    reachable_nodes,
    serialize_flow,
    serialize_instance,
    shortest_transit,
    step_function,
    validate_instance,
)
from .expansion import (
    ExpandedNetwork,
    ExpansionConfig,
    build_time_expanded,
    extract_flow_over_time,
)
from .instances import (
    CycleParams,
    cycle_instance,
    random_instance,
    wait_schedule_with_storage,
    wave_schedule_no_storage,
)
from .solver import (
    Constraint,
    GapReport,
    LinearProgram,
    LPResult,
    NoHorizonFound,
    SpeedupReport,
    feasibility_lp_from_expansion,
    gap_csv,
    gap_sweep,
    lp_feasible,
    min_feasible_horizon,
    movement_solution,
    probe_horizon,
    speedup_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "CAPACITY",
    "CONSERVATION",
    "Commodity",
    "Constraint",
    "CycleParams",
    "DEMAND",
    "Defect",
    "ExpandedNetwork",
    "ExpansionConfig",
    "FlowOverTime",
    "GapReport",
    "Instance",
    "LPResult",
    "LinearProgram",
    "Network",
    "NoHorizonFound",
    "ParseError",
    "Piece",
    "STRICT_CONSERVATION",
    "SpeedupReport",
    "StepFunction",
    "StorageMode",
    "ValidationReport",
    "Violation",
    "ViolationReport",
    "build_time_expanded",
    "check_capacity",
    "check_conservation",
    "check_demands",
    "check_flow",
    "cumulative",
    "cycle_instance",
    "extract_flow_over_time",
    "feasibility_lp_from_expansion",
    "format_rational",
    "gap_csv",
    "gap_sweep",
    "lp_feasible",
    "min_feasible_horizon",
    "movement_solution",
    "parse_flow",
    "parse_instance",
    "probe_horizon",
    "random_instance",
    "rational",
    "reachable_nodes",
    "serialize_flow",
    "serialize_instance",
    "shortest_transit",
    "speedup_ratio",
    "step_function",
    "validate_instance",
    "wait_schedule_with_storage",
    "wave_schedule_no_storage",
]
