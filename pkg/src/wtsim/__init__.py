"""Deadline-constrained execution on reconfigurable machines.

Weighted transition systems for workloads and their executions, slack-guarded
reconfiguration schemes, offline energy optima, and checkers for simulation,
by-simulation, betterment and constant-factor simulation.
"""

from .core import (
    ENERGY,
    OMEGA,
    TIME,
    TIME_ENERGY,
    InputError,
    TimeEnergy,
    WeightDomain,
    WeightedTS,
    fold_weights,
    is_cumulative,
    make_ts,
    successors,
)
from .execution import (
    BaselineInfeasible,
    ExecState,
    NoFeasibleSchedule,
    Trace,
    brute_force_optimal,
    build_pal_energy_ts,
    build_pal_time_ts,
    build_reconfigurable_ts,
    feasible_on,
    optimal_offline,
    run_fixed,
    run_policy,
    trace_to_ts,
)
from .machine import CostModel, elementary_leq, parse_model, reconfig_energy, reconfig_time, validate_model
from .relations import (
    RelationVerdict,
    UnboundedRatio,
    capability_compare,
    check_by_simulation,
    check_c_simulation,
    largest_betterment,
    largest_simulation,
    min_c_factor,
)
from .workload import (
    WorkloadSpec,
    build_spec_ts,
    concat_shifted,
    deadlines,
    gen_synthetic,
    parse_workload,
    prefix,
)

__all__ = [
    "BaselineInfeasible",
    "brute_force_optimal",
    "build_pal_energy_ts",
    "build_pal_time_ts",
    "build_reconfigurable_ts",
    "build_spec_ts",
    "capability_compare",
    "check_by_simulation",
    "check_c_simulation",
    "concat_shifted",
    "CostModel",
    "deadlines",
    "elementary_leq",
    "ENERGY",
    "ExecState",
    "feasible_on",
    "fold_weights",
    "gen_synthetic",
    "InputError",
    "is_cumulative",
    "largest_betterment",
    "largest_simulation",
    "make_ts",
    "min_c_factor",
    "NoFeasibleSchedule",
    "OMEGA",
    "optimal_offline",
    "parse_model",
    "parse_workload",
    "prefix",
    "reconfig_energy",
    "reconfig_time",
    "RelationVerdict",
    "run_fixed",
    "run_policy",
    "successors",
    "TIME",
    "TIME_ENERGY",
    "TimeEnergy",
    "Trace",
    "trace_to_ts",
    "UnboundedRatio",
    "validate_model",
    "WeightDomain",
    "WeightedTS",
    "WorkloadSpec",
]

__version__ = "0.1.0"
