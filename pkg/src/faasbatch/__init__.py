"""faasbatch: deterministic simulator and cost optimizer for serverless
batch processing of inference-style workloads.

Simulates monolithic (self-chaining) and parallel (fan-out under a
concurrency cap) execution of a partitioned workload, prices runs under a
pay-per-duration billing model, calibrates parameters from measured points,
and sweeps batch sizes to map the cost/latency trade-off.
"""

from ._kernels import active_backend
from .calibrate import (
    CalibrationConfig,
    CalibrationFit,
    ObservationPoint,
    ParameterPins,
    PointResidual,
    calibrate,
    fit_effective_rate,
    fit_latency_model,
    infer_batch_exec_from_cost,
)
from .config import (
    CalibrationSettings,
    ConfigError,
    OutputSettings,
    RunConfig,
    SweepSettings,
    emit_config,
    parse_config,
)
from .cost import (
    CostBreakdown,
    attach_costs,
    billed_duration,
    cost_monolithic,
    cost_parallel,
)
from .engine import (
    batch_exec_time,
    run,
    simulate,
    simulate_monolithic,
    simulate_parallel,
)
from .model import (
    BatchPlan,
    CalibrationError,
    ExecutionLimits,
    FaasBatchError,
    InfeasibleError,
    InvalidPlanError,
    InvocationRecord,
    PlanViolation,
    PricingModel,
    ReportError,
    SimulationError,
    SimulationResult,
    Strategy,
    WorkloadSpec,
    partition,
    validate_plan,
)
from .sweep import (
    SpeedupSummary,
    SweepFailure,
    SweepResult,
    SweepRow,
    pareto_frontier,
    recommend,
    speedup_report,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BatchPlan",
    "CalibrationConfig",
    "CalibrationError",
    "CalibrationFit",
    "CalibrationSettings",
    "ConfigError",
    "CostBreakdown",
    "ExecutionLimits",
    "FaasBatchError",
    "InfeasibleError",
    "InvalidPlanError",
    "InvocationRecord",
    "ObservationPoint",
    "OutputSettings",
    "ParameterPins",
    "PlanViolation",
    "PointResidual",
    "PricingModel",
    "ReportError",
    "RunConfig",
    "SimulationError",
    "SimulationResult",
    "SpeedupSummary",
    "Strategy",
    "SweepFailure",
    "SweepResult",
    "SweepRow",
    "SweepSettings",
    "WorkloadSpec",
    "active_backend",
    "attach_costs",
    "batch_exec_time",
    "billed_duration",
    "calibrate",
    "cost_monolithic",
    "cost_parallel",
    "emit_config",
    "fit_effective_rate",
    "fit_latency_model",
    "infer_batch_exec_from_cost",
    "parse_config",
    "pareto_frontier",
    "partition",
    "recommend",
    "run",
    "simulate",
    "simulate_monolithic",
    "simulate_parallel",
    "speedup_report",
    "sweep",
    "validate_plan",
]
