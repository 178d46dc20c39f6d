"""Domain types, batch partitioning and plan validation.

Everything here is a plain frozen dataclass or a pure function; instances are
safe to share between threads and cheap to copy. Validation never raises on
bad field values: the ``validate_*`` helpers return a list of violations so
callers (config parsing in particular) can report every problem at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Strategy(str, Enum):
    """Execution strategy for a batch plan."""

    MONOLITHIC = "monolithic"
    PARALLEL = "parallel"


class FaasBatchError(Exception):
    """Base class for all package errors."""


class InvalidPlanError(FaasBatchError):
    """A plan, workload or limits combination failed validation."""

    def __init__(self, violations: list["PlanViolation"]):
        self.violations = violations
        super().__init__("; ".join(v.message for v in violations) or "invalid plan")


class SimulationError(FaasBatchError):
    """The simulator could not make progress on an accepted plan."""


class CalibrationError(FaasBatchError):
    """Calibration inputs are insufficient or inconsistent."""


class InfeasibleError(FaasBatchError):
    """No sweep row satisfies the requested constraint."""


class ReportError(FaasBatchError):
    """A report could not be produced from the given rows."""


@dataclass(frozen=True)
class PricingModel:
    """Billing rates for one memory tier.

    ``compute_rate_per_ms`` is treated as a calibrated effective rate, never a
    hardcoded platform constant: published per-GB-second list prices do not
    reproduce measured bills when the allocated (vs. used) memory is unknown.
    """

    compute_rate_per_ms: float
    memory_alloc_mb: float = 850.0
    invocation_fee: float = 0.0
    transition_fee: float = 0.0
    transitions_per_task: int = 2
    billing_granularity_ms: float = 1.0


@dataclass(frozen=True)
class WorkloadSpec:
    """Physics of the workload: how long items take and what they cost to start.

    ``invocation_overhead_ms`` models everything paid once per function start
    (cold start plus loading the model and dependencies from shared storage).
    ``jitter_rel_stddev`` > 0 multiplies each item's time by a lognormal factor
    with mean 1 and that relative standard deviation, driven by ``seed``.
    """

    total_items: int
    per_item_time_ms: float
    invocation_overhead_ms: float = 0.0
    chain_trigger_latency_ms: float = 0.0
    dispatch_latency_ms: float = 0.0
    memory_used_mb: float = 850.0
    jitter_rel_stddev: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class ExecutionLimits:
    """Hard limits one invocation must respect.

    There is no default function timeout on purpose: the platform ceiling is
    deployment-specific, so ``max_function_duration_ms`` must always be chosen.
    """

    max_function_duration_ms: float
    concurrency_limit: int = 10
    safety_margin_ms: float = 0.0


@dataclass(frozen=True)
class BatchPlan:
    """Items per batch plus the strategy used to execute the batches."""

    batch_size: int
    strategy: Strategy


@dataclass(frozen=True)
class InvocationRecord:
    """One function invocation in a simulated trace.

    ``raw_duration_ms`` is always ``end_ms - start_ms``; ``billed_duration_ms``
    is the raw duration rounded up to the billing granularity.
    """

    invocation_id: int
    start_ms: float
    end_ms: float
    items_processed: int
    batches_processed: list[int]
    raw_duration_ms: float
    billed_duration_ms: float
    memory_used_mb: float


@dataclass(frozen=True)
class SimulationResult:
    """Full outcome of one simulated run, including the invocation trace.

    ``makespan_ms`` spans the first invocation start to the last invocation
    end. Cost fields are zero until the run is priced (see ``engine.run``).
    """

    makespan_ms: float
    total_billed_ms: float
    invocation_count: int
    transition_count: int = 0
    compute_cost: float = 0.0
    invocation_cost: float = 0.0
    orchestration_cost: float = 0.0
    total_cost: float = 0.0
    max_memory_mb: float = 0.0
    trace: list[InvocationRecord] = field(default_factory=list)


@dataclass(frozen=True)
class PlanViolation:
    """One validation failure, attributed to the field that caused it."""

    field: str
    message: str


def partition(total_items: int, batch_size: int) -> list[int]:
    """Split ``total_items`` into batches of ``batch_size`` items.

    Returns ``ceil(total_items / batch_size)`` entries; every entry equals
    ``batch_size`` except possibly the last, which holds the remainder. The
    trailing short batch is kept as its own unit, never merged. An empty
    workload partitions to an empty list.

    Raises:
        InvalidPlanError: if ``batch_size`` < 1.
    """
    if batch_size < 1:
        raise InvalidPlanError([PlanViolation("batch_size", "batch_size must be >= 1")])
    if total_items < 0:
        raise InvalidPlanError([PlanViolation("total_items", "total_items must be >= 0")])
    if total_items == 0:
        return []
    full, rest = divmod(total_items, batch_size)
    sizes = [batch_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def validate_pricing(pricing: PricingModel) -> list[PlanViolation]:
    out = []
    if pricing.compute_rate_per_ms < 0:
        out.append(PlanViolation("compute_rate_per_ms", "compute_rate_per_ms must be >= 0"))
    if pricing.memory_alloc_mb <= 0:
        out.append(PlanViolation("memory_alloc_mb", "memory_alloc_mb must be > 0"))
    if pricing.invocation_fee < 0:
        out.append(PlanViolation("invocation_fee", "invocation_fee must be >= 0"))
    if pricing.transition_fee < 0:
        out.append(PlanViolation("transition_fee", "transition_fee must be >= 0"))
    if pricing.transitions_per_task < 0:
        out.append(PlanViolation("transitions_per_task", "transitions_per_task must be >= 0"))
    if pricing.billing_granularity_ms < 1:
        out.append(PlanViolation("billing_granularity_ms", "billing_granularity_ms must be >= 1"))
    return out


def validate_workload(workload: WorkloadSpec) -> list[PlanViolation]:
    out = []
    if workload.total_items < 0:
        out.append(PlanViolation("total_items", "total_items must be >= 0"))
    for name in ("per_item_time_ms", "invocation_overhead_ms",
                 "chain_trigger_latency_ms", "dispatch_latency_ms"):
        if getattr(workload, name) < 0:
            out.append(PlanViolation(name, f"{name} must be >= 0"))
    if workload.memory_used_mb <= 0:
        out.append(PlanViolation("memory_used_mb", "memory_used_mb must be > 0"))
    if not 0.0 <= workload.jitter_rel_stddev < 1.0:
        out.append(PlanViolation("jitter_rel_stddev", "jitter_rel_stddev must be in [0, 1)"))
    return out


def validate_limits(limits: ExecutionLimits) -> list[PlanViolation]:
    out = []
    if not limits.max_function_duration_ms > 0:
        out.append(PlanViolation("max_function_duration_ms", "max_function_duration_ms must be > 0"))
    if limits.concurrency_limit < 1:
        out.append(PlanViolation("concurrency_limit", "concurrency_limit must be >= 1"))
    if limits.safety_margin_ms < 0:
        out.append(PlanViolation("safety_margin_ms", "safety_margin_ms must be >= 0"))
    return out


def validate_plan(plan: BatchPlan, workload: WorkloadSpec,
                  limits: ExecutionLimits) -> list[PlanViolation]:
    """Check a plan against its workload and limits.

    Returns the full list of violations instead of stopping at the first.
    The central feasibility rule: a single batch (plus startup overhead) must
    complete inside one invocation in the deterministic case, i.e.
    ``invocation_overhead_ms + batch_size * per_item_time_ms`` must not exceed
    ``max_function_duration_ms``.
    """
    out = validate_workload(workload) + validate_limits(limits)
    if plan.batch_size < 1:
        out.append(PlanViolation("batch_size", "batch_size must be >= 1"))
        return out
    single_batch_ms = workload.invocation_overhead_ms + plan.batch_size * workload.per_item_time_ms
    if single_batch_ms > limits.max_function_duration_ms:
        out.append(PlanViolation(
            "batch_size",
            f"a single batch needs {single_batch_ms:.0f} ms "
            f"(overhead {workload.invocation_overhead_ms:.0f} + "
            f"{plan.batch_size} x {workload.per_item_time_ms:g} ms) "
            f"but the function timeout is {limits.max_function_duration_ms:.0f} ms",
        ))
    return out


def batch_count(total_items: int, batch_size: int) -> int:
    """Number of batches a partition produces, without materializing it."""
    if batch_size < 1:
        raise InvalidPlanError([PlanViolation("batch_size", "batch_size must be >= 1")])
    return math.ceil(total_items / batch_size)
