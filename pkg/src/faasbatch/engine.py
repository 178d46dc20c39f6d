"""Deterministic discrete-event simulation of both execution strategies.

A run is a pure function of (workload, plan, limits): identical inputs,
including the jitter seed, produce bit-identical traces. Distinct runs share
no state and may execute concurrently.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .cost import attach_costs
from .model import (
    BatchPlan,
    ExecutionLimits,
    InvalidPlanError,
    InvocationRecord,
    PricingModel,
    SimulationError,
    SimulationResult,
    Strategy,
    WorkloadSpec,
    partition,
    validate_plan,
)


def batch_exec_time(batch_items: int, workload: WorkloadSpec,
                    rng: np.random.Generator | None = None) -> float:
    """Processing time of one batch, excluding per-invocation overhead.

    Deterministic case: ``batch_items * per_item_time_ms``. With jitter, each
    item's time is multiplied by a lognormal factor with mean 1 and relative
    standard deviation ``jitter_rel_stddev`` drawn from ``rng`` (or a fresh
    generator seeded with ``workload.seed`` when none is passed).
    """
    if batch_items < 0:
        raise ValueError("batch_items must be >= 0")
    if batch_items == 0:
        return 0.0
    if workload.jitter_rel_stddev == 0.0:
        return batch_items * workload.per_item_time_ms
    if rng is None:
        rng = np.random.default_rng(workload.seed)
    # lognormal with mean 1: sigma^2 = ln(1 + s^2), mu = -sigma^2 / 2
    sigma2 = np.log1p(workload.jitter_rel_stddev ** 2)
    factors = rng.lognormal(mean=-sigma2 / 2.0, sigma=np.sqrt(sigma2), size=batch_items)
    return float(workload.per_item_time_ms * factors.sum())


def _batch_durations(counts: list[int], workload: WorkloadSpec) -> np.ndarray:
    """Per-batch execution times in partition order, one rng for the run."""
    rng = np.random.default_rng(workload.seed) if workload.jitter_rel_stddev else None
    return np.array([batch_exec_time(c, workload, rng) for c in counts], dtype=np.float64)


def _records(starts, ends, counts_per_inv, batch_lists, workload, granularity_ms):
    from .cost import billed_duration

    records = []
    for i in range(len(starts)):
        raw = float(ends[i] - starts[i])
        records.append(InvocationRecord(
            invocation_id=i,
            start_ms=float(starts[i]),
            end_ms=float(ends[i]),
            items_processed=counts_per_inv[i],
            batches_processed=batch_lists[i],
            raw_duration_ms=raw,
            billed_duration_ms=billed_duration(raw, granularity_ms),
            memory_used_mb=workload.memory_used_mb,
        ))
    return records


def _assemble(records: list[InvocationRecord], workload: WorkloadSpec) -> SimulationResult:
    if not records:
        return SimulationResult(makespan_ms=0.0, total_billed_ms=0.0, invocation_count=0)
    first = min(r.start_ms for r in records)
    last = max(r.end_ms for r in records)
    return SimulationResult(
        makespan_ms=last - first,
        total_billed_ms=float(sum(r.billed_duration_ms for r in records)),
        invocation_count=len(records),
        max_memory_mb=workload.memory_used_mb,
        trace=records,
    )


def simulate_monolithic(workload: WorkloadSpec, plan: BatchPlan, limits: ExecutionLimits,
                        *, billing_granularity_ms: float = 1.0) -> SimulationResult:
    """Simulate one self-retriggering invocation chain.

    Assumes the plan passed ``validate_plan``. Each chain link pays the
    startup overhead once, then keeps processing batches while the estimated
    next batch (plus the safety margin) still fits in the remaining function
    lifetime; otherwise it ends and its successor starts after
    ``chain_trigger_latency_ms``. Under jitter the admission check uses the
    mean batch time while actual elapsed time accumulates the jittered values.

    Raises:
        SimulationError: if an invocation accepts zero batches, which a
            validated plan only reaches when the safety margin leaves no room
            for even a single batch.
    """
    counts = partition(workload.total_items, plan.batch_size)
    durations = _batch_durations(counts, workload)
    estimates = np.array([c * workload.per_item_time_ms for c in counts], dtype=np.float64)
    inv_start, inv_end, first_batch, n_batches, status = _kernels.monolithic_schedule(
        durations, estimates,
        float(workload.invocation_overhead_ms),
        float(limits.safety_margin_ms),
        float(limits.max_function_duration_ms),
        float(workload.chain_trigger_latency_ms),
    )
    if status == _kernels.MONO_STUCK:
        raise SimulationError(
            "invocation chain stalled: overhead + first batch + safety margin "
            "exceed the function timeout")
    counts_per_inv = []
    batch_lists = []
    for i in range(len(inv_start)):
        fb, nb = int(first_batch[i]), int(n_batches[i])
        batch_lists.append(list(range(fb, fb + nb)))
        counts_per_inv.append(sum(counts[fb:fb + nb]))
    records = _records(inv_start, inv_end, counts_per_inv, batch_lists,
                       workload, billing_granularity_ms)
    return _assemble(records, workload)


def simulate_parallel(workload: WorkloadSpec, plan: BatchPlan, limits: ExecutionLimits,
                      *, billing_granularity_ms: float = 1.0) -> SimulationResult:
    """Simulate fan-out of one invocation per batch under the concurrency cap.

    Assumes the plan passed ``validate_plan``. The first ``concurrency_limit``
    batches dispatch at time 0 (each delayed by ``dispatch_latency_ms``); as an
    invocation completes, the next pending batch takes its slot. Batches
    dispatch in partition order, the trailing short batch last.
    """
    counts = partition(workload.total_items, plan.batch_size)
    exec_times = _batch_durations(counts, workload)
    raw = exec_times + workload.invocation_overhead_ms
    starts, ends = _kernels.parallel_schedule(
        raw, int(limits.concurrency_limit), float(workload.dispatch_latency_ms))
    records = _records(starts, ends, counts, [[j] for j in range(len(counts))],
                       workload, billing_granularity_ms)
    return _assemble(records, workload)


def simulate(workload: WorkloadSpec, plan: BatchPlan,
             limits: ExecutionLimits, *, billing_granularity_ms: float = 1.0) -> SimulationResult:
    """Dispatch to the simulator for ``plan.strategy`` (no pricing attached)."""
    if plan.strategy is Strategy.MONOLITHIC:
        return simulate_monolithic(workload, plan, limits,
                                   billing_granularity_ms=billing_granularity_ms)
    return simulate_parallel(workload, plan, limits,
                             billing_granularity_ms=billing_granularity_ms)


def run(workload: WorkloadSpec, plan: BatchPlan, limits: ExecutionLimits,
        pricing: PricingModel) -> SimulationResult:
    """Validate, simulate and price one plan.

    Returns a fully populated result: trace, billed durations at the pricing
    granularity, and the cost breakdown for the plan's strategy.

    Raises:
        InvalidPlanError: when validate_plan rejects the combination.
    """
    violations = validate_plan(plan, workload, limits)
    if violations:
        raise InvalidPlanError(violations)
    result = simulate(workload, plan, limits,
                      billing_granularity_ms=pricing.billing_granularity_ms)
    return attach_costs(result, plan.strategy, pricing)
