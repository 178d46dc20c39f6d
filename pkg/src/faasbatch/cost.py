"""Cost equations: billed-duration rounding, per-strategy pricing.

Compute cost is the sum of billed durations times the effective rate. Billed
milliseconds are integer multiples of the granularity and are summed exactly
(they stay far below 2**53), so the rate multiplication happens once per run;
no currency value is ever accumulated across invocations. That is what makes
parallel cost bit-identical across concurrency limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .model import PricingModel, SimulationResult, Strategy


@dataclass(frozen=True)
class CostBreakdown:
    """Currency split of one run; ``total_cost`` is always the sum of parts."""

    compute_cost: float
    invocation_cost: float
    orchestration_cost: float
    total_cost: float
    billed_ms_total: float


def billed_duration(raw_ms: float, granularity_ms: float = 1.0) -> float:
    """Smallest multiple of ``granularity_ms`` that is >= ``raw_ms``; 0 maps to 0."""
    if granularity_ms < 1:
        raise ValueError("billing granularity must be >= 1 ms")
    if raw_ms <= 0:
        return 0.0
    billed = math.ceil(raw_ms / granularity_ms) * granularity_ms
    if billed < raw_ms:  # division can underflow or round down for extreme raws
        billed += granularity_ms
    return billed


def _billed_total(result: SimulationResult, pricing: PricingModel) -> float:
    return float(sum(billed_duration(r.raw_duration_ms, pricing.billing_granularity_ms)
                     for r in result.trace))


def cost_monolithic(result: SimulationResult, pricing: PricingModel) -> CostBreakdown:
    """Price a chained run: billed time at the rate plus invocation fees.

    The monolithic flow has no fan-out orchestrator, so orchestration cost
    is zero by definition.
    """
    billed = _billed_total(result, pricing)
    compute = billed * pricing.compute_rate_per_ms
    invocation = result.invocation_count * pricing.invocation_fee
    return CostBreakdown(
        compute_cost=compute,
        invocation_cost=invocation,
        orchestration_cost=0.0,
        total_cost=compute + invocation,
        billed_ms_total=billed,
    )


def cost_parallel(result: SimulationResult, pricing: PricingModel) -> CostBreakdown:
    """Price a fan-out run: per-task billed time, invocation and transition fees.

    Each dispatched task is charged ``transitions_per_task`` orchestration
    state transitions. Nothing here depends on the concurrency limit: only the
    makespan does.
    """
    n = result.invocation_count
    billed = _billed_total(result, pricing)
    compute = billed * pricing.compute_rate_per_ms
    invocation = n * pricing.invocation_fee
    orchestration = n * pricing.transitions_per_task * pricing.transition_fee
    return CostBreakdown(
        compute_cost=compute,
        invocation_cost=invocation,
        orchestration_cost=orchestration,
        total_cost=compute + invocation + orchestration,
        billed_ms_total=billed,
    )


def price(result: SimulationResult, strategy: Strategy,
          pricing: PricingModel) -> CostBreakdown:
    if strategy is Strategy.MONOLITHIC:
        return cost_monolithic(result, pricing)
    return cost_parallel(result, pricing)


def attach_costs(result: SimulationResult, strategy: Strategy,
                 pricing: PricingModel) -> SimulationResult:
    """Return a copy of ``result`` with the cost breakdown filled in."""
    breakdown = price(result, strategy, pricing)
    transitions = (result.invocation_count * pricing.transitions_per_task
                   if strategy is Strategy.PARALLEL else 0)
    return replace(
        result,
        total_billed_ms=breakdown.billed_ms_total,
        transition_count=transitions,
        compute_cost=breakdown.compute_cost,
        invocation_cost=breakdown.invocation_cost,
        orchestration_cost=breakdown.orchestration_cost,
        total_cost=breakdown.total_cost,
    )
