"""Parameter calibration from measured (batch size, cost, makespan) points.

Fits three things, each individually pinnable:

* the effective billing rate, as the least-squares slope through the origin
  of cost vs. makespan over monolithic observations (the proportional charging
  model admits no intercept);
* a parallel latency model ``time(b) = overhead + b * per_item`` fitted on
  batch execution times inferred from parallel costs at the fitted rate;
* a monolithic per-item time, anchored so an overhead-free chain reproduces
  the largest-batch monolithic makespan exactly.

Measured monolithic and parallel throughput are generally NOT reconcilable
under a single latency model; the gap is surfaced through residuals and an
explicit warning instead of extra parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .engine import run
from .model import (
    BatchPlan,
    CalibrationError,
    ExecutionLimits,
    PricingModel,
    Strategy,
    WorkloadSpec,
    batch_count,
)

MS_PER_MIN = 60_000.0


@dataclass(frozen=True)
class ObservationPoint:
    """One measured run: what it cost and (optionally) how long it took."""

    batch_size: int
    strategy: Strategy
    total_cost: float
    makespan_min: float | None = None
    concurrency: int | None = None


@dataclass(frozen=True)
class ParameterPins:
    """Calibration parameters forced to known values instead of fitted."""

    effective_rate_per_ms: float | None = None
    per_item_time_ms: float | None = None
    invocation_overhead_ms: float | None = None
    monolithic_per_item_time_ms: float | None = None


@dataclass(frozen=True)
class CalibrationConfig:
    """Context the fit needs: workload size, limits and fee assumptions."""

    total_items: int
    limits: ExecutionLimits | None = None
    pins: ParameterPins = field(default_factory=ParameterPins)
    invocation_fee: float = 0.0
    transition_fee: float = 0.0
    transitions_per_task: int = 2


@dataclass(frozen=True)
class PointResidual:
    """Relative model-vs-observed errors for one observation.

    For monolithic points the cost residual checks the proportional rate model
    against the observed makespan; the makespan residual re-simulates the
    chain under the anchored monolithic per-item time. Parallel points are
    fully re-simulated under the fitted (rate, per_item, overhead).
    """

    batch_size: int
    strategy: Strategy
    cost_rel_err: float | None
    makespan_rel_err: float | None


@dataclass(frozen=True)
class CalibrationFit:
    """Fitted parameters plus how well they reproduce the observations."""

    effective_rate_per_ms: float
    per_item_time_ms: float | None
    invocation_overhead_ms: float | None
    monolithic_per_item_time_ms: float | None
    residuals: list[PointResidual]
    rms_relative_error: float
    warnings: list[str]

    @property
    def effective_rate_per_min(self) -> float:
        return self.effective_rate_per_ms * MS_PER_MIN


def fit_effective_rate(points: list[tuple[float, float]]) -> float:
    """Least-squares slope through the origin of cost vs. makespan.

    ``points`` are (makespan_min, total_cost) pairs; the result is currency
    per minute. With a single point this is simply cost / makespan.
    """
    if not points:
        raise CalibrationError("rate fit needs at least one (makespan, cost) point")
    for mk, cost in points:
        if mk <= 0:
            raise CalibrationError(f"rate fit needs makespan > 0, got {mk}")
        if cost < 0:
            raise CalibrationError(f"rate fit needs cost >= 0, got {cost}")
    sxy = sum(mk * cost for mk, cost in points)
    sxx = sum(mk * mk for mk, _ in points)
    return sxy / sxx


def _fit_affine(points: list[tuple[float, float]]) -> tuple[float, float, bool]:
    """OLS of y = intercept + slope*x; clamps a negative intercept to zero.

    Under the clamp the slope is refit through the origin (the constrained
    least-squares optimum). Returns (slope, intercept, clamped).
    """
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    if len(set(xs)) < 2:
        raise CalibrationError("latency fit needs at least two distinct batch sizes")
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    if intercept < 0:
        slope = sum(x * y for x, y in zip(xs, ys)) / sum(x * x for x in xs)
        return slope, 0.0, True
    return slope, intercept, False


def fit_latency_model(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Fit ``time(b) = overhead + b * per_item`` on (batch_size, time_ms) points.

    Returns (per_item_time_ms, invocation_overhead_ms); a negative fitted
    overhead clamps to zero.
    """
    slope, intercept, _ = _fit_affine(points)
    return slope, intercept


def infer_batch_exec_from_cost(total_cost: float, batches: int,
                               rate_per_min: float,
                               orchestration_cost: float = 0.0) -> float:
    """Back out the per-batch execution time (minutes) implied by a bill.

    Assumes equal batches: the compute share of the bill divides evenly over
    ``batches`` tasks and converts to time at ``rate_per_min``.
    """
    if rate_per_min <= 0:
        raise CalibrationError("rate must be > 0 to infer batch times from cost")
    if batches < 1:
        raise CalibrationError("batch count must be >= 1")
    if orchestration_cost > total_cost:
        raise CalibrationError(
            f"orchestration cost {orchestration_cost} exceeds total cost {total_cost}")
    return ((total_cost - orchestration_cost) / batches) / rate_per_min


def _default_limits() -> ExecutionLimits:
    return ExecutionLimits(max_function_duration_ms=math.inf, concurrency_limit=10)


def calibrate(observations: list[ObservationPoint],
              config: CalibrationConfig) -> CalibrationFit:
    """Compose the three fitters and report per-point residuals.

    Needs at least one monolithic point (for the rate) and two parallel points
    with distinct batch sizes (for the latency model) unless the corresponding
    parameters are pinned in ``config.pins``.
    """
    warnings: list[str] = []
    pins = config.pins
    mono = [o for o in observations if o.strategy is Strategy.MONOLITHIC]
    par = [o for o in observations if o.strategy is Strategy.PARALLEL]

    # effective rate
    if pins.effective_rate_per_ms is not None:
        rate_ms = pins.effective_rate_per_ms
    else:
        rate_points = [(o.makespan_min, o.total_cost) for o in mono
                       if o.makespan_min is not None]
        if not rate_points:
            raise CalibrationError(
                "no monolithic observations with makespans to fit the rate; "
                "pin effective_rate_per_ms or add points")
        rate_ms = fit_effective_rate(rate_points) / MS_PER_MIN
    rate_min = rate_ms * MS_PER_MIN

    # parallel latency model
    if pins.per_item_time_ms is not None and pins.invocation_overhead_ms is not None:
        per_item: float | None = pins.per_item_time_ms
        overhead: float | None = pins.invocation_overhead_ms
    else:
        sizes = {o.batch_size for o in par}
        if len(sizes) < 2:
            raise CalibrationError(
                "latency fit needs two parallel observations with distinct batch "
                "sizes; pin per_item_time_ms and invocation_overhead_ms or add points")
        latency_points = []
        for o in par:
            m = batch_count(config.total_items, o.batch_size)
            orch = m * config.transitions_per_task * config.transition_fee
            t_min = infer_batch_exec_from_cost(o.total_cost, m, rate_min, orch)
            latency_points.append((float(o.batch_size), t_min * MS_PER_MIN))
        slope, intercept, clamped = _fit_affine(latency_points)
        if clamped:
            warnings.append(
                "fitted invocation overhead was negative and was clamped to 0; "
                "the per-item time was refit through the origin")
        per_item = pins.per_item_time_ms if pins.per_item_time_ms is not None else slope
        overhead = (pins.invocation_overhead_ms
                    if pins.invocation_overhead_ms is not None else intercept)

    # monolithic per-item time, anchored at the largest measured batch size:
    # with zero overhead a chain's makespan is exactly total_items * per_item
    if pins.monolithic_per_item_time_ms is not None:
        mono_per_item: float | None = pins.monolithic_per_item_time_ms
    else:
        anchors = [o for o in mono if o.makespan_min is not None]
        if anchors and config.total_items > 0:
            anchor = max(anchors, key=lambda o: o.batch_size)
            mono_per_item = anchor.makespan_min * MS_PER_MIN / config.total_items
        else:
            mono_per_item = None

    if (mono_per_item is not None and per_item is not None and per_item > 0
            and mono_per_item > 1.1 * per_item):
        implied = sorted(o.makespan_min * MS_PER_MIN / config.total_items
                         for o in mono
                         if o.makespan_min is not None) if config.total_items else []
        if not implied:
            implied = [mono_per_item]
        lo, hi = implied[0], implied[-1]
        warnings.append(
            f"monolithic observations imply a per-item time of {lo:.1f}-{hi:.1f} ms "
            f"but the parallel fit gives {per_item:.1f} ms per item "
            f"({mono_per_item / per_item:.2f}x slower); the two strategies are not "
            f"consistent under a single latency model, so per-strategy parameters "
            f"are reported and residuals below keep the gap visible")

    residuals = _residuals(mono, par, config, rate_min, rate_ms,
                           per_item, overhead, mono_per_item)
    comps = [r for pr in residuals for r in (pr.cost_rel_err, pr.makespan_rel_err)
             if r is not None]
    rms = math.sqrt(sum(r * r for r in comps) / len(comps)) if comps else 0.0

    return CalibrationFit(
        effective_rate_per_ms=rate_ms,
        per_item_time_ms=per_item,
        invocation_overhead_ms=overhead,
        monolithic_per_item_time_ms=mono_per_item,
        residuals=residuals,
        rms_relative_error=rms,
        warnings=warnings,
    )


def _residuals(mono, par, config, rate_min, rate_ms, per_item, overhead, mono_per_item):
    limits = config.limits if config.limits is not None else _default_limits()
    out: list[PointResidual] = []
    for o in mono:
        cost_err = None
        mk_err = None
        if o.makespan_min is not None and o.total_cost > 0:
            cost_err = (rate_min * o.makespan_min - o.total_cost) / o.total_cost
        if mono_per_item is not None and o.makespan_min is not None:
            workload = WorkloadSpec(total_items=config.total_items,
                                    per_item_time_ms=mono_per_item)
            sim = run(workload, BatchPlan(o.batch_size, Strategy.MONOLITHIC), limits,
                      _pricing(config, rate_ms))
            mk_err = (sim.makespan_ms / MS_PER_MIN - o.makespan_min) / o.makespan_min
        out.append(PointResidual(o.batch_size, Strategy.MONOLITHIC, cost_err, mk_err))
    for o in par:
        cost_err = None
        mk_err = None
        if per_item is not None and overhead is not None:
            m = batch_count(config.total_items, o.batch_size)
            workload = WorkloadSpec(total_items=config.total_items,
                                    per_item_time_ms=per_item,
                                    invocation_overhead_ms=overhead)
            k = o.concurrency if o.concurrency is not None else max(m, 1)
            sim = run(workload, BatchPlan(o.batch_size, Strategy.PARALLEL),
                      replace(limits, concurrency_limit=k), _pricing(config, rate_ms))
            if o.total_cost > 0:
                cost_err = (sim.total_cost - o.total_cost) / o.total_cost
            if o.makespan_min is not None and o.makespan_min > 0:
                mk_err = (sim.makespan_ms / MS_PER_MIN - o.makespan_min) / o.makespan_min
        out.append(PointResidual(o.batch_size, Strategy.PARALLEL, cost_err, mk_err))
    return out


def _pricing(config: CalibrationConfig, rate_ms: float) -> PricingModel:
    return PricingModel(
        compute_rate_per_ms=rate_ms,
        invocation_fee=config.invocation_fee,
        transition_fee=config.transition_fee,
        transitions_per_task=config.transitions_per_task,
    )
