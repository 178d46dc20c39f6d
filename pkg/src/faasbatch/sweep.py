"""Batch-size x strategy x concurrency sweeps, Pareto analysis, recommendations.

Each sweep combination is an independent pure computation; rows are keyed and
sorted afterwards, so assembly order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .engine import run
from .model import (
    BatchPlan,
    ExecutionLimits,
    InfeasibleError,
    InvalidPlanError,
    PricingModel,
    ReportError,
    Strategy,
    WorkloadSpec,
)

MS_PER_MIN = 60_000.0


@dataclass(frozen=True)
class SweepRow:
    """One simulated (batch_size, strategy, concurrency) combination."""

    batch_size: int
    strategy: Strategy
    concurrency: int
    total_cost: float
    makespan_min: float
    invocation_count: int
    compute_cost: float
    orchestration_cost: float


@dataclass(frozen=True)
class SweepFailure:
    """A combination that failed validation; the rest of the sweep still ran."""

    batch_size: int
    strategy: Strategy
    concurrency: int
    message: str


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    failures: list[SweepFailure]


@dataclass(frozen=True)
class SpeedupSummary:
    """Makespan reduction of the best parallel row vs. the best monolithic row
    among rows whose total cost falls inside the band."""

    reduction: float  # fraction in [0, 1]
    monolithic_min_makespan_min: float
    parallel_min_makespan_min: float
    cost_band: tuple[float, float]

    @property
    def reduction_pct(self) -> float:
        return self.reduction * 100.0


def sweep(batch_sizes: list[int], strategies: list[Strategy],
          workload: WorkloadSpec, limits: ExecutionLimits, pricing: PricingModel,
          concurrency_values: list[int] | None = None) -> SweepResult:
    """Simulate and price every combination; collect rather than abort on
    invalid ones.

    ``concurrency_values`` defaults to ``[limits.concurrency_limit]``.
    Monolithic results do not depend on concurrency but get one row per value
    so the table stays rectangular. Rows come back sorted by
    (strategy, batch_size, concurrency).
    """
    ks = list(concurrency_values) if concurrency_values else [limits.concurrency_limit]
    rows: list[SweepRow] = []
    failures: list[SweepFailure] = []
    for strategy in strategies:
        for b in batch_sizes:
            for k in ks:
                lim = replace(limits, concurrency_limit=k)
                try:
                    res = run(workload, BatchPlan(b, strategy), lim, pricing)
                except InvalidPlanError as exc:
                    failures.append(SweepFailure(b, strategy, k, str(exc)))
                    continue
                rows.append(SweepRow(
                    batch_size=b,
                    strategy=strategy,
                    concurrency=k,
                    total_cost=res.total_cost,
                    makespan_min=res.makespan_ms / MS_PER_MIN,
                    invocation_count=res.invocation_count,
                    compute_cost=res.compute_cost,
                    orchestration_cost=res.orchestration_cost,
                ))
    rows.sort(key=lambda r: (r.strategy.value, r.batch_size, r.concurrency))
    return SweepResult(rows=rows, failures=failures)


def pareto_frontier(rows: list[SweepRow]) -> list[SweepRow]:
    """Rows not strictly dominated in (total_cost, makespan_min).

    A row is dominated when another row is no worse in both dimensions and
    strictly better in at least one. Exact duplicates all survive. Output is
    stably ordered by cost ascending.
    """
    if not rows:
        return []
    ordered = sorted(rows, key=lambda r: r.total_cost)  # stable: input order on ties
    out: list[SweepRow] = []
    best_mk = float("inf")  # min makespan among strictly cheaper rows
    i = 0
    n = len(ordered)
    while i < n:
        j = i
        while j < n and ordered[j].total_cost == ordered[i].total_cost:
            j += 1
        group = ordered[i:j]
        group_mk = min(r.makespan_min for r in group)
        if group_mk < best_mk:
            out.extend(r for r in group if r.makespan_min == group_mk)
        best_mk = min(best_mk, group_mk)
        i = j
    return out


def recommend(rows: list[SweepRow], max_cost: float | None = None,
              max_makespan_min: float | None = None) -> SweepRow:
    """Best row under one constraint.

    With ``max_cost`` set, minimizes makespan among rows within budget; with
    ``max_makespan_min`` set, minimizes cost among rows within the deadline.
    Ties break by smaller makespan, then fewer invocations, then smaller
    batch size, and finally by the other metric (so a dominated row can never
    win a tie against the row that dominates it).

    Raises:
        InfeasibleError: when no row satisfies the constraint.
    """
    if not rows:
        raise InfeasibleError("no rows to recommend from")
    if (max_cost is None) == (max_makespan_min is None):
        raise ValueError("exactly one of max_cost / max_makespan_min must be set")
    if max_cost is not None:
        feasible = [r for r in rows if r.total_cost <= max_cost]
        if not feasible:
            raise InfeasibleError(f"no row satisfies max_cost={max_cost}")
        objective = lambda r: r.makespan_min
    else:
        feasible = [r for r in rows if r.makespan_min <= max_makespan_min]
        if not feasible:
            raise InfeasibleError(f"no row satisfies max_makespan_min={max_makespan_min}")
        objective = lambda r: r.total_cost
    return min(feasible, key=lambda r: (objective(r), r.makespan_min,
                                        r.invocation_count, r.batch_size,
                                        r.total_cost))


def speedup_report(rows: list[SweepRow],
                   cost_band: tuple[float, float]) -> SpeedupSummary:
    """Relative makespan reduction of parallel vs. monolithic inside a cost band.

    Raises:
        ReportError: when the band holds no row for one of the strategies,
            naming the missing one.
    """
    lo, hi = cost_band
    in_band = [r for r in rows if lo <= r.total_cost <= hi]
    mono = [r.makespan_min for r in in_band if r.strategy is Strategy.MONOLITHIC]
    par = [r.makespan_min for r in in_band if r.strategy is Strategy.PARALLEL]
    missing = [name for name, vals in (("monolithic", mono), ("parallel", par)) if not vals]
    if missing:
        raise ReportError(
            f"cost band ({lo}, {hi}) contains no {' or '.join(missing)} rows")
    mono_min = min(mono)
    par_min = min(par)
    return SpeedupSummary(
        reduction=1.0 - par_min / mono_min,
        monolithic_min_makespan_min=mono_min,
        parallel_min_makespan_min=par_min,
        cost_band=(lo, hi),
    )
