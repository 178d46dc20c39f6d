"""Sweeps, Pareto filtering, recommendations and the speedup report."""

import numpy as np
import pytest

from faasbatch import (
    InfeasibleError,
    ReportError,
    Strategy,
    SweepRow,
    pareto_frontier,
    recommend,
    speedup_report,
    sweep,
)
from conftest import REF_SIZES

MONO = Strategy.MONOLITHIC
PAR = Strategy.PARALLEL


def row(cost, mk, b=10, strategy=PAR, k=10, inv=1):
    return SweepRow(batch_size=b, strategy=strategy, concurrency=k,
                    total_cost=cost, makespan_min=mk, invocation_count=inv,
                    compute_cost=cost, orchestration_cost=0.0)


def brute_force_frontier(rows):
    def dominated(r):
        for other in rows:
            if other is r:
                continue
            if (other.total_cost <= r.total_cost
                    and other.makespan_min <= r.makespan_min
                    and (other.total_cost < r.total_cost
                         or other.makespan_min < r.makespan_min)):
                return True
        return False

    return sorted([r for r in rows if not dominated(r)], key=lambda r: r.total_cost)


class TestSweep:
    def test_reference_grid_cardinality(self, parallel_workload, reference_limits,
                                        fitted_pricing):
        result = sweep(REF_SIZES, [MONO, PAR], parallel_workload, reference_limits,
                       fitted_pricing)
        assert len(result.rows) == 18
        assert result.failures == []

    def test_monolithic_costs_form_a_flat_band(self, monolithic_workload,
                                               reference_limits, fitted_pricing):
        result = sweep(REF_SIZES, [MONO], monolithic_workload, reference_limits,
                       fitted_pricing)
        costs = [r.total_cost for r in result.rows]
        assert max(costs) / min(costs) < 1.05
        assert all(0.20 < c < 0.25 for c in costs)

    def test_small_batch_fanout_far_faster_than_large(self, parallel_workload,
                                                      reference_limits,
                                                      fitted_pricing):
        result = sweep([50, 1000], [PAR], parallel_workload, reference_limits,
                       fitted_pricing, concurrency_values=[500])
        by_size = {r.batch_size: r for r in result.rows}
        assert by_size[50].makespan_min < by_size[1000].makespan_min / 5

    def test_invalid_combination_reported_others_run(self, parallel_workload,
                                                     reference_limits,
                                                     fitted_pricing):
        result = sweep([50, 10_000], [PAR], parallel_workload, reference_limits,
                       fitted_pricing)
        assert [r.batch_size for r in result.rows] == [50]
        assert len(result.failures) == 1
        assert result.failures[0].batch_size == 10_000

    def test_rows_sorted_and_deterministic(self, parallel_workload, reference_limits,
                                           fitted_pricing):
        a = sweep(REF_SIZES, [PAR, MONO], parallel_workload, reference_limits,
                  fitted_pricing, concurrency_values=[100, 10])
        b = sweep(REF_SIZES, [PAR, MONO], parallel_workload, reference_limits,
                  fitted_pricing, concurrency_values=[100, 10])
        assert a == b
        keys = [(r.strategy.value, r.batch_size, r.concurrency) for r in a.rows]
        assert keys == sorted(keys)


class TestParetoFrontier:
    def test_strict_domination(self):
        a, b = row(1.0, 1.0), row(2.0, 2.0)
        assert pareto_frontier([a, b]) == [a]

    def test_incomparable_rows_survive(self):
        a, b = row(1.0, 2.0), row(2.0, 1.0)
        assert pareto_frontier([a, b]) == [a, b]

    def test_empty(self):
        assert pareto_frontier([]) == []

    def test_equal_cost_ties(self):
        a, b, c = row(1.0, 5.0), row(1.0, 4.0), row(1.0, 4.0)
        assert pareto_frontier([a, b, c]) == [b, c]

    def test_matches_brute_force_on_random_tables(self):
        rng = np.random.default_rng(123)
        for _ in range(200):
            n = int(rng.integers(0, 40))
            rows = [row(float(rng.integers(0, 8)) / 4.0,
                        float(rng.integers(0, 8)) / 4.0)
                    for _ in range(n)]
            assert pareto_frontier(rows) == brute_force_frontier(rows)


class TestRecommend:
    def test_budget_picks_fast_fanout(self, monolithic_workload, parallel_workload,
                                      reference_limits, fitted_pricing):
        rows = (sweep(REF_SIZES, [MONO], monolithic_workload, reference_limits,
                      fitted_pricing, concurrency_values=[10, 100]).rows
                + sweep(REF_SIZES, [PAR], parallel_workload, reference_limits,
                        fitted_pricing, concurrency_values=[10, 100]).rows)
        best = recommend(rows, max_cost=0.25)
        assert best.strategy is PAR
        assert best.makespan_min < 10.0

    def test_unbounded_deadline_returns_cost_minimum(self):
        rows = [row(3.0, 1.0), row(1.0, 9.0), row(2.0, 2.0)]
        assert recommend(rows, max_makespan_min=float("inf")) == rows[1]

    def test_zero_budget_infeasible(self):
        with pytest.raises(InfeasibleError, match="max_cost"):
            recommend([row(1.0, 1.0)], max_cost=0.0)

    def test_tie_breaking_order(self):
        a = row(1.0, 5.0, inv=3, b=20)
        b = row(2.0, 5.0, inv=2, b=30)
        c = row(3.0, 5.0, inv=2, b=10)
        assert recommend([a, b, c], max_cost=10.0) == c
        d = row(4.0, 4.0, inv=9, b=99)
        assert recommend([a, b, c, d], max_cost=10.0) == d

    def test_dropping_dominated_rows_keeps_recommendation(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            rows = [row(float(rng.integers(1, 9)), float(rng.integers(1, 9)))
                    for _ in range(12)]
            budget = float(rng.integers(1, 9))
            try:
                full = recommend(rows, max_cost=budget)
            except InfeasibleError:
                continue
            assert recommend(pareto_frontier(rows), max_cost=budget) == full


class TestSpeedupReport:
    def test_identical_rows_zero_reduction(self):
        rows = [row(1.0, 7.0, strategy=MONO), row(1.0, 7.0, strategy=PAR)]
        assert speedup_report(rows, (0.0, 2.0)).reduction == 0.0

    def test_halved_makespan(self):
        rows = [row(1.0, 10.0, strategy=MONO), row(1.0, 5.0, strategy=PAR)]
        assert speedup_report(rows, (0.0, 2.0)).reduction == pytest.approx(0.5)

    def test_missing_strategy_named(self):
        rows = [row(1.0, 10.0, strategy=MONO)]
        with pytest.raises(ReportError, match="parallel"):
            speedup_report(rows, (0.0, 2.0))
        with pytest.raises(ReportError, match="monolithic"):
            speedup_report([row(1.0, 1.0, strategy=PAR)], (0.0, 2.0))
