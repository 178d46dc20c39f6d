"""Simulator behavior: chaining, fan-out, jitter, determinism."""

import math

import numpy as np
import pytest

from faasbatch import (
    BatchPlan,
    ExecutionLimits,
    PricingModel,
    SimulationError,
    Strategy,
    WorkloadSpec,
    batch_exec_time,
    cost_parallel,
    run,
    simulate_monolithic,
    simulate_parallel,
)

MONO = Strategy.MONOLITHIC
PAR = Strategy.PARALLEL


def wl(**kwargs) -> WorkloadSpec:
    base = dict(total_items=100, per_item_time_ms=1_000.0)
    base.update(kwargs)
    return WorkloadSpec(**base)


def lim(timeout=math.inf, k=10, margin=0.0) -> ExecutionLimits:
    return ExecutionLimits(max_function_duration_ms=timeout, concurrency_limit=k,
                           safety_margin_ms=margin)


class TestBatchExecTime:
    def test_deterministic(self):
        assert batch_exec_time(50, wl(per_item_time_ms=870.0)) == 43_500.0

    def test_empty_batch(self):
        assert batch_exec_time(0, wl(jitter_rel_stddev=0.3)) == 0.0

    def test_fitted_parallel_scale(self):
        assert batch_exec_time(500, wl(per_item_time_ms=613.0)) == 306_500.0

    def test_jitter_mean_and_positivity(self):
        workload = wl(per_item_time_ms=100.0, jitter_rel_stddev=0.2, seed=3)
        rng = np.random.default_rng(workload.seed)
        total = batch_exec_time(10_000, workload, rng)
        assert total > 0
        # lognormal factors have mean 1: the batch mean stays near the nominal
        assert total / (10_000 * 100.0) == pytest.approx(1.0, rel=0.02)


class TestMonolithic:
    def test_single_invocation_unbounded(self):
        res = simulate_monolithic(wl(), BatchPlan(50, MONO), lim())
        assert res.invocation_count == 1
        assert res.makespan_ms == 100_000.0

    def test_hand_stepped_chain(self):
        # 6 batches of 25 s, overhead 5 s, timeout 60 s: 5+25+25 fits, a third
        # batch would hit 80 s, so each link takes exactly two batches
        workload = wl(total_items=300, per_item_time_ms=500.0,
                      invocation_overhead_ms=5_000.0)
        res = simulate_monolithic(workload, BatchPlan(50, MONO), lim(timeout=60_000.0))
        assert res.invocation_count == 3
        assert [len(r.batches_processed) for r in res.trace] == [2, 2, 2]
        assert res.makespan_ms == 165_000.0

    def test_empty_workload(self):
        res = simulate_monolithic(wl(total_items=0), BatchPlan(50, MONO), lim())
        assert res.invocation_count == 0
        assert res.makespan_ms == 0.0
        assert res.trace == []

    def test_chain_trigger_latency_extends_makespan_not_billed(self):
        workload = wl(total_items=300, per_item_time_ms=500.0,
                      invocation_overhead_ms=5_000.0, chain_trigger_latency_ms=1_000.0)
        res = simulate_monolithic(workload, BatchPlan(50, MONO), lim(timeout=60_000.0))
        assert res.makespan_ms == 167_000.0
        assert res.total_billed_ms == 165_000.0

    def test_margin_stall_raises(self):
        workload = wl(total_items=100, per_item_time_ms=100.0)
        # batch fits the timeout but not once the margin is reserved
        with pytest.raises(SimulationError):
            simulate_monolithic(workload, BatchPlan(50, MONO),
                                lim(timeout=6_000.0, margin=2_000.0))

    def test_items_accounting(self):
        workload = wl(total_items=325, per_item_time_ms=10.0)
        res = simulate_monolithic(workload, BatchPlan(50, MONO), lim())
        assert sum(r.items_processed for r in res.trace) == 325
        assert res.trace[0].batches_processed == list(range(7))


class TestParallel:
    def test_single_wave(self):
        workload = wl(total_items=25_000, per_item_time_ms=666.0)
        res = simulate_parallel(workload, BatchPlan(500, PAR), lim(k=500))
        assert res.invocation_count == 50
        assert res.makespan_ms == 333_000.0

    def test_fifty_waves(self):
        workload = wl(total_items=25_000, per_item_time_ms=600.0,
                      invocation_overhead_ms=30_600.0)
        res = simulate_parallel(workload, BatchPlan(50, PAR), lim(k=10))
        assert res.invocation_count == 500
        assert res.makespan_ms == 50 * 60_600.0

    def test_single_task(self):
        workload = wl(total_items=40, per_item_time_ms=100.0,
                      invocation_overhead_ms=7_000.0)
        res = simulate_parallel(workload, BatchPlan(50, PAR), lim(k=10))
        assert res.invocation_count == 1
        assert res.makespan_ms == 7_000.0 + 4_000.0

    def test_dispatch_latency_offsets_every_start(self):
        workload = wl(total_items=100, per_item_time_ms=10.0,
                      dispatch_latency_ms=500.0)
        res = simulate_parallel(workload, BatchPlan(50, PAR), lim(k=2))
        assert all(r.start_ms == 500.0 for r in res.trace)
        # makespan measures from the first start, not from time zero
        assert res.makespan_ms == 500.0

    def test_raw_duration_excludes_dispatch_latency(self):
        workload = wl(total_items=100, per_item_time_ms=10.0,
                      invocation_overhead_ms=50.0, dispatch_latency_ms=500.0)
        res = simulate_parallel(workload, BatchPlan(50, PAR), lim(k=1))
        assert all(r.raw_duration_ms == 550.0 for r in res.trace)


class TestRun:
    def test_repricing_is_idempotent(self):
        workload = wl(total_items=2_000, per_item_time_ms=13.7,
                      invocation_overhead_ms=111.1)
        pricing = PricingModel(compute_rate_per_ms=2.5e-9, invocation_fee=1e-7,
                               transition_fee=2.5e-5)
        res = run(workload, BatchPlan(130, PAR), lim(k=7), pricing)
        again = cost_parallel(res, pricing)
        assert again.total_cost == res.total_cost

    def test_determinism_under_jitter(self):
        workload = wl(total_items=400, per_item_time_ms=20.0,
                      invocation_overhead_ms=100.0, jitter_rel_stddev=0.25, seed=42)
        pricing = PricingModel(compute_rate_per_ms=1e-8)
        a = run(workload, BatchPlan(30, PAR), lim(k=5), pricing)
        b = run(workload, BatchPlan(30, PAR), lim(k=5), pricing)
        assert a == b

    def test_different_seeds_differ(self):
        base = wl(total_items=400, per_item_time_ms=20.0, jitter_rel_stddev=0.25)
        pricing = PricingModel(compute_rate_per_ms=1e-8)
        a = run(base, BatchPlan(30, PAR), lim(k=5), pricing)
        from dataclasses import replace
        b = run(replace(base, seed=1), BatchPlan(30, PAR), lim(k=5), pricing)
        assert a.makespan_ms != b.makespan_ms

    def test_jittered_chain_checks_use_estimates(self):
        # the admission check uses mean batch time, so links keep chaining even
        # when jittered durations overshoot the estimate
        workload = wl(total_items=600, per_item_time_ms=100.0,
                      invocation_overhead_ms=1_000.0, jitter_rel_stddev=0.4, seed=9)
        res = simulate_monolithic(workload, BatchPlan(20, MONO), lim(timeout=9_000.0))
        assert sum(r.items_processed for r in res.trace) == 600
