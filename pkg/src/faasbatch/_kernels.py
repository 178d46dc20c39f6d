"""Scheduling kernels: the hot inner loops of both simulators.

Each kernel is written against plain NumPy arrays so the same function body
runs either JIT-compiled by numba or as-is. numba is used when importable
unless FAASBATCH_NO_NUMBA=1 selects the pure-NumPy path; results are identical
on both paths (see tests/test_kernels.py and benchmarks/bench_backends.py).

Event-queue semantics are encoded structurally: a completing task frees its
slot before any dispatch at the same timestamp (the earliest-free-slot scan),
pending batches dispatch FIFO, and slot index breaks exact ties.
"""

from __future__ import annotations

import os

import numpy as np

MONO_OK = 0
MONO_STUCK = 1  # an invocation accepted zero batches: validate_plan was bypassed


def _monolithic_schedule(durations, estimates, overhead_ms, safety_margin_ms,
                         timeout_ms, chain_latency_ms):
    """Walk one chain of invocations over the batch list.

    Each invocation pays the overhead once, then keeps accepting batches while
    elapsed + estimated-next-batch + margin fits inside the timeout. Actual
    (possibly jittered) durations accumulate into elapsed; the admission check
    uses the deterministic estimates. The successor starts chain_latency_ms
    after its predecessor ends.

    Returns (inv_start, inv_end, first_batch, n_batches, status).
    """
    m = durations.shape[0]
    inv_start = np.empty(m, np.float64)
    inv_end = np.empty(m, np.float64)
    first_batch = np.empty(m, np.int64)
    n_batches = np.empty(m, np.int64)
    n_inv = 0
    j = 0
    clock = 0.0
    while j < m:
        start = clock
        elapsed = overhead_ms
        taken = 0
        fb = j
        while j < m and elapsed + estimates[j] + safety_margin_ms <= timeout_ms:
            elapsed += durations[j]
            j += 1
            taken += 1
        if taken == 0:
            return (inv_start[:n_inv], inv_end[:n_inv], first_batch[:n_inv],
                    n_batches[:n_inv], MONO_STUCK)
        inv_start[n_inv] = start
        inv_end[n_inv] = start + elapsed
        first_batch[n_inv] = fb
        n_batches[n_inv] = taken
        clock = start + elapsed + chain_latency_ms
        n_inv += 1
    return (inv_start[:n_inv], inv_end[:n_inv], first_batch[:n_inv],
            n_batches[:n_inv], MONO_OK)


def _parallel_schedule(durations, slots, dispatch_latency_ms):
    """Greedy list scheduling of independent tasks onto ``slots`` slots.

    Task j (FIFO order) starts dispatch_latency_ms after the earliest slot
    frees; at time 0 the first ``slots`` tasks dispatch. ``durations`` must
    already include per-invocation overhead.

    Returns (starts, ends) per task, in dispatch (= input) order.
    """
    m = durations.shape[0]
    starts = np.empty(m, np.float64)
    ends = np.empty(m, np.float64)
    k = slots if slots < m else m
    if k < 1:
        k = 1
    free = np.zeros(k, np.float64)
    for j in range(m):
        slot = np.argmin(free)  # np.argmin takes the lowest index on ties
        st = free[slot] + dispatch_latency_ms
        en = st + durations[j]
        starts[j] = st
        ends[j] = en
        free[slot] = en
    return starts, ends


def _want_numba() -> bool:
    return os.environ.get("FAASBATCH_NO_NUMBA", "").strip().lower() not in (
        "1", "true", "yes", "on")


_BACKEND = "numpy"
monolithic_schedule = _monolithic_schedule
parallel_schedule = _parallel_schedule

if _want_numba():
    try:
        from numba import njit

        monolithic_schedule = njit(cache=True)(_monolithic_schedule)
        parallel_schedule = njit(cache=True)(_parallel_schedule)
        _BACKEND = "numba"
    except ImportError:
        pass


def active_backend() -> str:
    """'numba' when kernels are JIT-compiled, else 'numpy'."""
    return _BACKEND


def warmup() -> None:
    """Trigger JIT compilation (a no-op on the NumPy path)."""
    d = np.array([1.0], np.float64)
    monolithic_schedule(d, d, 0.0, 0.0, 10.0, 0.0)
    parallel_schedule(d, 1, 0.0)
