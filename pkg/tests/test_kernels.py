"""Backend equivalence: the JIT-compiled kernels must match the plain-NumPy
implementations bit for bit, and the env flag must select the NumPy path."""

import os
import subprocess
import sys

import numpy as np

from faasbatch import _kernels


def random_inputs(rng):
    m = int(rng.integers(0, 60))
    durations = rng.uniform(0.5, 5_000.0, size=m)
    return durations


def test_parallel_schedule_paths_agree():
    rng = np.random.default_rng(7)
    for _ in range(200):
        durations = random_inputs(rng)
        k = int(rng.integers(1, 20))
        d = float(rng.choice([0.0, 3.5, 100.0]))
        s1, e1 = _kernels.parallel_schedule(durations, k, d)
        s2, e2 = _kernels._parallel_schedule(durations, k, d)
        assert np.array_equal(s1, s2)
        assert np.array_equal(e1, e2)


def test_monolithic_schedule_paths_agree():
    rng = np.random.default_rng(11)
    for _ in range(200):
        durations = random_inputs(rng)
        estimates = durations.copy()
        overhead = float(rng.uniform(0, 500))
        margin = float(rng.uniform(0, 50))
        timeout = overhead + margin + (durations.max() if len(durations) else 1.0) \
            + float(rng.uniform(1, 10_000))
        latency = float(rng.choice([0.0, 25.0]))
        out1 = _kernels.monolithic_schedule(durations, estimates, overhead,
                                            margin, timeout, latency)
        out2 = _kernels._monolithic_schedule(durations, estimates, overhead,
                                             margin, timeout, latency)
        assert out1[4] == out2[4]
        for a, b in zip(out1[:4], out2[:4]):
            assert np.array_equal(a, b)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, FAASBATCH_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from faasbatch import active_backend; print(active_backend())"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


def test_stuck_chain_flagged():
    durations = np.array([100.0])
    out = _kernels.monolithic_schedule(durations, durations, 50.0, 0.0, 120.0, 0.0)
    assert out[4] == _kernels.MONO_STUCK
