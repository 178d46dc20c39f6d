"""Benchmark the scheduling kernels: JIT-compiled vs. pure NumPy.

Runs the public kernels (numba-compiled unless FAASBATCH_NO_NUMBA=1) against
the uncompiled implementations on large synthetic inputs and prints the best
of three timings for each. Usage:

    python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from faasbatch import _kernels


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    rng = np.random.default_rng(0)

    m_par, k = 100_000, 512
    par_durations = rng.uniform(1_000.0, 60_000.0, size=m_par)

    m_mono = 1_000_000
    mono_durations = rng.uniform(10.0, 50.0, size=m_mono)
    mono_estimates = mono_durations.copy()
    timeout = 900_000.0

    cases = [
        ("parallel_schedule",
         lambda: _kernels.parallel_schedule(par_durations, k, 0.0),
         lambda: _kernels._parallel_schedule(par_durations, k, 0.0)),
        ("monolithic_schedule",
         lambda: _kernels.monolithic_schedule(mono_durations, mono_estimates,
                                              500.0, 0.0, timeout, 100.0),
         lambda: _kernels._monolithic_schedule(mono_durations, mono_estimates,
                                               500.0, 0.0, timeout, 100.0)),
    ]

    print(f"active backend: {_kernels.active_backend()}")
    print(f"parallel: {m_par} tasks over {k} slots; "
          f"monolithic: {m_mono} batches per chain")
    _kernels.warmup()  # exclude JIT compilation from the timings

    header = f"{'kernel':>22} {'compiled':>12} {'numpy':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, compiled, plain in cases:
        t_compiled = best_of(compiled)
        t_plain = best_of(plain)
        print(f"{name:>22} {t_compiled * 1e3:>10.1f}ms {t_plain * 1e3:>10.1f}ms "
              f"{t_plain / t_compiled:>8.1f}x")
    if _kernels.active_backend() == "numpy":
        print("note: FAASBATCH_NO_NUMBA is set (or numba is unavailable); "
              "both columns ran the same uncompiled code")


if __name__ == "__main__":
    main()
