"""Shared fixtures: the measured reference points and the fit derived from them.

The reference workload is 25,000 items processed on a metered cloud platform;
the four observation points below are the measured (cost, makespan) anchors
used for calibration throughout the suite.
"""

from __future__ import annotations

import pytest

from faasbatch import (
    CalibrationConfig,
    ExecutionLimits,
    ObservationPoint,
    PricingModel,
    Strategy,
    WorkloadSpec,
    calibrate,
)

TOTAL_ITEMS = 25_000
TIMEOUT_MS = 900_000.0

# (batch_size, total_cost, makespan_min)
REF_MONO_B50 = (50, 0.2408, 363.5)
REF_MONO_B1000 = (1000, 0.2229, 336.5)
# (batch_size, total_cost, makespan_min, concurrency)
REF_PAR_B50 = (50, 0.3454, 1.01, 500)
REF_PAR_B500 = (500, 0.1838, None, None)
REF_PAR_MAKESPAN_CAP_MIN = 12.79  # parallel runs stayed below this

REF_SIZES = [50, 100, 125, 200, 250, 333, 500, 625, 1000]


def reference_observations() -> list[ObservationPoint]:
    return [
        ObservationPoint(REF_MONO_B50[0], Strategy.MONOLITHIC,
                         REF_MONO_B50[1], REF_MONO_B50[2]),
        ObservationPoint(REF_MONO_B1000[0], Strategy.MONOLITHIC,
                         REF_MONO_B1000[1], REF_MONO_B1000[2]),
        ObservationPoint(REF_PAR_B50[0], Strategy.PARALLEL,
                         REF_PAR_B50[1], REF_PAR_B50[2], REF_PAR_B50[3]),
        ObservationPoint(REF_PAR_B500[0], Strategy.PARALLEL,
                         REF_PAR_B500[1], REF_PAR_B500[2], REF_PAR_B500[3]),
    ]


@pytest.fixture(scope="session")
def reference_limits() -> ExecutionLimits:
    return ExecutionLimits(max_function_duration_ms=TIMEOUT_MS, concurrency_limit=10)


@pytest.fixture(scope="session")
def reference_fit(reference_limits):
    return calibrate(
        reference_observations(),
        CalibrationConfig(total_items=TOTAL_ITEMS, limits=reference_limits),
    )


@pytest.fixture(scope="session")
def fitted_pricing(reference_fit) -> PricingModel:
    return PricingModel(compute_rate_per_ms=reference_fit.effective_rate_per_ms)


@pytest.fixture(scope="session")
def parallel_workload(reference_fit) -> WorkloadSpec:
    return WorkloadSpec(
        total_items=TOTAL_ITEMS,
        per_item_time_ms=reference_fit.per_item_time_ms,
        invocation_overhead_ms=reference_fit.invocation_overhead_ms,
    )


@pytest.fixture(scope="session")
def monolithic_workload(reference_fit) -> WorkloadSpec:
    # anchored per-item time; overhead shared with the parallel fit
    return WorkloadSpec(
        total_items=TOTAL_ITEMS,
        per_item_time_ms=reference_fit.monolithic_per_item_time_ms,
        invocation_overhead_ms=reference_fit.invocation_overhead_ms,
    )
