"""Run configuration: YAML parsing, validation and canonical emission.

Parsing is strict and non-fail-fast: unknown keys anywhere are rejected, type
and invariant violations are collected across the whole document, and the
error lists every problem with its ``section.key`` path. ``emit_config``
writes the canonical form (all defaults materialized, observation CSVs
inlined), so ``parse_config(emit_config(cfg))`` reproduces ``cfg`` exactly.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import yaml

from .calibrate import ObservationPoint, ParameterPins
from .model import (
    BatchPlan,
    ExecutionLimits,
    FaasBatchError,
    PricingModel,
    Strategy,
    WorkloadSpec,
    validate_limits,
    validate_pricing,
    validate_workload,
)

OUT_DIR_ENV = "FAASBATCH_OUT_DIR"


class ConfigError(FaasBatchError):
    """One or more configuration problems; ``issues`` lists them all."""

    def __init__(self, issues: list[str]):
        self.issues = issues
        super().__init__("invalid configuration:\n  " + "\n  ".join(issues))


@dataclass(frozen=True)
class SweepSettings:
    batch_sizes: list[int]
    strategies: list[Strategy]
    concurrency_values: list[int]
    # per-strategy partial field overrides applied on top of the base workload
    workload_overrides: dict[Strategy, dict[str, float]] = field(default_factory=dict)


@dataclass(frozen=True)
class CalibrationSettings:
    observations: list[ObservationPoint]
    pins: ParameterPins = field(default_factory=ParameterPins)


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    emit_trace: bool = False
    emit_plots: bool = True
    emit_report: bool = True


@dataclass(frozen=True)
class RunConfig:
    workload: WorkloadSpec
    limits: ExecutionLimits
    pricing: PricingModel
    plans: list[BatchPlan] = field(default_factory=list)
    sweep: SweepSettings | None = None
    calibration: CalibrationSettings | None = None
    output: OutputSettings = field(default_factory=OutputSettings)

    def workload_for(self, strategy: Strategy) -> WorkloadSpec:
        """Base workload with any per-strategy sweep overrides applied."""
        if self.sweep and strategy in self.sweep.workload_overrides:
            return replace(self.workload, **self.sweep.workload_overrides[strategy])
        return self.workload


_WORKLOAD_FIELDS = {f.name for f in fields(WorkloadSpec)}
_LIMITS_FIELDS = {f.name for f in fields(ExecutionLimits)}
_PRICING_FIELDS = {f.name for f in fields(PricingModel)}
_PIN_FIELDS = {f.name for f in fields(ParameterPins)}
_OBS_FIELDS = {"batch_size", "strategy", "total_cost", "makespan_min", "concurrency"}
_PLAN_FIELDS = {"batch_size", "strategy"}
_SWEEP_FIELDS = {"batch_sizes", "strategies", "concurrency", "workload_overrides"}
_CAL_FIELDS = {"observations", "observations_csv", "pins"}
_OUTPUT_FIELDS = {"directory", "emit_trace", "emit_plots", "emit_report"}
_TOP_FIELDS = {"workload", "limits", "pricing", "plans", "sweep", "calibration", "output"}
_INT_FIELDS = {"total_items", "seed", "concurrency_limit", "transitions_per_task",
               "batch_size", "concurrency"}


class _Issues:
    def __init__(self):
        self.items: list[str] = []

    def add(self, path: str, message: str):
        self.items.append(f"{path}: {message}")

    def check_keys(self, path: str, data: dict, allowed: set[str]):
        for key in data:
            if key not in allowed:
                self.add(f"{path}.{key}", "unknown key")


def _num(issues: _Issues, path: str, data: dict, key: str, default=None,
         required: bool = False):
    if key not in data or data[key] is None:
        if required:
            issues.add(f"{path}.{key}", "required key is missing")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        issues.add(f"{path}.{key}", f"expected a number, got {value!r}")
        return default
    if key in _INT_FIELDS:
        if isinstance(value, float) and not value.is_integer():
            issues.add(f"{path}.{key}", f"expected an integer, got {value!r}")
            return default
        return int(value)
    return float(value)


def _num_item(issues: _Issues, path: str, value, as_int: bool):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        issues.add(path, f"expected a number, got {value!r}")
        return None
    if as_int:
        if isinstance(value, float) and not value.is_integer():
            issues.add(path, f"expected an integer, got {value!r}")
            return None
        return int(value)
    return float(value)


def _strategy(issues: _Issues, path: str, value) -> Strategy | None:
    try:
        return Strategy(str(value).lower())
    except ValueError:
        issues.add(path, f"unknown strategy {value!r} "
                         f"(expected 'monolithic' or 'parallel')")
        return None


def _section(issues: _Issues, doc: dict, name: str, required: bool) -> dict | None:
    data = doc.get(name)
    if data is None:
        if required:
            issues.add(name, "required section is missing")
        return None
    if not isinstance(data, dict):
        issues.add(name, "expected a mapping")
        return None
    return data


def parse_config(path: str | Path) -> RunConfig:
    """Load and fully validate a YAML run configuration.

    Raises:
        ConfigError: with every syntax, key, type and invariant problem found.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read config ({exc.strerror})"]) from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError([f"{path}: YAML syntax error{where}: "
                           f"{getattr(exc, 'problem', exc)}"]) from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])

    issues = _Issues()
    issues.check_keys("config", doc, _TOP_FIELDS)

    workload = _parse_workload(issues, _section(issues, doc, "workload", True) or {})
    limits = _parse_limits(issues, _section(issues, doc, "limits", True) or {})
    pricing = _parse_pricing(issues, _section(issues, doc, "pricing", True) or {})
    plans = _parse_plans(issues, doc.get("plans"))
    sweep = _parse_sweep(issues, _section(issues, doc, "sweep", False))
    calibration = _parse_calibration(issues, _section(issues, doc, "calibration", False),
                                     base_dir=path.parent)
    output = _parse_output(issues, _section(issues, doc, "output", False))

    for v in validate_workload(workload):
        issues.add(f"workload.{v.field}", v.message)
    for v in validate_limits(limits):
        issues.add(f"limits.{v.field}", v.message)
    for v in validate_pricing(pricing):
        issues.add(f"pricing.{v.field}", v.message)

    if issues.items:
        raise ConfigError(issues.items)
    return RunConfig(workload=workload, limits=limits, pricing=pricing, plans=plans,
                     sweep=sweep, calibration=calibration, output=output)


def _parse_workload(issues: _Issues, data: dict) -> WorkloadSpec:
    issues.check_keys("workload", data, _WORKLOAD_FIELDS)
    return WorkloadSpec(
        total_items=_num(issues, "workload", data, "total_items", 0, required=True) or 0,
        per_item_time_ms=_num(issues, "workload", data, "per_item_time_ms", 0.0,
                              required=True) or 0.0,
        invocation_overhead_ms=_num(issues, "workload", data, "invocation_overhead_ms", 0.0),
        chain_trigger_latency_ms=_num(issues, "workload", data, "chain_trigger_latency_ms", 0.0),
        dispatch_latency_ms=_num(issues, "workload", data, "dispatch_latency_ms", 0.0),
        memory_used_mb=_num(issues, "workload", data, "memory_used_mb", 850.0),
        jitter_rel_stddev=_num(issues, "workload", data, "jitter_rel_stddev", 0.0),
        seed=_num(issues, "workload", data, "seed", 0),
    )


def _parse_limits(issues: _Issues, data: dict) -> ExecutionLimits:
    issues.check_keys("limits", data, _LIMITS_FIELDS)
    return ExecutionLimits(
        max_function_duration_ms=_num(issues, "limits", data, "max_function_duration_ms",
                                      0.0, required=True) or 0.0,
        concurrency_limit=_num(issues, "limits", data, "concurrency_limit", 10),
        safety_margin_ms=_num(issues, "limits", data, "safety_margin_ms", 0.0),
    )


def _parse_pricing(issues: _Issues, data: dict) -> PricingModel:
    issues.check_keys("pricing", data, _PRICING_FIELDS)
    return PricingModel(
        compute_rate_per_ms=_num(issues, "pricing", data, "compute_rate_per_ms", 0.0,
                                 required=True) or 0.0,
        memory_alloc_mb=_num(issues, "pricing", data, "memory_alloc_mb", 850.0),
        invocation_fee=_num(issues, "pricing", data, "invocation_fee", 0.0),
        transition_fee=_num(issues, "pricing", data, "transition_fee", 0.0),
        transitions_per_task=_num(issues, "pricing", data, "transitions_per_task", 2),
        billing_granularity_ms=_num(issues, "pricing", data, "billing_granularity_ms", 1.0),
    )


def _parse_plans(issues: _Issues, data) -> list[BatchPlan]:
    if data is None:
        return []
    if not isinstance(data, list):
        issues.add("plans", "expected a list of {batch_size, strategy} entries")
        return []
    plans = []
    for i, entry in enumerate(data):
        path = f"plans[{i}]"
        if not isinstance(entry, dict):
            issues.add(path, "expected a mapping")
            continue
        issues.check_keys(path, entry, _PLAN_FIELDS)
        b = _num(issues, path, entry, "batch_size", required=True)
        strategy = _strategy(issues, f"{path}.strategy", entry.get("strategy"))
        if b is not None and b < 1:
            issues.add(f"{path}.batch_size", "batch_size must be >= 1")
        if b is not None and strategy is not None and b >= 1:
            plans.append(BatchPlan(batch_size=b, strategy=strategy))
    return plans


def _parse_sweep(issues: _Issues, data: dict | None) -> SweepSettings | None:
    if data is None:
        return None
    issues.check_keys("sweep", data, _SWEEP_FIELDS)
    sizes = data.get("batch_sizes")
    if not isinstance(sizes, list) or not sizes:
        issues.add("sweep.batch_sizes", "required non-empty list")
        sizes = []
    batch_sizes = []
    for i, value in enumerate(sizes):
        b = _num_item(issues, f"sweep.batch_sizes[{i}]", value, as_int=True)
        if b is None:
            continue
        if b < 1:
            issues.add(f"sweep.batch_sizes[{i}]", "batch_size must be >= 1")
        else:
            batch_sizes.append(b)
    raw_strategies = data.get("strategies", [s.value for s in Strategy])
    strategies = []
    if not isinstance(raw_strategies, list):
        issues.add("sweep.strategies", "expected a list")
    else:
        for value in raw_strategies:
            s = _strategy(issues, "sweep.strategies", value)
            if s is not None:
                strategies.append(s)
    raw_ks = data.get("concurrency", [10])
    ks = []
    if not isinstance(raw_ks, list):
        issues.add("sweep.concurrency", "expected a list of integers")
    else:
        for i, value in enumerate(raw_ks):
            k = _num_item(issues, f"sweep.concurrency[{i}]", value, as_int=True)
            if k is None:
                continue
            if k < 1:
                issues.add(f"sweep.concurrency[{i}]", "concurrency must be >= 1")
            else:
                ks.append(k)
    overrides: dict[Strategy, dict[str, float]] = {}
    raw_over = data.get("workload_overrides")
    if raw_over is not None:
        if not isinstance(raw_over, dict):
            issues.add("sweep.workload_overrides", "expected a mapping by strategy")
        else:
            for key, sub in raw_over.items():
                s = _strategy(issues, f"sweep.workload_overrides.{key}", key)
                if s is None or not isinstance(sub, dict):
                    if s is not None:
                        issues.add(f"sweep.workload_overrides.{key}", "expected a mapping")
                    continue
                path = f"sweep.workload_overrides.{key}"
                issues.check_keys(path, sub, _WORKLOAD_FIELDS)
                vals = {}
                for name in sub:
                    if name in _WORKLOAD_FIELDS:
                        v = _num(issues, path, sub, name)
                        if v is not None:
                            vals[name] = v
                overrides[s] = vals
    return SweepSettings(batch_sizes=batch_sizes, strategies=strategies,
                         concurrency_values=ks, workload_overrides=overrides)


def _parse_observation(issues: _Issues, path: str, entry: dict) -> ObservationPoint | None:
    issues.check_keys(path, entry, _OBS_FIELDS)
    b = _num(issues, path, entry, "batch_size", required=True)
    strategy = _strategy(issues, f"{path}.strategy", entry.get("strategy"))
    cost = _num(issues, path, entry, "total_cost", required=True)
    mk = _num(issues, path, entry, "makespan_min")
    k = _num(issues, path, entry, "concurrency")
    if b is not None and b < 1:
        issues.add(f"{path}.batch_size", "batch_size must be >= 1")
        return None
    if cost is not None and cost < 0:
        issues.add(f"{path}.total_cost", "total_cost must be >= 0")
        return None
    if mk is not None and mk < 0:
        issues.add(f"{path}.makespan_min", "makespan_min must be >= 0")
        return None
    if None in (b, strategy, cost):
        return None
    return ObservationPoint(batch_size=b, strategy=strategy, total_cost=cost,
                            makespan_min=mk, concurrency=k)


def _parse_calibration(issues: _Issues, data: dict | None,
                       base_dir: Path) -> CalibrationSettings | None:
    if data is None:
        return None
    issues.check_keys("calibration", data, _CAL_FIELDS)
    observations: list[ObservationPoint] = []
    raw_obs = data.get("observations")
    if raw_obs is not None:
        if not isinstance(raw_obs, list):
            issues.add("calibration.observations", "expected a list")
        else:
            for i, entry in enumerate(raw_obs):
                if not isinstance(entry, dict):
                    issues.add(f"calibration.observations[{i}]", "expected a mapping")
                    continue
                point = _parse_observation(issues, f"calibration.observations[{i}]", entry)
                if point is not None:
                    observations.append(point)
    csv_path = data.get("observations_csv")
    if csv_path is not None:
        resolved = Path(csv_path)
        if not resolved.is_absolute():
            resolved = base_dir / resolved
        if not resolved.is_file():
            issues.add("calibration.observations_csv", f"file not found: {resolved}")
        else:
            observations.extend(read_observations_csv(resolved, issues))
    pins_data = data.get("pins") or {}
    if not isinstance(pins_data, dict):
        issues.add("calibration.pins", "expected a mapping")
        pins_data = {}
    issues.check_keys("calibration.pins", pins_data, _PIN_FIELDS)
    pins = ParameterPins(**{
        name: _num(issues, "calibration.pins", pins_data, name)
        for name in _PIN_FIELDS if name in pins_data
    })
    return CalibrationSettings(observations=observations, pins=pins)


def read_observations_csv(path: Path, issues: _Issues | None = None) -> list[ObservationPoint]:
    """Read observation points from CSV with columns
    batch_size,strategy,total_cost,makespan_min,concurrency (last two optional
    per row, left empty when unknown)."""
    own = issues is None
    if issues is None:
        issues = _Issues()
    points = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.DictReader(fh)):
            entry = {k: v for k, v in row.items() if v not in (None, "")}
            for key in ("batch_size", "total_cost", "makespan_min", "concurrency"):
                if key in entry:
                    try:
                        entry[key] = float(entry[key])
                    except ValueError:
                        issues.add(f"{path}:row {i + 2}.{key}",
                                   f"expected a number, got {entry[key]!r}")
                        del entry[key]
            point = _parse_observation(issues, f"{path}:row {i + 2}", entry)
            if point is not None:
                points.append(point)
    if own and issues.items:
        raise ConfigError(issues.items)
    return points


def _parse_output(issues: _Issues, data: dict | None) -> OutputSettings:
    if data is None:
        return OutputSettings()
    issues.check_keys("output", data, _OUTPUT_FIELDS)
    directory = data.get("directory", "out")
    if not isinstance(directory, str):
        issues.add("output.directory", "expected a string")
        directory = "out"
    flags = {}
    for name in ("emit_trace", "emit_plots", "emit_report"):
        if name in data:
            if not isinstance(data[name], bool):
                issues.add(f"output.{name}", "expected true or false")
            else:
                flags[name] = data[name]
    return OutputSettings(directory=directory, **flags)


def resolve_output_dir(config: RunConfig, cli_out: str | None = None) -> Path:
    """Output directory with precedence: env override, --out flag, config."""
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env)
    if cli_out:
        return Path(cli_out)
    return Path(config.output.directory)


def config_to_dict(config: RunConfig) -> dict:
    """Canonical plain-dict form with every field materialized."""
    doc: dict = {
        "workload": {f.name: getattr(config.workload, f.name)
                     for f in fields(WorkloadSpec)},
        "limits": {f.name: getattr(config.limits, f.name)
                   for f in fields(ExecutionLimits)},
        "pricing": {f.name: getattr(config.pricing, f.name)
                    for f in fields(PricingModel)},
    }
    if config.plans:
        doc["plans"] = [{"batch_size": p.batch_size, "strategy": p.strategy.value}
                        for p in config.plans]
    if config.sweep is not None:
        doc["sweep"] = {
            "batch_sizes": list(config.sweep.batch_sizes),
            "strategies": [s.value for s in config.sweep.strategies],
            "concurrency": list(config.sweep.concurrency_values),
        }
        if config.sweep.workload_overrides:
            doc["sweep"]["workload_overrides"] = {
                s.value: dict(sorted(vals.items()))
                for s, vals in sorted(config.sweep.workload_overrides.items(),
                                      key=lambda kv: kv[0].value)
            }
    if config.calibration is not None:
        cal: dict = {"observations": []}
        for o in config.calibration.observations:
            entry = {"batch_size": o.batch_size, "strategy": o.strategy.value,
                     "total_cost": o.total_cost}
            if o.makespan_min is not None:
                entry["makespan_min"] = o.makespan_min
            if o.concurrency is not None:
                entry["concurrency"] = o.concurrency
            cal["observations"].append(entry)
        pins = {name: getattr(config.calibration.pins, name)
                for name in sorted(_PIN_FIELDS)
                if getattr(config.calibration.pins, name) is not None}
        if pins:
            cal["pins"] = pins
        doc["calibration"] = cal
    doc["output"] = {
        "directory": config.output.directory,
        "emit_trace": config.output.emit_trace,
        "emit_plots": config.output.emit_plots,
        "emit_report": config.output.emit_report,
    }
    return doc


def emit_config(config: RunConfig, path: str | Path) -> None:
    """Write the canonical YAML form of ``config`` to ``path``."""
    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(config), fh, sort_keys=False)
