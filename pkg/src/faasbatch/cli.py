"""Command-line interface.

Usage:
    faasbatch simulate  --config run.yaml [--out DIR] [--seed N] [--emit-trace] [--quiet]
    faasbatch sweep     --config run.yaml [--out DIR] [--seed N] [--emit-trace] [--quiet]
    faasbatch calibrate --config run.yaml [--out DIR] [--quiet]

Exit codes: 0 success, 1 configuration/validation/IO error, 2 infeasible
recommendation or calibration error. FAASBATCH_OUT_DIR overrides the output
directory ahead of --out and the config file.
"""

from __future__ import annotations

import sys
from dataclasses import replace

import click

from .calibrate import CalibrationConfig, calibrate
from .config import ConfigError, RunConfig, parse_config, resolve_output_dir
from .emit import (
    EmitError,
    emit_csv,
    emit_fit_report,
    emit_plotdata,
    emit_trace,
    format_currency,
    format_fit_report,
)
from .engine import run
from .model import (
    BatchPlan,
    CalibrationError,
    InfeasibleError,
    InvalidPlanError,
    SimulationError,
)
from .sweep import SweepRow, sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2

_config_opt = click.option("--config", "config_path", required=True,
                           type=click.Path(), help="Run configuration (YAML).")
_out_opt = click.option("--out", "out_dir", default=None,
                        type=click.Path(file_okay=False),
                        help="Output directory (overrides the config).")
_seed_opt = click.option("--seed", default=None, type=click.IntRange(min=0),
                         help="Override the workload jitter seed.")
_trace_opt = click.option("--emit-trace", "trace_flag", is_flag=True, default=False,
                          help="Write a JSONL invocation trace per run.")
_quiet_opt = click.option("--quiet", is_flag=True, default=False,
                          help="Suppress the stdout summary.")


@click.group()
def cli() -> None:
    """Simulate and optimize serverless batch processing plans."""


def _load(config_path: str, seed: int | None) -> RunConfig:
    config = parse_config(config_path)
    if seed is not None:
        config = replace(config, workload=replace(config.workload, seed=seed))
    return config


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _row_from_result(plan: BatchPlan, concurrency: int, result) -> SweepRow:
    return SweepRow(
        batch_size=plan.batch_size,
        strategy=plan.strategy,
        concurrency=concurrency,
        total_cost=result.total_cost,
        makespan_min=result.makespan_ms / 60_000.0,
        invocation_count=result.invocation_count,
        compute_cost=result.compute_cost,
        orchestration_cost=result.orchestration_cost,
    )


def _print_result(plan: BatchPlan, result, quiet: bool) -> None:
    if quiet:
        return
    click.echo(f"plan batch_size={plan.batch_size} strategy={plan.strategy.value}")
    click.echo(f"  invocations: {result.invocation_count}"
               f"  transitions: {result.transition_count}")
    click.echo(f"  makespan: {result.makespan_ms / 60_000.0:.4f} min"
               f" ({result.makespan_ms:.1f} ms)")
    click.echo(f"  cost: total ${format_currency(result.total_cost)}"
               f" (compute ${format_currency(result.compute_cost)},"
               f" invocations ${format_currency(result.invocation_cost)},"
               f" orchestration ${format_currency(result.orchestration_cost)})")


@cli.command("simulate")
@_config_opt
@_out_opt
@_seed_opt
@_trace_opt
@_quiet_opt
def cmd_simulate(config_path: str, out_dir: str | None, seed: int | None,
                 trace_flag: bool, quiet: bool) -> None:
    """Run every plan listed in the config and write results."""
    try:
        config = _load(config_path, seed)
    except ConfigError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if not config.plans:
        _fail("config has no 'plans' section; simulate needs at least one plan",
              EXIT_VALIDATION)
    out = resolve_output_dir(config, out_dir)
    want_trace = trace_flag or config.output.emit_trace
    rows = []
    try:
        for plan in config.plans:
            result = run(config.workload, plan, config.limits, config.pricing)
            rows.append(_row_from_result(plan, config.limits.concurrency_limit, result))
            _print_result(plan, result, quiet)
            if want_trace:
                name = f"trace_{plan.strategy.value}_b{plan.batch_size}.jsonl"
                emit_trace(result, out / name)
        emit_csv(rows, out / "results.csv")
    except InvalidPlanError as exc:
        _fail(f"plan rejected: {exc}", EXIT_VALIDATION)
    except SimulationError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    except EmitError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if not quiet:
        click.echo(f"wrote {out / 'results.csv'}")


@cli.command("sweep")
@_config_opt
@_out_opt
@_seed_opt
@_trace_opt
@_quiet_opt
def cmd_sweep(config_path: str, out_dir: str | None, seed: int | None,
              trace_flag: bool, quiet: bool) -> None:
    """Sweep batch sizes x strategies x concurrency and emit the table."""
    try:
        config = _load(config_path, seed)
    except ConfigError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if config.sweep is None:
        _fail("config has no 'sweep' section", EXIT_VALIDATION)
    settings = config.sweep
    out = resolve_output_dir(config, out_dir)
    want_trace = trace_flag or config.output.emit_trace

    all_rows: list[SweepRow] = []
    failures = []
    try:
        for strategy in settings.strategies:
            workload = config.workload_for(strategy)
            result = sweep(settings.batch_sizes, [strategy], workload,
                           config.limits, config.pricing,
                           concurrency_values=settings.concurrency_values)
            all_rows.extend(result.rows)
            failures.extend(result.failures)
            if want_trace:
                for row in result.rows:
                    lim = replace(config.limits, concurrency_limit=row.concurrency)
                    res = run(workload, BatchPlan(row.batch_size, strategy), lim,
                              config.pricing)
                    emit_trace(res, out / f"trace_{strategy.value}_b{row.batch_size}"
                                          f"_k{row.concurrency}.jsonl")
        all_rows.sort(key=lambda r: (r.strategy.value, r.batch_size, r.concurrency))
        emit_csv(all_rows, out / "results.csv")
        if config.output.emit_plots:
            emit_plotdata(all_rows, out)
    except EmitError as exc:
        _fail(str(exc), EXIT_VALIDATION)

    if not quiet:
        click.echo(f"{'batch_size':>10} {'strategy':>10} {'K':>5} "
                   f"{'cost':>10} {'makespan_min':>13} {'invocations':>12}")
        for r in all_rows:
            click.echo(f"{r.batch_size:>10} {r.strategy.value:>10} {r.concurrency:>5} "
                       f"{format_currency(r.total_cost):>10} {r.makespan_min:>13.4f} "
                       f"{r.invocation_count:>12}")
        click.echo(f"wrote {out / 'results.csv'}")
    for f in failures:
        click.echo(f"error: batch_size={f.batch_size} strategy={f.strategy.value} "
                   f"concurrency={f.concurrency}: {f.message}", err=True)
    sys.exit(EXIT_VALIDATION if failures else EXIT_OK)


@cli.command("calibrate")
@_config_opt
@_out_opt
@_quiet_opt
def cmd_calibrate(config_path: str, out_dir: str | None, quiet: bool) -> None:
    """Fit rate and latency parameters from the config's observations."""
    try:
        config = parse_config(config_path)
    except ConfigError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if config.calibration is None:
        _fail("config has no 'calibration' section", EXIT_VALIDATION)
    cal_config = CalibrationConfig(
        total_items=config.workload.total_items,
        limits=config.limits,
        pins=config.calibration.pins,
        invocation_fee=config.pricing.invocation_fee,
        transition_fee=config.pricing.transition_fee,
        transitions_per_task=config.pricing.transitions_per_task,
    )
    try:
        fit = calibrate(config.calibration.observations, cal_config)
    except CalibrationError as exc:
        _fail(str(exc), EXIT_INFEASIBLE)
    out = resolve_output_dir(config, out_dir)
    try:
        if config.output.emit_report:
            emit_fit_report(fit, out / "calibration_report.txt")
    except EmitError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if not quiet:
        click.echo(format_fit_report(fit), nl=False)
        if config.output.emit_report:
            click.echo(f"wrote {out / 'calibration_report.txt'}")


def main() -> None:
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(EXIT_VALIDATION)
    except click.exceptions.ClickException as exc:
        exc.show()
        sys.exit(EXIT_VALIDATION)
    except InfeasibleError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)


if __name__ == "__main__":
    main()
