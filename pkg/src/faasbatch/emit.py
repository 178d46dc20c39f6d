"""File and text emission: results CSV, JSONL traces, plot series, reports.

Currency values pass through exact integer micro-dollars before formatting,
so printed 4-decimal amounts are stable regardless of how the floats were
produced. I/O failures are re-raised with the destination path attached.
"""

from __future__ import annotations

import json
from pathlib import Path

from .calibrate import CalibrationFit
from .model import FaasBatchError, SimulationResult
from .sweep import SweepRow

CSV_HEADER = ("batch_size,strategy,concurrency,total_cost,makespan_min,"
              "invocation_count,compute_cost,orchestration_cost")


class EmitError(FaasBatchError):
    """Writing an output file failed; the message names the path."""


def to_micro(cost: float) -> int:
    """Nearest integer number of micro-currency units."""
    return round(cost * 1_000_000)


def format_currency(cost: float) -> str:
    """Format as a 4-decimal amount via integer micro-units (no float wobble)."""
    micro = to_micro(cost)
    sign = "-" if micro < 0 else ""
    quanta = (abs(micro) + 50) // 100  # micro -> 1e-4 units, round half up
    return f"{sign}{quanta // 10000}.{quanta % 10000:04d}"


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc.strerror}") from exc


def _row_line(row: SweepRow) -> str:
    return ",".join([
        str(row.batch_size),
        row.strategy.value,
        str(row.concurrency),
        format_currency(row.total_cost),
        f"{row.makespan_min:.4f}",
        str(row.invocation_count),
        format_currency(row.compute_cost),
        format_currency(row.orchestration_cost),
    ])


def emit_csv(rows: list[SweepRow], path: str | Path) -> None:
    """Write sweep rows as CSV; an empty sweep still gets the header line."""
    lines = [CSV_HEADER] + [_row_line(r) for r in rows]
    _write(Path(path), "\n".join(lines) + "\n")


def emit_trace(result: SimulationResult, path: str | Path) -> None:
    """Write one self-describing JSON record per invocation."""
    lines = []
    for rec in result.trace:
        lines.append(json.dumps({
            "invocation_id": rec.invocation_id,
            "start_ms": rec.start_ms,
            "end_ms": rec.end_ms,
            "items_processed": rec.items_processed,
            "batches_processed": rec.batches_processed,
            "raw_duration_ms": rec.raw_duration_ms,
            "billed_duration_ms": rec.billed_duration_ms,
            "memory_used_mb": rec.memory_used_mb,
        }))
    _write(Path(path), "\n".join(lines) + ("\n" if lines else ""))


def emit_plotdata(rows: list[SweepRow], out_dir: str | Path) -> list[Path]:
    """Write aligned (cost, makespan) series per strategy.

    For each strategy present, two CSV files with identical row order:
    ``plot_<strategy>_cost.csv`` (batch_size, concurrency, total_cost) and
    ``plot_<strategy>_makespan.csv`` (batch_size, concurrency, makespan_min).
    """
    out_dir = Path(out_dir)
    written = []
    strategies = sorted({r.strategy for r in rows}, key=lambda s: s.value)
    for strategy in strategies:
        series = sorted((r for r in rows if r.strategy is strategy),
                        key=lambda r: (r.batch_size, r.concurrency))
        cost_lines = ["batch_size,concurrency,total_cost"]
        mk_lines = ["batch_size,concurrency,makespan_min"]
        for r in series:
            cost_lines.append(f"{r.batch_size},{r.concurrency},"
                              f"{format_currency(r.total_cost)}")
            mk_lines.append(f"{r.batch_size},{r.concurrency},{r.makespan_min:.4f}")
        cost_path = out_dir / f"plot_{strategy.value}_cost.csv"
        mk_path = out_dir / f"plot_{strategy.value}_makespan.csv"
        _write(cost_path, "\n".join(cost_lines) + "\n")
        _write(mk_path, "\n".join(mk_lines) + "\n")
        written += [cost_path, mk_path]
    return written


def format_fit_report(fit: CalibrationFit) -> str:
    """Human-readable calibration report: parameters, residuals, warnings."""
    lines = ["calibration fit", "---------------"]
    lines.append(f"effective_rate_per_ms:        {fit.effective_rate_per_ms:.6e}")
    lines.append(f"effective_rate_per_min:       {fit.effective_rate_per_min:.6e}")
    if fit.per_item_time_ms is not None:
        lines.append(f"per_item_time_ms (parallel):  {fit.per_item_time_ms:.3f}")
    if fit.invocation_overhead_ms is not None:
        lines.append(f"invocation_overhead_ms:       {fit.invocation_overhead_ms:.1f}")
    if fit.monolithic_per_item_time_ms is not None:
        lines.append(f"monolithic_per_item_time_ms:  {fit.monolithic_per_item_time_ms:.3f}")
    lines.append(f"rms_relative_error:           {fit.rms_relative_error:.4%}")
    if fit.residuals:
        lines.append("")
        lines.append("residuals (relative, model vs observed)")
        lines.append(f"{'batch_size':>10} {'strategy':>10} {'cost_err':>10} {'makespan_err':>12}")
        for r in fit.residuals:
            cost = f"{r.cost_rel_err:+.4%}" if r.cost_rel_err is not None else "-"
            mk = f"{r.makespan_rel_err:+.4%}" if r.makespan_rel_err is not None else "-"
            lines.append(f"{r.batch_size:>10} {r.strategy.value:>10} {cost:>10} {mk:>12}")
    if fit.warnings:
        lines.append("")
        lines.append("warnings")
        for w in fit.warnings:
            lines.append(f"  - {w}")
    return "\n".join(lines) + "\n"


def emit_fit_report(fit: CalibrationFit, path: str | Path) -> None:
    _write(Path(path), format_fit_report(fit))
