"""Result serialization: deterministic CSV and a Rich summary table."""

import csv
import math
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

from rich.table import Table

from src.models.experiment import CellSummary
from src.utils.console import console

CSV_COLUMNS = (
    "hypothesis",
    "subset",
    "strategy",
    "n_trials",
    "error_rate",
    "ci_low",
    "ci_high",
    "mean_stop",
    "mean_stop_ci_low",
    "mean_stop_ci_high",
    "theoretical_bound",
    "mean_messages_per_trial",
    "censored",
)


def format_real(value: float) -> str:
    """Nine significant digits; ``nan`` / ``inf`` spelled out."""
    return f"{value:.9g}"


def cell_row(cell: CellSummary) -> list[str]:
    """One CSV row, in ``CSV_COLUMNS`` order."""
    return [
        cell.truth.hypothesis,
        cell.truth.subset_label,
        cell.strategy,
        str(cell.n_trials),
        format_real(cell.error.rate),
        format_real(cell.error.ci_low),
        format_real(cell.error.ci_high),
        format_real(cell.mean_stop.mean),
        format_real(cell.mean_stop.ci_low),
        format_real(cell.mean_stop.ci_high),
        format_real(cell.theoretical_bound),
        format_real(cell.mean_messages),
        str(cell.censored),
    ]


def write_csv(cells: Sequence[CellSummary], sink: TextIO) -> None:
    """Write the header and one row per cell to an open text stream."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(cell_row(cell) for cell in cells)


def write_results(cells: Sequence[CellSummary], out: Path | TextIO | None) -> None:
    """Write the CSV to a path, an open stream, or standard output when ``out`` is None.

    Raises:
        OSError: If the destination cannot be written.
    """
    if out is None:
        write_csv(cells, sys.stdout)
    elif isinstance(out, Path):
        with out.open("w", encoding="utf-8", newline="") as handle:
            write_csv(cells, handle)
    else:
        write_csv(cells, out)


def _or_dash(value: float | None, fmt: str = ".4g") -> str:
    if value is None or math.isnan(value):
        return "-"
    return format(value, fmt)


def _null_stop(cell: CellSummary) -> str:
    by_max = cell.mean_check_time_max.mean if cell.mean_check_time_max else None
    by_alarm = cell.mean_check_time_alarm.mean if cell.mean_check_time_alarm else None
    return f"{_or_dash(by_max)} / {_or_dash(by_alarm)} ({cell.check_time_mismatches})"


def render_summary(cells: Sequence[CellSummary], title: str = "Operating characteristics") -> None:
    """Print a Rich table of the cells on the diagnostic console."""
    table = Table(
        title=f"[cyan bold]{title}[/cyan bold]",
        show_header=True,
        header_style="cyan bold",
    )
    table.add_column("Hypothesis", style="cyan")
    table.add_column("Subset")
    table.add_column("Strategy")
    table.add_column("Error rate [95% CI]", justify="right")
    table.add_column("E[T]", justify="right")
    table.add_column("Lower bound", justify="right")
    table.add_column("Upper bound", justify="right")
    table.add_column("Messages", justify="right")
    table.add_column("Null stop: max / alarms (differ)", justify="right")
    table.add_column("Censored", justify="right")

    for cell in cells:
        error = cell.error
        table.add_row(
            cell.truth.hypothesis,
            cell.truth.subset_label,
            cell.strategy,
            f"{error.rate:.4g} [{error.ci_low:.3g}, {error.ci_high:.3g}]",
            f"{_or_dash(cell.mean_stop.mean)} ± {_or_dash(cell.mean_stop.half_width, '.2g')}",
            _or_dash(cell.theoretical_bound),
            _or_dash(cell.upper_bound),
            _or_dash(cell.mean_messages, ".5g"),
            _null_stop(cell),
            f"[red]{cell.censored}[/red]" if cell.censored else "0",
        )

    console.print()
    console.print(table)
