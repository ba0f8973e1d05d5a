"""Experiment orchestration: run one configuration or sweep the communication step."""

import dataclasses
import math
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

from src.models.experiment import CellSummary, ExperimentConfig
from src.services import montecarlo, results
from src.services.results import format_real
from src.utils.console import print_error, print_success, print_warning
from src.utils.errors import ConfigError, SeqFusionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_CONFIG_ERROR = 2


def parse_delta_list(text: str) -> tuple[float, ...]:
    """Parse a comma-separated list of positive communication steps, e.g. ``0.25,0.5,1``.

    Raises:
        ConfigError: Naming ``deltas`` if an entry is not a positive number.
    """
    values = []
    for item in text.split(","):
        item = item.strip()
        try:
            value = float(item)
        except ValueError as e:
            raise ConfigError("deltas", f"not a number: {item!r}") from e
        if not (math.isfinite(value) and value > 0.0):
            raise ConfigError("deltas", f"must be positive and finite, got {item}")
        values.append(value)
    return tuple(values)


def sweep_label(config: ExperimentConfig, delta: float) -> str:
    return f"{config.strategy.label}@delta={format_real(delta)}"


def experiment_cells(config: ExperimentConfig) -> tuple[CellSummary, ...]:
    """Operating characteristics of every (hypothesis, subset) cell of a config."""
    return montecarlo.estimate_operating_characteristics(config).cells


def sweep_cells(config: ExperimentConfig, deltas: Sequence[float]) -> list[CellSummary]:
    """Repeat the experiment with every sensor's step set to each value of ``deltas``."""
    if not config.strategy.kind.is_decentralized:
        logger.warning(
            "%s ignores the communication step; the sweep repeats identical runs",
            config.strategy.label,
        )
    cells: list[CellSummary] = []
    for delta in deltas:
        logger.info("Sweep: delta=%s", format_real(delta))
        swept = config.with_deltas((delta,) * config.k)
        label = sweep_label(config, delta)
        cells.extend(
            dataclasses.replace(cell, strategy=label) for cell in experiment_cells(swept)
        )
    return cells


def _finish(cells: Sequence[CellSummary], out: Path | TextIO | None, title: str) -> int:
    try:
        results.write_results(cells, out)
    except OSError as e:
        print_error(f"Cannot write results: {e}", title="✗ I/O Error")
        return EXIT_RUNTIME_ERROR
    results.render_summary(cells, title=title)
    if isinstance(out, Path):
        print_success(f"Wrote {len(cells)} rows to {out}", title="Results Saved")
    censored = sum(cell.censored for cell in cells)
    if censored:
        print_warning(
            f"{censored} trials reached the horizon; raise horizon_multiplier for tighter "
            "estimates.",
            title="Censored Trials",
        )
    return EXIT_OK


def run_experiment(config: ExperimentConfig, out: Path | TextIO | None = None) -> int:
    """Run a configured experiment and write its summary CSV.

    Args:
        config: Validated experiment configuration.
        out: CSV destination; standard output when None.

    Returns:
        Exit status: 0 on success, 1 on a runtime failure.
    """
    try:
        cells = experiment_cells(config)
    except SeqFusionError as e:
        print_error(str(e), title="✗ Experiment Failed")
        return EXIT_RUNTIME_ERROR
    return _finish(cells, out, title=config.strategy.label)


def sweep_delta(
    config: ExperimentConfig,
    deltas: Sequence[float],
    out: Path | TextIO | None = None,
) -> int:
    """Run the experiment once per communication step and write one combined CSV.

    Each row's strategy column reads ``<kind>@delta=<step>``.

    Returns:
        Exit status: 0 on success, 1 on a runtime failure.
    """
    try:
        cells = sweep_cells(config, deltas)
    except SeqFusionError as e:
        print_error(str(e), title="✗ Sweep Failed")
        return EXIT_RUNTIME_ERROR
    return _finish(cells, out, title=f"{config.strategy.label} delta sweep")
