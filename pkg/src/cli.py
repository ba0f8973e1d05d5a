"""CLI entry point for seqfusion.

Sequential detection across a sensor network: threshold calibration, Monte
Carlo experiments and communication-step sweeps.

Built with:
- Typer: Command structure and argument parsing
- Rich: Diagnostics, panels and summary tables on stderr
"""

import dataclasses
import sys
from pathlib import Path

import typer

from src import __version__
from src.models.experiment import ExperimentConfig
from src.services import calibration, experiment
from src.services.config_loader import load_config
from src.utils.console import console, print_error
from src.utils.errors import ConfigError, DomainError
from src.utils.logger import configure_logging

# Initialize Typer app
app = typer.Typer(
    name="seqfusion",
    help="Scalable sequential detection with decentralized one-bit communication.",
    add_completion=False,
)


def version_callback(value: bool) -> None:
    """Display version information."""
    if value:
        console.print(f"seqfusion version {__version__}")
        raise typer.Exit()


def _load(config_path: Path, workers: int | None) -> ExperimentConfig:
    """Load the config, apply CLI overrides, and exit with status 2 if it is invalid."""
    try:
        config = load_config(config_path)
        if workers is not None:
            config = dataclasses.replace(config, workers=workers)
    except ConfigError as e:
        print_error(str(e), title="✗ Invalid Configuration")
        sys.exit(experiment.EXIT_CONFIG_ERROR)
    return config


# Commands


@app.command()
def calibrate(
    alpha: float = typer.Option(..., "--alpha", help="Target type-I error probability."),
    beta: float = typer.Option(..., "--beta", help="Target type-II error probability."),
    k: int = typer.Option(..., "--k", help="Number of sensors."),
) -> None:
    """Print the calibrated thresholds A and B.

    Examples:
        seqfusion calibrate --alpha 0.05 --beta 0.01 --k 1
    """
    try:
        thresholds = calibration.calibrate(alpha, beta, k)
    except DomainError as e:
        print_error(str(e), title="✗ Invalid Calibration Input")
        sys.exit(experiment.EXIT_CONFIG_ERROR)
    typer.echo(f"A={thresholds.a:.9f} B={thresholds.b:.9f}")


@app.command()
def run(
    config: Path = typer.Option(..., "--config", "-c", help="YAML experiment configuration."),
    out: Path | None = typer.Option(
        None, "--out", "-o", help="CSV destination. Omit to write to standard output."
    ),
    workers: int | None = typer.Option(
        None, "--workers", "-w", help="Worker processes (overrides the config)."
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log trial-level detail"),
) -> None:
    """Run a Monte Carlo experiment and write its summary CSV.

    One row per (hypothesis, subset) cell: H0 first, then every tested subset.
    """
    configure_logging(verbose)
    try:
        status = experiment.run_experiment(_load(config, workers), out)
    except KeyboardInterrupt:
        print_error("Experiment interrupted", title="Cancelled")
        sys.exit(130)
    except Exception as e:
        print_error(f"Unexpected error: {e}", title="✗ Error")
        sys.exit(experiment.EXIT_RUNTIME_ERROR)
    sys.exit(status)


@app.command("sweep-delta")
def sweep_delta(
    config: Path = typer.Option(..., "--config", "-c", help="YAML experiment configuration."),
    deltas: str = typer.Option(
        ..., "--deltas", "-d", help="Comma-separated communication steps, e.g. 0.25,0.5,1,2,4"
    ),
    out: Path | None = typer.Option(
        None, "--out", "-o", help="CSV destination. Omit to write to standard output."
    ),
    workers: int | None = typer.Option(
        None, "--workers", "-w", help="Worker processes (overrides the config)."
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log trial-level detail"),
) -> None:
    """Repeat the experiment over communication steps.

    Every sensor uses the same step in each repetition; the strategy column of
    the combined CSV reads <kind>@delta=<step>.
    """
    configure_logging(verbose)
    loaded = _load(config, workers)
    try:
        steps = experiment.parse_delta_list(deltas)
    except ConfigError as e:
        print_error(str(e), title="✗ Invalid Configuration")
        sys.exit(experiment.EXIT_CONFIG_ERROR)
    try:
        status = experiment.sweep_delta(loaded, steps, out)
    except KeyboardInterrupt:
        print_error("Sweep interrupted", title="Cancelled")
        sys.exit(130)
    except Exception as e:
        print_error(f"Unexpected error: {e}", title="✗ Error")
        sys.exit(experiment.EXIT_RUNTIME_ERROR)
    sys.exit(status)


@app.callback(invoke_without_command=True)
def callback(
    ctx: typer.Context,
    version: bool = typer.Option(
        False,
        "--version",
        "-V",
        help="Show version information.",
        callback=version_callback,
        is_eager=True,
    ),
) -> None:
    """
    Sequential detection across sensor networks.

    Run with --help to see available commands.
    """
    if ctx.invoked_subcommand is None:
        # When no command is provided, show help
        typer.echo(ctx.get_help())


def main() -> None:
    """Entry point for the CLI application."""
    app()


if __name__ == "__main__":
    app()
