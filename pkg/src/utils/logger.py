"""Logging setup routed through Rich on the diagnostic stream."""

import logging

from rich.logging import RichHandler

from src.utils.console import console

_ROOT = "src"
_configured = False


def configure_logging(verbose: bool = False) -> None:
    """Attach a Rich handler to the package logger.

    Args:
        verbose: Log at DEBUG instead of INFO.
    """
    global _configured
    root = logging.getLogger(_ROOT)
    if not _configured:
        handler = RichHandler(console=console, show_path=False, markup=False)
        handler.setFormatter(logging.Formatter("%(message)s"))
        root.addHandler(handler)
        root.propagate = False
        _configured = True
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def get_logger(name: str) -> logging.Logger:
    """Return a module logger under the package namespace."""
    return logging.getLogger(name)
