"""Custom exception classes for seqfusion."""


class SeqFusionError(Exception):
    """Base class for every error raised by seqfusion."""

    pass


class DomainError(SeqFusionError, ValueError):
    """Raised when a numerical input lies outside the domain of an operation."""

    pass


class NotApplicableError(SeqFusionError):
    """Raised when a strategy is asked for a statistic it does not use."""

    pass


class ProtocolError(SeqFusionError):
    """Raised when an uplink message violates the sensor-to-fusion protocol."""

    pass


class CapacityError(SeqFusionError):
    """Raised when a brute-force subset comparator is asked for too many sensors."""

    pass


class ConfigError(SeqFusionError):
    """Raised when an experiment configuration cannot be parsed or validated.

    Attributes:
        field: Path of the offending field (e.g. "alpha", "models[1].p0").
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field

