"""Calibrated stopping thresholds."""

import math
from dataclasses import dataclass

from src.utils.errors import DomainError


@dataclass(frozen=True, slots=True)
class Thresholds:
    """Pair of thresholds used by both one-sided stopping rules.

    Attributes:
        a: Null-acceptance threshold A; the null is accepted once every local LLR is <= -A.
        b: Alternative-acceptance threshold B; the alternative is accepted once the
            summed surrogate statistic is >= B.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        for name, value in (("a", self.a), ("b", self.b)):
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"threshold {name} must be positive and finite, got {value}")
