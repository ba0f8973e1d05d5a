"""Fusion-center types: strategies, subset priors, fusion state and verdicts."""

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

from src.utils.errors import DomainError

Subset = frozenset[int]


class StrategyKind(Enum):
    """How the fusion center forms its statistics."""

    CENTRALIZED_POSITIVE_PART = "centralized_positive_part"
    DECENTRALIZED_FULL_VALUE = "decentralized_full_value"
    DECENTRALIZED_ONE_BIT = "decentralized_one_bit"
    ORACLE_SPRT = "oracle_sprt"
    MIXTURE_BRUTE_FORCE = "mixture_brute_force"
    GLR_BRUTE_FORCE = "glr_brute_force"

    @property
    def uses_surrogate(self) -> bool:
        """Whether the strategy sums per-sensor surrogate statistics (the T-hat family)."""
        return self in _SURROGATE_KINDS

    @property
    def is_decentralized(self) -> bool:
        """Whether sensors talk to the fusion center only through event-triggered messages."""
        return self in (
            StrategyKind.DECENTRALIZED_FULL_VALUE,
            StrategyKind.DECENTRALIZED_ONE_BIT,
        )


_SURROGATE_KINDS = frozenset(
    {
        StrategyKind.CENTRALIZED_POSITIVE_PART,
        StrategyKind.DECENTRALIZED_FULL_VALUE,
        StrategyKind.DECENTRALIZED_ONE_BIT,
    }
)


def format_subset(subset: Iterable[int]) -> str:
    """Render a subset as sorted dash-joined ids, e.g. ``1-3-4``."""
    return "-".join(str(i) for i in sorted(subset))


@dataclass(frozen=True)
class SubsetPrior:
    """Positive weights p_B over an explicit list of sensor subsets.

    Attributes:
        subsets: Non-empty sensor subsets (1-based ids).
        weights: Positive weight for each subset, same order.
    """

    subsets: tuple[Subset, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.subsets:
            raise DomainError("subset prior needs at least one entry")
        if len(self.subsets) != len(self.weights):
            raise DomainError("subset prior has mismatched subsets and weights")
        for subset, weight in zip(self.subsets, self.weights, strict=True):
            if not subset:
                raise DomainError("subset prior entries must be non-empty")
            if min(subset) < 1:
                raise DomainError(f"sensor ids start at 1, got {format_subset(subset)}")
            if not (math.isfinite(weight) and weight > 0.0):
                raise DomainError(f"prior weight for {format_subset(subset)} must be positive")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Iterable[int], float]) -> "SubsetPrior":
        """Build a prior from a ``subset -> weight`` mapping."""
        items = [(frozenset(subset), float(weight)) for subset, weight in mapping.items()]
        items.sort(key=lambda item: (len(item[0]), sorted(item[0])))
        return cls(
            subsets=tuple(subset for subset, _ in items),
            weights=tuple(weight for _, weight in items),
        )

    @property
    def max_sensor_id(self) -> int:
        return max(max(subset) for subset in self.subsets)


@dataclass(frozen=True)
class Strategy:
    """A stopping strategy together with its parameters.

    Attributes:
        kind: Strategy family.
        subset: The known affected subset for ORACLE_SPRT.
        prior: Subset weights for MIXTURE_BRUTE_FORCE and GLR_BRUTE_FORCE.
    """

    kind: StrategyKind
    subset: Subset | None = None
    prior: SubsetPrior | None = None

    def __post_init__(self) -> None:
        if self.kind is StrategyKind.ORACLE_SPRT and not self.subset:
            raise DomainError("oracle_sprt needs a non-empty subset")
        if self.kind in (StrategyKind.MIXTURE_BRUTE_FORCE, StrategyKind.GLR_BRUTE_FORCE):
            if self.prior is None:
                raise DomainError(f"{self.kind.value} needs a subset prior")

    @property
    def label(self) -> str:
        if self.kind is StrategyKind.ORACLE_SPRT and self.subset:
            return f"{self.kind.value}[{format_subset(self.subset)}]"
        return self.kind.value


@dataclass(slots=True)
class FusionState:
    """Fusion-center bookkeeping for one trial.

    Attributes:
        t: Fusion clock.
        hat_z_per_sensor: Surrogate statistic of each sensor, index k-1.
        null_alarms: Ids of sensors whose null alarm has arrived.
        z_exact_per_sensor: Exact LLR of each sensor, known only under centralized strategies.
        messages_total: Uplink messages of every kind received so far.
    """

    t: int
    hat_z_per_sensor: list[float]
    null_alarms: set[int]
    z_exact_per_sensor: list[float]
    messages_total: int = 0

    @classmethod
    def empty(cls, k: int) -> "FusionState":
        return cls(
            t=0,
            hat_z_per_sensor=[0.0] * k,
            null_alarms=set(),
            z_exact_per_sensor=[0.0] * k,
        )

    @property
    def k(self) -> int:
        return len(self.hat_z_per_sensor)


class Decision(Enum):
    """Final decision of a trial."""

    ACCEPT_H0 = "accept_h0"
    ACCEPT_H1 = "accept_h1"
    CENSORED = "censored"


@dataclass(frozen=True, slots=True)
class Verdict:
    """Outcome (T*, d*) of the sequential test.

    Attributes:
        decision: Accepted hypothesis, or CENSORED when the horizon was reached.
        stopping_time: Time at which the test stopped.
        messages_total: Uplink messages received up to the stopping time.
    """

    decision: Decision
    stopping_time: int
    messages_total: int = field(default=0)
