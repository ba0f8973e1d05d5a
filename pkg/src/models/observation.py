"""Per-sensor observation models: densities f_0 / f_1, LLR increments and KL numbers."""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from src.utils.errors import DomainError

# One sample X_t^k from a sensor
Observation = float


@dataclass(frozen=True)
class ObservationModel(ABC):
    """Pair of densities (f_0, f_1) observed by one sensor.

    Concrete kinds register themselves in ``KINDS`` under their ``kind`` tag so
    config files can name them without other modules knowing the family.
    """

    KINDS: ClassVar[dict[str, type["ObservationModel"]]] = {}
    kind: ClassVar[str] = ""

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if cls.kind:
            ObservationModel.KINDS[cls.kind] = cls

    @abstractmethod
    def sample(self, under_h1: bool, rng: np.random.Generator) -> Observation:
        """Draw one observation from f_1 if ``under_h1`` else from f_0."""

    @abstractmethod
    def sample_block(self, under_h1: bool, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` observations; equal to ``size`` successive ``sample`` calls."""

    @abstractmethod
    def llr_increment(self, x: Observation) -> float:
        """Return log(f_1(x) / f_0(x))."""

    @abstractmethod
    def kl_numbers(self) -> tuple[float, float]:
        """Return (I_0, I_1), the Kullback-Leibler numbers of the pair."""

    @abstractmethod
    def llr_second_moment(self) -> float:
        """Return E_1[Z_1^2], the second moment of one LLR increment under f_1."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Convert the model to a config mapping."""

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ObservationModel":
        """Build a model from a config mapping such as ``{kind: bernoulli, p0: .3, p1: .7}``.

        Raises:
            DomainError: If the kind is unknown or the parameters are invalid.
        """
        kind = data.get("kind")
        model_cls = cls.KINDS.get(kind) if isinstance(kind, str) else None
        if model_cls is None:
            known = ", ".join(sorted(cls.KINDS))
            raise DomainError(f"unknown model kind {kind!r} (known: {known})")
        try:
            params = {key: float(value) for key, value in data.items() if key != "kind"}
        except (TypeError, ValueError) as e:
            raise DomainError(f"non-numeric parameter for {kind}: {e}") from e
        try:
            return model_cls(**params)
        except TypeError as e:
            raise DomainError(f"bad parameters for {kind}: {e}") from e


@dataclass(frozen=True, slots=True)
class GaussianMeanShift(ObservationModel):
    """f_0 = N(0, 1) against f_1 = N(mu, 1)."""

    kind: ClassVar[str] = "gaussian_mean_shift"
    mu: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu) or self.mu == 0.0:
            raise DomainError(f"gaussian_mean_shift needs a finite non-zero mu, got {self.mu}")

    def sample(self, under_h1: bool, rng: np.random.Generator) -> Observation:
        shift = self.mu if under_h1 else 0.0
        return float(rng.standard_normal()) + shift

    def sample_block(self, under_h1: bool, rng: np.random.Generator, size: int) -> np.ndarray:
        shift = self.mu if under_h1 else 0.0
        return rng.standard_normal(size) + shift

    def llr_increment(self, x: Observation) -> float:
        return self.mu * x - 0.5 * self.mu * self.mu

    def kl_numbers(self) -> tuple[float, float]:
        half_sq = 0.5 * self.mu * self.mu
        return half_sq, half_sq

    def llr_second_moment(self) -> float:
        # Z_1 ~ N(mu^2/2, mu^2) under f_1
        mu_sq = self.mu * self.mu
        return mu_sq + 0.25 * mu_sq * mu_sq

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "mu": self.mu}


@dataclass(frozen=True, slots=True)
class Bernoulli(ObservationModel):
    """f_0 = Bernoulli(p0) against f_1 = Bernoulli(p1)."""

    kind: ClassVar[str] = "bernoulli"
    p0: float
    p1: float

    def __post_init__(self) -> None:
        for name, p in (("p0", self.p0), ("p1", self.p1)):
            if not 0.0 < p < 1.0:
                raise DomainError(f"bernoulli {name} must lie in (0, 1), got {p}")
        if self.p0 == self.p1:
            raise DomainError("bernoulli p0 and p1 must differ")

    @property
    def _log_ratios(self) -> tuple[float, float]:
        """LLR values at x = 1 and x = 0."""
        return (
            math.log(self.p1 / self.p0),
            math.log((1.0 - self.p1) / (1.0 - self.p0)),
        )

    def sample(self, under_h1: bool, rng: np.random.Generator) -> Observation:
        p = self.p1 if under_h1 else self.p0
        return 1.0 if rng.random() < p else 0.0

    def sample_block(self, under_h1: bool, rng: np.random.Generator, size: int) -> np.ndarray:
        p = self.p1 if under_h1 else self.p0
        return (rng.random(size) < p).astype(float)

    def llr_increment(self, x: Observation) -> float:
        on, off = self._log_ratios
        if x == 1:
            return on
        if x == 0:
            return off
        raise DomainError(f"bernoulli observation must be 0 or 1, got {x}")

    def kl_numbers(self) -> tuple[float, float]:
        on, off = self._log_ratios
        i1 = self.p1 * on + (1.0 - self.p1) * off
        i0 = -(self.p0 * on + (1.0 - self.p0) * off)
        return i0, i1

    def llr_second_moment(self) -> float:
        on, off = self._log_ratios
        return self.p1 * on * on + (1.0 - self.p1) * off * off

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "p0": self.p0, "p1": self.p1}
