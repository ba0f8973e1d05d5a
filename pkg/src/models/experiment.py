"""Experiment configuration, per-trial records and aggregated summaries."""

import math
from dataclasses import dataclass, field, replace

from src.models.fusion import Strategy, Subset, Verdict, format_subset
from src.models.observation import ObservationModel
from src.models.thresholds import Thresholds
from src.utils.errors import ConfigError

DEFAULT_HORIZON_MULTIPLIER = 50.0


def default_subsets(k: int) -> tuple[Subset, ...]:
    """All singletons plus the full set (the full set only once when k == 1)."""
    singletons = tuple(frozenset({i}) for i in range(1, k + 1))
    if k == 1:
        return singletons
    return singletons + (frozenset(range(1, k + 1)),)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one Monte Carlo experiment.

    Attributes:
        k: Number of sensors.
        models: Observation model of each sensor.
        alpha: Target type-I error probability.
        beta: Target type-II error probability.
        strategy: Stopping strategy under test.
        deltas: Communication step of each sensor (decentralized strategies).
        subsets_to_test: Affected subsets simulated under H1.
        n_trials: Trials per (hypothesis, subset) cell.
        base_seed: Trial i uses seed base_seed + i.
        horizon_multiplier: Horizon as a multiple of the largest lower bound.
        horizon: Explicit horizon; overrides ``horizon_multiplier`` when set.
        workers: Worker processes used for trials.
    """

    k: int
    models: tuple[ObservationModel, ...]
    alpha: float
    beta: float
    strategy: Strategy
    deltas: tuple[float, ...]
    subsets_to_test: tuple[Subset, ...]
    n_trials: int
    base_seed: int = 0
    horizon_multiplier: float = DEFAULT_HORIZON_MULTIPLIER
    horizon: int | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError("k", f"must be a positive integer, got {self.k}")
        if len(self.models) != self.k:
            raise ConfigError("models", f"expected {self.k} entries, got {len(self.models)}")
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not 0.0 < value < 1.0:
                raise ConfigError(name, f"must lie in (0, 1), got {value}")
        if len(self.deltas) != self.k:
            raise ConfigError("deltas", f"expected {self.k} entries, got {len(self.deltas)}")
        for i, delta in enumerate(self.deltas):
            if not (math.isfinite(delta) and delta > 0.0):
                raise ConfigError(f"deltas[{i}]", f"must be positive, got {delta}")
        if not self.subsets_to_test:
            raise ConfigError("subsets", "at least one subset must be tested")
        for i, subset in enumerate(self.subsets_to_test):
            if not subset or not subset <= frozenset(range(1, self.k + 1)):
                raise ConfigError(f"subsets[{i}]", f"must be a non-empty subset of 1..{self.k}")
        if self.strategy.subset and not self.strategy.subset <= frozenset(range(1, self.k + 1)):
            raise ConfigError("strategy.subset", f"must be a subset of 1..{self.k}")
        if self.strategy.prior and self.strategy.prior.max_sensor_id > self.k:
            raise ConfigError("strategy.prior", f"refers to sensors beyond {self.k}")
        if self.n_trials < 1:
            raise ConfigError("n_trials", f"must be positive, got {self.n_trials}")
        if not (math.isfinite(self.horizon_multiplier) and self.horizon_multiplier > 0.0):
            raise ConfigError("horizon_multiplier", "must be positive")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError("horizon", f"must be positive, got {self.horizon}")
        if self.base_seed < 0:
            raise ConfigError("base_seed", f"must be non-negative, got {self.base_seed}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be positive, got {self.workers}")

    def with_deltas(self, deltas: tuple[float, ...]) -> "ExperimentConfig":
        """Copy of the config with another communication step per sensor."""
        return replace(self, deltas=deltas)


@dataclass(frozen=True, slots=True)
class GroundTruth:
    """Which hypothesis generates the data.

    Attributes:
        affected: Sensors observing signal; ``None`` under H0.
    """

    affected: Subset | None = None

    @classmethod
    def h0(cls) -> "GroundTruth":
        return cls(None)

    @classmethod
    def h1(cls, affected: Subset) -> "GroundTruth":
        if not affected:
            raise ConfigError("subset", "affected subset must be non-empty")
        return cls(frozenset(affected))

    @property
    def is_h1(self) -> bool:
        return self.affected is not None

    @property
    def hypothesis(self) -> str:
        return "h1" if self.is_h1 else "h0"

    @property
    def subset_label(self) -> str:
        return format_subset(self.affected) if self.affected else "none"


@dataclass(frozen=True, slots=True)
class TrialRecord:
    """Outcome and diagnostics of one simulated trial.

    Attributes:
        verdict: Decision, stopping time and message count.
        ground_truth: Hypothesis the trial was simulated under.
        seed: Trial seed.
        per_sensor_messages: Uplink messages of every kind, per sensor.
        mean_overshoot_observed: Mean overshoot over all Delta-triggered communications
            (NaN when no sensor communicated).
        per_sensor_comms: Delta-triggered communications per sensor.
        per_sensor_overshoot: Summed overshoot per sensor.
        check_time_max: First t with max_k Z <= -A, if it happened by the stop.
        check_time_alarm: First t at which all K null alarms were out, if by the stop.
        hat_z_at_stop: Summed surrogate statistic at the stopping time.
    """

    verdict: Verdict
    ground_truth: GroundTruth
    seed: int
    per_sensor_messages: tuple[int, ...]
    mean_overshoot_observed: float
    per_sensor_comms: tuple[int, ...] = ()
    per_sensor_overshoot: tuple[float, ...] = ()
    check_time_max: int | None = None
    check_time_alarm: int | None = None
    hat_z_at_stop: float = 0.0


@dataclass(frozen=True, slots=True)
class ErrorEstimate:
    """Empirical error rate with its Wilson interval."""

    rate: float
    ci_low: float
    ci_high: float
    n: int
    count: int = 0


@dataclass(frozen=True, slots=True)
class MeanEstimate:
    """Sample mean with a normal-approximation interval."""

    mean: float
    ci_low: float
    ci_high: float
    n: int

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


@dataclass(frozen=True)
class CellSummary:
    """Operating characteristics of one (hypothesis, subset) cell.

    Attributes:
        truth: Ground truth simulated in this cell.
        strategy: Strategy label written to results.
        n_trials: Trials run.
        error: Type-I rate under H0, type-II rate under H1.
        mean_stop: Mean stopping time over non-censored trials.
        theoretical_bound: Asymptotic lower bound on the expected sample size.
        upper_bound: Non-asymptotic upper bound on E_1[T*] where one applies.
        mean_messages: Mean uplink messages per trial.
        censored: Trials that reached the horizon.
        mean_overshoot_per_sensor: Mean overshoot per communication, per sensor.
        mean_hat_z_at_stop: Mean summed surrogate statistic at the stopping time.
        mean_check_time_max: Mean first time with max_k Z <= -A, over trials where it happened.
        mean_check_time_alarm: Mean first time all null alarms were out, over trials where
            it happened.
        check_time_mismatches: Trials whose two readings of the null stopping time differ.
    """

    truth: GroundTruth
    strategy: str
    n_trials: int
    error: ErrorEstimate
    mean_stop: MeanEstimate
    theoretical_bound: float
    upper_bound: float | None
    mean_messages: float
    censored: int
    mean_overshoot_per_sensor: tuple[float, ...] = field(default=())
    mean_hat_z_at_stop: MeanEstimate | None = None
    mean_check_time_max: MeanEstimate | None = None
    mean_check_time_alarm: MeanEstimate | None = None
    check_time_mismatches: int = 0


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregated results of an experiment: one cell for H0 and one per tested subset."""

    thresholds: Thresholds
    horizon: int
    cells: tuple[CellSummary, ...]

    @property
    def _h0_cell(self) -> CellSummary:
        return next(cell for cell in self.cells if not cell.truth.is_h1)

    @property
    def _h1_cells(self) -> dict[Subset, CellSummary]:
        return {cell.truth.affected: cell for cell in self.cells if cell.truth.is_h1}

    @property
    def type1_rate(self) -> ErrorEstimate:
        return self._h0_cell.error

    @property
    def type2_rates(self) -> dict[Subset, ErrorEstimate]:
        return {subset: cell.error for subset, cell in self._h1_cells.items()}

    @property
    def mean_stop_h0(self) -> MeanEstimate:
        return self._h0_cell.mean_stop

    @property
    def mean_stop_h1(self) -> dict[Subset, MeanEstimate]:
        return {subset: cell.mean_stop for subset, cell in self._h1_cells.items()}

    @property
    def censored_count(self) -> int:
        return sum(cell.censored for cell in self.cells)

    @property
    def theoretical_e0_bound(self) -> float:
        return self._h0_cell.theoretical_bound

    @property
    def theoretical_e1_bounds(self) -> dict[Subset, float]:
        return {subset: cell.theoretical_bound for subset, cell in self._h1_cells.items()}
