"""Monte Carlo harness: simulated trials, operating characteristics and theoretical bounds."""

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.stats import norm

from src.models.experiment import (
    CellSummary,
    ErrorEstimate,
    ExperimentConfig,
    ExperimentSummary,
    GroundTruth,
    MeanEstimate,
    TrialRecord,
)
from src.models.fusion import Decision, FusionState, StrategyKind, Subset, Verdict
from src.models.observation import ObservationModel
from src.models.sensor import SensorConfig, SensorState
from src.models.thresholds import Thresholds
from src.services import calibration, fusion_center, sensor_node
from src.utils.logger import get_logger

logger = get_logger(__name__)

CONFIDENCE_LEVEL = 0.95
# Share of censored trials above which a cell is flagged
CENSORED_BUDGET = 0.001
# Observations drawn per refill of a sensor's stream
_BLOCK_SIZE = 64
# Trials handed to a worker process at a time
_BATCH_SIZE = 250


class _ObservationStream:
    """Block-buffered observations of one sensor in one trial."""

    __slots__ = ("_model", "_under_h1", "_rng", "_buffer", "_pos")

    def __init__(self, model: ObservationModel, under_h1: bool, seed: int, sensor_id: int):
        self._model = model
        self._under_h1 = under_h1
        self._rng = np.random.default_rng(np.random.SeedSequence([seed, sensor_id]))
        self._buffer: list[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._buffer):
            self._buffer = self._model.sample_block(self._under_h1, self._rng, _BLOCK_SIZE).tolist()
            self._pos = 0
        x = self._buffer[self._pos]
        self._pos += 1
        return x


def theoretical_bounds(
    alpha: float,
    beta: float,
    models: Sequence[ObservationModel],
    subset: Subset,
) -> tuple[float, float]:
    """Asymptotic lower bounds on the expected sample size.

    Returns:
        (|log beta| / min_k I_0^k, |log alpha| / sum_{k in subset} I_1^k)
    """
    kl = [model.kl_numbers() for model in models]
    e0_bound = abs(math.log(beta)) / min(i0 for i0, _ in kl)
    e1_bound = abs(math.log(alpha)) / sum(kl[i - 1][1] for i in subset)
    return e0_bound, e1_bound


def upper_bound_e1(
    thresholds: Thresholds,
    models: Sequence[ObservationModel],
    subset: Subset,
    deltas: Sequence[float],
    strategy: StrategyKind,
    overshoot: float | None = None,
) -> float | None:
    """Upper bound on E_1[T*] for the summed-statistic strategies.

    Positive part and full value: (B + sum_{k in A} Delta^k) / I_1^A, with
    Delta = 0 for the positive part. One bit: the finite-B bound
    [sum_{k in A}(Delta^k + C) + (1 + C / Delta_min)(B + sum_k Delta^k)] / I_1^A,
    where C is the mean overshoot per communication. None when no bound applies.
    """
    i1_subset = sum(models[i - 1].kl_numbers()[1] for i in subset)
    b = thresholds.b
    if strategy is StrategyKind.CENTRALIZED_POSITIVE_PART:
        return b / i1_subset
    if strategy is StrategyKind.DECENTRALIZED_FULL_VALUE:
        return (b + sum(deltas[i - 1] for i in subset)) / i1_subset
    if strategy is StrategyKind.DECENTRALIZED_ONE_BIT:
        if overshoot is None or not math.isfinite(overshoot):
            return None
        local = sum(deltas[i - 1] + overshoot for i in subset)
        slack = 1.0 + overshoot / min(deltas)
        return (local + slack * (b + sum(deltas))) / i1_subset
    return None


def wilson_ci(successes: int, n: int, level: float = CONFIDENCE_LEVEL) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1 or not 0 <= successes <= n:
        raise ValueError(f"need 0 <= successes <= n and n >= 1, got {successes}/{n}")
    z = float(norm.ppf(0.5 + level / 2.0))
    p_hat = successes / n
    z_sq_n = z * z / n
    center = (p_hat + z_sq_n / 2.0) / (1.0 + z_sq_n)
    half = z / (1.0 + z_sq_n) * math.sqrt(p_hat * (1.0 - p_hat) / n + z_sq_n / (4.0 * n))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == n else min(1.0, center + half)
    return low, high


def mean_ci(values: Sequence[float], level: float = CONFIDENCE_LEVEL) -> MeanEstimate:
    """Sample mean with a normal-approximation confidence interval."""
    data = np.asarray(values, dtype=float)
    n = int(data.size)
    if n == 0:
        return MeanEstimate(math.nan, math.nan, math.nan, 0)
    mean = float(np.mean(data))
    if n < 2:
        return MeanEstimate(mean, mean, mean, n)
    half = float(norm.ppf(0.5 + level / 2.0)) * float(np.std(data, ddof=1)) / math.sqrt(n)
    return MeanEstimate(mean, mean - half, mean + half, n)


def horizon_for(config: ExperimentConfig, subsets: Iterable[Subset] | None = None) -> int:
    """Trial horizon: explicit, or the multiplier times the largest lower bound."""
    if config.horizon is not None:
        return config.horizon
    subsets = tuple(subsets) if subsets is not None else config.subsets_to_test
    bounds = [
        theoretical_bounds(config.alpha, config.beta, config.models, subset)
        for subset in subsets
    ]
    largest = max(max(e0, e1) for e0, e1 in bounds)
    return max(1, math.ceil(config.horizon_multiplier * largest))


def run_trial(
    config: ExperimentConfig,
    truth: GroundTruth,
    seed: int,
    thresholds: Thresholds | None = None,
    horizon: int | None = None,
    stop_on_check: bool = True,
) -> TrialRecord:
    """Simulate one trial until a verdict or the horizon.

    Sensor k draws from the stream seeded by (seed, k), so every strategy sees
    the same noise for the same seed.

    Args:
        config: Experiment configuration.
        truth: Hypothesis generating the data.
        seed: Trial seed (non-negative).
        thresholds: Calibrated thresholds; calibrated from the config when omitted.
        horizon: Horizon; derived from the config when omitted.
        stop_on_check: When False only the T-hat rule may stop the trial.

    Returns:
        TrialRecord; a trial reaching the horizon is recorded as censored.
    """
    if thresholds is None:
        thresholds = calibration.calibrate(config.alpha, config.beta, config.k)
    if horizon is None:
        horizon = horizon_for(config)

    k = config.k
    kind = config.strategy.kind
    affected = truth.affected or frozenset()
    sensor_configs = [
        SensorConfig(model=model, delta=delta, a_threshold=thresholds.a)
        for model, delta in zip(config.models, config.deltas, strict=True)
    ]
    states = [SensorState() for _ in range(k)]
    streams = [
        _ObservationStream(config.models[i], (i + 1) in affected, seed, i + 1) for i in range(k)
    ]
    fstate = FusionState.empty(k)
    per_sensor_messages = [0] * k
    check_time_max: int | None = None
    check_time_alarm: int | None = None
    verdict: Verdict | None = None

    for t in range(1, horizon + 1):
        fusion_center.tick(fstate)
        for i in range(k):
            messages = sensor_node.observe(
                states[i], sensor_configs[i], streams[i].next(), kind, i + 1
            )
            per_sensor_messages[i] += len(messages)
            for msg in messages:
                fusion_center.ingest(fstate, msg, kind, config.deltas[i])

        if check_time_max is None and max(state.z for state in states) <= -thresholds.a:
            check_time_max = t
        if check_time_alarm is None and all(state.null_alarm_sent for state in states):
            check_time_alarm = t

        verdict = fusion_center.check_stop(fstate, thresholds, config.strategy, k)
        if verdict is not None and (stop_on_check or verdict.decision is Decision.ACCEPT_H1):
            break
        verdict = None

    if verdict is None:
        verdict = Verdict(Decision.CENSORED, horizon, fstate.messages_total)

    comms = tuple(state.n_comm for state in states)
    overshoots = tuple(state.overshoot_sum for state in states)
    total_comms = sum(comms)
    return TrialRecord(
        verdict=verdict,
        ground_truth=truth,
        seed=seed,
        per_sensor_messages=tuple(per_sensor_messages),
        mean_overshoot_observed=sum(overshoots) / total_comms if total_comms else math.nan,
        per_sensor_comms=comms,
        per_sensor_overshoot=overshoots,
        check_time_max=check_time_max,
        check_time_alarm=check_time_alarm,
        hat_z_at_stop=sum(fstate.hat_z_per_sensor),
    )


def _run_batch(
    args: tuple[ExperimentConfig, GroundTruth, Thresholds, int, Sequence[int]],
) -> list[TrialRecord]:
    config, truth, thresholds, horizon, seeds = args
    return [run_trial(config, truth, seed, thresholds, horizon) for seed in seeds]


def run_cell(
    config: ExperimentConfig,
    truth: GroundTruth,
    thresholds: Thresholds,
    horizon: int,
    n_trials: int,
    base_seed: int,
) -> list[TrialRecord]:
    """Run ``n_trials`` trials of one cell; records come back in seed order."""
    seeds = range(base_seed, base_seed + n_trials)
    if config.workers == 1:
        return _run_batch((config, truth, thresholds, horizon, seeds))
    batches = [
        (config, truth, thresholds, horizon, seeds[i : i + _BATCH_SIZE])
        for i in range(0, n_trials, _BATCH_SIZE)
    ]
    records: list[TrialRecord] = []
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for batch in pool.map(_run_batch, batches):
            records.extend(batch)
    return records


def summarize_cell(
    config: ExperimentConfig,
    truth: GroundTruth,
    thresholds: Thresholds,
    records: Sequence[TrialRecord],
) -> CellSummary:
    """Aggregate trial records of one cell into its operating characteristics."""
    n = len(records)
    wrong = Decision.ACCEPT_H0 if truth.is_h1 else Decision.ACCEPT_H1
    errors = sum(1 for record in records if record.verdict.decision is wrong)
    low, high = wilson_ci(errors, n)
    finished = [record for record in records if record.verdict.decision is not Decision.CENSORED]
    censored = n - len(finished)
    if censored > CENSORED_BUDGET * n:
        logger.warning(
            "%s %s: %d of %d trials censored at the horizon",
            truth.hypothesis,
            truth.subset_label,
            censored,
            n,
        )

    comms = np.sum([record.per_sensor_comms for record in records], axis=0)
    overshoot = np.sum([record.per_sensor_overshoot for record in records], axis=0)
    per_sensor_overshoot = tuple(
        float(o / c) if c else math.nan for o, c in zip(overshoot, comms, strict=True)
    )

    subset = truth.affected or frozenset(range(1, config.k + 1))
    e0_bound, e1_bound = theoretical_bounds(config.alpha, config.beta, config.models, subset)
    upper = None
    if truth.is_h1:
        subset_overshoot = [per_sensor_overshoot[i - 1] for i in subset]
        c_subset = max(subset_overshoot) if all(map(math.isfinite, subset_overshoot)) else None
        upper = upper_bound_e1(
            thresholds, config.models, subset, config.deltas, config.strategy.kind, c_subset
        )

    return CellSummary(
        truth=truth,
        strategy=config.strategy.label,
        n_trials=n,
        error=ErrorEstimate(errors / n, low, high, n, errors),
        mean_stop=mean_ci([record.verdict.stopping_time for record in finished]),
        theoretical_bound=e1_bound if truth.is_h1 else e0_bound,
        upper_bound=upper,
        mean_messages=float(np.mean([record.verdict.messages_total for record in records])),
        censored=censored,
        mean_overshoot_per_sensor=per_sensor_overshoot,
        mean_hat_z_at_stop=mean_ci([record.hat_z_at_stop for record in finished]),
        mean_check_time_max=mean_ci(
            [r.check_time_max for r in records if r.check_time_max is not None]
        ),
        mean_check_time_alarm=mean_ci(
            [r.check_time_alarm for r in records if r.check_time_alarm is not None]
        ),
        check_time_mismatches=sum(r.check_time_max != r.check_time_alarm for r in records),
    )


def estimate_operating_characteristics(
    config: ExperimentConfig,
    subsets_to_test: Sequence[Subset] | None = None,
    n_trials: int | None = None,
    base_seed: int | None = None,
) -> ExperimentSummary:
    """Estimate error rates, expected sample sizes and message counts.

    Runs ``n_trials`` under H0 and under H1 for each tested subset; trial i of
    every cell uses seed ``base_seed + i``.
    """
    subsets = tuple(subsets_to_test) if subsets_to_test is not None else config.subsets_to_test
    n_trials = n_trials if n_trials is not None else config.n_trials
    base_seed = base_seed if base_seed is not None else config.base_seed
    if n_trials < 100:
        logger.warning("Only %d trials per cell; intervals will be wide", n_trials)

    thresholds = calibration.calibrate(config.alpha, config.beta, config.k)
    horizon = horizon_for(config, subsets)
    logger.info(
        "%s: A=%.6g B=%.6g horizon=%d, %d trials per cell",
        config.strategy.label,
        thresholds.a,
        thresholds.b,
        horizon,
        n_trials,
    )

    cells = []
    for truth in [GroundTruth.h0(), *(GroundTruth.h1(subset) for subset in subsets)]:
        records = run_cell(config, truth, thresholds, horizon, n_trials, base_seed)
        cell = summarize_cell(config, truth, thresholds, records)
        logger.debug(
            "%s %s: error=%.4g mean_stop=%.4g",
            truth.hypothesis,
            truth.subset_label,
            cell.error.rate,
            cell.mean_stop.mean,
        )
        cells.append(cell)
    return ExperimentSummary(thresholds=thresholds, horizon=horizon, cells=tuple(cells))
