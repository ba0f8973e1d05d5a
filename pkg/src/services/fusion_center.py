"""Fusion center: ingests uplink messages and applies the global stopping rules."""

import itertools
from collections.abc import Mapping, Sequence
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from src.models.fusion import (
    Decision,
    FusionState,
    Strategy,
    StrategyKind,
    SubsetPrior,
    Verdict,
)
from src.models.sensor import MessageKind, UplinkMessage
from src.models.thresholds import Thresholds
from src.utils.errors import CapacityError, ProtocolError

# Largest K for which brute-force subset enumeration is allowed
MAX_BRUTE_FORCE_K = 20


def tick(fstate: FusionState) -> None:
    """Advance the fusion clock by one time step."""
    fstate.t += 1


def _expects(kind: MessageKind, strategy: StrategyKind) -> bool:
    match kind:
        case MessageKind.ONE_BIT:
            return strategy is StrategyKind.DECENTRALIZED_ONE_BIT
        case MessageKind.FULL_VALUE:
            return strategy is StrategyKind.DECENTRALIZED_FULL_VALUE
        case MessageKind.RAW_VALUE:
            return not strategy.is_decentralized
        case MessageKind.NULL_ALARM:
            return strategy.is_decentralized
    return False


def ingest(
    fstate: FusionState,
    msg: UplinkMessage,
    strategy: StrategyKind,
    delta_of_sender: float,
) -> FusionState:
    """Apply one uplink message to the fusion state.

    Args:
        fstate: Fusion state, mutated and returned.
        msg: Incoming message.
        strategy: Strategy being run; decides which message kinds are valid.
        delta_of_sender: Communication step of the emitting sensor.

    Raises:
        ProtocolError: On an unknown sensor id, a message kind the strategy does not
            use, or a repeated null alarm.
    """
    index = msg.sensor_id - 1
    if not 0 <= index < fstate.k:
        raise ProtocolError(f"message from unknown sensor {msg.sensor_id} (K={fstate.k})")
    if not _expects(msg.kind, strategy):
        raise ProtocolError(f"{msg.kind.value} message under {strategy.value}")

    match msg.kind:
        case MessageKind.ONE_BIT:
            fstate.hat_z_per_sensor[index] += delta_of_sender
        case MessageKind.FULL_VALUE:
            fstate.hat_z_per_sensor[index] += msg.value
        case MessageKind.RAW_VALUE:
            fstate.z_exact_per_sensor[index] = msg.value
            fstate.hat_z_per_sensor[index] = max(msg.value, 0.0)
        case MessageKind.NULL_ALARM:
            if msg.sensor_id in fstate.null_alarms:
                raise ProtocolError(f"duplicate null alarm from sensor {msg.sensor_id}")
            fstate.null_alarms.add(msg.sensor_id)

    fstate.messages_total += 1
    return fstate


def _verdict(fires_h1: bool, fires_h0: bool, t: int, messages_total: int) -> Verdict | None:
    # A tie between the two rules goes to the alternative
    if fires_h1:
        return Verdict(Decision.ACCEPT_H1, t, messages_total)
    if fires_h0:
        return Verdict(Decision.ACCEPT_H0, t, messages_total)
    return None


def check_stop(
    fstate: FusionState,
    thresholds: Thresholds,
    strategy: Strategy,
    k_total: int,
) -> Verdict | None:
    """Return the verdict if either stopping rule fires at the current time, else None.

    T-hat fires when the summed surrogate statistic reaches B. T-check fires
    when every exact LLR is at or below -A (centralized strategies) or when all
    K null alarms have arrived (decentralized strategies). Oracle, mixture and
    GLR strategies run a two-sided SPRT on their own statistic.
    """
    kind = strategy.kind
    z_exact = fstate.z_exact_per_sensor

    if kind.uses_surrogate:
        fires_h1 = sum(fstate.hat_z_per_sensor) >= thresholds.b
        if kind.is_decentralized:
            fires_h0 = len(fstate.null_alarms) == k_total
        else:
            fires_h0 = max(z_exact) <= -thresholds.a
        return _verdict(fires_h1, fires_h0, fstate.t, fstate.messages_total)

    if kind is StrategyKind.ORACLE_SPRT:
        z_subset = sum(z_exact[i - 1] for i in sorted(strategy.subset))
        return oracle_sprt_step(z_subset, thresholds, fstate.t, fstate.messages_total)

    if kind is StrategyKind.MIXTURE_BRUTE_FORCE:
        statistic = mixture_statistic(z_exact, strategy.prior)
    else:
        statistic = glr_statistic(z_exact, strategy.prior)
    return _verdict(
        statistic >= thresholds.b,
        statistic <= -thresholds.a,
        fstate.t,
        fstate.messages_total,
    )


def oracle_sprt_step(
    z_subset_sum: float,
    thresholds: Thresholds,
    t: int = 1,
    messages_total: int = 0,
) -> Verdict | None:
    """Wald's SPRT on the LLR of a known affected subset: stop outside (-A, B)."""
    return _verdict(
        z_subset_sum >= thresholds.b,
        z_subset_sum <= -thresholds.a,
        t,
        messages_total,
    )


def uniform_prior(k: int) -> SubsetPrior:
    """Equal weights 1 / (2^k - 1) on every non-empty subset of 1..k.

    Raises:
        CapacityError: If k exceeds the brute-force limit.
    """
    if k > MAX_BRUTE_FORCE_K:
        raise CapacityError(
            f"cannot enumerate all subsets of {k} sensors (limit {MAX_BRUTE_FORCE_K})"
        )
    ids = range(1, k + 1)
    subsets = tuple(
        frozenset(combo) for size in ids for combo in itertools.combinations(ids, size)
    )
    weight = 1.0 / len(subsets)
    return SubsetPrior(subsets=subsets, weights=(weight,) * len(subsets))


@lru_cache(maxsize=64)
def _subset_layout(prior: SubsetPrior, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Incidence matrix (subsets x sensors) and log-weights of a prior."""
    incidence = np.zeros((len(prior.subsets), k))
    for row, subset in enumerate(prior.subsets):
        if max(subset) > k:
            raise CapacityError(f"prior refers to sensor {max(subset)} but only {k} exist")
        incidence[row, [i - 1 for i in subset]] = 1.0
    return incidence, np.log(np.asarray(prior.weights))


def _subset_scores(
    z_vector: Sequence[float], prior: SubsetPrior | Mapping[frozenset[int], float]
) -> np.ndarray:
    k = len(z_vector)
    if k > MAX_BRUTE_FORCE_K:
        raise CapacityError(
            f"brute-force comparator limited to {MAX_BRUTE_FORCE_K} sensors, got {k}"
        )
    if not isinstance(prior, SubsetPrior):
        prior = SubsetPrior.from_mapping(prior)
    incidence, log_weights = _subset_layout(prior, k)
    return log_weights + incidence @ np.asarray(z_vector, dtype=float)


def mixture_statistic(
    z_vector: Sequence[float], prior: SubsetPrior | Mapping[frozenset[int], float]
) -> float:
    """log(sum_B p_B exp(Z^B)) over the prior's subsets, with Z^B the summed LLR of B.

    Raises:
        CapacityError: If more than ``MAX_BRUTE_FORCE_K`` sensors are given.
    """
    return float(logsumexp(_subset_scores(z_vector, prior)))


def glr_statistic(
    z_vector: Sequence[float], prior: SubsetPrior | Mapping[frozenset[int], float]
) -> float:
    """log(max_B p_B exp(Z^B)), the generalized-likelihood counterpart of the mixture.

    Raises:
        CapacityError: If more than ``MAX_BRUTE_FORCE_K`` sensors are given.
    """
    return float(np.max(_subset_scores(z_vector, prior)))
