"""Local statistics of one sensor and its event-triggered uplink."""

from collections.abc import Sequence

import numpy as np

from src.models.fusion import StrategyKind
from src.models.observation import Observation
from src.models.sensor import MessageKind, SensorConfig, SensorState, UplinkMessage
from src.utils.errors import NotApplicableError


def observe(
    state: SensorState,
    config: SensorConfig,
    x: Observation,
    strategy: StrategyKind,
    sensor_id: int,
) -> list[UplinkMessage]:
    """Take one observation, update the sensor state in place and return the messages to send.

    The communication recursion fires at most once per time step: when Z has grown
    by at least ``delta`` since the last communication, ``ell`` is the growth and
    its excess over ``delta`` is booked as overshoot. The null alarm is one-shot.

    Centralized strategies ship the exact LLR every step instead of the
    event-triggered messages and the null alarm; the recursion state and the
    alarm flag are maintained regardless.

    Args:
        state: Sensor state, mutated.
        config: Sensor configuration.
        x: New observation.
        strategy: Strategy the fusion center runs, which selects the message kinds.
        sensor_id: 1-based id stamped on outgoing messages.

    Returns:
        Messages emitted at this time step (possibly empty).
    """
    state.t += 1
    state.z += config.model.llr_increment(x)
    if state.z > state.m:
        state.m = state.z

    messages: list[UplinkMessage] = []
    if not strategy.is_decentralized:
        messages.append(UplinkMessage(sensor_id, MessageKind.RAW_VALUE, state.t, state.z))

    ell = state.z - state.z_last_comm
    if ell >= config.delta:
        state.n_comm += 1
        state.overshoot_sum += ell - config.delta
        state.z_last_comm += ell
        if strategy is StrategyKind.DECENTRALIZED_FULL_VALUE:
            messages.append(UplinkMessage(sensor_id, MessageKind.FULL_VALUE, state.t, ell))
        elif strategy is StrategyKind.DECENTRALIZED_ONE_BIT:
            messages.append(UplinkMessage(sensor_id, MessageKind.ONE_BIT, state.t))

    if state.z <= -config.a_threshold and not state.null_alarm_sent:
        state.null_alarm_sent = True
        if strategy.is_decentralized:
            messages.append(UplinkMessage(sensor_id, MessageKind.NULL_ALARM, state.t))

    return messages


def local_hat_z(state: SensorState, config: SensorConfig, strategy: StrategyKind) -> float:
    """Surrogate statistic of the sensor under one of the summed-statistic strategies.

    Raises:
        NotApplicableError: For oracle, mixture and GLR strategies.
    """
    if strategy is StrategyKind.CENTRALIZED_POSITIVE_PART:
        return max(state.z, 0.0)
    if strategy is StrategyKind.DECENTRALIZED_FULL_VALUE:
        return state.z_last_comm
    if strategy is StrategyKind.DECENTRALIZED_ONE_BIT:
        return config.delta * state.n_comm
    raise NotApplicableError(f"{strategy.value} does not use per-sensor surrogate statistics")


def replay_history(increments: Sequence[float], delta: float) -> tuple[int, float, float]:
    """Rebuild (N_t, Z at last communication, overshoot sum) from a full increment history.

    Each communication time is located as the first index past the previous one
    at which Z has risen by ``delta``, scanning the whole cumulative path.
    """
    path = np.cumsum(np.asarray(increments, dtype=float))
    n_comm, z_last, overshoot_sum = 0, 0.0, 0.0
    start = 0
    while start < len(path):
        hits = np.flatnonzero(path[start:] - z_last >= delta)
        if hits.size == 0:
            break
        tau = start + int(hits[0])
        ell = float(path[tau]) - z_last
        n_comm += 1
        overshoot_sum += ell - delta
        z_last += ell
        start = tau + 1
    return n_comm, z_last, overshoot_sum
