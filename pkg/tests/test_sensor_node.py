"""Tests for the sensor-side recursion, surrogate statistics and replay."""

import numpy as np
import pytest

from src.models.fusion import StrategyKind
from src.models.observation import Bernoulli, GaussianMeanShift
from src.models.sensor import MessageKind, SensorConfig, SensorState
from src.services.sensor_node import local_hat_z, observe, replay_history
from src.utils.errors import DomainError, NotApplicableError

SURROGATE_KINDS = [
    StrategyKind.CENTRALIZED_POSITIVE_PART,
    StrategyKind.DECENTRALIZED_FULL_VALUE,
    StrategyKind.DECENTRALIZED_ONE_BIT,
]
# Rounding slack for comparisons between running sums
TOL = 1e-9


def feed(state, config, increments, strategy=StrategyKind.DECENTRALIZED_FULL_VALUE):
    """Observe every increment and return the messages emitted at each step."""
    return [observe(state, config, x, strategy, 1) for x in increments]


class TestObserve:
    def test_communication_after_accumulated_growth(self, identity_sensor):
        state = SensorState()
        steps = feed(state, identity_sensor(delta=1.0), [0.4, 0.7])
        assert steps[0] == []
        (msg,) = steps[1]
        assert msg.kind is MessageKind.FULL_VALUE
        assert msg.value == pytest.approx(1.1)
        assert msg.emitted_at == 2
        assert state.n_comm == 1
        assert state.z_last_comm == pytest.approx(1.1)
        assert state.overshoot_sum == pytest.approx(0.1)

    def test_large_jump_triggers_one_communication(self, identity_sensor):
        state = SensorState()
        (messages,) = feed(state, identity_sensor(delta=1.0), [3.5])
        assert len(messages) == 1
        assert messages[0].value == pytest.approx(3.5)
        assert state.n_comm == 1
        assert state.overshoot_sum == pytest.approx(2.5)

    def test_one_shot_null_alarm(self, identity_sensor):
        state = SensorState()
        steps = feed(state, identity_sensor(a_threshold=2.0), [-0.5] * 8)
        alarms = [
            (t, msg) for t, messages in enumerate(steps, start=1) for msg in messages
            if msg.kind is MessageKind.NULL_ALARM
        ]
        assert len(alarms) == 1
        assert alarms[0][0] == 4
        assert state.null_alarm_sent

    def test_alarm_not_retracted_after_recovery(self, identity_sensor):
        state = SensorState()
        steps = feed(state, identity_sensor(a_threshold=1.0), [-1.5, 3.0, -4.0])
        kinds = [[msg.kind for msg in messages] for messages in steps]
        assert kinds[0] == [MessageKind.NULL_ALARM]
        assert MessageKind.NULL_ALARM not in kinds[2]

    def test_one_bit_messages_carry_no_value(self, identity_sensor):
        state = SensorState()
        (messages,) = feed(state, identity_sensor(), [1.7], StrategyKind.DECENTRALIZED_ONE_BIT)
        assert [msg.kind for msg in messages] == [MessageKind.ONE_BIT]
        assert messages[0].value == 0.0

    @pytest.mark.parametrize(
        "strategy",
        [StrategyKind.CENTRALIZED_POSITIVE_PART, StrategyKind.ORACLE_SPRT],
    )
    def test_centralized_ships_raw_value_every_step(self, identity_sensor, strategy):
        state = SensorState()
        steps = feed(state, identity_sensor(), [0.3, 1.2, -0.1], strategy)
        for messages in steps:
            assert [msg.kind for msg in messages] == [MessageKind.RAW_VALUE]
        assert steps[-1][0].value == pytest.approx(1.4)
        # The recursion runs regardless of what is shipped
        assert state.n_comm == 1

    @pytest.mark.parametrize(
        "strategy",
        [StrategyKind.CENTRALIZED_POSITIVE_PART, StrategyKind.MIXTURE_BRUTE_FORCE],
    )
    def test_centralized_never_sends_null_alarm(self, identity_sensor, strategy):
        state = SensorState()
        steps = feed(state, identity_sensor(a_threshold=1.0), [-0.6] * 4, strategy)
        kinds = {msg.kind for messages in steps for msg in messages}
        assert kinds == {MessageKind.RAW_VALUE}
        assert state.null_alarm_sent

    def test_running_maximum(self, identity_sensor):
        state = SensorState()
        feed(state, identity_sensor(delta=10.0), [1.0, 2.0, -5.0])
        assert state.t == 3
        assert state.m == pytest.approx(3.0)
        assert state.z == pytest.approx(-2.0)

    def test_maximum_starts_at_zero(self, identity_sensor):
        state = SensorState()
        feed(state, identity_sensor(), [-0.3, -0.2])
        assert state.m == 0.0


class TestLocalHatZ:
    def test_positive_part(self, identity_sensor):
        state = SensorState(z=-0.7)
        assert local_hat_z(state, identity_sensor(), StrategyKind.CENTRALIZED_POSITIVE_PART) == 0.0

    def test_one_bit(self, identity_sensor):
        state = SensorState(n_comm=3)
        value = local_hat_z(state, identity_sensor(delta=0.8), StrategyKind.DECENTRALIZED_ONE_BIT)
        assert value == pytest.approx(2.4)

    def test_full_value(self, identity_sensor):
        state = SensorState(z_last_comm=2.3)
        value = local_hat_z(state, identity_sensor(), StrategyKind.DECENTRALIZED_FULL_VALUE)
        assert value == 2.3

    @pytest.mark.parametrize(
        "strategy",
        [
            StrategyKind.ORACLE_SPRT,
            StrategyKind.MIXTURE_BRUTE_FORCE,
            StrategyKind.GLR_BRUTE_FORCE,
        ],
    )
    def test_not_applicable(self, identity_sensor, strategy):
        with pytest.raises(NotApplicableError):
            local_hat_z(SensorState(), identity_sensor(), strategy)


class TestSensorConfig:
    @pytest.mark.parametrize("delta", [0.0, -1.0, float("inf")])
    def test_rejects_bad_delta(self, delta):
        with pytest.raises(DomainError):
            SensorConfig(model=GaussianMeanShift(1.0), delta=delta, a_threshold=1.0)

    def test_rejects_bad_threshold(self):
        with pytest.raises(DomainError):
            SensorConfig(model=GaussianMeanShift(1.0), delta=1.0, a_threshold=0.0)


@pytest.mark.parametrize(
    "model,delta",
    [(GaussianMeanShift(1.0), 1.0), (GaussianMeanShift(0.5), 0.3), (Bernoulli(0.3, 0.7), 0.5)],
)
class TestPathProperties:
    """Invariants checked at every step of 1000 random paths per model."""

    N_PATHS = 1000
    LENGTH = 60

    def paths(self, model, seed):
        rng = np.random.default_rng(seed)
        for i in range(self.N_PATHS):
            yield model.sample_block(i % 2 == 0, rng, self.LENGTH)

    def test_sandwich_and_surrogate_conditions(self, model, delta):
        config = SensorConfig(model=model, delta=delta, a_threshold=3.0)
        for xs in self.paths(model, seed=7):
            state = SensorState()
            for x in xs:
                observe(state, config, float(x), StrategyKind.DECENTRALIZED_FULL_VALUE, 1)
                assert state.m >= state.z and state.m >= 0.0
                # Delta * N <= Z at last communication <= M
                assert delta * state.n_comm <= state.z_last_comm + TOL
                assert state.z_last_comm <= state.m + TOL
                # Below delta between communications
                assert state.z - state.z_last_comm < delta
                # Overshoot decomposition
                assert state.overshoot_sum >= -TOL
                assert state.overshoot_sum == pytest.approx(
                    state.z_last_comm - delta * state.n_comm, abs=TOL
                )
                for kind in SURROGATE_KINDS:
                    assert local_hat_z(state, config, kind) <= state.m + TOL
                full_value = local_hat_z(state, config, StrategyKind.DECENTRALIZED_FULL_VALUE)
                assert full_value >= max(state.z - delta, 0.0) - TOL

    def test_replay_matches_incremental_state(self, model, delta):
        config = SensorConfig(model=model, delta=delta, a_threshold=3.0)
        for xs in self.paths(model, seed=8):
            increments = [model.llr_increment(float(x)) for x in xs]
            state = SensorState()
            for x in xs:
                observe(state, config, float(x), StrategyKind.DECENTRALIZED_ONE_BIT, 1)
            n_comm, z_last, overshoot_sum = replay_history(increments, delta)
            assert n_comm == state.n_comm
            assert z_last == state.z_last_comm
            assert overshoot_sum == state.overshoot_sum

    def test_replay_matches_every_prefix(self, model, delta):
        config = SensorConfig(model=model, delta=delta, a_threshold=3.0)
        rng = np.random.default_rng(9)
        xs = model.sample_block(True, rng, 40)
        increments = [model.llr_increment(float(x)) for x in xs]
        state = SensorState()
        for t, x in enumerate(xs, start=1):
            observe(state, config, float(x), StrategyKind.DECENTRALIZED_FULL_VALUE, 1)
            assert replay_history(increments[:t], delta) == (
                state.n_comm,
                state.z_last_comm,
                state.overshoot_sum,
            )


class TestReplayHistory:
    def test_empty_history(self):
        assert replay_history([], 1.0) == (0, 0.0, 0.0)

    def test_hand_trace(self):
        n_comm, z_last, overshoot = replay_history([0.4, 0.7, 3.5, -2.0], 1.0)
        assert n_comm == 2
        assert z_last == pytest.approx(4.6)
        assert overshoot == pytest.approx(0.1 + 2.5)
