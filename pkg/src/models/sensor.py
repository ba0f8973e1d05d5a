"""Sensor-side state and the uplink messages a sensor emits."""

import math
from dataclasses import dataclass, field
from enum import Enum

from src.models.observation import ObservationModel
from src.utils.errors import DomainError


@dataclass(frozen=True, slots=True)
class SensorConfig:
    """Static configuration of one sensor.

    Attributes:
        model: Observation densities of this sensor.
        delta: Communication step; a message is triggered once the local LLR has
            grown by at least ``delta`` since the previous communication.
        a_threshold: Calibrated A; the sensor raises its null alarm at Z <= -A.
    """

    model: ObservationModel
    delta: float
    a_threshold: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise DomainError(f"delta must be positive, got {self.delta}")
        if not (math.isfinite(self.a_threshold) and self.a_threshold > 0.0):
            raise DomainError(f"a_threshold must be positive, got {self.a_threshold}")


@dataclass(slots=True)
class SensorState:
    """Running statistics of one sensor.

    Attributes:
        t: Local time (number of observations taken).
        z: Cumulative LLR Z_t.
        m: Running maximum of Z over 1..t, with M_0 = 0.
        n_comm: Number of communications N_t triggered by the Delta recursion.
        z_last_comm: Z at the most recent communication (0 before any).
        overshoot_sum: Sum of overshoots (ell_n - delta) over all communications.
        null_alarm_sent: Whether the one-shot null alarm has been emitted.
    """

    t: int = 0
    z: float = 0.0
    m: float = 0.0
    n_comm: int = 0
    z_last_comm: float = 0.0
    overshoot_sum: float = 0.0
    null_alarm_sent: bool = False


class MessageKind(Enum):
    """Kinds of uplink message."""

    FULL_VALUE = "full_value"
    ONE_BIT = "one_bit"
    NULL_ALARM = "null_alarm"
    RAW_VALUE = "raw_value"


@dataclass(frozen=True, slots=True)
class UplinkMessage:
    """One sensor-to-fusion transmission.

    Attributes:
        sensor_id: 1-based id of the emitting sensor.
        kind: What the message carries.
        emitted_at: Local time of emission.
        value: ``ell`` for FULL_VALUE, the exact LLR for RAW_VALUE, unused otherwise.
    """

    sensor_id: int
    kind: MessageKind
    emitted_at: int
    value: float = field(default=0.0)
