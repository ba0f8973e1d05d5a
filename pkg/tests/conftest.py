"""Shared fixtures for the seqfusion test suite."""

from dataclasses import dataclass
from typing import Any

import numpy as np
import pytest

from src.models.experiment import ExperimentConfig, default_subsets
from src.models.fusion import Strategy, StrategyKind
from src.models.observation import GaussianMeanShift, Observation, ObservationModel
from src.models.sensor import SensorConfig


@dataclass(frozen=True)
class IdentityLLR(ObservationModel):
    """Test model whose observation is its own LLR increment."""

    def sample(self, under_h1: bool, rng: np.random.Generator) -> Observation:
        return float(rng.normal(0.5 if under_h1 else -0.5))

    def sample_block(self, under_h1: bool, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(0.5 if under_h1 else -0.5, size=size)

    def llr_increment(self, x: Observation) -> float:
        return x

    def kl_numbers(self) -> tuple[float, float]:
        return 0.5, 0.5

    def llr_second_moment(self) -> float:
        return 1.25

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "identity"}


@pytest.fixture
def identity_sensor():
    """Factory for a sensor config fed directly with LLR increments."""

    def make(delta: float = 1.0, a_threshold: float = 2.0) -> SensorConfig:
        return SensorConfig(model=IdentityLLR(), delta=delta, a_threshold=a_threshold)

    return make


@pytest.fixture
def make_config():
    """Factory for experiment configs: K=3 gaussian(1.0), alpha = beta = 0.01."""

    def make(
        kind: StrategyKind = StrategyKind.CENTRALIZED_POSITIVE_PART,
        k: int = 3,
        mu: float = 1.0,
        delta: float = 1.0,
        **overrides: Any,
    ) -> ExperimentConfig:
        fields: dict[str, Any] = {
            "k": k,
            "models": (GaussianMeanShift(mu),) * k,
            "alpha": 0.01,
            "beta": 0.01,
            "strategy": Strategy(kind),
            "deltas": (delta,) * k,
            "subsets_to_test": default_subsets(k),
            "n_trials": 200,
        }
        fields.update(overrides)
        return ExperimentConfig(**fields)

    return make


@pytest.fixture
def config_yaml() -> str:
    """Minimal valid YAML experiment configuration with K=2."""
    return (
        "k: 2\n"
        "alpha: 0.05\n"
        "beta: 0.05\n"
        "models:\n"
        "  kind: gaussian_mean_shift\n"
        "  mu: 1.0\n"
        "strategy: decentralized_one_bit\n"
        "deltas: 1.0\n"
        "n_trials: 100\n"
    )
