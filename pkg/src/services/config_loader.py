"""YAML experiment configuration: parsing and validation with field paths."""

from pathlib import Path
from typing import Any

import yaml

from src.models.experiment import (
    DEFAULT_HORIZON_MULTIPLIER,
    ExperimentConfig,
    default_subsets,
)
from src.models.fusion import Strategy, StrategyKind, Subset, SubsetPrior
from src.models.observation import ObservationModel
from src.services.fusion_center import uniform_prior
from src.utils.errors import ConfigError, SeqFusionError

DEFAULT_DELTA = 1.0
REQUIRED_FIELDS = ("k", "models", "alpha", "beta", "strategy", "n_trials")


def _as_int(data: dict[str, Any], key: str, default: int | None = None) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"must be an integer, got {value!r}")
    return value


def _as_float(value: Any, field: str) -> float:
    # PyYAML reads exponent forms without a dot (1e-3) as strings
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(field, f"must be a number, got {value!r}")
    return float(value)


def _parse_subset(value: Any, field: str) -> Subset:
    if isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not value:
        raise ConfigError(field, f"must be a non-empty list of sensor ids, got {value!r}")
    for item in value:
        if isinstance(item, bool) or not isinstance(item, int):
            raise ConfigError(field, f"sensor ids must be integers, got {item!r}")
        if item < 1:
            raise ConfigError(field, f"sensor ids start at 1, got {item}")
    return frozenset(value)


def _parse_models(value: Any, k: int) -> tuple[ObservationModel, ...]:
    if isinstance(value, dict):
        value = [value] * k
    if not isinstance(value, list):
        raise ConfigError("models", "must be a mapping or a list of mappings")
    if len(value) != k:
        raise ConfigError("models", f"expected {k} entries, got {len(value)}")
    models = []
    for i, entry in enumerate(value):
        field = f"models[{i}]"
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(field, "must be a mapping with a 'kind' key")
        if not isinstance(entry["kind"], str):
            raise ConfigError(f"{field}.kind", f"must be a model name, got {entry['kind']!r}")
        params = {
            key: _as_float(param, f"{field}.{key}") for key, param in entry.items() if key != "kind"
        }
        try:
            models.append(ObservationModel.from_dict({"kind": entry["kind"], **params}))
        except SeqFusionError as e:
            raise ConfigError(field, str(e)) from e
    return tuple(models)


def _parse_deltas(value: Any, k: int) -> tuple[float, ...]:
    if value is None:
        return (DEFAULT_DELTA,) * k
    if not isinstance(value, list):
        return (_as_float(value, "deltas"),) * k
    if len(value) != k:
        raise ConfigError("deltas", f"expected {k} entries, got {len(value)}")
    return tuple(_as_float(item, f"deltas[{i}]") for i, item in enumerate(value))


def _parse_prior(value: Any, k: int) -> SubsetPrior:
    if value is None:
        try:
            return uniform_prior(k)
        except SeqFusionError as e:
            raise ConfigError("strategy.prior", str(e)) from e
    if not isinstance(value, list) or not value:
        raise ConfigError("strategy.prior", "must be a non-empty list of {subset, weight}")
    mapping: dict[Subset, float] = {}
    for i, entry in enumerate(value):
        field = f"strategy.prior[{i}]"
        if not isinstance(entry, dict) or "subset" not in entry or "weight" not in entry:
            raise ConfigError(field, "must be a mapping with 'subset' and 'weight'")
        mapping[_parse_subset(entry["subset"], f"{field}.subset")] = _as_float(
            entry["weight"], f"{field}.weight"
        )
    try:
        return SubsetPrior.from_mapping(mapping)
    except SeqFusionError as e:
        raise ConfigError("strategy.prior", str(e)) from e


def _parse_strategy(value: Any, k: int) -> Strategy:
    if isinstance(value, str):
        value = {"kind": value}
    if not isinstance(value, dict) or "kind" not in value:
        raise ConfigError("strategy", "must be a kind name or a mapping with 'kind'")
    try:
        kind = StrategyKind(value["kind"])
    except ValueError as e:
        known = ", ".join(member.value for member in StrategyKind)
        raise ConfigError(
            "strategy.kind", f"unknown kind {value['kind']!r} (known: {known})"
        ) from e

    subset = None
    prior = None
    if kind is StrategyKind.ORACLE_SPRT:
        if "subset" not in value:
            raise ConfigError("strategy.subset", "oracle_sprt needs the affected subset")
        subset = _parse_subset(value["subset"], "strategy.subset")
    elif kind in (StrategyKind.MIXTURE_BRUTE_FORCE, StrategyKind.GLR_BRUTE_FORCE):
        prior = _parse_prior(value.get("prior"), k)
    return Strategy(kind=kind, subset=subset, prior=prior)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML experiment configuration.

    Args:
        text: YAML document with flat top-level keys (see README).

    Returns:
        Validated ExperimentConfig with defaults filled in.

    Raises:
        ConfigError: Naming the offending field on any missing, malformed or
            out-of-range value.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError("<document>", f"invalid YAML: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("<document>", "expected a mapping of configuration keys")

    for key in REQUIRED_FIELDS:
        if key not in data:
            raise ConfigError(key, "missing required field")

    k = _as_int(data, "k")
    if k < 1:
        raise ConfigError("k", f"must be a positive integer, got {k}")

    subsets_value = data.get("subsets")
    if subsets_value is None:
        subsets = default_subsets(k)
    elif isinstance(subsets_value, list) and subsets_value:
        subsets = tuple(
            _parse_subset(item, f"subsets[{i}]") for i, item in enumerate(subsets_value)
        )
    else:
        raise ConfigError("subsets", "must be a non-empty list of sensor-id lists")

    horizon = data.get("horizon")
    return ExperimentConfig(
        k=k,
        models=_parse_models(data["models"], k),
        alpha=_as_float(data["alpha"], "alpha"),
        beta=_as_float(data["beta"], "beta"),
        strategy=_parse_strategy(data["strategy"], k),
        deltas=_parse_deltas(data.get("deltas"), k),
        subsets_to_test=subsets,
        n_trials=_as_int(data, "n_trials"),
        base_seed=_as_int(data, "base_seed", 0),
        horizon_multiplier=_as_float(
            data.get("horizon_multiplier", DEFAULT_HORIZON_MULTIPLIER), "horizon_multiplier"
        ),
        horizon=None if horizon is None else _as_int(data, "horizon"),
        workers=_as_int(data, "workers", 1),
    )


def load_config(path: Path) -> ExperimentConfig:
    """Read and parse an experiment configuration file.

    Raises:
        ConfigError: If the file cannot be read or is invalid.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read configuration: {e}") from e
    return parse_config(text)
