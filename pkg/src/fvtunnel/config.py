"""Scenario configuration: strict JSON loading, dotted overrides, hashing."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import typing
from dataclasses import dataclass, field
from typing import Optional, Union


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PotentialConfig:
    family: str = "driven_sine_gordon"
    A: float = 1.0
    epsilon: float = 0.1
    offset: float = 0.0


@dataclass(frozen=True)
class GridConfig:
    x_min: float = -24.0
    x_max: float = 24.0
    n_points: int = 241


@dataclass(frozen=True)
class SweepConfig:
    E_min: float = 0.02
    E_max: float = 0.3
    n_steps: int = 15


@dataclass(frozen=True)
class Overrides:
    alpha_constant: float = 1.0
    L_constant: float = 1.0
    trajectory_mode: str = "midpoint"
    trajectory: Optional[Union[float, list]] = None
    kappa_J: float = 1.0
    tilt_per_field: float = 1.0


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    csv: str = "sweep.csv"
    plot: str = "sweep.gp"


@dataclass(frozen=True)
class ScenarioConfig:
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    field_sweep: SweepConfig = field(default_factory=SweepConfig)
    vacuum_interval: tuple = (-2.0, 7.0)
    regime: str = "coherent"
    mu: float = 1.0
    overrides: Overrides = field(default_factory=Overrides)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self) -> None:
        validate(self)


def validate(cfg: ScenarioConfig) -> None:
    problems = []
    if cfg.potential.family != "driven_sine_gordon":
        problems.append(f"potential.family: unsupported {cfg.potential.family!r}")
    if not cfg.potential.A > 0:
        problems.append("potential.A must be positive")
    if cfg.potential.epsilon < 0:
        problems.append("potential.epsilon must be non-negative")
    if not cfg.grid.x_min < cfg.grid.x_max:
        problems.append("grid.x_min must be below grid.x_max")
    if cfg.grid.n_points < 5:
        problems.append("grid.n_points must be at least 5")
    sw = cfg.field_sweep
    if sw.E_min < 0 or not sw.E_min < sw.E_max:
        problems.append("field_sweep needs 0 <= E_min < E_max")
    if sw.n_steps < 2:
        problems.append("field_sweep.n_steps must be at least 2")
    if len(cfg.vacuum_interval) != 2 or not cfg.vacuum_interval[0] < cfg.vacuum_interval[1]:
        problems.append("vacuum_interval must be [lo, hi] with lo < hi")
    if cfg.regime not in ("coherent", "incoherent"):
        problems.append("regime must be 'coherent' or 'incoherent'")
    if not cfg.mu > 0:
        problems.append("mu must be positive")
    ov = cfg.overrides
    if ov.trajectory_mode not in ("midpoint", "explicit"):
        problems.append("overrides.trajectory_mode must be 'midpoint' or 'explicit'")
    if ov.trajectory_mode == "explicit" and ov.trajectory is None:
        problems.append("overrides.trajectory is required in explicit mode")
    if isinstance(ov.trajectory, list) and len(ov.trajectory) != cfg.grid.n_points:
        problems.append("overrides.trajectory list must have grid.n_points entries")
    for name in ("alpha_constant", "L_constant", "kappa_J", "tilt_per_field"):
        if not getattr(ov, name) > 0:
            problems.append(f"overrides.{name} must be positive")
    if problems:
        raise ConfigError("; ".join(problems))


def _coerce(tp, value, path: str):
    origin = typing.get_origin(tp)
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            raise ConfigError(f"{path or 'config'}: expected an object")
        return _build(tp, value, path)
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if tp is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list")
        return tuple(_coerce(float, v, f"{path}[{i}]") for i, v in enumerate(value))
    if origin is Union:
        if value is None and type(None) in typing.get_args(tp):
            return None
        if isinstance(value, list):
            return [_coerce(float, v, f"{path}[{i}]") for i, v in enumerate(value)]
        return _coerce(float, value, path)
    raise ConfigError(f"{path}: unsupported type {tp}")


def _build(cls, data: dict, path: str = ""):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"unknown config key(s): {', '.join(where + k for k in unknown)}")
    kwargs = {
        k: _coerce(hints[k], v, f"{path}.{k}" if path else k) for k, v in data.items()
    }
    return cls(**kwargs)


def from_dict(data: dict) -> ScenarioConfig:
    return _build(ScenarioConfig, data)


def to_dict(cfg: ScenarioConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["vacuum_interval"] = list(cfg.vacuum_interval)
    return d


def load(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return from_dict(data)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg: ScenarioConfig, assignments) -> ScenarioConfig:
    """Apply ``key.sub=value`` assignments; values are parsed as JSON when possible."""
    data = to_dict(cfg)
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigError(f"unknown config key: {key}")
            node = node[p]
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key: {key}")
        node[parts[-1]] = _parse_value(text)
    return from_dict(data)


def canonical_json(cfg: ScenarioConfig) -> str:
    return json.dumps(to_dict(cfg), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()
