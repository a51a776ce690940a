"""Run configuration: one YAML file, environment overrides, strict checks.

Precedence, lowest to highest: built-in defaults, config file, environment
variables (OCRSCORE_ENDPOINT, OCRSCORE_WORKERS), command-line flags. All
range invariants of embedded configs are enforced at load time so a bad
config fails before any scoring starts.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError, ContractError
from .grpo import (
    DEFAULT_ENTROPY_THRESHOLD,
    DEFAULT_EPSILON,
    DEFAULT_REWARD_BINS,
    DEFAULT_SIGMA_GUARD,
    DEFAULT_STEP_SIZE,
)
from .reward_vision import CODE_FORMATS, VisionRewardConfig

ENV_ENDPOINT = "OCRSCORE_ENDPOINT"
ENV_WORKERS = "OCRSCORE_WORKERS"

BACKEND_STUB = "stub"
BACKEND_REMOTE = "remote"


@dataclass(frozen=True)
class VisionSection:
    reward: VisionRewardConfig = VisionRewardConfig()
    backend: str = BACKEND_STUB
    endpoint: str | None = None
    timeout: float = 10.0
    retries: int = 2

    def __post_init__(self) -> None:
        if self.backend not in (BACKEND_STUB, BACKEND_REMOTE):
            raise ConfigError(
                f"vision.backend must be '{BACKEND_STUB}' or '{BACKEND_REMOTE}'"
            )
        if self.timeout <= 0:
            raise ConfigError("vision.timeout must be positive")
        if self.retries < 0:
            raise ConfigError("vision.retries must be nonnegative")


@dataclass(frozen=True)
class RenderSection:
    enabled: bool = False
    timeout: float = 30.0
    commands: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ConfigError("render.timeout must be positive")
        for fmt in self.commands:
            if fmt not in CODE_FORMATS:
                raise ConfigError(
                    f"render.commands has unknown format {fmt!r}; expected one of "
                    + ", ".join(CODE_FORMATS)
                )


@dataclass(frozen=True)
class GrpoSection:
    group_size: int = 8
    epsilon: float = DEFAULT_EPSILON
    sigma_guard: float = DEFAULT_SIGMA_GUARD
    entropy_bins: int = DEFAULT_REWARD_BINS
    entropy_threshold: float = DEFAULT_ENTROPY_THRESHOLD
    step_size: float = DEFAULT_STEP_SIZE
    iterations: int = 300
    seed: int = 0
    target: str = "ab"

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise ConfigError("grpo.group_size must be at least 2")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError("grpo.epsilon must lie in (0, 1)")
        if self.sigma_guard <= 0:
            raise ConfigError("grpo.sigma_guard must be positive")
        if self.entropy_bins < 1:
            raise ConfigError("grpo.entropy_bins must be positive")
        if not 0.0 <= self.entropy_threshold <= 1.0:
            raise ConfigError("grpo.entropy_threshold must lie in [0, 1]")
        if self.iterations < 1:
            raise ConfigError("grpo.iterations must be positive")
        if not self.target:
            raise ConfigError("grpo.target must be non-empty")


@dataclass(frozen=True)
class RunConfig:
    dataset_path: Path | None = None
    output_path: Path | None = None
    workers: int = 1
    vision: VisionSection = VisionSection()
    render: RenderSection = RenderSection()
    grpo: GrpoSection = GrpoSection()

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")


def _require_mapping(value: Any, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be a mapping")
    return value


def _reject_unknown(section: Mapping[str, Any], known: tuple[str, ...], where: str):
    unknown = sorted(set(section) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _coerce(value: Any, kind: type, where: str):
    try:
        if kind is bool:
            if not isinstance(value, bool):
                raise ValueError
            return value
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError
            return value
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError
            return float(value)
        if kind is str:
            if not isinstance(value, str):
                raise ValueError
            return value
    except ValueError:
        pass
    raise ConfigError(f"{where} must be of type {kind.__name__}")


def _build_vision(section: Mapping[str, Any]) -> VisionSection:
    keys = (
        "omega_global", "omega_local", "grid_rows", "grid_cols", "thumb_size",
        "backend", "endpoint", "timeout", "retries",
    )
    _reject_unknown(section, keys, "vision")
    reward_kwargs = {}
    for name, kind in (
        ("omega_global", float), ("omega_local", float),
        ("grid_rows", int), ("grid_cols", int), ("thumb_size", int),
    ):
        if name in section:
            reward_kwargs[name] = _coerce(section[name], kind, f"vision.{name}")
    try:
        reward = VisionRewardConfig(**reward_kwargs)
    except ContractError as exc:
        raise ConfigError(f"vision: {exc}") from exc
    kwargs: dict[str, Any] = {"reward": reward}
    if "backend" in section:
        kwargs["backend"] = _coerce(section["backend"], str, "vision.backend")
    if "endpoint" in section and section["endpoint"] is not None:
        kwargs["endpoint"] = _coerce(section["endpoint"], str, "vision.endpoint")
    if "timeout" in section:
        kwargs["timeout"] = _coerce(section["timeout"], float, "vision.timeout")
    if "retries" in section:
        kwargs["retries"] = _coerce(section["retries"], int, "vision.retries")
    return VisionSection(**kwargs)


def _build_render(section: Mapping[str, Any]) -> RenderSection:
    _reject_unknown(section, ("enabled", "timeout", "commands"), "render")
    kwargs: dict[str, Any] = {}
    if "enabled" in section:
        kwargs["enabled"] = _coerce(section["enabled"], bool, "render.enabled")
    if "timeout" in section:
        kwargs["timeout"] = _coerce(section["timeout"], float, "render.timeout")
    commands = _require_mapping(section.get("commands"), "render.commands")
    kwargs["commands"] = {
        str(fmt): _coerce(cmd, str, f"render.commands.{fmt}")
        for fmt, cmd in commands.items()
    }
    return RenderSection(**kwargs)


def _build_grpo(section: Mapping[str, Any]) -> GrpoSection:
    fields = {
        "group_size": int, "epsilon": float, "sigma_guard": float,
        "entropy_bins": int, "entropy_threshold": float, "step_size": float,
        "iterations": int, "seed": int, "target": str,
    }
    _reject_unknown(section, tuple(fields), "grpo")
    kwargs = {
        name: _coerce(section[name], kind, f"grpo.{name}")
        for name, kind in fields.items()
        if name in section
    }
    return GrpoSection(**kwargs)


_TOP_LEVEL_KEYS = ("dataset", "output", "workers", "vision", "render", "grpo")


def build_config(data: Mapping[str, Any]) -> RunConfig:
    """Construct a validated RunConfig from an already-parsed mapping."""
    _reject_unknown(data, _TOP_LEVEL_KEYS, "config")
    kwargs: dict[str, Any] = {}
    if data.get("dataset") is not None:
        kwargs["dataset_path"] = Path(_coerce(data["dataset"], str, "dataset"))
    if data.get("output") is not None:
        kwargs["output_path"] = Path(_coerce(data["output"], str, "output"))
    if "workers" in data:
        kwargs["workers"] = _coerce(data["workers"], int, "workers")
    kwargs["vision"] = _build_vision(_require_mapping(data.get("vision"), "vision"))
    kwargs["render"] = _build_render(_require_mapping(data.get("render"), "render"))
    kwargs["grpo"] = _build_grpo(_require_mapping(data.get("grpo"), "grpo"))
    return RunConfig(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    """Load and validate a YAML config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!s}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path!s}: {exc}") from exc
    return build_config(_require_mapping(data, "config"))


def apply_env_overrides(
    config: RunConfig, environ: Mapping[str, str] | None = None
) -> RunConfig:
    """Apply OCRSCORE_ENDPOINT / OCRSCORE_WORKERS on top of the file values."""
    env = os.environ if environ is None else environ
    if ENV_ENDPOINT in env:
        vision = dataclasses.replace(config.vision, endpoint=env[ENV_ENDPOINT])
        config = dataclasses.replace(config, vision=vision)
    if ENV_WORKERS in env:
        raw = env[ENV_WORKERS]
        try:
            workers = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{ENV_WORKERS} must be an integer, got {raw!r}") from exc
        config = dataclasses.replace(config, workers=workers)
    return config
