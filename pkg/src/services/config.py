from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from dotenv import find_dotenv, load_dotenv

from .synthesis import RotationMode, RotationPolicy

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "QLRE_CONFIG"
OUTPUT_FORMATS = ("table", "json", "csv")
ORACLE_A_BANDS = (1, 3, 5)

# sweep parameter -> dotted config key
SWEEPABLE = {
    "epsilon": "problem.epsilon",
    "N": "problem.N",
    "kappa": "problem.kappa",
    "r_override": "trotter.r_override",
    "Nb": "problem.Nb",
}


class ConfigError(ValueError):
    pass


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(message)


@dataclass(frozen=True)
class ProblemConfig:
    # N wins over the grid when both are given
    N: int | None = None
    nx: int | None = 12885
    ny: int | None = 12885
    kappa: float = 1e4
    d: int = 7
    epsilon: float = 0.01
    Nb: int = 9
    p_err: float = 0.01
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.N is None:
            _require(
                self.nx is not None and self.ny is not None,
                "problem.N or both problem.nx and problem.ny are required",
            )
            _require(
                self.nx >= 1 and self.ny >= 1,  # type: ignore[operator]
                f"problem.nx/ny must be >= 1, got {self.nx}x{self.ny}",
            )
        else:
            _require(self.N >= 1, f"problem.N must be >= 1, got {self.N}")
        _require(self.kappa >= 1, f"problem.kappa must be >= 1, got {self.kappa}")
        _require(self.d >= 1, f"problem.d must be >= 1, got {self.d}")
        _require(
            0 < self.epsilon < 1, f"problem.epsilon must lie in (0, 1), got {self.epsilon}"
        )
        _require(self.Nb >= 1, f"problem.Nb must be >= 1, got {self.Nb}")
        _require(0 < self.p_err < 1, f"problem.p_err must lie in (0, 1), got {self.p_err}")
        _require(0 < self.alpha <= 1, f"problem.alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class RegistersConfig:
    n1: int = 24
    n4: int = 65

    def __post_init__(self) -> None:
        _require(self.n1 >= 2, f"registers.n1 must be >= 2, got {self.n1}")
        _require(self.n4 >= 2, f"registers.n4 must be >= 2, got {self.n4}")


@dataclass(frozen=True)
class SuzukiConfig:
    k: int = 2

    def __post_init__(self) -> None:
        _require(self.k >= 1, f"suzuki.k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class TrotterConfig:
    # null lets r follow the slice formula
    r_override: int | None = 2_500_000_000_000
    # fraction of t0 used as the evolution time (average-time heuristic)
    time_fraction: float = 0.5
    # divide epsilon over the 2^(n0+1) - 1 evolutions of the phase estimation
    split_error: bool = True

    def __post_init__(self) -> None:
        if self.r_override is not None:
            _require(
                self.r_override >= 1,
                f"trotter.r_override must be >= 1, got {self.r_override}",
            )
        _require(
            0 < self.time_fraction <= 1,
            f"trotter.time_fraction must lie in (0, 1], got {self.time_fraction}",
        )


@dataclass(frozen=True)
class RotationConfig:
    mode: str = RotationMode.FIXED_BUDGET.value
    total: int = 100
    # FowlerFit only; null derives it from epsilon and the rotation count
    distance: float | None = None

    def __post_init__(self) -> None:
        modes = [m.value for m in RotationMode]
        _require(self.mode in modes, f"rotation.mode must be one of {modes}, got {self.mode!r}")
        _require(self.total >= 0, f"rotation.total must be >= 0, got {self.total}")
        if self.distance is not None:
            _require(
                0 < self.distance <= 0.292,
                f"rotation.distance must lie in (0, 0.292], got {self.distance}",
            )

    def policy(self, distance: float | None = None) -> RotationPolicy:
        if self.mode == RotationMode.FIXED_BUDGET.value:
            return RotationPolicy.fixed(self.total)
        d = self.distance if distance is None else distance
        if d is None:
            raise ConfigError("rotation.distance is required in fowler mode")
        return RotationPolicy.fowler(d)


@dataclass(frozen=True)
class OraclesConfig:
    profile: str | None = None
    band: int = 1
    mix_true: int = 3
    integer_inverse_factor: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        _require(
            self.band in ORACLE_A_BANDS,
            f"oracles.band must be one of {ORACLE_A_BANDS}, got {self.band}",
        )
        _require(0 <= self.mix_true <= 6, f"oracles.mix_true must lie in [0, 6], got {self.mix_true}")
        _require(
            self.integer_inverse_factor >= 0,
            f"oracles.integer_inverse_factor must be >= 0, got {self.integer_inverse_factor}",
        )
        _require(self.scale >= 0, f"oracles.scale must be >= 0, got {self.scale}")


@dataclass(frozen=True)
class TemplatesConfig:
    overrides: str | None = None


@dataclass(frozen=True)
class OutputConfig:
    format: str = "table"
    gate_time_ns: float = 1.0

    def __post_init__(self) -> None:
        _require(
            self.format in OUTPUT_FORMATS,
            f"output.format must be one of {OUTPUT_FORMATS}, got {self.format!r}",
        )
        _require(self.gate_time_ns > 0, f"output.gate_time_ns must be > 0, got {self.gate_time_ns}")


@dataclass(frozen=True)
class Config:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    registers: RegistersConfig = field(default_factory=RegistersConfig)
    suzuki: SuzukiConfig = field(default_factory=SuzukiConfig)
    trotter: TrotterConfig = field(default_factory=TrotterConfig)
    rotation: RotationConfig = field(default_factory=RotationConfig)
    oracles: OraclesConfig = field(default_factory=OraclesConfig)
    templates: TemplatesConfig = field(default_factory=TemplatesConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_SECTIONS: dict[str, type] = {f.name: f.default_factory for f in fields(Config)}  # type: ignore[misc]

_INT_KEYS = frozenset(
    {
        "problem.N",
        "problem.nx",
        "problem.ny",
        "problem.d",
        "problem.Nb",
        "registers.n1",
        "registers.n4",
        "suzuki.k",
        "trotter.r_override",
        "rotation.total",
        "oracles.band",
        "oracles.mix_true",
    }
)
_OPTIONAL_KEYS = frozenset(
    {
        "problem.N",
        "problem.nx",
        "problem.ny",
        "trotter.r_override",
        "rotation.distance",
        "oracles.profile",
        "templates.overrides",
    }
)
_BOOL_KEYS = frozenset({"trotter.split_error"})
_STR_KEYS = frozenset(
    {"rotation.mode", "oracles.profile", "templates.overrides", "output.format"}
)


def _coerce(path: str, value: Any) -> Any:
    if value is None:
        _require(path in _OPTIONAL_KEYS, f"{path} cannot be null")
        return None
    if path in _BOOL_KEYS:
        _require(isinstance(value, bool), f"{path} must be true or false, got {value!r}")
        return value
    if path in _STR_KEYS:
        _require(isinstance(value, str), f"{path} must be a string, got {value!r}")
        return value

    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{path} must be a number, got {value!r}",
    )
    _require(math.isfinite(value), f"{path} must be finite, got {value!r}")
    if path in _INT_KEYS:
        _require(float(value).is_integer(), f"{path} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def _split_key(dotted: str) -> tuple[str, str]:
    section, sep, key = dotted.partition(".")
    _require(bool(sep), f"config key must look like section.key, got {dotted!r}")
    _require(section in _SECTIONS, f"Unknown config section: {section}")
    names = {f.name for f in fields(_SECTIONS[section])}
    _require(key in names, f"Unknown config key: {dotted}")
    return section, key


def config_from_dict(payload: Any) -> Config:
    _require(isinstance(payload, dict), "config must be a JSON object of sections")
    sections: dict[str, Any] = {}
    for section, values in payload.items():
        _require(section in _SECTIONS, f"Unknown config section: {section}")
        _require(isinstance(values, dict), f"config section {section} must be an object")
        kwargs = {}
        for key, value in values.items():
            _split_key(f"{section}.{key}")
            kwargs[key] = _coerce(f"{section}.{key}", value)
        sections[section] = _SECTIONS[section](**kwargs)
    return Config(**sections)


def load_config(path: str | Path | None = None) -> Config:
    if path is None:
        return Config()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    cfg = config_from_dict(payload)
    logger.info("loaded config from %s", path)
    return cfg


def resolve_config_path(cli_value: str | None) -> Path | None:
    if cli_value:
        return Path(cli_value)
    load_dotenv(find_dotenv(usecwd=True))
    env = os.getenv(CONFIG_ENV_VAR)
    return Path(env) if env else None


def with_value(config: Config, dotted_key: str, value: Any) -> Config:
    section, key = _split_key(dotted_key)
    current = getattr(config, section)
    updated = replace(current, **{key: _coerce(dotted_key, value)})
    return replace(config, **{section: updated})


def to_dict(config: Config) -> dict[str, dict[str, Any]]:
    return {
        name: {f.name: getattr(getattr(config, name), f.name) for f in fields(cls)}
        for name, cls in _SECTIONS.items()
    }
