from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .config import OraclesConfig
from .resources import JSON_FIELDS, ResourceError, ResourceVector, scale

logger = logging.getLogger(__name__)

BUNDLED_PROFILES = Path(__file__).resolve().parent.parent / "data" / "oracles_published.profile"

_HEADER = re.compile(r"^\[oracle\s+([A-Za-z_][A-Za-z0-9_]*)\s*\]$")


class OracleProfileError(ValueError):
    pass


class ProfileParseError(OracleProfileError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class OracleCostProfile:
    name: str
    vector: ResourceVector
    source: str = ""

    def __post_init__(self) -> None:
        v = self.vector
        if v.measurements != v.ancilla_cycles:
            raise OracleProfileError(
                f"{self.name}: measurements {v.measurements} != "
                f"ancilla_cycles {v.ancilla_cycles}"
            )
        if v.ancilla_max != v.ancilla_cycles:
            raise OracleProfileError(
                f"{self.name}: ancilla_max {v.ancilla_max} != "
                f"ancilla_cycles {v.ancilla_cycles}"
            )


def _finish(name: str, line: int, values: dict[str, int], source: str) -> OracleCostProfile:
    values.setdefault("measure", values.get("measurements", 0))
    try:
        return OracleCostProfile(name, ResourceVector.from_json(values), source)
    except (ResourceError, OracleProfileError) as e:
        raise ProfileParseError(line, str(e)) from e


def parse_profiles(text: str) -> dict[str, OracleCostProfile]:
    profiles: dict[str, OracleCostProfile] = {}
    name: str | None = None
    values: dict[str, int] = {}
    source = ""

    def close() -> None:
        if name is None:
            return
        if name in profiles:
            raise ProfileParseError(header_line, f"oracle {name} defined twice")
        profiles[name] = _finish(name, header_line, values, source)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            close()
            name, header_line, values, source = m.group(1), lineno, {}, ""
            continue
        if name is None:
            raise ProfileParseError(lineno, "entry outside an [oracle ...] block")

        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ProfileParseError(lineno, f"expected 'field = value', got {line!r}")
        if key == "source":
            source = value
            continue
        if key not in JSON_FIELDS:
            raise ProfileParseError(lineno, f"unknown field: {key}")
        if key in values:
            raise ProfileParseError(lineno, f"field {key} given twice")
        if not value.isdigit():
            raise ProfileParseError(lineno, f"{key} must be a non-negative integer, got {value!r}")
        values[key] = int(value)
    close()
    return profiles


def load_profiles(path: str | Path | None = None) -> dict[str, OracleCostProfile]:
    path = BUNDLED_PROFILES if path is None else Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Oracle profile file not found: {path}")
    profiles = parse_profiles(path.read_text(encoding="utf-8"))
    logger.debug("loaded %d oracle profiles from %s", len(profiles), path)
    return profiles


def serialize_profiles(profiles: Mapping[str, OracleCostProfile]) -> str:
    blocks = []
    for name, p in profiles.items():
        lines = [f"[oracle {name}]"]
        if p.source:
            lines.append(f"source = {p.source}")
        lines += [f"{k} = {v}" for k, v in p.vector.to_fields().items() if v]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def integer_inverse_profile(
    oracle_a_false: OracleCostProfile, factor: float = 1.0
) -> OracleCostProfile:
    # no published IntegerInverse table: stand in with a scaled Oracle A query
    return OracleCostProfile(
        "integer_inverse",
        scale(oracle_a_false.vector, factor),
        f"{oracle_a_false.name} x {factor:g}",
    )


@dataclass(frozen=True)
class OracleSet:
    a_false: OracleCostProfile
    a_true: OracleCostProfile
    b: OracleCostProfile
    R: OracleCostProfile
    integer_inverse: OracleCostProfile

    @classmethod
    def from_config(
        cls,
        cfg: OraclesConfig = OraclesConfig(),
        profiles: Mapping[str, OracleCostProfile] | None = None,
    ) -> OracleSet:
        if profiles is None:
            profiles = load_profiles(cfg.profile)

        def pick(*names: str) -> OracleCostProfile:
            for n in names:
                if n in profiles:
                    return profiles[n]
            raise OracleProfileError(f"Missing oracle profile: {names[0]}")

        a_false = pick(f"oracle_A_false_band{cfg.band}", "oracle_A_false")
        inverse = integer_inverse_profile(a_false, cfg.integer_inverse_factor)

        def scaled(p: OracleCostProfile) -> OracleCostProfile:
            if cfg.scale == 1:
                return p
            return OracleCostProfile(p.name, scale(p.vector, cfg.scale), f"{p.source} x {cfg.scale:g}")

        return cls(
            a_false=scaled(a_false),
            a_true=scaled(pick("oracle_A_true")),
            b=scaled(pick("oracle_b")),
            R=scaled(pick("oracle_R")),
            integer_inverse=inverse,
        )

    def vectors(self) -> dict[str, ResourceVector]:
        """Query vectors under the names the call tree refers to."""
        return {
            "oracle_A_false": self.a_false.vector,
            "oracle_A_true": self.a_true.vector,
            "oracle_b": self.b.vector,
            "oracle_R": self.R.vector,
            "integer_inverse": self.integer_inverse.vector,
        }
