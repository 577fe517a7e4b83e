from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum

from .resources import GateKind, ResourceVector, gates

# Fit of average sequence length against approximation distance.
FIT_A = 0.292
FIT_B = 0.0511
# 46 G gates of the worked R_{pi/128} sequence expand to 59 elementary gates.
G_TO_ELEMENTARY = Decimal(59) / Decimal(46)


class RotationMode(str, Enum):
    FIXED_BUDGET = "fixed"
    FOWLER_FIT = "fowler"


def round_half_up(x: float | Decimal) -> int:
    return int(Decimal(str(x)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def _split_mix(total: int) -> tuple[int, int, int]:
    # 40/40/20 split of T/H/S; S takes the remainder so the total is exact
    t = round_half_up(Decimal(total) * Decimal("0.4"))
    h = round_half_up(Decimal(total) * Decimal("0.4"))
    return t, h, total - t - h


@dataclass(frozen=True)
class RotationPolicy:
    mode: RotationMode = RotationMode.FIXED_BUDGET
    fixed_total: int = 100
    fixed_t: int = 40
    fixed_h: int = 40
    fixed_s: int = 20
    fit_a: float = FIT_A
    fit_b: float = FIT_B
    target_distance: float | None = None

    def __post_init__(self) -> None:
        if self.fixed_t + self.fixed_h + self.fixed_s != self.fixed_total:
            raise ValueError(
                f"fixed mix {self.fixed_t}/{self.fixed_h}/{self.fixed_s} "
                f"does not sum to {self.fixed_total}"
            )
        if self.mode is RotationMode.FOWLER_FIT:
            d = self.target_distance
            if d is None or not (0 < d <= self.fit_a):
                raise ValueError(
                    f"FowlerFit needs target_distance in (0, {self.fit_a}], got {d}"
                )

    @classmethod
    def fixed(cls, total: int = 100) -> RotationPolicy:
        t, h, s = _split_mix(total)
        return cls(fixed_total=total, fixed_t=t, fixed_h=h, fixed_s=s)

    @classmethod
    def fowler(cls, distance: float) -> RotationPolicy:
        return cls(mode=RotationMode.FOWLER_FIT, target_distance=distance)


FIXED_BUDGET = RotationPolicy()


def fowler_length(delta: float, a: float = FIT_A, b: float = FIT_B) -> float:
    """
    Average number of G gates needed to approximate a rotation to distance delta.
    Raises ValueError outside (0, a], where the fit is undefined.
    """
    if not (0 < delta <= a):
        raise ValueError(f"distance must lie in (0, {a}], got {delta}")
    return math.log10(delta / a) / (-b)


def rotation_mix(policy: RotationPolicy) -> tuple[int, int, int]:
    """(T, H, S) counts of one arbitrary rotation under the policy."""
    if policy.mode is RotationMode.FIXED_BUDGET:
        return policy.fixed_t, policy.fixed_h, policy.fixed_s

    assert policy.target_distance is not None
    length = fowler_length(policy.target_distance, policy.fit_a, policy.fit_b)
    total = round_half_up(Decimal(math.ceil(length)) * G_TO_ELEMENTARY)
    return _split_mix(total)


def rotation_cost(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    # sequences are serial on one qubit: depth = length, t_depth = T count
    t, h, s = rotation_mix(policy)
    return gates(t=t, h=h, s=s, width=1 if t + h + s else 0)


def rotation_sequence(policy: RotationPolicy = FIXED_BUDGET) -> tuple[GateKind, ...]:
    """
    Serial surrogate gate sequence standing in for one rotation when a circuit is
    layered. Deterministic for a policy, so equal rotations started together line up.
    """
    t, h, s = rotation_mix(policy)
    pairs = min(t, h)
    seq_: list[GateKind] = []
    for _ in range(pairs):
        seq_ += [GateKind.T, GateKind.H]
    seq_ += [GateKind.T] * (t - pairs) + [GateKind.H] * (h - pairs)
    seq_ += [GateKind.S] * s
    return tuple(seq_)


def per_rotation_budget(epsilon: float, n_rotations: int) -> float:
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if n_rotations < 1:
        raise ValueError(f"n_rotations must be >= 1, got {n_rotations}")
    return epsilon / n_rotations
