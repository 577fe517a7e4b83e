from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Mapping


class ResourceError(ValueError):
    pass


class GateKind(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    SDAG = "Sdag"
    T = "T"
    TDAG = "Tdag"
    CNOT = "CNOT"
    MEASURE = "Measure"
    ANCILLA_INIT = "AncillaInit"
    ANCILLA_TERM = "AncillaTerm"


UNITARY_KINDS = (
    GateKind.X,
    GateKind.Y,
    GateKind.Z,
    GateKind.H,
    GateKind.S,
    GateKind.SDAG,
    GateKind.T,
    GateKind.TDAG,
    GateKind.CNOT,
)
T_KINDS = frozenset({GateKind.T, GateKind.TDAG})

# json field -> gate kinds merged into it
_COUNT_FIELDS: dict[str, tuple[GateKind, ...]] = {
    "x": (GateKind.X,),
    "y": (GateKind.Y,),
    "z": (GateKind.Z,),
    "h": (GateKind.H,),
    "s": (GateKind.S, GateKind.SDAG),
    "t": (GateKind.T, GateKind.TDAG),
    "cnot": (GateKind.CNOT,),
    "measure": (GateKind.MEASURE,),
}
_SCALAR_FIELDS = (
    "width",
    "depth",
    "t_depth",
    "ancilla_max",
    "ancilla_cycles",
    "measurements",
)
JSON_FIELDS = tuple(_COUNT_FIELDS) + _SCALAR_FIELDS


@dataclass(frozen=True)
class ResourceVector:
    """
    Logical resources of a circuit block.

    counts, depth, t_depth, ancilla_cycles and measurements are totals over the block;
    width and ancilla_max are peaks (qubits / ancillas live at the same time).
    """

    counts: Mapping[GateKind, int] = field(default_factory=dict)
    width: int = 0
    depth: int = 0
    t_depth: int = 0
    ancilla_max: int = 0
    ancilla_cycles: int = 0
    measurements: int = 0

    def __post_init__(self) -> None:
        clean: dict[GateKind, int] = {}
        for kind, n in self.counts.items():
            kind = GateKind(kind)
            if n < 0:
                raise ResourceError(f"negative count for {kind.value}: {n}")
            if n:
                clean[kind] = int(n)
        object.__setattr__(self, "counts", clean)

        for name in _SCALAR_FIELDS:
            if getattr(self, name) < 0:
                raise ResourceError(f"negative {name}: {getattr(self, name)}")
        if self.t_depth > self.depth:
            raise ResourceError(f"t_depth {self.t_depth} exceeds depth {self.depth}")
        if self.t_count < self.t_depth:
            raise ResourceError(
                f"t_depth {self.t_depth} exceeds T count {self.t_count}"
            )
        if self.ancilla_max > self.width:
            raise ResourceError(
                f"ancilla_max {self.ancilla_max} exceeds width {self.width}"
            )

    def count(self, kind: GateKind) -> int:
        return self.counts.get(kind, 0)

    @property
    def t_count(self) -> int:
        return self.count(GateKind.T) + self.count(GateKind.TDAG)

    @property
    def total_gates(self) -> int:
        return sum(self.count(k) for k in UNITARY_KINDS)

    @property
    def is_zero(self) -> bool:
        return self == ZERO

    def with_fields(self, **changes: Any) -> ResourceVector:
        return replace(self, **changes)

    def to_fields(self) -> dict[str, int]:
        out = {
            name: sum(self.count(k) for k in kinds)
            for name, kinds in _COUNT_FIELDS.items()
        }
        for name in _SCALAR_FIELDS:
            out[name] = getattr(self, name)
        return out

    def to_json(self) -> dict[str, str]:
        # decimal strings keep big integers exact for any JSON reader
        return {k: str(v) for k, v in self.to_fields().items()}

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> ResourceVector:
        unknown = set(payload) - set(JSON_FIELDS)
        if unknown:
            raise ResourceError(f"Unknown resource fields: {sorted(unknown)}")
        values = {k: int(payload.get(k, 0)) for k in JSON_FIELDS}
        # merged fields come back as the plain kind
        counts = {kinds[0]: values[name] for name, kinds in _COUNT_FIELDS.items()}
        return cls(counts=counts, **{k: values[k] for k in _SCALAR_FIELDS})


ZERO = ResourceVector()


def gates(
    *,
    width: int = 0,
    depth: int | None = None,
    t_depth: int | None = None,
    ancilla_max: int = 0,
    measurements: int = 0,
    ancilla_cycles: int | None = None,
    **counts: int,
) -> ResourceVector:
    """
    Convenience constructor keyed by lower-case kind names (x, h, sdag, cnot, ...).

    Depth defaults to the gate count (a serial block) and t_depth to the T count.
    Measurements also land in the Measure count, and each one closes an ancilla cycle
    unless ancilla_cycles is given.
    """
    by_name = {k.value.lower(): k for k in GateKind}
    kinds: dict[GateKind, int] = {}
    for name, n in counts.items():
        if name not in by_name:
            raise ResourceError(f"Unknown gate kind: {name}")
        kinds[by_name[name]] = n
    if measurements:
        kinds[GateKind.MEASURE] = measurements

    total = sum(kinds.get(k, 0) for k in UNITARY_KINDS)
    t_total = kinds.get(GateKind.T, 0) + kinds.get(GateKind.TDAG, 0)
    return ResourceVector(
        counts=kinds,
        width=width,
        depth=total if depth is None else depth,
        t_depth=t_total if t_depth is None else t_depth,
        ancilla_max=ancilla_max,
        ancilla_cycles=measurements if ancilla_cycles is None else ancilla_cycles,
        measurements=measurements,
    )


def _add_counts(
    a: Mapping[GateKind, int], b: Mapping[GateKind, int]
) -> dict[GateKind, int]:
    out = dict(a)
    for k, n in b.items():
        out[k] = out.get(k, 0) + n
    return out


def seq(a: ResourceVector, b: ResourceVector) -> ResourceVector:
    # ancillas are reused between consecutive blocks
    return ResourceVector(
        counts=_add_counts(a.counts, b.counts),
        width=max(a.width, b.width),
        depth=a.depth + b.depth,
        t_depth=a.t_depth + b.t_depth,
        ancilla_max=max(a.ancilla_max, b.ancilla_max),
        ancilla_cycles=a.ancilla_cycles + b.ancilla_cycles,
        measurements=a.measurements + b.measurements,
    )


def par(a: ResourceVector, b: ResourceVector) -> ResourceVector:
    return ResourceVector(
        counts=_add_counts(a.counts, b.counts),
        width=a.width + b.width,
        depth=max(a.depth, b.depth),
        t_depth=max(a.t_depth, b.t_depth),
        ancilla_max=a.ancilla_max + b.ancilla_max,
        ancilla_cycles=a.ancilla_cycles + b.ancilla_cycles,
        measurements=a.measurements + b.measurements,
    )


def repeat(a: ResourceVector, n: int) -> ResourceVector:
    """n-fold seq of a, computed in closed form."""
    if n < 0:
        raise ResourceError(f"repeat count must be non-negative, got {n}")
    if n == 0:
        return ZERO
    return ResourceVector(
        counts={k: c * n for k, c in a.counts.items()},
        width=a.width,
        depth=a.depth * n,
        t_depth=a.t_depth * n,
        ancilla_max=a.ancilla_max,
        ancilla_cycles=a.ancilla_cycles * n,
        measurements=a.measurements * n,
    )


def stack(a: ResourceVector, n: int) -> ResourceVector:
    """n-fold par of a: n copies side by side."""
    if n < 0:
        raise ResourceError(f"stack count must be non-negative, got {n}")
    if n == 0:
        return ZERO
    return ResourceVector(
        counts={k: c * n for k, c in a.counts.items()},
        width=a.width * n,
        depth=a.depth,
        t_depth=a.t_depth,
        ancilla_max=a.ancilla_max * n,
        ancilla_cycles=a.ancilla_cycles * n,
        measurements=a.measurements * n,
    )


def seq_all(vectors: Iterable[ResourceVector]) -> ResourceVector:
    out = ZERO
    for v in vectors:
        out = seq(out, v)
    return out


def par_all(vectors: Iterable[ResourceVector]) -> ResourceVector:
    out = ZERO
    for v in vectors:
        out = par(out, v)
    return out


def scale(a: ResourceVector, factor: float | int | Fraction) -> ResourceVector:
    """
    Multiply every field by a non-negative factor, rounding half up to an integer.
    A float factor is read by its decimal text, so 0.1 means exactly 1/10.
    """
    exact = Fraction(repr(factor)) if isinstance(factor, float) else Fraction(factor)
    if exact < 0:
        raise ResourceError(f"scale factor must be non-negative, got {factor}")
    if exact == 1:
        return a

    def r(v: int) -> int:
        return math.floor(v * exact + Fraction(1, 2))

    counts = {k: r(c) for k, c in a.counts.items()}
    t_total = counts.get(GateKind.T, 0) + counts.get(GateKind.TDAG, 0)
    return ResourceVector(
        counts=counts,
        width=r(a.width),
        depth=r(a.depth),
        t_depth=min(r(a.t_depth), r(a.depth), t_total),
        ancilla_max=min(r(a.ancilla_max), r(a.width)),
        ancilla_cycles=r(a.ancilla_cycles),
        measurements=r(a.measurements),
    )
