from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Union

from .resources import T_KINDS, UNITARY_KINDS, GateKind, ResourceVector
from .synthesis import FIXED_BUDGET, RotationPolicy, rotation_sequence

logger = logging.getLogger(__name__)

# largest expansion the verifier will build
MAX_QUBITS = 24

# kinds that take no time step
_INSTANT = frozenset({GateKind.MEASURE, GateKind.ANCILLA_INIT, GateKind.ANCILLA_TERM})


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int
    control: int | None = None

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)


@dataclass(frozen=True)
class Rotation:
    """Single-qubit rotation kept symbolic: axis is "z", "y" or "phase"."""

    axis: str
    target: int
    angle: float

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class Block:
    """Atomic sub-circuit; body qubit i runs on parent qubit qubits[i]."""

    name: str
    body: ExplicitCircuit
    qubits: tuple[int, ...]


Item = Union[Gate, Rotation, Block]


@dataclass(frozen=True)
class ExplicitCircuit:
    n_qubits: int
    items: tuple[Item, ...] = ()

    def __post_init__(self) -> None:
        if self.n_qubits < 0:
            raise CircuitError(f"negative qubit count: {self.n_qubits}")
        for item in self.items:
            qs = item.qubits
            if any(not (0 <= q < self.n_qubits) for q in qs):
                raise CircuitError(f"qubit out of range in {item}")
            if len(set(qs)) != len(qs):
                raise CircuitError(f"repeated qubit in {item}")
            if isinstance(item, Gate):
                if (item.kind is GateKind.CNOT) != (item.control is not None):
                    raise CircuitError(f"only CNOT carries a control: {item}")
            if isinstance(item, Block) and len(qs) != item.body.n_qubits:
                raise CircuitError(
                    f"block {item.name} maps {len(qs)} qubits onto "
                    f"a {item.body.n_qubits}-qubit body"
                )


class CircuitBuilder:
    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self._items: list[Item] = []

    def _gate(self, kind: GateKind, q: int) -> CircuitBuilder:
        self._items.append(Gate(kind, q))
        return self

    def x(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.X, q)

    def y(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.Y, q)

    def z(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.Z, q)

    def h(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.H, q)

    def s(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.S, q)

    def sdg(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.SDAG, q)

    def t(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.T, q)

    def tdg(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.TDAG, q)

    def cx(self, control: int, target: int) -> CircuitBuilder:
        self._items.append(Gate(GateKind.CNOT, target, control))
        return self

    def measure(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.MEASURE, q)

    def alloc(self, q: int) -> CircuitBuilder:
        return self._gate(GateKind.ANCILLA_INIT, q)

    def release(self, q: int) -> CircuitBuilder:
        # ancillas are returned to |0> and checked by measurement
        self._gate(GateKind.MEASURE, q)
        return self._gate(GateKind.ANCILLA_TERM, q)

    def rz(self, q: int, angle: float) -> CircuitBuilder:
        self._items.append(Rotation("z", q, angle))
        return self

    def ry(self, q: int, angle: float) -> CircuitBuilder:
        self._items.append(Rotation("y", q, angle))
        return self

    def phase(self, q: int, angle: float) -> CircuitBuilder:
        self._items.append(Rotation("phase", q, angle))
        return self

    def sequence(self, kinds: tuple[GateKind, ...], q: int) -> CircuitBuilder:
        for k in kinds:
            self._gate(k, q)
        return self

    def block(
        self, name: str, body: ExplicitCircuit, *qubits: int
    ) -> CircuitBuilder:
        self._items.append(Block(name, body, tuple(qubits)))
        return self

    def build(self) -> ExplicitCircuit:
        return ExplicitCircuit(self.n_qubits, tuple(self._items))


def exact_clifford(rot: Rotation) -> tuple[GateKind, ...] | None:
    """
    Exact Clifford gates (time order, up to global phase) for rotations by a
    multiple of pi/2, or None for a rotation that needs synthesis.
    """
    quarter = rot.angle / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) > 1e-12:
        return None
    k %= 4
    if rot.axis in ("z", "phase"):
        return ((), (GateKind.S,), (GateKind.Z,), (GateKind.SDAG,))[k]
    if rot.axis == "y":
        return (
            (),
            (GateKind.Z, GateKind.H),
            (GateKind.Y,),
            (GateKind.H, GateKind.Z),
        )[k]
    raise CircuitError(f"unknown rotation axis: {rot.axis}")


def lowered(rot: Rotation, policy: RotationPolicy) -> tuple[GateKind, ...]:
    exact = exact_clifford(rot)
    return rotation_sequence(policy) if exact is None else exact


def flatten(circuit: ExplicitCircuit) -> Iterator[Gate | Rotation]:
    """Gates and rotations in time order with blocks inlined onto parent qubits."""
    for item in circuit.items:
        if isinstance(item, Block):
            qmap = item.qubits
            for inner in flatten(item.body):
                if isinstance(inner, Gate):
                    yield Gate(
                        inner.kind,
                        qmap[inner.target],
                        None if inner.control is None else qmap[inner.control],
                    )
                else:
                    yield Rotation(inner.axis, qmap[inner.target], inner.angle)
        else:
            yield item


def schedule(
    circuit: ExplicitCircuit, policy: RotationPolicy = FIXED_BUDGET
) -> tuple[int, frozenset[int]]:
    """
    Greedy ASAP layering on qubit availability.

    Unit gates take one step, rotations their serial surrogate sequence, and
    measurement / ancilla bookkeeping none. A block is atomic: it holds all of its
    qubits for its own internal depth. Returns (depth, steps containing a T gate),
    with steps numbered from 1.
    """
    memo: dict[int, tuple[int, frozenset[int]]] = {}
    return _schedule(circuit, policy, memo)


def _schedule(
    circuit: ExplicitCircuit,
    policy: RotationPolicy,
    memo: dict[int, tuple[int, frozenset[int]]],
) -> tuple[int, frozenset[int]]:
    key = id(circuit)
    if key in memo:
        return memo[key]

    free = [0] * circuit.n_qubits
    t_steps: set[int] = set()
    for item in circuit.items:
        if isinstance(item, Block):
            depth, steps = _schedule(item.body, policy, memo)
            start = max((free[q] for q in item.qubits), default=0)
            t_steps.update(start + s for s in steps)
            for q in item.qubits:
                free[q] = start + depth
        elif isinstance(item, Rotation):
            start = free[item.target]
            seq_ = lowered(item, policy)
            t_steps.update(start + i + 1 for i, k in enumerate(seq_) if k in T_KINDS)
            free[item.target] = start + len(seq_)
        elif item.kind not in _INSTANT:
            step = max(free[q] for q in item.qubits) + 1
            if item.kind in T_KINDS:
                t_steps.add(step)
            for q in item.qubits:
                free[q] = step

    result = (max(free, default=0), frozenset(t_steps))
    memo[key] = result
    return result


def gate_counts(
    circuit: ExplicitCircuit, policy: RotationPolicy = FIXED_BUDGET
) -> dict[GateKind, int]:
    counts: dict[GateKind, int] = {}
    for op in flatten(circuit):
        kinds = lowered(op, policy) if isinstance(op, Rotation) else (op.kind,)
        for k in kinds:
            counts[k] = counts.get(k, 0) + 1
    return counts


def census(
    circuit: ExplicitCircuit, policy: RotationPolicy = FIXED_BUDGET
) -> ResourceVector:
    """Count an explicit circuit into a ResourceVector."""
    counts = gate_counts(circuit, policy)
    depth, t_steps = schedule(circuit, policy)

    live = peak = 0
    for op in flatten(circuit):
        if isinstance(op, Gate) and op.kind is GateKind.ANCILLA_INIT:
            live += 1
            peak = max(peak, live)
        elif isinstance(op, Gate) and op.kind is GateKind.ANCILLA_TERM:
            live -= 1
            if live < 0:
                raise CircuitError("ancilla terminated before it was initialised")

    measurements = counts.get(GateKind.MEASURE, 0)
    logger.debug(
        "census: %d gates, depth %d, %d qubits",
        sum(counts.get(k, 0) for k in UNITARY_KINDS),
        depth,
        circuit.n_qubits,
    )
    return ResourceVector(
        counts=counts,
        width=circuit.n_qubits,
        depth=depth,
        t_depth=len(t_steps),
        ancilla_max=peak,
        # every measurement closes one generation-use-termination cycle
        ancilla_cycles=measurements,
        measurements=measurements,
    )
