"""
Classical-to-reversible compilation.

A boolean circuit over {INPUT, CONST, NOT, AND, XOR} is compiled node by node into a
reversible circuit T_f that writes every intermediate value into a fresh ancilla.
make_uf wraps T_f into the oracle U_f: compute, copy the outputs into a result
register, uncompute, and measure the ancillas back to zero.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

from . import expansions
from .circuits import CircuitBuilder, ExplicitCircuit, census
from .resources import ResourceVector
from .synthesis import FIXED_BUDGET, RotationPolicy

logger = logging.getLogger(__name__)

_LINE = re.compile(r"^([A-Za-z_]\w*)\s*=\s*([A-Z]+)((?:\s+\S+)*)$")


class BoolCircuitError(ValueError):
    pass


class Op(str, Enum):
    INPUT = "INPUT"
    CONST = "CONST"
    NOT = "NOT"
    AND = "AND"
    XOR = "XOR"


_ARITY = {Op.INPUT: 0, Op.CONST: 0, Op.NOT: 1, Op.AND: 2, Op.XOR: 2}


@dataclass(frozen=True)
class BoolNode:
    op: Op
    args: tuple[int, ...] = ()
    # input index for INPUT, bit for CONST
    value: int = 0


@dataclass(frozen=True)
class BoolCircuit:
    """Nodes in topological order; a node's arguments are earlier node ids."""

    nodes: tuple[BoolNode, ...]
    outputs: tuple[int, ...]
    n_inputs: int

    def __post_init__(self) -> None:
        for i, n in enumerate(self.nodes):
            if len(n.args) != _ARITY[n.op]:
                raise BoolCircuitError(f"node {i}: {n.op.value} takes {_ARITY[n.op]} argument(s)")
            if any(not (0 <= a < i) for a in n.args):
                raise BoolCircuitError(f"node {i}: arguments must be earlier nodes, got {n.args}")
            if n.op is Op.INPUT and not (0 <= n.value < self.n_inputs):
                raise BoolCircuitError(f"node {i}: input {n.value} out of range")
            if n.op is Op.CONST and n.value not in (0, 1):
                raise BoolCircuitError(f"node {i}: constant must be 0 or 1, got {n.value}")
        if any(not (0 <= o < len(self.nodes)) for o in self.outputs):
            raise BoolCircuitError(f"output refers to a missing node: {self.outputs}")

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)

    def evaluate(self, bits: Sequence[int]) -> tuple[int, ...]:
        if len(bits) != self.n_inputs:
            raise BoolCircuitError(f"expected {self.n_inputs} input bits, got {len(bits)}")
        vals: list[int] = []
        for n in self.nodes:
            if n.op is Op.INPUT:
                vals.append(bits[n.value] & 1)
            elif n.op is Op.CONST:
                vals.append(n.value)
            elif n.op is Op.NOT:
                vals.append(1 - vals[n.args[0]])
            elif n.op is Op.AND:
                vals.append(vals[n.args[0]] & vals[n.args[1]])
            else:
                vals.append(vals[n.args[0]] ^ vals[n.args[1]])
        return tuple(vals[o] for o in self.outputs)

    def pruned(self) -> BoolCircuit:
        """Drop nodes no output depends on; inputs are always kept."""
        live = set(self.outputs)
        for i in range(len(self.nodes) - 1, -1, -1):
            if i in live:
                live.update(self.nodes[i].args)
        keep = [
            i for i, n in enumerate(self.nodes) if i in live or n.op is Op.INPUT
        ]
        remap = {old: new for new, old in enumerate(keep)}
        nodes = tuple(
            BoolNode(self.nodes[i].op, tuple(remap[a] for a in self.nodes[i].args), self.nodes[i].value)
            for i in keep
        )
        return BoolCircuit(nodes, tuple(remap[o] for o in self.outputs), self.n_inputs)


class BoolCircuitBuilder:
    def __init__(self, n_inputs: int):
        self.n_inputs = n_inputs
        self._nodes: list[BoolNode] = []
        self._inputs = [self._add(BoolNode(Op.INPUT, (), i)) for i in range(n_inputs)]

    def _add(self, node: BoolNode) -> int:
        self._nodes.append(node)
        return len(self._nodes) - 1

    def input(self, i: int) -> int:
        return self._inputs[i]

    def const(self, bit: int) -> int:
        return self._add(BoolNode(Op.CONST, (), bit))

    def not_(self, a: int) -> int:
        return self._add(BoolNode(Op.NOT, (a,)))

    def and_(self, a: int, b: int) -> int:
        return self._add(BoolNode(Op.AND, (a, b)))

    def xor(self, a: int, b: int) -> int:
        return self._add(BoolNode(Op.XOR, (a, b)))

    def build(self, outputs: Sequence[int]) -> BoolCircuit:
        return BoolCircuit(tuple(self._nodes), tuple(outputs), self.n_inputs)


def parse_bool_circuit(text: str) -> BoolCircuit:
    """
    Parse the line format

        w0 = INPUT 0
        w1 = INPUT 1
        w2 = AND w0 w1
        OUTPUT w2

    Errors carry the line number.
    """
    names: dict[str, int] = {}
    nodes: list[BoolNode] = []
    outputs: list[int] | None = None
    n_inputs = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        def fail(msg: str) -> BoolCircuitError:
            return BoolCircuitError(f"line {lineno}: {msg}")

        if line.startswith("OUTPUT"):
            if outputs is not None:
                raise fail("OUTPUT given twice")
            refs = line.split()[1:]
            missing = [r for r in refs if r not in names]
            if missing:
                raise fail(f"unknown wire(s): {missing}")
            outputs = [names[r] for r in refs]
            continue

        m = _LINE.match(line)
        if not m:
            raise fail(f"cannot parse {line!r}")
        name, op_text, rest = m.group(1), m.group(2), m.group(3).split()
        if name in names:
            raise fail(f"wire {name} defined twice")
        try:
            op = Op(op_text)
        except ValueError:
            raise fail(f"unknown operation {op_text}")

        if op in (Op.INPUT, Op.CONST):
            if len(rest) != 1 or not rest[0].isdigit():
                raise fail(f"{op.value} takes one integer")
            node = BoolNode(op, (), int(rest[0]))
            if op is Op.CONST and node.value not in (0, 1):
                raise fail(f"constant must be 0 or 1, got {node.value}")
            if op is Op.INPUT:
                n_inputs = max(n_inputs, node.value + 1)
        else:
            if len(rest) != _ARITY[op]:
                raise fail(f"{op.value} takes {_ARITY[op]} wire(s)")
            missing = [r for r in rest if r not in names]
            if missing:
                raise fail(f"unknown wire(s): {missing}")
            node = BoolNode(op, tuple(names[r] for r in rest))
        names[name] = len(nodes)
        nodes.append(node)

    if outputs is None:
        raise BoolCircuitError("missing OUTPUT line")
    return BoolCircuit(tuple(nodes), tuple(outputs), n_inputs)


def load_bool_circuit(path: str | Path) -> BoolCircuit:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Boolean circuit file not found: {path}")
    return parse_bool_circuit(path.read_text(encoding="utf-8"))


class WireRole(str, Enum):
    INPUT = "input"
    OUTPUT = "output"
    ANCILLA = "ancilla"


class RevKind(str, Enum):
    X = "X"
    CNOT = "CNOT"
    TOFFOLI = "Toffoli"


@dataclass(frozen=True)
class RevGate:
    kind: RevKind
    target: int
    controls: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.controls:
            return f"{self.kind.value} w{self.target}"
        ctl = " ".join(f"w{c}" for c in self.controls)
        return f"{self.kind.value} {ctl} -> w{self.target}"


@dataclass(frozen=True)
class AncillaRecord:
    wire: int
    # index of the first gate after initialisation / after termination
    init: int
    term: int | None = None


@dataclass(frozen=True)
class ReversibleCircuit:
    n_wires: int
    gates: tuple[RevGate, ...]
    roles: tuple[WireRole, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    ancillas: tuple[AncillaRecord, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.roles) != self.n_wires:
            raise BoolCircuitError(f"{len(self.roles)} roles for {self.n_wires} wires")
        seen: set[int] = set()
        for rec in self.ancillas:
            if rec.wire in seen:
                raise BoolCircuitError(f"ancilla w{rec.wire} initialised twice")
            seen.add(rec.wire)
            if self.roles[rec.wire] is not WireRole.ANCILLA:
                raise BoolCircuitError(f"w{rec.wire} is not an ancilla wire")
            if rec.term is not None and rec.term < rec.init:
                raise BoolCircuitError(f"ancilla w{rec.wire} terminated before use")
        for g in self.gates:
            wires = (*g.controls, g.target)
            if any(not (0 <= w < self.n_wires) for w in wires):
                raise BoolCircuitError(f"wire out of range in {g}")
            if len(set(wires)) != len(wires):
                raise BoolCircuitError(f"repeated wire in {g}")

    @property
    def n_ancillas(self) -> int:
        return len(self.ancillas)

    def gate_count(self, kind: RevKind | None = None) -> int:
        if kind is None:
            return len(self.gates)
        return sum(1 for g in self.gates if g.kind is kind)

    def describe(self) -> str:
        lines = [
            f"# {self.n_wires} wires: inputs {list(self.inputs)}, "
            f"outputs {list(self.outputs)}, {self.n_ancillas} ancillas"
        ]
        lines += [str(g) for g in self.gates]
        return "\n".join(lines)


def compile_tf(c: BoolCircuit) -> ReversibleCircuit:
    """
    One fresh ancilla per non-input node: AND is a Toffoli into it, XOR two CNOTs,
    NOT a CNOT and an X, CONST 1 an X and CONST 0 nothing. Garbage stays live.
    """
    c = c.pruned()
    wire_of: dict[int, int] = {}
    roles = [WireRole.INPUT] * c.n_inputs
    gates: list[RevGate] = []
    ancillas: list[AncillaRecord] = []

    for i, n in enumerate(c.nodes):
        if n.op is Op.INPUT:
            wire_of[i] = n.value
            continue
        w = len(roles)
        roles.append(WireRole.ANCILLA)
        ancillas.append(AncillaRecord(w, len(gates)))
        wire_of[i] = w
        args = [wire_of[a] for a in n.args]
        if n.op is Op.CONST:
            if n.value:
                gates.append(RevGate(RevKind.X, w))
        elif n.op is Op.NOT:
            gates += [RevGate(RevKind.CNOT, w, (args[0],)), RevGate(RevKind.X, w)]
        elif n.op is Op.AND:
            gates.append(RevGate(RevKind.TOFFOLI, w, (args[0], args[1])))
        else:
            gates += [
                RevGate(RevKind.CNOT, w, (args[0],)),
                RevGate(RevKind.CNOT, w, (args[1],)),
            ]

    logger.debug("compiled T_f: %d gates, %d ancillas", len(gates), len(ancillas))
    return ReversibleCircuit(
        n_wires=len(roles),
        gates=tuple(gates),
        roles=tuple(roles),
        inputs=tuple(range(c.n_inputs)),
        outputs=tuple(wire_of[o] for o in c.outputs),
        ancillas=tuple(ancillas),
    )


def make_uf(tf: ReversibleCircuit) -> ReversibleCircuit:
    """Compute, copy outputs into a fresh result register, uncompute, release ancillas."""
    if any(rec.term is not None for rec in tf.ancillas):
        raise BoolCircuitError("make_uf expects a T_f circuit with live ancillas")

    result = tuple(range(tf.n_wires, tf.n_wires + len(tf.outputs)))
    copy = tuple(RevGate(RevKind.CNOT, r, (o,)) for o, r in zip(tf.outputs, result))
    gates = tf.gates + copy + tuple(reversed(tf.gates))
    end = len(gates)
    return ReversibleCircuit(
        n_wires=tf.n_wires + len(result),
        gates=gates,
        roles=tf.roles + (WireRole.OUTPUT,) * len(result),
        inputs=tf.inputs,
        outputs=result,
        ancillas=tuple(AncillaRecord(r.wire, r.init, end) for r in tf.ancillas),
    )


def ripple_adder(n: int) -> BoolCircuit:
    """
    n-bit ripple-carry adder. Inputs 0..n-1 hold a and n..2n-1 hold b (little-endian);
    outputs are the n sum bits followed by the carry out.
    """
    if n < 1:
        raise BoolCircuitError(f"adder width must be >= 1, got {n}")
    b = BoolCircuitBuilder(2 * n)
    a_bits = [b.input(i) for i in range(n)]
    b_bits = [b.input(n + i) for i in range(n)]

    sums = [b.xor(a_bits[0], b_bits[0])]
    carry = b.and_(a_bits[0], b_bits[0])
    for i in range(1, n):
        p = b.xor(a_bits[i], b_bits[i])
        sums.append(b.xor(p, carry))
        g = b.and_(a_bits[i], b_bits[i])
        t = b.and_(p, carry)
        # g and t are never both set, so XOR acts as OR
        carry = b.xor(g, t)
    return b.build(sums + [carry])


def majority_adder(n: int) -> ReversibleCircuit:
    """
    In-place MAJ/UMA ripple adder: b <- a + b mod 2^n, z ^= carry out.

    Wires 0..n-1 hold a, n..2n-1 hold b, 2n is z and 2n+1 the single carry ancilla.
    """
    if n < 1:
        raise BoolCircuitError(f"adder width must be >= 1, got {n}")
    a = list(range(n))
    b = list(range(n, 2 * n))
    z, c0 = 2 * n, 2 * n + 1

    def maj(c: int, bb: int, aa: int) -> list[RevGate]:
        return [
            RevGate(RevKind.CNOT, bb, (aa,)),
            RevGate(RevKind.CNOT, c, (aa,)),
            RevGate(RevKind.TOFFOLI, aa, (c, bb)),
        ]

    def uma(c: int, bb: int, aa: int) -> list[RevGate]:
        return [
            RevGate(RevKind.TOFFOLI, aa, (c, bb)),
            RevGate(RevKind.CNOT, c, (aa,)),
            RevGate(RevKind.CNOT, bb, (c,)),
        ]

    carries = [c0] + a[:-1]
    gates: list[RevGate] = []
    for i in range(n):
        gates += maj(carries[i], b[i], a[i])
    gates.append(RevGate(RevKind.CNOT, z, (a[-1],)))
    for i in range(n - 1, -1, -1):
        gates += uma(carries[i], b[i], a[i])

    roles = [WireRole.INPUT] * (2 * n) + [WireRole.OUTPUT, WireRole.ANCILLA]
    return ReversibleCircuit(
        n_wires=2 * n + 2,
        gates=tuple(gates),
        roles=tuple(roles),
        inputs=tuple(a + b),
        outputs=tuple(b + [z]),
        ancillas=(AncillaRecord(c0, 0, len(gates)),),
    )


def truth_table_circuit(n_inputs: int, table: Sequence[int]) -> BoolCircuit:
    """Single-output circuit for an arbitrary truth table, as an XOR of minterms."""
    if len(table) != 2**n_inputs:
        raise BoolCircuitError(f"truth table needs {2**n_inputs} rows, got {len(table)}")
    b = BoolCircuitBuilder(n_inputs)
    acc: int | None = None
    for row, bit in enumerate(table):
        if not bit:
            continue
        term: int | None = None
        for i in range(n_inputs):
            lit = b.input(i) if (row >> i) & 1 else b.not_(b.input(i))
            term = lit if term is None else b.and_(term, lit)
        if term is None:
            term = b.const(1)
        acc = term if acc is None else b.xor(acc, term)
    if acc is None:
        acc = b.const(0)
    return b.build([acc])


def to_explicit(circuit: ReversibleCircuit) -> ExplicitCircuit:
    """Clifford+T form: Toffolis become the 16-gate decomposition, ancillas get init/release."""
    tof = expansions.toffoli_circuit()
    inits: dict[int, list[int]] = {}
    terms: dict[int, list[int]] = {}
    for rec in circuit.ancillas:
        inits.setdefault(rec.init, []).append(rec.wire)
        if rec.term is not None:
            terms.setdefault(rec.term, []).append(rec.wire)

    b = CircuitBuilder(circuit.n_wires)
    for i in range(len(circuit.gates) + 1):
        for w in terms.get(i, ()):
            b.release(w)
        for w in inits.get(i, ()):
            b.alloc(w)
        if i == len(circuit.gates):
            break
        g = circuit.gates[i]
        if g.kind is RevKind.X:
            b.x(g.target)
        elif g.kind is RevKind.CNOT:
            b.cx(g.controls[0], g.target)
        else:
            b.block("toffoli", tof, g.controls[0], g.controls[1], g.target)
    return b.build()


def resource_vector(
    circuit: ReversibleCircuit, policy: RotationPolicy = FIXED_BUDGET
) -> ResourceVector:
    return census(to_explicit(circuit), policy)
