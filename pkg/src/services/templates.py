from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Mapping

from . import expansions
from .circuits import ExplicitCircuit
from .resources import (
    ZERO,
    ResourceVector,
    gates,
    repeat,
    seq,
    seq_all,
)
from .synthesis import FIXED_BUDGET, RotationPolicy, rotation_cost


class TemplateError(ValueError):
    pass


class Compose(str, Enum):
    SEQ = "seq"
    PAR = "par"


class NodeTag(str, Enum):
    CORE = "core"
    ORACLE = "oracle"
    INTEGER_INVERSE = "integer_inverse"


@dataclass(frozen=True)
class ChildRef:
    """A child call: template name, argument expressions, multiplicity expression."""

    name: str
    args: tuple[str, ...] = ()
    multiplicity: str = "1"
    line: int = 0


@dataclass(frozen=True)
class TemplateDef:
    name: str
    params: tuple[str, ...] = ()
    closed_form: Callable[..., ResourceVector] | None = None
    expansion: Callable[..., ExplicitCircuit] | None = None
    children: tuple[ChildRef, ...] = ()
    literal: ResourceVector | None = None
    compose: Compose = Compose.SEQ
    tag: NodeTag = NodeTag.CORE
    formula: str = ""

    def __post_init__(self) -> None:
        if (
            self.closed_form is None
            and self.expansion is None
            and not self.children
            and self.literal is None
        ):
            raise TemplateError(
                f"template {self.name} has no closed form, expansion, children or gates"
            )

    def evaluate(
        self, *args: int, policy: RotationPolicy = FIXED_BUDGET
    ) -> ResourceVector:
        if self.closed_form is None:
            raise TemplateError(f"template {self.name} has no closed form")
        if len(args) != len(self.params):
            raise TemplateError(
                f"template {self.name} takes {len(self.params)} argument(s) "
                f"{self.params}, got {len(args)}"
            )
        return self.closed_form(*args, policy=policy)


def _check_flag(f: int) -> None:
    if f not in (0, 1):
        raise TemplateError(f"flag f must be 0 or 1, got {f}")


def toffoli(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    return gates(cnot=6, s=1, t=7, h=2, width=3, depth=12, t_depth=6)


def _toffoli_serial() -> ResourceVector:
    # a Toffoli counted gate by gate, as the conditional phase table does
    return gates(cnot=6, s=1, t=7, h=2, width=3)


def mcnot(n: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    if n < 1:
        raise TemplateError(f"mcnot needs n >= 1, got {n}")
    if n == 1:
        return gates(cnot=1, width=2)
    if n == 2:
        return toffoli()
    m = 2 * n - 3
    return gates(
        h=2 * m,
        s=m,
        t=7 * m,
        cnot=6 * m,
        width=n + 1,
        depth=12 * m,
        t_depth=6 * m,
        ancilla_max=n - 2,
        measurements=n - 2,
    )


def mcz(n: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    """Multi-controlled Z over n qubits: an mcnot on n-1 controls in an H frame."""
    if n < 1:
        raise TemplateError(f"mcz needs n >= 1, got {n}")
    if n == 1:
        return gates(z=1, width=1)
    frame = gates(h=2, width=n)
    return seq(frame, mcnot(n - 1))


def qft(b: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    if b < 1:
        raise TemplateError(f"qft needs b >= 1, got {b}")
    if b == 1:
        return gates(h=1, width=1)
    rot = rotation_cost(policy)
    pairs = b * (b - 1)
    rotations = repeat(rot, 3 * pairs // 2)
    return ResourceVector(
        counts=seq(gates(h=b, cnot=pairs), rotations).counts,
        width=b,
        depth=b * b + pairs * rot.depth,
        t_depth=pairs * rot.t_depth,
    )


def cphase(n: int, f: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    if n < 2:
        raise TemplateError(f"cphase needs n >= 2, got {n}")
    _check_flag(f)
    rot = rotation_cost(policy)
    body = repeat(rot, 2 * (n - 1))
    frame = gates(x=4 + 2 * f, cnot=2 * n, measurements=1)
    return ResourceVector(
        counts=seq(body, frame).counts,
        width=n + 1,
        depth=2 * (n - 1) * (rot.depth + 1) + 6,
        t_depth=2 * (n - 1) * rot.t_depth,
        ancilla_max=1,
        ancilla_cycles=1,
        measurements=1,
    )


def ccphase(n: int, f: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    if n < 2:
        raise TemplateError(f"ccphase needs n >= 2, got {n}")
    _check_flag(f)
    rot = rotation_cost(policy)
    tof = _toffoli_serial()
    per_bit = seq_all([repeat(rot, 4), repeat(tof, 2), gates(cnot=4)])
    body = repeat(per_bit, n - 1)
    frame = gates(x=4 + 2 * f, cnot=2, measurements=1)
    return ResourceVector(
        counts=seq(body, frame).counts,
        width=n + 2,
        depth=(n - 1) * per_bit.depth + 6,
        t_depth=(n - 1) * per_bit.t_depth,
        ancilla_max=1,
        ancilla_cycles=1,
        measurements=1,
    )


def croty(n: int, f: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    if n < 2:
        raise TemplateError(f"croty needs n >= 2, got {n}")
    _check_flag(f)
    rot = rotation_cost(policy)
    per_bit = seq(repeat(rot, 2), gates(h=4, s=2, cnot=2))
    frame = gates(x=2 * f, cnot=2, measurements=1)
    return ResourceVector(
        counts=seq(repeat(per_bit, n - 1), frame).counts,
        width=n + 1,
        # basis-change layers are left out, as tabulated
        depth=(n - 1) * (2 * rot.depth + 2) + 2 * f,
        t_depth=2 * (n - 1) * rot.t_depth,
        ancilla_max=0,
        ancilla_cycles=1,
        measurements=1,
    )


def cz(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    return gates(h=2, cnot=1, width=2)


def ch(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    """
    One CNOT between exact R_y(+-pi/4) sequences and Z corrections. The usual
    construction books two CNOTs; one suffices and the expansion is exactly controlled-H.
    """
    return gates(cnot=1, z=5, s=6, h=4, t=2, x=2, width=2, depth=19)


def crz(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    rot = rotation_cost(policy)
    return seq(repeat(rot, 2), gates(cnot=2, width=2))


def cry(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    return seq(crz(policy), gates(h=4, s=2, width=2))


def ccrz(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    """
    Two Toffolis around two half-angle rotations. The usual count is two Toffolis, two
    CNOTs and three rotations; this smaller construction is exact.
    """
    rot = rotation_cost(policy)
    return seq(repeat(rot, 2), repeat(toffoli(), 2))


def w(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    return seq(gates(cnot=2, width=2), ch(policy))


def zero_reflection(width: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    """Controlled reflection about |0...0> on `width` qubits."""
    if width < 1:
        raise TemplateError(f"zero_reflection needs width >= 1, got {width}")
    return seq(gates(x=2 * width, depth=2, width=width), mcz(width + 1))


def readout(n: int, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    # measured register qubits; the register itself is persistent
    return gates(measurements=n, width=n, depth=0)


def small_gates(name: str, policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
    table: dict[str, Callable[..., ResourceVector]] = {
        "CZ": cz,
        "CH": ch,
        "CRz": crz,
        "CRy": cry,
        "CCRz": ccrz,
        "W": w,
    }
    if name not in table:
        raise TemplateError(f"Unknown small gate: {name}")
    return table[name](policy)


def _fixed(vec: ResourceVector) -> Callable[..., ResourceVector]:
    def closed(policy: RotationPolicy = FIXED_BUDGET) -> ResourceVector:
        return vec

    return closed


def _angle_free(
    build: Callable[[float], ExplicitCircuit],
) -> Callable[[], ExplicitCircuit]:
    def expand() -> ExplicitCircuit:
        return build(expansions.DEFAULT_PHI0)

    return expand


_ROT = "one rotation under the policy (FixedBudget: T=40, H=40, S=20, depth=100)"


@lru_cache(maxsize=1)
def template_library() -> Mapping[str, TemplateDef]:
    defs = [
        TemplateDef(
            "toffoli",
            closed_form=toffoli,
            expansion=expansions.toffoli_circuit,
            formula="CNOT=6, S=1, T=7, H=2, depth=12, t_depth=6, width=3",
        ),
        TemplateDef(
            "mcnot",
            ("n",),
            closed_form=mcnot,
            expansion=expansions.mcnot_circuit,
            formula=(
                "n=1: CNOT; n=2: toffoli; n>=3: H=2(2n-3), S=2n-3, T=7(2n-3), "
                "CNOT=6(2n-3), width=n+1, depth=12(2n-3), t_depth=6(2n-3), "
                "ancilla=n-2, measurements=n-2"
            ),
        ),
        TemplateDef(
            "mcz",
            ("n",),
            closed_form=mcz,
            formula="H=2 + mcnot(n-1)",
        ),
        TemplateDef(
            "qft",
            ("b",),
            closed_form=qft,
            expansion=expansions.qft_circuit,
            formula=(
                "H=b, rotations=3b(b-1)/2, CNOT=b(b-1), width=b, "
                "depth=b^2 + b(b-1)*depth(R), t_depth=b(b-1)*t_depth(R)"
            ),
        ),
        TemplateDef(
            "cphase",
            ("n", "f"),
            closed_form=cphase,
            expansion=expansions.cphase_circuit,
            formula=(
                "H=80(n-1), S=40(n-1), T=80(n-1), X=4+2f, CNOT=2n, width=n+1, "
                "depth=202(n-1)+6, t_depth=80(n-1), ancilla=1, measurements=1"
            ),
        ),
        TemplateDef(
            "ccphase",
            ("n", "f"),
            closed_form=ccphase,
            formula=(
                "H=164(n-1), S=82(n-1), T=174(n-1), X=4+2f, CNOT=16(n-1)+2, "
                "width=n+2, depth=436(n-1)+6, t_depth=174(n-1), ancilla=1, "
                "measurements=1"
            ),
        ),
        TemplateDef(
            "croty",
            ("n", "f"),
            closed_form=croty,
            expansion=expansions.croty_circuit,
            formula=(
                "H=84(n-1), S=42(n-1), T=80(n-1), X=2f, CNOT=2n, width=n+1, "
                "depth=202(n-1)+2f, t_depth=80(n-1), ancilla=0, measurements=1"
            ),
        ),
        TemplateDef(
            "cz",
            closed_form=cz,
            expansion=expansions.cz_circuit,
            formula="H=2, CNOT=1, depth=3",
        ),
        TemplateDef(
            "ch",
            closed_form=ch,
            expansion=expansions.ch_circuit,
            formula="CNOT=1, Z=5, S=6, H=4, T=2, X=2, depth=19, t_depth=2",
        ),
        TemplateDef(
            "crz",
            closed_form=crz,
            expansion=_angle_free(expansions.crz_circuit),
            formula=f"CNOT=2 + 2 x {_ROT}",
        ),
        TemplateDef(
            "cry",
            closed_form=cry,
            expansion=_angle_free(expansions.cry_circuit),
            formula="crz + H=4, S=2",
        ),
        TemplateDef(
            "ccrz",
            closed_form=ccrz,
            expansion=_angle_free(expansions.ccrz_circuit),
            formula=f"2 x toffoli + 2 x {_ROT}",
        ),
        TemplateDef(
            "w",
            closed_form=w,
            expansion=expansions.w_circuit,
            formula="CNOT=2 + ch",
        ),
        TemplateDef(
            "rotation",
            closed_form=lambda policy=FIXED_BUDGET: rotation_cost(policy),
            formula=_ROT,
        ),
        TemplateDef("h", closed_form=_fixed(gates(h=1, width=1)), formula="H=1"),
        TemplateDef("x", closed_form=_fixed(gates(x=1, width=1)), formula="X=1"),
        TemplateDef(
            "zero_reflection",
            ("w",),
            closed_form=zero_reflection,
            formula="X=2w + mcz(w+1)",
        ),
        TemplateDef(
            "readout",
            ("n",),
            closed_form=readout,
            formula="measurements=n, ancilla cycles=n",
        ),
        TemplateDef(
            "scratch",
            ("n",),
            closed_form=readout,
            formula="n register qubits initialised and measured back to zero",
        ),
        TemplateDef("noop", closed_form=_fixed(ZERO), formula="no quantum cost"),
    ]
    return {d.name: d for d in defs}


def get_template(name: str) -> TemplateDef:
    lib = template_library()
    if name not in lib:
        raise TemplateError(f"Unknown template: {name}")
    return lib[name]


def evaluate_template(
    name: str, args: tuple[int, ...] = (), policy: RotationPolicy = FIXED_BUDGET
) -> ResourceVector:
    return get_template(name).evaluate(*args, policy=policy)
