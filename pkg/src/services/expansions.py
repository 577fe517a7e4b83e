"""
Gate-level circuits for the composite gates.

Qubit order is little-endian throughout: basis index bit i is qubit i. Signed registers
keep the magnitude in qubits 0..n-2 and the sign in qubit n-1.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .circuits import CircuitBuilder, CircuitError, ExplicitCircuit
from .resources import GateKind

# R_y(+pi/4) and R_y(-pi/4) as exact Clifford+T words, in time order
RY_PLUS_PI_4 = (
    GateKind.S,
    GateKind.H,
    GateKind.T,
    GateKind.S,
    GateKind.H,
    GateKind.X,
    GateKind.Z,
    GateKind.S,
)
RY_MINUS_PI_4 = (
    GateKind.SDAG,
    GateKind.Z,
    GateKind.X,
    GateKind.H,
    GateKind.SDAG,
    GateKind.TDAG,
    GateKind.H,
    GateKind.SDAG,
)

DEFAULT_PHI0 = 0.1


@lru_cache(maxsize=None)
def toffoli_circuit() -> ExplicitCircuit:
    # controls 0 and 1, target 2
    return (
        CircuitBuilder(3)
        .h(2)
        .cx(1, 2)
        .tdg(2)
        .cx(0, 2)
        .t(2)
        .cx(1, 2)
        .tdg(2)
        .cx(0, 2)
        .tdg(1)
        .t(2)
        .cx(0, 1)
        .tdg(1)
        .cx(0, 1)
        .t(0)
        .s(1)
        .h(2)
        .build()
    )


def mcnot_circuit(n: int) -> ExplicitCircuit:
    """
    n controls on qubits 0..n-1, target n, ancillas n+1..2n-2.

    A chain of Toffolis ANDs the controls into fresh ancillas, flips the target and
    is then undone; each ancilla is released (measured) at the end.
    """
    if n < 1:
        raise CircuitError(f"mcnot needs at least one control, got {n}")
    if n == 1:
        return CircuitBuilder(2).cx(0, 1).build()
    if n == 2:
        return toffoli_circuit()

    target = n
    anc = [n + 1 + i for i in range(n - 2)]
    b = CircuitBuilder(2 * n - 1)
    tof = toffoli_circuit()
    for a in anc:
        b.alloc(a)

    compute = [(0, 1, anc[0])]
    for i in range(1, n - 2):
        compute.append((i + 1, anc[i - 1], anc[i]))
    for c0, c1, t in compute:
        b.block("toffoli", tof, c0, c1, t)
    b.block("toffoli", tof, n - 1, anc[-1], target)
    for c0, c1, t in reversed(compute):
        b.block("toffoli", tof, c0, c1, t)

    for a in anc:
        b.release(a)
    return b.build()


def _controlled_phase_block(theta: float) -> ExplicitCircuit:
    # diag(1, 1, 1, e^{i theta}) on (control 0, target 1), up to global phase
    return (
        CircuitBuilder(2)
        .cx(0, 1)
        .phase(1, -theta / 2)
        .cx(0, 1)
        .phase(1, theta / 2)
        .phase(0, theta / 2)
        .build()
    )


def qft_circuit(b: int) -> ExplicitCircuit:
    """
    Inverse QFT on b qubits with exact controlled-phase angles.

    For each target t the controlled phases from every lower qubit run as atomic
    blocks, then H on t. The unitary is the conjugate DFT applied after a
    bit reversal of the input index.
    """
    if b < 1:
        raise CircuitError(f"qft needs at least one qubit, got {b}")
    builder = CircuitBuilder(b)
    for t in range(b):
        for c in range(t - 1, -1, -1):
            k = t - c + 1
            theta = -2 * math.pi / 2**k
            builder.block(f"cphase_r{k + 1}", _controlled_phase_block(theta), c, t)
        builder.h(t)
    return builder.build()


def _sign_copy(builder: CircuitBuilder, sign: int, anc: int) -> None:
    builder.x(anc).cx(sign, anc).x(anc)


def cphase_circuit(n: int, f: int, phi0: float = DEFAULT_PHI0) -> ExplicitCircuit:
    """
    Phase e^{i phi0 m (-1)^(s xor f)} on a signed register (magnitude m, sign s).

    Qubits 0..n-1 hold the register, qubit n is the sign-copy ancilla.
    """
    if n < 2:
        raise CircuitError(f"cphase needs n >= 2, got {n}")
    sign, anc = n - 1, n
    b = CircuitBuilder(n + 1)
    b.alloc(anc)
    if f:
        b.x(sign)
    _sign_copy(b, sign, anc)
    for j in range(n - 1):
        alpha = phi0 * 2**j
        body = (
            CircuitBuilder(2)
            .cx(0, 1)
            .phase(1, alpha)
            .cx(0, 1)
            .phase(0, -alpha)
            .build()
        )
        b.block(f"bit_phase_{j}", body, anc, j)
    _sign_copy(b, sign, anc)
    if f:
        b.x(sign)
    b.release(anc)
    return b.build()


def crz_circuit(alpha: float) -> ExplicitCircuit:
    # control 0, target 1
    return (
        CircuitBuilder(2)
        .rz(1, alpha / 2)
        .cx(0, 1)
        .rz(1, -alpha / 2)
        .cx(0, 1)
        .build()
    )


def cry_circuit(alpha: float) -> ExplicitCircuit:
    # the H S^dag H frame turns the target's Z rotation into a Y rotation
    return (
        CircuitBuilder(2)
        .h(1)
        .sdg(1)
        .h(1)
        .block("crz", crz_circuit(-alpha), 0, 1)
        .h(1)
        .s(1)
        .h(1)
        .build()
    )


def croty_circuit(n: int, f: int, phi0: float = DEFAULT_PHI0) -> ExplicitCircuit:
    """
    R_y((-1)^(s xor f) phi0 m) on qubit n, controlled by a signed register
    (magnitude m, sign s) on qubits 0..n-1. The rotated qubit is measured at the end.
    """
    if n < 2:
        raise CircuitError(f"croty needs n >= 2, got {n}")
    sign, q = n - 1, n
    b = CircuitBuilder(n + 1)
    b.cx(sign, q)
    if f:
        b.x(q)
    for j in range(n - 1):
        b.block(f"cry_{j}", cry_circuit(phi0 * 2**j), j, q)
    if f:
        b.x(q)
    b.cx(sign, q)
    b.measure(q)
    return b.build()


def cz_circuit() -> ExplicitCircuit:
    return CircuitBuilder(2).h(1).cx(0, 1).h(1).build()


def ch_circuit() -> ExplicitCircuit:
    # control 0, target 1
    return (
        CircuitBuilder(2)
        .z(1)
        .sequence(RY_MINUS_PI_4, 1)
        .cx(0, 1)
        .sequence(RY_PLUS_PI_4, 1)
        .z(1)
        .z(0)
        .build()
    )


def ccrz_circuit(alpha: float) -> ExplicitCircuit:
    # controls 0 and 1, target 2
    tof = toffoli_circuit()
    return (
        CircuitBuilder(3)
        .rz(2, alpha / 2)
        .block("toffoli", tof, 0, 1, 2)
        .rz(2, -alpha / 2)
        .block("toffoli", tof, 0, 1, 2)
        .build()
    )


def w_circuit() -> ExplicitCircuit:
    """Two-qubit W gate on (a=0, b=1): a controlled-H framed by two CNOTs."""
    return (
        CircuitBuilder(2)
        .cx(0, 1)
        .block("ch", ch_circuit(), 1, 0)
        .cx(0, 1)
        .build()
    )
