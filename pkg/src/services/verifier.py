from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import expansions
from .circuits import (
    MAX_QUBITS,
    ExplicitCircuit,
    Gate,
    Rotation,
    census,
    flatten,
)
from .resources import GateKind, ResourceVector
from .reversibilizer import (
    ReversibleCircuit,
    RevKind,
    compile_tf,
    make_uf,
    majority_adder,
    ripple_adder,
    truth_table_circuit,
)
from .synthesis import FIXED_BUDGET, RotationPolicy
from .templates import TemplateError, get_template

logger = logging.getLogger(__name__)

MAX_UNITARY_QUBITS = 12
MAX_BASIS_STATES = 2**20
# U_f checks: (x, y) registers enumerated in full up to this many bits, sampled above
EXHAUSTIVE_WIRES = 12
SAMPLE_SIZE = 4096
Y_PATTERNS = ("zeros", "ones", "random")
TOLERANCE = 1e-10
SUITES = ("leaf", "reversible", "tables")

# fields a closed form is not expected to reproduce from its expansion
CROSSCHECK_EXCLUDE: dict[str, frozenset[str]] = {
    "croty": frozenset({"depth"}),
    "mcnot": frozenset({"width"}),
}

CROSSCHECK_RANGES: dict[str, list[tuple[int, ...]]] = {
    "toffoli": [()],
    "mcnot": [(n,) for n in range(1, 9)],
    "qft": [(b,) for b in range(1, 7)],
    "cphase": [(n, f) for n in range(2, 7) for f in (0, 1)],
    "croty": [(n, f) for n in range(2, 7) for f in (0, 1)],
    "cz": [()],
    "ch": [()],
    "crz": [()],
    "cry": [()],
    "ccrz": [()],
    "w": [()],
}


class SimulationSizeError(ValueError):
    pass


_S2 = 1 / math.sqrt(2)
_GATES: dict[GateKind, np.ndarray] = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDAG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * math.pi / 4)]),
    GateKind.TDAG: np.diag([1, np.exp(-1j * math.pi / 4)]),
}


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rotation_matrix(op: Rotation) -> np.ndarray:
    if op.axis == "z":
        return rz(op.angle)
    if op.axis == "y":
        return ry(op.angle)
    return np.diag([1, np.exp(1j * op.angle)])


def expand(name: str, *args: int) -> ExplicitCircuit:
    d = get_template(name)
    if d.expansion is None:
        raise TemplateError(f"template {name} has no expansion")
    circuit = d.expansion(*args)
    if circuit.n_qubits > MAX_QUBITS:
        raise SimulationSizeError(
            f"{name}{args} expands to {circuit.n_qubits} qubits, limit is {MAX_QUBITS}"
        )
    return circuit


def _apply_1q(u: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    # little-endian: qubit q is bit q of the row index
    dim = u.shape[1]
    view = u.reshape(2 ** (n - q - 1), 2, 2**q, dim)
    return np.einsum("ab,hbld->hald", m, view).reshape(2**n, dim)


def simulate(circuit: ExplicitCircuit) -> np.ndarray:
    """
    Dense unitary of the circuit with exact rotation angles. Measurements and
    ancilla bookkeeping act as identity.
    """
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise SimulationSizeError(
            f"unitary simulation is limited to {MAX_UNITARY_QUBITS} qubits, got {n}"
        )
    dim = 2**n
    idx = np.arange(dim)
    u = np.eye(dim, dtype=complex)
    for op in flatten(circuit):
        if isinstance(op, Rotation):
            u = _apply_1q(u, _rotation_matrix(op), op.target, n)
        elif op.kind is GateKind.CNOT:
            assert op.control is not None
            perm = idx ^ (((idx >> op.control) & 1) << op.target)
            u = u[perm]
        elif op.kind in _GATES:
            u = _apply_1q(u, _GATES[op.kind], op.target, n)
    return u


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Max-norm distance between u and v minimised over a global phase."""
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(u - phase * v)))


def subspace(u: np.ndarray, n: int, zero_qubits: Sequence[int]) -> np.ndarray:
    """Block of u on basis states where every qubit in zero_qubits is 0."""
    idx = np.arange(2**n)
    mask = np.ones(2**n, dtype=bool)
    for q in zero_qubits:
        mask &= ((idx >> q) & 1) == 0
    keep = idx[mask]
    return u[np.ix_(keep, keep)]


def _controlled(n: int, controls: Sequence[int], target: int, m: np.ndarray) -> np.ndarray:
    dim = 2**n
    u = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        if all((j >> c) & 1 for c in controls):
            b = (j >> target) & 1
            for a in (0, 1):
                i = (j & ~(1 << target)) | (a << target)
                u[i, j] = m[a, b]
        else:
            u[j, j] = 1
    return u


def expected_ccnot() -> np.ndarray:
    return _controlled(3, (0, 1), 2, _GATES[GateKind.X])


def expected_mcnot(n: int) -> np.ndarray:
    return _controlled(n + 1, tuple(range(n)), n, _GATES[GateKind.X])


def expected_qft(b: int) -> np.ndarray:
    dim = 2**b
    idx = np.arange(dim)
    rev = np.array([int(format(j, f"0{b}b")[::-1], 2) for j in idx])
    f = np.exp(2j * math.pi * np.outer(idx, idx) / dim) / math.sqrt(dim)
    return np.conj(f)[:, rev]


def expected_ch() -> np.ndarray:
    return _controlled(2, (0,), 1, _GATES[GateKind.H])


def expected_cz() -> np.ndarray:
    return np.diag([1, 1, 1, -1]).astype(complex)


def expected_crz(alpha: float) -> np.ndarray:
    return _controlled(2, (0,), 1, rz(alpha))


def expected_cry(alpha: float) -> np.ndarray:
    return _controlled(2, (0,), 1, ry(alpha))


def expected_ccrz(alpha: float) -> np.ndarray:
    return _controlled(3, (0, 1), 2, rz(alpha))


W_STANDARD = np.array(
    [[1, 0, 0, 0], [0, _S2, _S2, 0], [0, _S2, -_S2, 0], [0, 0, 0, 1]], dtype=complex
)
# |01> <-> |10>: maps a big-endian two-qubit matrix to the simulator's bit order
_SWAP_ORDER = [0, 2, 1, 3]


def expected_w() -> np.ndarray:
    """
    The standard W gate, H on the {|01>, |10>} subspace, written with qubit 0 as the
    leading bit of |ab>. The simulator is little-endian, so the rows and columns are
    reordered into its basis.
    """
    return W_STANDARD[np.ix_(_SWAP_ORDER, _SWAP_ORDER)]


def _signed(j: int, n: int, f: int) -> tuple[int, int]:
    magnitude = j & ((1 << (n - 1)) - 1)
    sign = ((j >> (n - 1)) & 1) ^ f
    return magnitude, -1 if sign else 1


def expected_cphase(n: int, f: int, phi0: float = expansions.DEFAULT_PHI0) -> np.ndarray:
    """Phase on the register alone (sign-copy ancilla in |0>)."""
    phases = []
    for j in range(2**n):
        m, s = _signed(j, n, f)
        phases.append(np.exp(1j * phi0 * m * s))
    return np.diag(phases)


def expected_croty(n: int, f: int, phi0: float = expansions.DEFAULT_PHI0) -> np.ndarray:
    dim = 2 ** (n + 1)
    u = np.zeros((dim, dim), dtype=complex)
    for j in range(2**n):
        m, s = _signed(j, n, f)
        r = ry(s * phi0 * m)
        for a in (0, 1):
            for b in (0, 1):
                u[j | (a << n), j | (b << n)] = r[a, b]
    return u


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str = ""

    def __str__(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.suite}/{self.name}" + (f": {self.detail}" if self.detail else "")


def _unitary_check(
    name: str,
    circuit: ExplicitCircuit,
    expected: np.ndarray,
    zero_qubits: Sequence[int] = (),
) -> CheckResult:
    u = simulate(circuit)
    if zero_qubits:
        u = subspace(u, circuit.n_qubits, zero_qubits)
    dist = phase_distance(u, expected)
    return CheckResult("leaf", name, dist <= TOLERANCE, f"distance {dist:.2e}")


def leaf_checks() -> list[CheckResult]:
    alpha = 0.7
    checks: list[tuple[str, Callable[[], CheckResult]]] = [
        ("toffoli", lambda: _unitary_check("toffoli", expand("toffoli"), expected_ccnot())),
        ("cz", lambda: _unitary_check("cz", expand("cz"), expected_cz())),
        ("ch", lambda: _unitary_check("ch", expand("ch"), expected_ch())),
        ("w", lambda: _unitary_check("w", expand("w"), expected_w())),
        ("crz", lambda: _unitary_check("crz", expansions.crz_circuit(alpha), expected_crz(alpha))),
        ("cry", lambda: _unitary_check("cry", expansions.cry_circuit(alpha), expected_cry(alpha))),
        ("ccrz", lambda: _unitary_check("ccrz", expansions.ccrz_circuit(alpha), expected_ccrz(alpha))),
    ]
    for b in range(1, 5):
        checks.append(
            (f"qft({b})", lambda b=b: _unitary_check(f"qft({b})", expand("qft", b), expected_qft(b)))
        )
    for n in (1, 2, 3, 4):
        anc = tuple(range(n + 1, 2 * n - 1))
        checks.append(
            (
                f"mcnot({n})",
                lambda n=n, anc=anc: _unitary_check(
                    f"mcnot({n})", expand("mcnot", n), expected_mcnot(n), anc
                ),
            )
        )
    for n, f in itertools.product((2, 3), (0, 1)):
        checks.append(
            (
                f"cphase({n},{f})",
                lambda n=n, f=f: _unitary_check(
                    f"cphase({n},{f})", expand("cphase", n, f), expected_cphase(n, f), (n,)
                ),
            )
        )
        checks.append(
            (
                f"croty({n},{f})",
                lambda n=n, f=f: _unitary_check(
                    f"croty({n},{f})", expand("croty", n, f), expected_croty(n, f)
                ),
            )
        )
    return [run() for _, run in checks]


def crosscheck(
    name: str,
    param_range: Iterable[tuple[int, ...]] | None = None,
    policy: RotationPolicy = FIXED_BUDGET,
    closed_form: Callable[..., ResourceVector] | None = None,
) -> list[CheckResult]:
    """
    Compare the closed form with the census of the expansion for each parameter
    tuple; a mismatch names the first differing field.
    """
    d = get_template(name)
    if d.expansion is None:
        raise TemplateError(f"template {name} has no expansion")
    formula = closed_form or d.closed_form
    if formula is None:
        raise TemplateError(f"template {name} has no closed form")
    exclude = CROSSCHECK_EXCLUDE.get(name, frozenset())
    params = CROSSCHECK_RANGES.get(name, [()]) if param_range is None else param_range

    results = []
    for args in params:
        label = f"{name}{args}" if args else name
        expected = formula(*args, policy=policy).to_fields()
        got = census(d.expansion(*args), policy).to_fields()
        diff = next(
            (k for k in expected if k not in exclude and expected[k] != got[k]), None
        )
        if diff is None:
            results.append(CheckResult("tables", label, True))
        else:
            results.append(
                CheckResult(
                    "tables",
                    label,
                    False,
                    f"{diff}: closed form {expected[diff]}, expansion {got[diff]}",
                )
            )
    return results


def table_checks(policy: RotationPolicy = FIXED_BUDGET) -> list[CheckResult]:
    out: list[CheckResult] = []
    for name in CROSSCHECK_RANGES:
        out += crosscheck(name, policy=policy)
    return out


def all_inputs(k: int) -> np.ndarray:
    """Every k-bit basis input as a (2^k, k) boolean array, little-endian."""
    if 2**k > MAX_BASIS_STATES:
        raise SimulationSizeError(f"{2**k} basis states exceeds {MAX_BASIS_STATES}")
    return ((np.arange(2**k)[:, None] >> np.arange(k)) & 1).astype(bool)


def simulate_permutation(circuit: ReversibleCircuit, states: np.ndarray) -> np.ndarray:
    """
    Run a reversible circuit on a batch of basis states, shape (samples, n_wires),
    and return the resulting states.
    """
    states = np.asarray(states, dtype=bool)
    if states.ndim != 2 or states.shape[1] != circuit.n_wires:
        raise SimulationSizeError(
            f"expected states of shape (samples, {circuit.n_wires}), got {states.shape}"
        )
    if states.shape[0] > MAX_BASIS_STATES:
        raise SimulationSizeError(f"{states.shape[0]} basis states exceeds {MAX_BASIS_STATES}")
    out = states.copy()
    for g in circuit.gates:
        if g.kind is RevKind.X:
            out[:, g.target] ^= True
        elif g.kind is RevKind.CNOT:
            out[:, g.target] ^= out[:, g.controls[0]]
        else:
            out[:, g.target] ^= out[:, g.controls[0]] & out[:, g.controls[1]]
    return out


def embed(circuit: ReversibleCircuit, bits: np.ndarray, wires: Sequence[int]) -> np.ndarray:
    """Place bit columns on the given wires; every other wire starts at 0."""
    states = np.zeros((bits.shape[0], circuit.n_wires), dtype=bool)
    states[:, list(wires)] = bits
    return states


def uf_inputs(
    n_in: int,
    n_out: int,
    sample_size: int = SAMPLE_SIZE,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Basis inputs (x, y) for a U_f check, shape (samples, n_in + n_out).

    Up to EXHAUSTIVE_WIRES register bits every (x, y) pair is enumerated. Above that
    every x is paired with y = 0, y = all ones and a random y while that fits in
    MAX_BASIS_STATES; wider inputs fall back to sample_size random pairs.
    """
    k = n_in + n_out
    if k <= EXHAUSTIVE_WIRES:
        return all_inputs(k)
    rng = rng or np.random.default_rng(0)
    if len(Y_PATTERNS) * 2**n_in <= MAX_BASIS_STATES:
        x = all_inputs(n_in)
        blocks = []
        for pattern in Y_PATTERNS:
            if pattern == "zeros":
                y = np.zeros((x.shape[0], n_out), dtype=bool)
            elif pattern == "ones":
                y = np.ones((x.shape[0], n_out), dtype=bool)
            else:
                y = rng.integers(0, 2, size=(x.shape[0], n_out)).astype(bool)
            blocks.append(np.hstack([x, y]))
        return np.vstack(blocks)
    return rng.integers(0, 2, size=(sample_size, k)).astype(bool)


def check_uf(
    uf: ReversibleCircuit,
    expected: Callable[[np.ndarray], np.ndarray],
    sample_size: int = SAMPLE_SIZE,
    rng: np.random.Generator | None = None,
) -> str | None:
    """
    Check U_f |x, y, 0> = |x, y xor f(x), 0> over the inputs of uf_inputs. expected
    maps an input bit array to the output bit array. Returns None or a failure message.
    """
    n_in, n_out = len(uf.inputs), len(uf.outputs)
    bits = uf_inputs(n_in, n_out, sample_size, rng)
    x, y = bits[:, :n_in], bits[:, n_in:]
    start = embed(uf, bits, list(uf.inputs) + list(uf.outputs))
    end = simulate_permutation(uf, start)

    if not np.array_equal(end[:, list(uf.inputs)], x):
        return "inputs changed"
    if not np.array_equal(end[:, list(uf.outputs)], y ^ expected(x)):
        return "wrong result register"
    anc = [r.wire for r in uf.ancillas]
    if anc and end[:, anc].any():
        return "ancillas not restored"
    return None


def adder_expected(n: int) -> Callable[[np.ndarray], np.ndarray]:
    def f(x: np.ndarray) -> np.ndarray:
        weights = 1 << np.arange(n, dtype=np.int64)
        a = (x[:, :n] * weights).sum(axis=1)
        b = (x[:, n:] * weights).sum(axis=1)
        total = a + b
        return ((total[:, None] >> np.arange(n + 1)) & 1).astype(bool)

    return f


def reversible_checks() -> list[CheckResult]:
    results: list[CheckResult] = []
    for k in (1, 2, 3):
        for code in range(2 ** (2**k)):
            table = [(code >> row) & 1 for row in range(2**k)]
            uf = make_uf(compile_tf(truth_table_circuit(k, table)))
            t = np.array(table, dtype=bool)

            def f(x: np.ndarray, t=t, k=k) -> np.ndarray:
                rows = (x * (1 << np.arange(k))).sum(axis=1)
                return t[rows][:, None]

            err = check_uf(uf, f)
            results.append(CheckResult("reversible", f"table{k}:{code}", err is None, err or ""))

    for n in range(1, 9):
        uf = make_uf(compile_tf(ripple_adder(n)))
        err = check_uf(uf, adder_expected(n))
        results.append(CheckResult("reversible", f"ripple_adder({n})", err is None, err or ""))

        maj = majority_adder(n)
        x = all_inputs(2 * n)
        end = simulate_permutation(maj, embed(maj, x, maj.inputs))
        s = adder_expected(n)(x)
        ok = (
            np.array_equal(end[:, list(maj.outputs)], s)
            and np.array_equal(end[:, :n], x[:, :n])
            and not end[:, maj.ancillas[0].wire].any()
        )
        results.append(CheckResult("reversible", f"majority_adder({n})", ok))
    return results


def run_suite(name: str) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"Unknown suite: {name} (expected one of {SUITES})")
    logger.info("running %s suite", name)
    if name == "leaf":
        return leaf_checks()
    if name == "reversible":
        return reversible_checks()
    return table_checks()
