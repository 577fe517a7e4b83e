import itertools

import pytest

from src.services.resources import GateKind
from src.services.reversibilizer import (
    BoolCircuit,
    BoolCircuitBuilder,
    BoolCircuitError,
    BoolNode,
    Op,
    RevGate,
    RevKind,
    WireRole,
    compile_tf,
    load_bool_circuit,
    majority_adder,
    make_uf,
    parse_bool_circuit,
    resource_vector,
    ripple_adder,
    to_explicit,
    truth_table_circuit,
)

HALF_ADDER = """
# sum and carry of two bits
w0 = INPUT 0
w1 = INPUT 1
s = XOR w0 w1
c = AND w0 w1
unused = NOT w0
OUTPUT s c
"""


def test_parse_and_evaluate():
    c = parse_bool_circuit(HALF_ADDER)
    assert c.n_inputs == 2
    assert c.n_outputs == 2
    for a, b in itertools.product((0, 1), repeat=2):
        assert c.evaluate((a, b)) == (a ^ b, a & b)


@pytest.mark.parametrize(
    "text, line",
    [
        ("w0 = INPUT 0\nw1 = OR w0 w0\nOUTPUT w1", 2),
        ("w0 = INPUT 0\nw0 = NOT w0\nOUTPUT w0", 2),
        ("w0 = INPUT 0\nw1 = AND w0\nOUTPUT w1", 2),
        ("w0 = INPUT 0\nw1 = NOT w9\nOUTPUT w1", 2),
        ("w0 = CONST 2\nOUTPUT w0", 1),
        ("w0 = INPUT x\nOUTPUT w0", 1),
        ("w0 = INPUT 0\nOUTPUT w7", 2),
        ("w0 = INPUT 0\nOUTPUT w0\nOUTPUT w0", 3),
        ("just words", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(BoolCircuitError, match=f"line {line}:"):
        parse_bool_circuit(text)


def test_missing_output_line():
    with pytest.raises(BoolCircuitError, match="missing OUTPUT"):
        parse_bool_circuit("w0 = INPUT 0\n")


def test_nodes_must_be_topological():
    with pytest.raises(BoolCircuitError):
        BoolCircuit((BoolNode(Op.NOT, (1,)), BoolNode(Op.INPUT, (), 0)), (0,), 1)


def test_pruning_drops_dead_nodes():
    c = parse_bool_circuit(HALF_ADDER).pruned()
    assert len(c.nodes) == 4
    assert all(n.op is not Op.NOT for n in c.nodes)


def test_compile_tf_gate_rules():
    b = BoolCircuitBuilder(2)
    x, y = b.input(0), b.input(1)
    outs = [b.and_(x, y), b.xor(x, y), b.not_(x), b.const(1), b.const(0)]
    tf = compile_tf(b.build(outs))
    assert tf.n_ancillas == 5
    assert tf.gate_count(RevKind.TOFFOLI) == 1
    assert tf.gate_count(RevKind.CNOT) == 3
    assert tf.gate_count(RevKind.X) == 2
    assert tf.roles[:2] == (WireRole.INPUT, WireRole.INPUT)
    assert all(rec.term is None for rec in tf.ancillas)


@pytest.mark.parametrize("n", range(1, 65))
def test_ripple_adder_bounds(n):
    tf = compile_tf(ripple_adder(n))
    assert tf.n_ancillas == 5 * n - 3 <= 8 * n
    assert tf.gate_count() == 8 * n - 5 <= 25 * n
    uf = make_uf(tf)
    assert uf.gate_count() == 2 * (8 * n - 5) + n + 1
    assert uf.n_wires == 2 * n + (5 * n - 3) + (n + 1)
    assert all(rec.term == uf.gate_count() for rec in uf.ancillas)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ripple_adder_adds(n):
    c = ripple_adder(n)
    for a, b in itertools.product(range(2**n), repeat=2):
        bits = [(a >> i) & 1 for i in range(n)] + [(b >> i) & 1 for i in range(n)]
        out = c.evaluate(bits)
        assert sum(bit << i for i, bit in enumerate(out)) == a + b


@pytest.mark.parametrize("n", [1, 3, 32])
def test_majority_adder_shape(n):
    c = majority_adder(n)
    assert c.gate_count() == 6 * n + 1
    assert c.n_ancillas == 1
    assert c.n_wires == 2 * n + 2
    assert c.gate_count(RevKind.TOFFOLI) == 2 * n


def test_make_uf_needs_live_ancillas():
    uf = make_uf(compile_tf(ripple_adder(2)))
    with pytest.raises(BoolCircuitError):
        make_uf(uf)


def test_truth_table_circuit_matches_table():
    table = [0, 1, 1, 0, 1, 0, 0, 1]
    c = truth_table_circuit(3, table)
    for row in range(8):
        bits = [(row >> i) & 1 for i in range(3)]
        assert c.evaluate(bits) == (table[row],)
    with pytest.raises(BoolCircuitError):
        truth_table_circuit(2, [0, 1])


def test_constant_truth_tables():
    assert truth_table_circuit(1, [0, 0]).evaluate([1]) == (0,)
    assert truth_table_circuit(0, [1]).evaluate([]) == (1,)


def test_rev_gate_text():
    assert str(RevGate(RevKind.X, 3)) == "X w3"
    assert str(RevGate(RevKind.TOFFOLI, 2, (0, 1))) == "Toffoli w0 w1 -> w2"


def test_describe_lists_every_gate():
    tf = compile_tf(ripple_adder(1))
    lines = tf.describe().splitlines()
    assert lines[0].startswith("# 4 wires")
    assert len(lines) == 1 + tf.gate_count()


def test_resource_vector_of_tf_and_uf():
    tf = compile_tf(ripple_adder(1))
    v = resource_vector(tf)
    assert v.count(GateKind.CNOT) == 2 + 6
    assert v.t_count == 7
    assert v.width == 4
    assert v.ancilla_max == 2
    assert v.measurements == 0

    u = resource_vector(make_uf(tf))
    assert u.count(GateKind.CNOT) == 2 * 8 + 2
    assert u.t_count == 14
    assert u.measurements == 2
    assert u.ancilla_cycles == 2


def test_to_explicit_keeps_width_for_wide_circuits():
    tf = compile_tf(ripple_adder(8))
    explicit = to_explicit(tf)
    assert explicit.n_qubits == tf.n_wires
    assert resource_vector(tf).t_count == 7 * tf.gate_count(RevKind.TOFFOLI)


def test_load_bool_circuit(tmp_path):
    path = tmp_path / "half_adder.bool"
    path.write_text(HALF_ADDER)
    assert load_bool_circuit(path).n_outputs == 2
    with pytest.raises(FileNotFoundError):
        load_bool_circuit(tmp_path / "missing.bool")
