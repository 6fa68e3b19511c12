import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcdft import (
    Circuit, CircuitBuilder, CircuitFamily, CircuitSyntaxError, Gate, InvalidCircuit, Kind,
    gate, gate_matrix, gen_bell, parse_circuit, parse_grcs, serialize_circuit, validate,
)
from qcdft.circuit import check, kind_from_name, single_qubit_table

S2 = 1 / np.sqrt(2)


def test_gate_names_and_aliases():
    assert kind_from_name("CNOT") is Kind.CX
    assert kind_from_name("x_1_2") is Kind.SX
    assert kind_from_name("Y_1_2") is Kind.SY
    with pytest.raises(KeyError):
        kind_from_name("u3")


def test_gate_arity_and_angle():
    with pytest.raises(ValueError):
        Gate(Kind.CX, (0,))
    with pytest.raises(ValueError):
        Gate(Kind.H, (0, 1))
    with pytest.raises(ValueError):
        Gate(Kind.RX, (0,))
    with pytest.raises(ValueError):
        Gate(Kind.H, (0,), 0.3)
    assert str(gate("rx", 2, theta=0.25)) == "rx(0.25) 2"


def test_bell_serializes():
    assert serialize_circuit(gen_bell()) == "qubits 2\n1 h 0\n2 cx 0 1\n"


def test_parse_native_with_gaps_and_comments():
    c = parse_circuit("# bell\nqubits 3\n1 h 0\n3 cnot 0 2  # skip a step\n3 rx(0.5) 1\n")
    assert c.depth == 3
    assert c.step(2) == []
    assert c.step(3) == [gate("cx", 0, 2), gate("rx", 1, theta=0.5)]


@pytest.mark.parametrize("text, line", [
    ("1 h 0\n", 1),
    ("qubits 2\n1 h 0\n0 x 1\n", 3),
    ("qubits 2\n2 h 0\n1 x 1\n", 3),
    ("qubits 2\n1 foo 0\n", 2),
    ("qubits 2\n1 cx 0\n", 2),
    ("qubits 2\n1 h zero\n", 2),
    ("qubits 2\n1 h 5\n", 2),
    ("qubits 2\n1 h 0\n1 x 0\n", 3),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(CircuitSyntaxError) as err:
        parse_circuit(text)
    assert err.value.line == line


def test_parse_grcs_cycles_and_names():
    text = "4\n0 h 0\n0 h 1\n0 h 2\n0 h 3\n1 cz 0 1\n1 t 2\n2 x_1_2 3\n2 y_1_2 0\n"
    c = parse_grcs(text)
    assert c.n_qubits == 4 and c.depth == 3
    assert c.step(3) == [gate("sx", 3), gate("sy", 0)]
    stripped = parse_grcs(text, strip_h=True)
    assert stripped.depth == 2
    assert stripped.step(1) == [gate("cz", 0, 1), gate("t", 2)]


def test_parse_grcs_single_gate_line():
    c = parse_grcs("4\n0 x_1_2 3\n")
    assert c.steps == [[gate("sx", 3)]]


def test_validate_reports_each_problem():
    c = Circuit(3, [Kind.CX, Kind.H, Kind.X, Kind.RX, Kind.H],
                [1, 7, 0, 2, 0], [1, -1, -1, -1, -1],
                [np.nan, np.nan, np.nan, np.nan, np.nan], [0, 2, 5])
    messages = [v.message for v in validate(c)]
    assert any("control equals target" in m for m in messages)
    assert any("out of range" in m for m in messages)
    assert any("rx angle" in m for m in messages)
    assert any("qubit 0 used 2 times" in m for m in messages)
    with pytest.raises(InvalidCircuit):
        check(c)


def test_validate_accepts_generated():
    for name in ("clifford-t", "clifford-t-alt", "boixo", "nonrandom", "bv"):
        assert validate(CircuitFamily(name).build(3)) == []


def test_matrices_unitary():
    for k in Kind:
        u = gate_matrix(k, 0.7 if k == Kind.RX else None)
        assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-14)
    assert np.allclose(gate_matrix(Kind.H), [[S2, S2], [S2, -S2]])
    assert np.allclose(gate_matrix(Kind.SX) @ gate_matrix(Kind.SX), gate_matrix(Kind.X))
    assert np.allclose(gate_matrix(Kind.SY) @ gate_matrix(Kind.SY), gate_matrix(Kind.Y))
    table = single_qubit_table()
    assert table.shape == (11, 2, 2)


def test_cx_matrix_basis_order():
    # basis index 2*control + target
    cx = gate_matrix(Kind.CX)
    assert np.array_equal(np.argmax(np.abs(cx), axis=0), [0, 1, 3, 2])


def _random_circuit(rng, n, depth):
    b = CircuitBuilder(n)
    for _ in range(depth):
        perm = rng.permutation(n)
        gates, i = [], 0
        while i < n:
            r = rng.random()
            if r < 0.3 and i + 1 < n:
                gates.append(Gate(rng.choice([Kind.CX, Kind.CZ]), (perm[i], perm[i + 1])))
                i += 2
                continue
            if r < 0.4:
                gates.append(Gate(Kind.RX, (perm[i],), float(rng.normal())))
            elif r < 0.9:
                gates.append(Gate(Kind(int(rng.integers(8))), (perm[i],)))
            i += 1
        b.add_gates(gates)
    return b.build()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(1, 12))
def test_parse_serialize_roundtrip(seed, n, depth):
    c = _random_circuit(np.random.default_rng(seed), n, depth)
    if c.gates_per_step()[-1] == 0:  # trailing empty steps are not written
        return
    assert parse_circuit(serialize_circuit(c)) == c
