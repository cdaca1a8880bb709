import numpy as np
import pytest
from conftest import random_circuit

from vqabench import problems, qaoa
from vqabench.circuit_ir import (
    Circuit,
    CircuitError,
    Gate,
    GateKind,
    GateCounts,
    append_gate,
    cnot,
    concatenate,
    count_gates,
    from_gates,
    hadamard,
    insert_gate,
    inverse,
    remove_gate,
    rotation,
)
from vqabench.statevector import fidelity, simulate


def test_count_empty():
    assert count_gates(Circuit(2)) == GateCounts(0, 0, 0)


def test_count_hand_layered():
    c = from_gates(2, [("H", 0), ("CNOT", (0, 1)), ("RZ", 1, 0.2), ("CNOT", (0, 1)), ("RX", 0, 0.1)])
    # every gate extends the same chain: H, CNOT, RZ, CNOT, RX
    assert count_gates(c) == GateCounts(total=5, cnot=2, depth=5)


def test_count_parallel_wires():
    c = from_gates(3, [("H", 0), ("H", 1), ("H", 2), ("CNOT", (0, 1)), ("RX", 2, 0.1)])
    assert count_gates(c).depth == 2


def test_count_star4_qaoa():
    m = problems.qubo_to_ising(problems.generate(problems.ProblemSpec("MaxCutStar", 4, 0)))
    counts = count_gates(qaoa.build_circuit(m, 1))
    assert (counts.total, counts.cnot) == (17, 6)


def test_count_invariants(rng):
    for _ in range(50):
        c = random_circuit(int(rng.integers(1, 6)), int(rng.integers(0, 30)), rng)
        k = count_gates(c)
        assert 0 <= k.cnot <= k.total and 0 <= k.depth <= k.total


@pytest.mark.parametrize(
    "args",
    [
        (GateKind.CNOT, (0, 0), None),
        (GateKind.RX, (0,), None),
        (GateKind.H, (0,), 0),
        (GateKind.RX, (0, 1), 0),
        (GateKind.H, (-1,), None),
    ],
)
def test_gate_invariants(args):
    with pytest.raises(CircuitError):
        Gate(*args)


def test_circuit_rejects_bad_slots_and_qubits():
    with pytest.raises(CircuitError):
        Circuit(1, [Gate(GateKind.RX, (0,), 1)], [0.0])
    with pytest.raises(CircuitError):
        Circuit(1, [Gate(GateKind.RX, (0,), 0), Gate(GateKind.RY, (0,), 0)], [0.0, 0.0])
    with pytest.raises(CircuitError):
        Circuit(2, [cnot(0, 2)])


def test_insert_rx_zero_is_identity():
    c = insert_gate(Circuit(1), rotation("RX", 0), 0, 0.0)
    assert len(c.params) == 1
    np.testing.assert_allclose(simulate(c), [1, 0])


def test_insert_cnot_makes_bell_pair():
    c = append_gate(from_gates(2, [("H", 0)]), cnot(0, 1))
    np.testing.assert_allclose(simulate(c), np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-12)


def test_insert_mid_circuit_keeps_slots(rng):
    for _ in range(30):
        c = random_circuit(3, 12, rng, kinds=[GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CNOT])
        pos = int(rng.integers(len(c) + 1))
        c2 = insert_gate(c, rotation("RZ", 2), pos, 0.0)
        for i, g in enumerate(c.gates):
            j = i if i < pos else i + 1
            assert c2.angle(j) == c.angle(i)
        assert fidelity(simulate(c), simulate(c2)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("position", [-1, 3])
def test_insert_bad_position(position):
    c = from_gates(1, [("H", 0), ("H", 0)])
    with pytest.raises(CircuitError):
        insert_gate(c, hadamard(0), position)


def test_remove_only_gate():
    c = remove_gate(from_gates(1, [("RY", 0, 0.4)]), 0)
    assert len(c) == 0 and c.params.size == 0


def test_remove_one_of_two_rz():
    c = from_gates(1, [("RZ", 0, 0.1), ("RZ", 0, 0.7)])
    out = remove_gate(c, 0)
    assert out.params.size == 1 and out.angle(0) == 0.7


def test_remove_out_of_range():
    with pytest.raises(CircuitError):
        remove_gate(from_gates(1, [("H", 0)]), 1)


def test_remove_then_reinsert_round_trip(rng):
    for _ in range(40):
        c = random_circuit(3, 10, rng)
        k = int(rng.integers(10))
        g, angle = c.gates[k], c.angle(k)
        back = insert_gate(remove_gate(c, k), g, k, 0.0 if angle is None else angle)
        assert fidelity(simulate(c), simulate(back)) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(simulate(back), simulate(c), atol=1e-12)


def test_json_round_trip_exact(rng):
    for _ in range(10):
        c = random_circuit(4, 15, rng)
        assert Circuit.from_json(c.to_json()) == c


def test_inverse_and_concatenate(rng):
    c = random_circuit(3, 20, rng)
    psi = simulate(concatenate(c, inverse(c)))
    assert abs(psi[0]) == pytest.approx(1.0, abs=1e-10)


def test_params_read_only():
    c = from_gates(1, [("RX", 0, 0.3)])
    with pytest.raises(ValueError):
        c.params[0] = 1.0
