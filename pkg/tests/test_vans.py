import math

import numpy as np
import pytest
from conftest import dense_unitary, random_circuit, rewrite_prone_circuit

from vqabench import vans
from vqabench.circuit_ir import GateKind, from_gates
from vqabench.param_opt import BudgetLedger, evaluate, optimize_circuit
from vqabench.problems import ProblemSpec, generate, qubo_to_ising, to_diagonal
from vqabench.ra_vqe import initial_layer
from vqabench.rngcore import RngStream
from vqabench.statevector import DiagonalEnergy, fidelity, simulate
from vqabench.vans import IdentityBlock, VansConfig, simplify_algebraic, simplify_cost

def same_up_to_phase(u, v):
    d = u.shape[0]
    return abs(np.trace(u.conj().T @ v)) / d


def test_r1_cnot_pair():
    assert len(simplify_algebraic(from_gates(2, [("CNOT", (0, 1)), ("CNOT", (0, 1))]), initial_zero=False)) == 0


def test_r2_merge():
    out = simplify_algebraic(from_gates(1, [("H", 0), ("RZ", 0, 0.3), ("RZ", 0, 0.5)]))
    assert len(out) == 2 and out.params[0] == pytest.approx(0.8)


def test_r2_full_turn_deleted():
    out = simplify_algebraic(from_gates(1, [("H", 0), ("RX", 0, 1.0), ("RX", 0, 2 * np.pi - 1.0)]))
    assert [g.kind for g in out.gates] == [GateKind.H]


def test_rz_commutes_through_control():
    c = from_gates(2, [("CNOT", (0, 1)), ("RZ", 0, 0.3), ("CNOT", (0, 1))])
    out = simplify_algebraic(c, initial_zero=False)
    assert out == from_gates(2, [("RZ", 0, 0.3)])
    assert same_up_to_phase(dense_unitary(c), dense_unitary(out)) == pytest.approx(1.0, abs=1e-12)
    # from |00> the control is idle, so the remaining RZ is a global phase too
    assert len(simplify_algebraic(c)) == 0


def test_rx_commutes_through_target():
    c = from_gates(2, [("H", 0), ("CNOT", (0, 1)), ("RX", 1, 0.7), ("CNOT", (0, 1))])
    out = simplify_algebraic(c, initial_zero=False)
    assert [g.kind for g in out.gates] == [GateKind.H, GateKind.RX]


def test_r3_r4_on_fresh_wires():
    c = from_gates(3, [("RZ", 0, 0.4), ("CNOT", (1, 2)), ("H", 0)])
    assert [g.kind for g in simplify_algebraic(c).gates] == [GateKind.H]
    assert len(simplify_algebraic(c, initial_zero=False)) == 3


def test_zero_rotation_deleted():
    assert len(simplify_algebraic(from_gates(1, [("H", 0), ("RY", 0, 4 * np.pi)]))) == 1


def test_soundness_from_zero_state():
    rng = np.random.default_rng(21)
    for _ in range(500):
        n = int(rng.integers(1, 7))
        c = rewrite_prone_circuit(rng, n, int(rng.integers(0, 31)))
        out = simplify_algebraic(c)
        assert len(out) <= len(c)
        assert fidelity(simulate(c), simulate(out)) >= 1 - 1e-9


def test_soundness_on_arbitrary_states():
    rng = np.random.default_rng(22)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        c = rewrite_prone_circuit(rng, n, int(rng.integers(0, 25)))
        out = simplify_algebraic(c, initial_zero=False)
        assert same_up_to_phase(dense_unitary(c), dense_unitary(out)) >= 1 - 1e-9


def test_simplify_idempotent():
    rng = np.random.default_rng(23)
    for _ in range(100):
        c = rewrite_prone_circuit(rng, 4, 20)
        once = simplify_algebraic(c)
        assert simplify_algebraic(once) == once


@pytest.mark.parametrize("qubits", [(0,), (2,), (0, 1), (2, 0)])
def test_identity_block_exact(qubits):
    rng = np.random.default_rng(5)
    c = random_circuit(3, 15, rng)
    out = vans.insert_blocks(c, [IdentityBlock(qubits)])
    np.testing.assert_array_equal(simulate(out), simulate(c))


def test_sampled_blocks_are_identity():
    rng = RngStream(9)
    cfg = VansConfig(scale=1.5)
    c = initial_layer("HEA", 4).with_params(np.linspace(0.1, 0.8, 8))
    for _ in range(50):
        blocks = vans.sample_insertion(c, cfg, rng)
        np.testing.assert_array_equal(simulate(vans.insert_blocks(c, blocks)), simulate(c))


def test_scale_zero_single_block():
    rng = RngStream(1)
    c = initial_layer("SA", 4)
    assert all(len(vans.sample_insertion(c, VansConfig(scale=0.0), rng)) == 1 for _ in range(200))


def test_block_count_distribution():
    rng = RngStream(2)
    c = initial_layer("SA", 4)
    ks = np.array([len(vans.sample_insertion(c, VansConfig(scale=1.0), rng)) for _ in range(20_000)])
    # 1 + floor(Exp(1)): P(k=1) = 1 - e^-1
    assert np.mean(ks == 1) == pytest.approx(1 - math.exp(-1), abs=0.01)


def test_qubit_probabilities():
    np.testing.assert_allclose(vans.qubit_probabilities([3, 3, 3], 5.0), [1 / 3] * 3)
    p = vans.qubit_probabilities([0, 10], 1.0)
    assert p[0] == pytest.approx(1 / (1 + math.exp(-10)))
    assert p[0] == pytest.approx(0.99995, abs=1e-5)


def test_config_validation():
    with pytest.raises(ValueError):
        VansConfig(min_randomness=50, max_randomness=50.0, temperature=0.5)
    with pytest.raises(ValueError):
        VansConfig(scale=2.0)


def test_schedule():
    cfg = VansConfig(min_randomness=40, max_randomness=60, decrease_to=5, n_iterations=50)
    assert vans.accept_wall_schedule(cfg, 0) == 60
    assert vans.accept_wall_schedule(cfg, 5) == pytest.approx(50)
    assert vans.accept_wall_schedule(cfg, 10) == 40
    assert vans.accept_wall_schedule(cfg, 40) == 40


def test_cost_removes_neutral_rz():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutStar", 3, 0)))
    e = to_diagonal(m)
    c = from_gates(3, [("RY", 0, np.pi), ("RZ", 1, 0.7)])
    ledger = BudgetLedger()
    out, val = simplify_cost(c, e, 1e9, ledger)
    assert [g.kind for g in out.gates] == [GateKind.RY]
    assert val == pytest.approx(-2)


def test_cost_strict_threshold_keeps_useful_gates():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutStar", 3, 0)))
    c = from_gates(3, [("RY", 0, np.pi)])
    out, _ = simplify_cost(c, to_diagonal(m), 1e12, BudgetLedger())
    assert len(out) == 1


def test_cost_permissive_threshold_cascades_to_empty():
    e = DiagonalEnergy(np.array([0.0, -1.0, -1.0, -2.0]))  # -(z-count), ground |11>
    c = from_gates(2, [("RX", 0, np.pi), ("RX", 1, np.pi)])
    out, _ = simplify_cost(c, e, 0.4, BudgetLedger())
    assert len(out) == 0


def test_cost_counts_evaluations():
    e = DiagonalEnergy(np.array([0.0, -1.0, -1.0, -2.0]))
    c = from_gates(2, [("RX", 0, np.pi), ("RX", 1, np.pi), ("RZ", 0, 0.1)])
    ledger = BudgetLedger()
    simplify_cost(c, e, 50.0, ledger, e_full=-2.0)
    # first scan: 3 removals; the RZ goes, second scan: 2 removals
    assert ledger.used == 5


def test_cost_aborts_on_exhaustion():
    e = DiagonalEnergy(np.array([0.0, -1.0, -1.0, -2.0]))
    c = from_gates(2, [("RX", 0, np.pi), ("RX", 1, np.pi)])
    ledger = BudgetLedger(global_cap=1)
    out, _ = simplify_cost(c, e, 50.0, ledger, e_full=-2.0)
    assert out == c and ledger.used == 1


def test_run_star8_compact():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutStar", 8, 0)))
    ledger = BudgetLedger()
    r = vans.run(m, VansConfig(seed=0, scale=0.459, temperature=8.0, accept_perc=0.3), ledger)
    assert r.approximation_ratio == pytest.approx(1.0, abs=1e-2)
    assert r.cnot == 0 and r.gates <= 8
    assert r.evals_used <= 10_000 and ledger.max_structure_evals <= 50


def test_run_strict_acceptance_monotone():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutER", 4, 3)))
    cfg = VansConfig(accept_perc=0.0, seed=2, n_iterations=6)
    a = vans.run(m, cfg, BudgetLedger(global_cap=400))
    b = vans.run(m, cfg, BudgetLedger(global_cap=1500))
    assert b.expectation <= a.expectation + 1e-12
    assert len(a.best_circuit) > 0


def test_run_reproducible():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutER", 4, 0)))
    cfg = VansConfig(seed=11, n_iterations=5)
    a = vans.run(m, cfg, BudgetLedger(global_cap=1000))
    b = vans.run(m, cfg, BudgetLedger(global_cap=1000))
    assert a.best_circuit == b.best_circuit and a.expectation == b.expectation


def test_insert_then_optimize_never_worse():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutER", 4, 5)))
    e = to_diagonal(m)
    c = initial_layer("SA", 4).with_params([0.3, -0.2, 0.1, 0.4])
    base = evaluate(c, e, BudgetLedger())
    grown = vans.insert_blocks(c, [IdentityBlock((0, 1)), IdentityBlock((2,))])
    assert grown.params.size == 4 + 2 + 3
    assert optimize_circuit(grown, e, BudgetLedger()).best_value <= base
