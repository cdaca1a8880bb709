import numpy as np
import pytest

from vqabench.circuit_ir import Circuit, Gate, GateKind, from_gates
from vqabench.param_opt import (
    OPTIMIZER_NAME,
    BudgetExhausted,
    BudgetLedger,
    Termination,
    evaluate,
    minimize,
    optimize_circuit,
)
from vqabench.problems import ProblemSpec, generate, qubo_to_ising, to_diagonal
from vqabench.statevector import DiagonalEnergy, expectation_of, simulate

Z1 = DiagonalEnergy(np.array([1.0, -1.0]))


def test_quadratic_converges():
    ledger = BudgetLedger()
    res = minimize(lambda x: (x[0] - 1) ** 2 + (x[1] + 2) ** 2, [0, 0], ledger, 50)
    np.testing.assert_allclose(res.best_params, [1, -2], atol=1e-2)
    assert res.evals_used <= 50 and ledger.used == res.evals_used


def test_constant_objective():
    res = minimize(lambda x: 7.0, [0.3], BudgetLedger(), 50)
    assert res.best_value == 7.0


def test_global_cap_three():
    ledger = BudgetLedger(global_cap=3)
    res = minimize(lambda x: float(x @ x), [1.0, 1.0], ledger, 50)
    assert res.terminated_by is Termination.GLOBAL_BUDGET and ledger.used == 3


def test_structure_cap():
    ledger = BudgetLedger()
    res = minimize(lambda x: float(np.sin(x).sum()), np.zeros(6), ledger, 20)
    assert res.evals_used <= 20
    assert ledger.max_structure_evals == res.evals_used


def test_exhausted_ledger_raises():
    ledger = BudgetLedger(global_cap=2)
    ledger.charge(2)
    with pytest.raises(BudgetExhausted):
        minimize(lambda x: 0.0, [0.0], ledger, 5)
    with pytest.raises(BudgetExhausted):
        ledger.charge()


def test_best_is_minimum_of_all_calls():
    seen = []

    def f(x):
        v = float(np.cos(x[0]) + 0.1 * x[1] ** 2)
        seen.append(v)
        return v

    res = minimize(f, [0.2, 0.5], BudgetLedger(), 50)
    assert res.best_value == min(seen)
    assert len(seen) == res.evals_used


def test_rx_against_z():
    c = from_gates(1, [("RX", 0, 0.1)])
    res = optimize_circuit(c, Z1, BudgetLedger(), 50)
    assert res.best_value == pytest.approx(-1, abs=1e-2)
    assert np.remainder(res.best_params[0], 2 * np.pi) == pytest.approx(np.pi, abs=0.2)


def test_zero_parameter_circuit_one_eval():
    c = from_gates(2, [("H", 0), ("CNOT", (0, 1))])
    e = DiagonalEnergy(np.array([0.0, 1.0, 2.0, 3.0]))
    ledger = BudgetLedger()
    res = optimize_circuit(c, e, ledger)
    assert res.evals_used == 1 and ledger.used == 1
    assert res.best_value == pytest.approx(1.5)


def test_ry_product_reaches_star_minimum():
    m = qubo_to_ising(generate(ProblemSpec("MaxCutStar", 4, 0)))
    c = Circuit(4, [Gate(GateKind.RY, (q,), q) for q in range(4)], np.full(4, 0.1))
    res = optimize_circuit(c, to_diagonal(m), BudgetLedger(), 50)
    assert res.best_value == pytest.approx(-3, abs=1e-2)


def test_active_slots_freeze_others(rng):
    c = from_gates(3, [("RX", 0, 0.3), ("RY", 1, -0.4), ("CNOT", (0, 2)), ("RZ", 2, 1.1), ("RY", 2, 0.2)])
    e = DiagonalEnergy(rng.normal(size=8))
    res = optimize_circuit(c, e, BudgetLedger(), 50, active_slots=[1, 3])
    assert res.best_params[0] == c.params[0] and res.best_params[2] == c.params[2]
    assert res.best_value == pytest.approx(expectation_of(simulate(c, res.best_params), e.energies))


def test_ledger_counts_every_call(rng):
    e = DiagonalEnergy(rng.normal(size=4))
    c = from_gates(2, [("RY", 0, 0.0), ("RX", 1, 0.0)])
    ledger = BudgetLedger()
    total = 0
    for _ in range(5):
        total += optimize_circuit(c, e, ledger).evals_used
        evaluate(c, e, ledger)
        total += 1
    assert ledger.used == total


def test_bad_active_slot():
    with pytest.raises(ValueError):
        optimize_circuit(from_gates(1, [("RX", 0, 0.0)]), Z1, BudgetLedger(), active_slots=[3])


def test_optimizer_name():
    assert OPTIMIZER_NAME == "COBYLA"
