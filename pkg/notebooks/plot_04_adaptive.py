"""
Adaptive ansatz construction
============================

Three ways of growing a circuit under the same budget: random gate
addition, an evolutionary search over layers, and identity-block insertion
with simplification.
"""

from vqabench import evqe, ra_vqe, vans
from vqabench.param_opt import BudgetLedger
from vqabench.problems import ProblemSpec, generate, qubo_to_ising

model = qubo_to_ising(generate(ProblemSpec("MaxCutER", 6, 2)))
BUDGET = 3000

runs = {
    "RA-VQE": ra_vqe.run(model, ra_vqe.RaVqeConfig(seed=0), BudgetLedger(global_cap=BUDGET)),
    "EVQE": evqe.run(model, evqe.EvqeConfig(seed=0), BudgetLedger(global_cap=BUDGET)),
    "VAns": vans.run(model, vans.VansConfig(seed=0), BudgetLedger(global_cap=BUDGET)),
}
for name, r in runs.items():
    print(f"{name:7s} ratio {r.approximation_ratio:.3f}  gates {r.gates:3d}  cnot {r.cnot:2d}  evals {r.evals_used}")

# %%
# The algebraic simplifier removes gates that cannot change the final state.
from vqabench.circuit_ir import from_gates

c = from_gates(2, [("RZ", 0, 0.4), ("RX", 1, 0.3), ("RX", 1, -0.3), ("CNOT", (0, 1)), ("CNOT", (0, 1)), ("RY", 0, 1.0)])
print(len(c), "->", [g.kind.value for g in vans.simplify_algebraic(c).gates])
