"""
QAOA on MaxCut
==============

Gate counts grow with the layer count p; deeper circuits reach better
expectations under the same evaluation budget.
"""

from vqabench import qaoa
from vqabench.circuit_ir import count_gates
from vqabench.param_opt import BudgetLedger
from vqabench.problems import ProblemSpec, generate, qubo_to_ising

star = qubo_to_ising(generate(ProblemSpec("MaxCutStar", 8, 0)))
for p in (1, 2, 3):
    k = count_gates(qaoa.build_circuit(star, p))
    print(f"star N=8 p={p}: {k.total} gates, {k.cnot} CNOT")

# %%
# One optimization of the 2p angles per run; the ledger counts every evaluation.
model = qubo_to_ising(generate(ProblemSpec("MaxCutER", 6, 3)))
for p in (1, 3, 5):
    r = qaoa.run(model, qaoa.QaoaConfig(p=p, init_seed=0), BudgetLedger(global_cap=2000))
    print(f"ER N=6 p={p}: ratio {r.approximation_ratio:.3f} after {r.evals_used} evaluations")
