"""
Problem instances and the brute-force oracle
============================================

Generate one instance of each problem family, convert it to an Ising model
and check the exact ground energy against the full energy spectrum.
"""

import numpy as np

from vqabench.problems import ProblemKind, ProblemSpec, brute_force_solve, generate, qubo_to_ising, to_diagonal

for kind in ProblemKind:
    inst = generate(ProblemSpec(kind, 6, seed=1))
    model = qubo_to_ising(inst)
    truth = brute_force_solve(model)
    energies = to_diagonal(model).energies
    print(f"{kind.value:20s} edges/terms={len(model.j):2d}  E*={truth.min_energy:8.3f}  argmin={truth.argmin[:3]}")

    # the QUBO cost of every bitstring equals the Ising energy of the matching spin state
    bits = [[(b >> q) & 1 for q in range(6)] for b in range(64)]
    assert np.allclose([inst.cost(x) for x in bits], energies)

# %%
# A star graph is solved by putting the centre on one side of the cut.
star = qubo_to_ising(generate(ProblemSpec("MaxCutStar", 4, 0)))
print("star N=4 ground energy:", brute_force_solve(star).min_energy)
