"""
Statevector simulation
======================

Build a small circuit, run it, and take the expectation of a diagonal
Hamiltonian. Qubit 0 is the least significant bit of the basis index.
"""

import numpy as np

from vqabench.circuit_ir import concatenate, count_gates, from_gates, inverse
from vqabench.problems import ProblemSpec, generate, qubo_to_ising, to_diagonal
from vqabench.statevector import expectation_of, simulate

bell = from_gates(2, [("H", 0), ("CNOT", (0, 1))])
print("Bell probabilities:", np.round(np.abs(simulate(bell)) ** 2, 3))

# %%
# A parameterized circuit on a 4-node star graph.
c = from_gates(4, [("RY", 0, np.pi), ("RY", 1, 0.3), ("CNOT", (0, 2)), ("RZ", 3, 0.7)])
energies = to_diagonal(qubo_to_ising(generate(ProblemSpec("MaxCutStar", 4, 0)))).energies
print(count_gates(c), "expectation", round(expectation_of(simulate(c), energies), 4))

# %%
# Substituting angles avoids rebuilding the circuit inside an optimizer loop.
print("with new angles:", round(expectation_of(simulate(c, np.array([np.pi, 0.0, 0.0])), energies), 4))

# %%
# Running a circuit followed by its inverse returns to |0...0>.
psi = simulate(concatenate(c, inverse(c)))
print("round trip |<0|psi>|:", abs(psi[0]))
