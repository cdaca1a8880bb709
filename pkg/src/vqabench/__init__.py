"""Benchmarking adaptive variational quantum algorithms on QUBO problems.

Noise-free statevector simulation of EVQE, VAns, RA-VQE and QAOA under a
shared evaluation budget, plus the instance generators, exact oracle,
hyperparameter tuner and reporting used to compare them.
"""

from .circuit_ir import Circuit, Gate, GateKind, count_gates
from .param_opt import BudgetLedger
from .problems import IsingModel, ProblemKind, ProblemSpec, QuboInstance, brute_force_solve, generate, qubo_to_ising
from .results import AlgorithmResult

__version__ = "0.1.0"

__all__ = [
    "AlgorithmResult",
    "BudgetLedger",
    "Circuit",
    "Gate",
    "GateKind",
    "IsingModel",
    "ProblemKind",
    "ProblemSpec",
    "QuboInstance",
    "brute_force_solve",
    "count_gates",
    "generate",
    "qubo_to_ising",
]
