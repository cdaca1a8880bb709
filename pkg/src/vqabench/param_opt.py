"""Angle optimisation under the evaluation-budget protocol.

Every circuit-expectation evaluation in a run goes through one
:class:`BudgetLedger`: the run stops at ``global_cap`` evaluations and each
structure's parameter optimisation is limited to ``per_structure_cap``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .circuit_ir import Circuit
from .statevector import DiagonalEnergy, expectation_of, simulate

log = logging.getLogger(__name__)

OPTIMIZER_NAME = "COBYLA"
RHO_BEGIN = 0.5
RHO_END = 1e-4


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested from an exhausted ledger."""


class Termination(str, Enum):
    CONVERGED = "Converged"
    STRUCTURE_BUDGET = "StructureBudget"
    GLOBAL_BUDGET = "GlobalBudget"


class BudgetLedger:
    """Counts circuit-expectation evaluations for one algorithm run."""

    def __init__(self, global_cap: int = 10_000, per_structure_cap: int = 50):
        if global_cap < 0 or per_structure_cap < 1:
            raise ValueError("invalid caps")
        self.global_cap = int(global_cap)
        self.per_structure_cap = int(per_structure_cap)
        self.used = 0
        self.structures = 0
        self.max_structure_evals = 0

    @property
    def remaining(self) -> int:
        return self.global_cap - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.global_cap

    def charge(self, k: int = 1) -> None:
        if self.used + k > self.global_cap:
            raise BudgetExhausted(f"budget of {self.global_cap} evaluations exhausted")
        self.used += k

    def note_structure(self, evals: int) -> None:
        self.structures += 1
        self.max_structure_evals = max(self.max_structure_evals, evals)

    def __repr__(self) -> str:
        return f"BudgetLedger(used={self.used}/{self.global_cap}, per_structure_cap={self.per_structure_cap})"


@dataclass
class OptResult:
    best_params: np.ndarray
    best_value: float
    evals_used: int
    terminated_by: Termination


class _Tracked:
    """Objective wrapper that charges the ledger and remembers the best point."""

    def __init__(self, fn: Callable[[np.ndarray], float], ledger: BudgetLedger, cap: int):
        self.fn = fn
        self.ledger = ledger
        self.cap = cap
        self.calls = 0
        self.best_x: np.ndarray | None = None
        self.best_f = np.inf

    def __call__(self, x) -> float:
        if self.calls >= self.cap:
            raise BudgetExhausted("structure budget exhausted")
        self.ledger.charge()
        self.calls += 1
        x = np.array(x, dtype=float)
        f = float(self.fn(x))
        if f < self.best_f:
            self.best_f, self.best_x = f, x
        return f


def minimize(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    ledger: BudgetLedger,
    max_evals: int,
    rho_begin: float = RHO_BEGIN,
    rho_end: float = RHO_END,
) -> OptResult:
    """COBYLA minimisation capped by ``max_evals`` and the ledger.

    Returns the best point visited. An empty ``x0`` costs exactly one
    evaluation.
    """
    if max_evals < 1:
        raise ValueError("max_evals must be at least 1")
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if ledger.exhausted:
        raise BudgetExhausted(f"budget of {ledger.global_cap} evaluations exhausted")
    cap = min(max_evals, ledger.remaining)
    tracked = _Tracked(objective, ledger, cap)
    if x0.size == 0:
        tracked(x0)
    else:
        try:
            _scipy_minimize(
                tracked,
                x0,
                method="COBYLA",
                options={"rhobeg": rho_begin, "tol": rho_end, "maxiter": cap},
            )
        except BudgetExhausted:
            log.debug("optimizer asked for more than %d evaluations", cap)
    ledger.note_structure(tracked.calls)
    if ledger.exhausted:
        why = Termination.GLOBAL_BUDGET
    elif tracked.calls >= max_evals:
        why = Termination.STRUCTURE_BUDGET
    else:
        why = Termination.CONVERGED
    return OptResult(tracked.best_x, tracked.best_f, tracked.calls, why)


def evaluate(c: Circuit, energy: DiagonalEnergy, ledger: BudgetLedger, params: np.ndarray | None = None) -> float:
    """One ledger-charged expectation of ``c`` (optionally with substitute angles)."""
    ledger.charge()
    return expectation_of(simulate(c, params), energy.energies)


def optimize_circuit(
    c: Circuit,
    energy: DiagonalEnergy,
    ledger: BudgetLedger,
    max_evals: int | None = None,
    active_slots: Sequence[int] | None = None,
) -> OptResult:
    """Optimise the angles in ``active_slots`` (default: all) of ``c``.

    Inactive angles are frozen; the returned ``best_params`` is the full
    parameter vector.
    """
    if max_evals is None:
        max_evals = ledger.per_structure_cap
    base = np.array(c.params, dtype=float)
    slots = np.arange(base.size) if active_slots is None else np.asarray(sorted(set(active_slots)), dtype=int)
    if slots.size and (slots.min() < 0 or slots.max() >= base.size):
        raise ValueError(f"active slots {slots.tolist()} outside 0..{base.size - 1}")
    energies = energy.energies

    def objective(v: np.ndarray) -> float:
        full = base.copy()
        full[slots] = v
        return expectation_of(simulate(c, full), energies)

    res = minimize(objective, base[slots], ledger, max_evals)
    full = base.copy()
    full[slots] = res.best_params
    return OptResult(full, res.best_value, res.evals_used, res.terminated_by)
