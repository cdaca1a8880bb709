"""Fixed-structure QAOA baseline."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .circuit_ir import Circuit, Gate, GateKind
from .param_opt import BudgetLedger, minimize
from .problems import GroundTruth, IsingModel, to_diagonal
from .results import AlgorithmResult, finish
from .rngcore import as_stream
from .statevector import expectation_of, simulate


@dataclass(frozen=True)
class QaoaConfig:
    p: int = 1
    init_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.p <= 10:
            raise ValueError(f"p must be in 1..10, got {self.p}")


def _layout(m: IsingModel, p: int) -> tuple[list[Gate], np.ndarray]:
    """Gate list and the (slots x 2p) matrix mapping (gammas, betas) to slot angles."""
    n = m.n
    gates = [Gate(GateKind.H, (q,)) for q in range(n)]
    rows = []

    def rot(kind, q, layer_col, coeff):
        gates.append(Gate(kind, (q,), len(rows)))
        row = np.zeros(2 * p)
        row[layer_col] = coeff
        rows.append(row)

    linear = [(i, float(v)) for i, v in enumerate(m.h) if v != 0]
    for layer in range(p):
        for (i, k), jik in m.j.items():
            gates.append(Gate(GateKind.CNOT, (i, k)))
            rot(GateKind.RZ, k, layer, 2.0 * jik)
            gates.append(Gate(GateKind.CNOT, (i, k)))
        for i, hi in linear:
            rot(GateKind.RZ, i, layer, 2.0 * hi)
        for q in range(n):
            rot(GateKind.RX, q, p + layer, 2.0)
    return gates, np.array(rows).reshape(-1, 2 * p)


def expansion_matrix(m: IsingModel, p: int) -> np.ndarray:
    """Slot angles = ``expansion_matrix @ concat(gammas, betas)``."""
    return _layout(m, p)[1]


def build_circuit(m: IsingModel, p: int, angles=None) -> Circuit:
    """Depth-``p`` QAOA circuit; ``angles`` is ``(gamma_1..gamma_p, beta_1..beta_p)``.

    ZZ terms compile to ``CNOT, RZ(2 gamma J), CNOT``; linear terms to
    ``RZ(2 gamma h)``; the mixer is ``RX(2 beta)`` on every qubit.
    """
    gates, expand = _layout(m, p)
    v = np.zeros(2 * p) if angles is None else np.asarray(angles, dtype=float)
    return Circuit(m.n, gates, expand @ v)


def run(
    m: IsingModel,
    cfg: QaoaConfig,
    ledger: BudgetLedger,
    truth: GroundTruth | None = None,
    max_evals: int | None = None,
    instance_id: str = "",
) -> AlgorithmResult:
    """Optimise the 2p angles once, spending the whole global budget (or ``max_evals``)."""
    started = time.perf_counter()
    rng = as_stream(cfg.init_seed, "qaoa")
    energies = to_diagonal(m).energies
    template = build_circuit(m, cfg.p)
    expand = expansion_matrix(m, cfg.p)

    def objective(v: np.ndarray) -> float:
        return expectation_of(simulate(template, expand @ v), energies)

    x0 = rng.uniform(0.0, 2 * np.pi, size=2 * cfg.p)
    res = minimize(objective, x0, ledger, ledger.global_cap if max_evals is None else max_evals)
    best = build_circuit(m, cfg.p, res.best_params)
    return finish(
        "qaoa",
        m,
        best,
        res.best_value,
        ledger,
        started,
        truth,
        instance_id=instance_id,
        p=cfg.p,
        angles=res.best_params.tolist(),
        terminated_by=res.terminated_by.value,
    )
