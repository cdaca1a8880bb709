"""Random Adapt-VQE: grow the circuit one uniformly random gate at a time."""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .circuit_ir import Circuit, Gate, GateKind, append_gate, count_gates
from .param_opt import BudgetLedger, optimize_circuit
from .problems import GroundTruth, IsingModel, to_diagonal
from .results import AlgorithmResult, finish
from .rngcore import as_stream

POOL = (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CNOT)


class InitialLayer(str, Enum):
    SA = "SA"
    HEA = "HEA"


@dataclass(frozen=True)
class RaVqeConfig:
    initial_layer: InitialLayer = InitialLayer.SA
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "initial_layer", InitialLayer(self.initial_layer))


def initial_layer(kind: InitialLayer | str, n: int) -> Circuit:
    """Separable (RY per qubit) or hardware-efficient (RY, RZ per qubit + CNOT ladder) start.

    All angles start at 0, so both prepare ``|0...0>``.
    """
    kind = InitialLayer(kind)
    gates: list[Gate] = []
    for q in range(n):
        gates.append(Gate(GateKind.RY, (q,), len(gates)))
        if kind is InitialLayer.HEA:
            gates.append(Gate(GateKind.RZ, (q,), len(gates)))
    n_params = len(gates)
    if kind is InitialLayer.HEA:
        gates += [Gate(GateKind.CNOT, (q, q + 1)) for q in range(n - 1)]
    return Circuit(n, gates, np.zeros(n_params))


def random_gate(n: int, rng) -> Gate:
    kind = POOL[int(rng.integers(len(POOL)))]
    if kind is GateKind.CNOT:
        c, t = (int(q) for q in rng.choice(n, size=2, replace=False))
        return Gate(kind, (c, t))
    return Gate(kind, (int(rng.integers(n)),), -1)


def run(
    m: IsingModel,
    cfg: RaVqeConfig,
    ledger: BudgetLedger,
    truth: GroundTruth | None = None,
    instance_id: str = "",
) -> AlgorithmResult:
    """Append random gates until the ledger runs out, re-optimising all angles each time.

    The working circuit keeps every addition; the lowest-expectation snapshot
    is reported.
    """
    started = time.perf_counter()
    rng = as_stream(cfg.seed, "ra_vqe")
    energy = to_diagonal(m)
    circuit = initial_layer(cfg.initial_layer, m.n)
    best_circuit, best_value = circuit, np.inf
    deepest = 0
    rounds = 0
    while not ledger.exhausted:
        if rounds:
            circuit = append_gate(circuit, random_gate(m.n, rng), 0.0)
        res = optimize_circuit(circuit, energy, ledger, ledger.per_structure_cap)
        circuit = circuit.with_params(res.best_params)
        rounds += 1
        deepest = max(deepest, len(circuit))
        if res.best_value < best_value:
            best_circuit, best_value = circuit, res.best_value
    return finish(
        "ravqe",
        m,
        best_circuit,
        best_value,
        ledger,
        started,
        truth,
        instance_id=instance_id,
        initial_layer=cfg.initial_layer.value,
        rounds=rounds,
        deepest_gates=deepest,
        deepest_depth=count_gates(circuit).depth,
    )
