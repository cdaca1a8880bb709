"""Per-run result record shared by all algorithms and the benchmark harness."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any

from .circuit_ir import Circuit, count_gates
from .param_opt import OPTIMIZER_NAME, BudgetLedger
from .problems import GroundTruth, IsingModel, approximation_ratio, brute_force_solve


@dataclass
class AlgorithmResult:
    algorithm: str
    instance_id: str
    approximation_ratio: float | None
    expectation: float
    loss: float
    min_energy: float
    gates: int
    cnot: int
    depth: int
    evals_used: int
    wall_time: float
    best_circuit: Circuit | None
    meta: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    @property
    def gap(self) -> float:
        return self.expectation - self.min_energy

    def to_dict(self, with_circuit: bool = True) -> dict:
        return {
            "algorithm": self.algorithm,
            "instance_id": self.instance_id,
            "approximation_ratio": self.approximation_ratio,
            "expectation": self.expectation,
            "loss": self.loss,
            "min_energy": self.min_energy,
            "gap": self.gap if math.isfinite(self.expectation) else None,
            "gates": self.gates,
            "cnot": self.cnot,
            "depth": self.depth,
            "evals_used": self.evals_used,
            "wall_time": self.wall_time,
            "best_circuit": self.best_circuit.to_dict() if (with_circuit and self.best_circuit) else None,
            "meta": self.meta,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> AlgorithmResult:
        circ = d.get("best_circuit")
        return cls(
            algorithm=d["algorithm"],
            instance_id=d["instance_id"],
            approximation_ratio=d["approximation_ratio"],
            expectation=d["expectation"],
            loss=d["loss"],
            min_energy=d["min_energy"],
            gates=d["gates"],
            cnot=d["cnot"],
            depth=d["depth"],
            evals_used=d["evals_used"],
            wall_time=d["wall_time"],
            best_circuit=None if circ is None else Circuit.from_dict(circ),
            meta=d.get("meta", {}),
            error=d.get("error"),
        )

    @classmethod
    def failed(cls, algorithm: str, instance_id: str, error: str, min_energy: float = math.nan) -> AlgorithmResult:
        nan = math.nan
        return cls(algorithm, instance_id, None, nan, nan, min_energy, 0, 0, 0, 0, 0.0, None, {}, error)


def finish(
    algorithm: str,
    model: IsingModel,
    circuit: Circuit,
    expectation: float,
    ledger: BudgetLedger,
    started: float,
    truth: GroundTruth | None = None,
    loss: float | None = None,
    instance_id: str = "",
    **meta,
) -> AlgorithmResult:
    """Assemble an :class:`AlgorithmResult` for a completed run."""
    if truth is None:
        truth = brute_force_solve(model)
    counts = count_gates(circuit)
    meta.setdefault("optimizer", OPTIMIZER_NAME)
    meta.setdefault("structures", ledger.structures)
    meta.setdefault("max_structure_evals", ledger.max_structure_evals)
    return AlgorithmResult(
        algorithm=algorithm,
        instance_id=instance_id,
        approximation_ratio=approximation_ratio(expectation, truth.min_energy),
        expectation=float(expectation),
        loss=float(expectation if loss is None else loss),
        min_energy=truth.min_energy,
        gates=counts.total,
        cnot=counts.cnot,
        depth=counts.depth,
        evals_used=ledger.used,
        wall_time=time.perf_counter() - started,
        best_circuit=circuit,
        meta=meta,
    )
