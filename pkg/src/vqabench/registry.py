"""Algorithm registry: config types, runners and published tuned hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any, Callable

from . import evqe, qaoa, ra_vqe, vans

ALGORITHMS = ("evqe", "vans", "ravqe", "qaoa")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    config_cls: type
    runner: Callable
    seed_field: str

    def make_config(self, params: dict[str, Any], seed: int) -> Any:
        known = {f.name for f in fields(self.config_cls)}
        unknown = set(params) - known
        if unknown:
            raise ValueError(f"unknown {self.name} hyperparameters: {sorted(unknown)}")
        return self.config_cls(**{**params, self.seed_field: seed})

    def run(self, model, params: dict[str, Any], seed: int, ledger, truth=None, instance_id: str = ""):
        cfg = self.make_config(params, seed)
        return self.runner(model, cfg, ledger, truth=truth, instance_id=instance_id)


SPECS = {
    "evqe": AlgorithmSpec("evqe", evqe.EvqeConfig, evqe.evolve, "seed"),
    "vans": AlgorithmSpec("vans", vans.VansConfig, vans.run, "seed"),
    "ravqe": AlgorithmSpec("ravqe", ra_vqe.RaVqeConfig, ra_vqe.run, "seed"),
    "qaoa": AlgorithmSpec("qaoa", qaoa.QaoaConfig, qaoa.run, "init_seed"),
}

# Best configurations reported for each size (Bayesian tuning on a MaxCut ER instance).
PUBLISHED_HYPERPARAMS: dict[str, dict[int, dict[str, Any]]] = {
    "evqe": {
        4: dict(population_size=20, dist_threshold=1, prob_insertion=0.282, prob_removal=1.0, a=0.0, b=0.0),
        8: dict(population_size=19, dist_threshold=7, prob_insertion=0.451, prob_removal=0.0, a=0.0, b=0.0),
        12: dict(population_size=20, dist_threshold=4, prob_insertion=0.164, prob_removal=0.287, a=0.0, b=0.098),
        15: dict(population_size=14, dist_threshold=3, prob_insertion=1.0, prob_removal=0.178, a=0.0, b=0.0),
    },
    "vans": {
        4: dict(initial_layer="SA", scale=1.137, temperature=11.477, accept_wall=58.522, accept_perc=0.042,
                min_randomness=49.968, max_randomness=67.402, decrease_to=7, factor_accept_perc=0.820),
        8: dict(initial_layer="SA", scale=0.459, temperature=8.027, accept_wall=55.661, accept_perc=0.323,
                min_randomness=39.338, max_randomness=51.267, decrease_to=9, factor_accept_perc=0.810),
        12: dict(initial_layer="SA", scale=0.489, temperature=5.737, accept_wall=34.411, accept_perc=0.096,
                 min_randomness=38.776, max_randomness=51.222, decrease_to=1, factor_accept_perc=0.973),
        15: dict(initial_layer="SA", scale=0.0, temperature=20.0, accept_wall=30.0, accept_perc=0.0,
                 min_randomness=50.0, max_randomness=70.0, decrease_to=10, factor_accept_perc=0.800),
    },
    "ravqe": {n: dict(initial_layer="SA") for n in (4, 8, 12, 15)},
    "qaoa": {4: dict(p=1), 8: dict(p=2), 12: dict(p=3), 15: dict(p=2)},
}


def published(algorithm: str, n: int) -> dict[str, Any]:
    """Published tuned hyperparameters for the nearest tabulated size."""
    table = PUBLISHED_HYPERPARAMS[algorithm]
    size = min(table, key=lambda s: (abs(s - n), s))
    return dict(table[size])


def get(name: str) -> AlgorithmSpec:
    try:
        return SPECS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}") from None
