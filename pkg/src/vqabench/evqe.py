"""Evolutionary circuit search with speciation and last-gene optimisation.

A genome is an ordered list of genes; each gene is one layer assigning to
every qubit either nothing, a rotation, or one end of a CNOT pair. Offspring
come from a single parent through gene insertion and removal only.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .circuit_ir import Circuit, CircuitError, Gate, GateKind
from .param_opt import BudgetLedger, optimize_circuit
from .problems import GroundTruth, IsingModel, to_diagonal
from .results import AlgorithmResult, finish
from .rngcore import RngStream, as_stream
from .statevector import DiagonalEnergy

ROTATION_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ)

# per-qubit action: None, a rotation kind, ("ctrl", target) or ("tgt", control)
Action = Union[None, GateKind, tuple]


@dataclass(frozen=True)
class Gene:
    actions: tuple[Action, ...]

    def __post_init__(self):
        acts = tuple(GateKind(a) if isinstance(a, str) else a for a in self.actions)
        object.__setattr__(self, "actions", acts)
        n = len(acts)
        for q, a in enumerate(acts):
            if a is None or a in ROTATION_KINDS:
                continue
            if not (isinstance(a, tuple) and len(a) == 2 and a[0] in ("ctrl", "tgt")):
                raise CircuitError(f"bad action {a!r} on qubit {q}")
            other = a[1]
            if not 0 <= other < n or other == q:
                raise CircuitError(f"bad partner {other} for qubit {q}")
            want = ("tgt", q) if a[0] == "ctrl" else ("ctrl", q)
            if acts[other] != want:
                raise CircuitError(f"unmatched CNOT end on qubit {q}")

    @property
    def n_qubits(self) -> int:
        return len(self.actions)

    def rotations(self) -> list[tuple[int, GateKind]]:
        return [(q, a) for q, a in enumerate(self.actions) if a in ROTATION_KINDS]

    def cnots(self) -> list[tuple[int, int]]:
        return [(q, a[1]) for q, a in enumerate(self.actions) if isinstance(a, tuple) and a[0] == "ctrl"]

    @property
    def n_params(self) -> int:
        return len(self.rotations())

    def is_empty(self) -> bool:
        return all(a is None for a in self.actions)


@dataclass(frozen=True)
class EvqeConfig:
    population_size: int = 20
    dist_threshold: int = 1
    prob_insertion: float = 0.5
    prob_removal: float = 0.5
    a: float = 0.0
    b: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 5 <= self.population_size <= 20:
            raise ValueError("population_size must be in 5..20")
        if not 1 <= self.dist_threshold <= 10:
            raise ValueError("dist_threshold must be in 1..10")
        for name in ("prob_insertion", "prob_removal"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if not (0 <= self.a <= 0.5 and 0 <= self.b <= 0.5):
            raise ValueError("a and b must be in [0, 0.5]")


@dataclass(frozen=True, eq=False)
class Genome:
    genes: tuple[Gene, ...] = ()
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cached_expectation: float = math.nan
    cached_loss: float = math.nan
    inserted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "genes", tuple(self.genes))
        params = np.asarray(self.params, dtype=float).reshape(-1)
        if params.size != sum(g.n_params for g in self.genes):
            raise CircuitError("params length does not match rotation count")
        object.__setattr__(self, "params", params)

    def gene_slots(self, index: int) -> list[int]:
        start = sum(g.n_params for g in self.genes[:index])
        return list(range(start, start + self.genes[index].n_params))

    @property
    def cnot_count(self) -> int:
        return sum(len(g.cnots()) for g in self.genes)


def loss(gm: Genome, a: float, b: float) -> float:
    """Expectation plus ``a`` per gene and ``b`` per CNOT."""
    return gm.cached_expectation + a * len(gm.genes) + b * gm.cnot_count


def genome_to_circuit(gm: Genome, n: int) -> Circuit:
    """Genes in order; within a gene, rotations by qubit then CNOTs by control."""
    gates: list[Gate] = []
    slot = 0
    for gene in gm.genes:
        if gene.n_qubits != n:
            raise CircuitError(f"gene spans {gene.n_qubits} qubits, expected {n}")
        for q, kind in gene.rotations():
            gates.append(Gate(kind, (q,), slot))
            slot += 1
        for c, t in gene.cnots():
            gates.append(Gate(GateKind.CNOT, (c, t)))
    return Circuit(n, gates, gm.params)


def random_gene(n: int, rng: RngStream) -> Gene:
    """Each qubit: 50% idle, else a uniform pick of RX/RY/RZ/CNOT.

    A CNOT pairs the qubit (as control) with a uniformly chosen qubit not yet
    visited; with no such partner it stays idle. Empty genes are redrawn.
    """
    while True:
        acts: list[Action] = [None] * n
        order = [int(q) for q in rng.permutation(n)]
        done = set()
        for pos, q in enumerate(order):
            if q in done:
                continue
            done.add(q)
            if rng.random() < 0.5:
                continue
            pick = int(rng.integers(4))
            if pick < 3:
                acts[q] = ROTATION_KINDS[pick]
                continue
            free = [p for p in order[pos + 1 :] if p not in done]
            if not free:
                continue
            t = free[int(rng.integers(len(free)))]
            acts[q], acts[t] = ("ctrl", t), ("tgt", q)
            done.add(t)
        gene = Gene(tuple(acts))
        if not gene.is_empty():
            return gene


def mutate(gm: Genome, cfg: EvqeConfig, rng: RngStream, n: int | None = None) -> Genome:
    """Removal (prob_removal) of a uniform gene, then insertion (prob_insertion) of a fresh one.

    Removal runs first so an inserted gene is always the last one. New angles start at 0.
    """
    if n is None:
        if not gm.genes:
            raise ValueError("qubit count needed for an empty genome")
        n = gm.genes[0].n_qubits
    genes = list(gm.genes)
    params = gm.params
    if rng.random() < cfg.prob_removal and genes:
        k = int(rng.integers(len(genes)))
        drop = set(gm.gene_slots(k))
        params = np.array([p for i, p in enumerate(params) if i not in drop])
        del genes[k]
    inserted = rng.random() < cfg.prob_insertion
    if inserted:
        gene = random_gene(n, rng)
        genes.append(gene)
        params = np.concatenate([params, np.zeros(gene.n_params)])
    return Genome(tuple(genes), params, inserted=inserted)


def distance(g1: Genome, g2: Genome) -> int:
    shared = min(len(g1.genes), len(g2.genes))
    return abs(len(g1.genes) - len(g2.genes)) + sum(g1.genes[i] != g2.genes[i] for i in range(shared))


def speciate(population: Sequence[Genome], dist_threshold: float) -> list[list[int]]:
    """Greedy clustering: join the first species whose representative is within threshold."""
    reps: list[int] = []
    species: list[list[int]] = []
    for i, gm in enumerate(population):
        for s, r in enumerate(reps):
            if distance(gm, population[r]) <= dist_threshold:
                species[s].append(i)
                break
        else:
            reps.append(i)
            species.append([i])
    return species


def selection_weights(population: Sequence[Genome], species: list[list[int]]) -> np.ndarray:
    """Weight (1/|S|) * (|S| - rank): small species and well-ranked members favoured."""
    w = np.zeros(len(population))
    for members in species:
        size = len(members)
        ranked = sorted(members, key=lambda i: population[i].cached_loss)
        for rank, i in enumerate(ranked):
            w[i] = (size - rank) / size
    return w / w.sum()


def _settle(
    gm: Genome, n: int, energy: DiagonalEnergy, ledger: BudgetLedger, cfg: EvqeConfig, slots: list[int]
) -> Genome:
    circuit = genome_to_circuit(gm, n)
    res = optimize_circuit(circuit, energy, ledger, ledger.per_structure_cap, active_slots=slots)
    out = replace(gm, params=res.best_params, cached_expectation=res.best_value)
    return replace(out, cached_loss=loss(out, cfg.a, cfg.b))


def evolve(
    m: IsingModel,
    cfg: EvqeConfig,
    ledger: BudgetLedger,
    truth: GroundTruth | None = None,
    instance_id: str = "",
) -> AlgorithmResult:
    """Run generations until the ledger is spent; report the lowest-loss genome seen."""
    started = time.perf_counter()
    rng = as_stream(cfg.seed, "evqe")
    n = m.n
    energy = to_diagonal(m)
    population: list[Genome] = []
    best: Genome | None = None

    def consider(gm: Genome) -> None:
        nonlocal best
        if best is None or gm.cached_loss < best.cached_loss:
            best = gm

    for _ in range(cfg.population_size):
        if ledger.exhausted:
            break
        gene = random_gene(n, rng)
        gm = _settle(Genome((gene,), np.zeros(gene.n_params)), n, energy, ledger, cfg, list(range(gene.n_params)))
        population.append(gm)
        consider(gm)

    generations = 0
    while not ledger.exhausted:
        species = speciate(population, cfg.dist_threshold)
        weights = selection_weights(population, species)
        parents = rng.choice(len(population), size=cfg.population_size, p=weights)
        offspring: list[Genome] = []
        for i in parents:
            if ledger.exhausted:
                break
            child = mutate(population[int(i)], cfg, rng, n)
            slots = child.gene_slots(len(child.genes) - 1) if child.genes else []
            child = _settle(child, n, energy, ledger, cfg, slots)
            offspring.append(child)
            consider(child)
        population = sorted(population + offspring, key=lambda g: g.cached_loss)[: cfg.population_size]
        generations += 1

    assert best is not None, "ledger too small to evaluate a single genome"
    return finish(
        "evqe",
        m,
        genome_to_circuit(best, n),
        best.cached_expectation,
        ledger,
        started,
        truth,
        loss=best.cached_loss,
        instance_id=instance_id,
        generations=generations,
        genes=len(best.genes),
    )


run = evolve
