"""QUBO benchmark instances, their Ising form, and exhaustive ground truth.

Energies use the offset-included convention throughout: the Ising energy of a
bitstring equals its QUBO cost, so expectations and ground truths are
directly comparable.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .rngcore import RngStream, derive_seed
from .statevector import MAX_QUBITS, DiagonalEnergy

ENUMERATION_LIMIT = 20


class CapacityError(ValueError):
    """Problem too large for exhaustive enumeration or dense simulation."""


class ProblemKind(str, Enum):
    MAXCUT_ER = "MaxCutER"
    MAXCUT_STAR = "MaxCutStar"
    VERTEX_COVER_ER = "VertexCoverER"
    NUMBER_PARTITIONING = "NumberPartitioning"


@dataclass(frozen=True)
class ProblemSpec:
    kind: ProblemKind
    n: int
    seed: int = 0
    edge_prob: float = 0.7
    penalty: float = 8.0
    value_range: tuple[int, int] = (1, 20)

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        object.__setattr__(self, "value_range", tuple(int(v) for v in self.value_range))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0 < self.edge_prob <= 1:
            raise ValueError("edge_prob must be in (0, 1]")
        if self.penalty <= 0:
            raise ValueError("penalty must be positive")
        if self.value_range[0] > self.value_range[1]:
            raise ValueError("empty value_range")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["value_range"] = list(self.value_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ProblemSpec:
        return cls(**{**d, "value_range": tuple(d.get("value_range", (1, 20)))})


@dataclass(frozen=True, eq=False)
class QuboInstance:
    """Minimise ``x^T q x + constant`` over binary ``x``."""

    n: int
    q: np.ndarray
    constant: float = 0.0
    spec: ProblemSpec | None = None
    edges: tuple[tuple[int, int], ...] = ()
    values: tuple[int, ...] = ()

    def cost(self, bits) -> float:
        x = np.asarray(bits, dtype=float)
        return float(x @ self.q @ x + self.constant)

    def to_dict(self) -> dict:
        return {
            "spec": None if self.spec is None else self.spec.to_dict(),
            "q": [float(v) for v in self.q.reshape(-1)],
            "constant": float(self.constant),
            "edges": [list(e) for e in self.edges],
            "values": list(self.values),
        }

    @classmethod
    def from_dict(cls, d: dict) -> QuboInstance:
        q = np.array(d["q"], dtype=float)
        n = int(round(np.sqrt(q.size)))
        spec = None if d.get("spec") is None else ProblemSpec.from_dict(d["spec"])
        return cls(
            n,
            q.reshape(n, n),
            float(d["constant"]),
            spec,
            tuple(tuple(e) for e in d.get("edges", ())),
            tuple(d.get("values", ())),
        )


@dataclass(frozen=True, eq=False)
class IsingModel:
    """``sum_i h_i z_i + sum_{i<k} j_ik z_i z_k + offset`` with spins ``z = +-1``."""

    n: int
    h: np.ndarray
    j: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if h.size != self.n:
            raise ValueError(f"h has {h.size} entries for {self.n} spins")
        j = {}
        for (a, b), v in self.j.items():
            if a == b:
                raise ValueError(f"self-interaction ({a},{a}) not allowed")
            key = (min(a, b), max(a, b))
            j[key] = j.get(key, 0.0) + float(v)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "j", dict(sorted(j.items())))

    def energy(self, bits) -> float:
        z = 1 - 2 * np.asarray(bits, dtype=float)
        e = float(self.h @ z) + self.offset
        for (a, b), v in self.j.items():
            e += v * z[a] * z[b]
        return e

    @property
    def edge_count(self) -> int:
        return len(self.j)


@dataclass(frozen=True)
class GroundTruth:
    min_energy: float
    argmin: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"min_energy": self.min_energy, "argmin": list(self.argmin)}

    @classmethod
    def from_dict(cls, d: dict) -> GroundTruth:
        return cls(float(d["min_energy"]), tuple(d["argmin"]))


def _er_edges(n: int, p: float, rng: RngStream) -> list[tuple[int, int]]:
    while True:
        edges = [(i, k) for i in range(n) for k in range(i + 1, n) if rng.random() < p]
        if edges:
            return edges


def _qubo_from_terms(n: int, linear: np.ndarray, quad: dict[tuple[int, int], float]) -> np.ndarray:
    q = np.diag(np.asarray(linear, dtype=float))
    for (i, k), v in quad.items():
        q[i, k] += v / 2
        q[k, i] += v / 2
    return q


def generate(spec: ProblemSpec) -> QuboInstance:
    """Deterministic QUBO instance for ``spec``."""
    n = spec.n
    rng = RngStream(derive_seed("instance", spec.kind.value, n, spec.seed), f"problem/{spec.kind.value}")
    if spec.kind is ProblemKind.MAXCUT_STAR:
        inst = maxcut(n, [(0, k) for k in range(1, n)])
    elif spec.kind is ProblemKind.MAXCUT_ER:
        inst = maxcut(n, _er_edges(n, spec.edge_prob, rng))
    elif spec.kind is ProblemKind.VERTEX_COVER_ER:
        inst = vertex_cover(n, _er_edges(n, spec.edge_prob, rng), spec.penalty)
    else:
        lo, hi = spec.value_range
        inst = number_partitioning(rng.integers(lo, hi + 1, size=n))
    return replace(inst, spec=spec)


def maxcut(n: int, edges) -> QuboInstance:
    """Sum over edges of ``2 x_i x_k - x_i - x_k``; the minimum is minus the max cut."""
    linear = np.zeros(n)
    quad: dict[tuple[int, int], float] = {}
    for i, k in edges:
        key = (min(i, k), max(i, k))
        linear[i] -= 1
        linear[k] -= 1
        quad[key] = quad.get(key, 0.0) + 2.0
    return QuboInstance(n, _qubo_from_terms(n, linear, quad), 0.0, edges=tuple(map(tuple, edges)))


def vertex_cover(n: int, edges, penalty: float = 8.0) -> QuboInstance:
    """Cover size plus ``penalty`` per uncovered edge."""
    linear = np.ones(n)
    quad: dict[tuple[int, int], float] = {}
    for i, k in edges:
        # penalty * (1 - x_i - x_k + x_i x_k)
        key = (min(i, k), max(i, k))
        linear[i] -= penalty
        linear[k] -= penalty
        quad[key] = quad.get(key, 0.0) + penalty
    q = _qubo_from_terms(n, linear, quad)
    return QuboInstance(n, q, penalty * len(edges), edges=tuple(map(tuple, edges)))


def number_partitioning(values) -> QuboInstance:
    """Cost ``((2 s.x - c)^2 - c^2) / 4`` with ``c = sum(s)``."""
    s = [int(v) for v in values]
    n, c = len(s), sum(s)
    linear = np.array([si * (si - c) for si in s], dtype=float)
    quad = {(i, k): 2.0 * s[i] * s[k] for i in range(n) for k in range(i + 1, n)}
    return QuboInstance(n, _qubo_from_terms(n, linear, quad), 0.0, values=tuple(s))


def qubo_to_ising(q: QuboInstance) -> IsingModel:
    """Substitute ``x_i = (1 - z_i) / 2``; all constants go into ``offset``."""
    n = q.n
    h = np.zeros(n)
    j: dict[tuple[int, int], float] = {}
    offset = float(q.constant)
    for i in range(n):
        a = q.q[i, i]
        offset += a / 2
        h[i] -= a / 2
    for i in range(n):
        for k in range(i + 1, n):
            w = q.q[i, k] + q.q[k, i]
            if w == 0:
                continue
            offset += w / 4
            h[i] -= w / 4
            h[k] -= w / 4
            j[(i, k)] = w / 4
    return IsingModel(n, h, j, offset)


def _spins(n: int) -> np.ndarray:
    """Row b holds the spins of basis state b (bit 1 -> -1)."""
    b = np.arange(1 << n, dtype=np.int64)[:, None]
    return (1 - 2 * ((b >> np.arange(n)) & 1)).astype(np.int8)


def bitstring(index: int, n: int) -> str:
    """0/1 string with qubit 0 leftmost."""
    return "".join(str((index >> q) & 1) for q in range(n))


def brute_force_solve(m: IsingModel) -> GroundTruth:
    """Exhaustive minimum over all ``2^n`` spin configurations."""
    if m.n > ENUMERATION_LIMIT:
        raise CapacityError(f"{m.n} spins exceeds enumeration limit {ENUMERATION_LIMIT}")
    z = _spins(m.n).astype(float)
    e = z @ m.h + m.offset
    for (a, b), v in m.j.items():
        e += v * z[:, a] * z[:, b]
    emin = float(e.min())
    hits = np.flatnonzero(e <= emin + 1e-9 * max(1.0, abs(emin)))
    return GroundTruth(emin, tuple(bitstring(int(b), m.n) for b in hits))


def to_diagonal(m: IsingModel) -> DiagonalEnergy:
    """Per-basis-state energies, built by doubling the vector one spin at a time."""
    if m.n > MAX_QUBITS:
        raise CapacityError(f"{m.n} qubits exceeds simulator limit {MAX_QUBITS}")
    n = m.n
    idx = np.arange(1 << n)
    e = np.full(1 << n, float(m.offset))
    z = [1.0 - 2.0 * ((idx >> q) & 1) for q in range(n)]
    for q in range(n):
        if m.h[q] != 0:
            e += m.h[q] * z[q]
    for (a, b), v in m.j.items():
        e += v * (z[a] * z[b])
    return DiagonalEnergy(e)


def approximation_ratio(value: float, min_energy: float, tol: float = 1e-9) -> float | None:
    """Ratio of reached energy to the exact optimum; 1 means optimal.

    For negative optima this is ``value / min_energy``; for positive optima the
    reciprocal, so the ratio never exceeds 1 for ``value >= min_energy``.
    Undefined (``None``) when the optimum is numerically zero.
    """
    if abs(min_energy) < tol:
        return None
    if min_energy < 0:
        return value / min_energy
    return min_energy / value


def save_instance(path: str | Path, inst: QuboInstance, truth: GroundTruth | None = None) -> None:
    path = Path(path)
    path.write_text(json.dumps(inst.to_dict()))
    if truth is not None:
        path.with_suffix(".truth.json").write_text(json.dumps(truth.to_dict()))


def load_instance(path: str | Path) -> tuple[QuboInstance, GroundTruth | None]:
    path = Path(path)
    inst = QuboInstance.from_dict(json.loads(path.read_text()))
    tp = path.with_suffix(".truth.json")
    truth = GroundTruth.from_dict(json.loads(tp.read_text())) if tp.exists() else None
    return inst, truth


def instance_specs(kind: ProblemKind | str, n: int, count: int = 10, seed_base: int = 0) -> list[ProblemSpec]:
    return [ProblemSpec(ProblemKind(kind), n, seed_base + i) for i in range(count)]
