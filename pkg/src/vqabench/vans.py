"""Variable-ansatz search: identity-block insertion, simplification, thresholded acceptance."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .circuit_ir import Circuit, Gate, GateKind, gates_with_angles, rebuild, remove_gate
from .param_opt import BudgetLedger, evaluate, optimize_circuit
from .problems import GroundTruth, IsingModel, to_diagonal
from .ra_vqe import InitialLayer, initial_layer
from .results import AlgorithmResult, finish
from .rngcore import RngStream, as_stream
from .statevector import DiagonalEnergy

ZERO_ANGLE_TOL = 1e-12
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class VansConfig:
    initial_layer: InitialLayer = InitialLayer.SA
    scale: float = 0.5
    temperature: float = 10.0
    accept_wall: float = 50.0
    accept_perc: float = 0.1
    min_randomness: float = 40.0
    max_randomness: float = 60.0
    decrease_to: int = 5
    factor_accept_perc: float = 0.9
    seed: int = 0
    n_iterations: int = 50

    def __post_init__(self):
        object.__setattr__(self, "initial_layer", InitialLayer(self.initial_layer))
        checks = {
            "scale": 0 <= self.scale <= 1.5,
            "temperature": 1 <= self.temperature <= 20,
            "accept_wall": 30 <= self.accept_wall <= 70,
            "accept_perc": 0 <= self.accept_perc <= 1,
            "min_randomness": 30 <= self.min_randomness <= 50,
            "max_randomness": 50 <= self.max_randomness <= 70,
            "decrease_to": 1 <= self.decrease_to <= 10,
            "factor_accept_perc": 0.8 <= self.factor_accept_perc <= 0.99,
            "n_iterations": self.n_iterations >= 1,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise ValueError(f"VansConfig out of range: {', '.join(bad)}")
        if self.min_randomness > self.max_randomness:
            raise ValueError("min_randomness exceeds max_randomness")


@dataclass(frozen=True)
class IdentityBlock:
    """``(q,)`` -> RZ RX RZ on q; ``(c, t)`` -> CNOT, RZ on c, RX on t, CNOT."""

    qubits: tuple[int, ...]

    @property
    def is_pair(self) -> bool:
        return len(self.qubits) == 2

    def gates(self) -> list[tuple[Gate, float | None]]:
        if not self.is_pair:
            (q,) = self.qubits
            return [(Gate(k, (q,), -1), 0.0) for k in (GateKind.RZ, GateKind.RX, GateKind.RZ)]
        c, t = self.qubits
        cx = Gate(GateKind.CNOT, (c, t))
        return [(cx, None), (Gate(GateKind.RZ, (c,), -1), 0.0), (Gate(GateKind.RX, (t,), -1), 0.0), (cx, None)]


def _pick_qubit(counts: np.ndarray, temperature: float, rng: RngStream, exclude: int | None = None) -> int:
    score = -counts / temperature
    if exclude is not None:
        score = score.astype(float).copy()
        score[exclude] = -np.inf
    w = np.exp(score - score.max())
    return int(rng.choice(len(counts), p=w / w.sum()))


def qubit_probabilities(counts, temperature: float) -> np.ndarray:
    """Softmax of ``-count / temperature``: busy qubits are picked less often."""
    s = -np.asarray(counts, dtype=float) / temperature
    w = np.exp(s - s.max())
    return w / w.sum()


def sample_insertion(c: Circuit, cfg: VansConfig, rng: RngStream) -> list[IdentityBlock]:
    """Draw ``1 + floor(Exp(scale))`` blocks, each on low-traffic qubits."""
    k = 1 + int(math.floor(rng.exponential(cfg.scale)))
    counts = c.qubit_gate_counts().astype(float)
    blocks = []
    for _ in range(k):
        pair = c.n_qubits >= 2 and rng.random() < 0.5
        q = _pick_qubit(counts, cfg.temperature, rng)
        if pair:
            t = _pick_qubit(counts, cfg.temperature, rng, exclude=q)
            blocks.append(IdentityBlock((q, t)))
            counts[q] += 3
            counts[t] += 3
        else:
            blocks.append(IdentityBlock((q,)))
            counts[q] += 3
    return blocks


def insert_blocks(c: Circuit, blocks: list[IdentityBlock]) -> Circuit:
    ops = gates_with_angles(c)
    for b in blocks:
        ops += b.gates()
    return rebuild(c.n_qubits, ops)


def _is_zero_angle(theta: float) -> bool:
    r = math.remainder(theta, TWO_PI)
    return abs(r) <= ZERO_ANGLE_TOL


def _commutes_with_cnot(g: Gate, cx: Gate) -> bool:
    """Whether ``g`` commutes with ``cx`` under the permitted commutation moves."""
    c, t = cx.qubits
    if g.kind is GateKind.RZ:
        return g.qubits[0] == c or g.qubits[0] not in cx.qubits
    if g.kind is GateKind.RX:
        return g.qubits[0] == t or g.qubits[0] not in cx.qubits
    if g.kind is GateKind.CNOT:
        c2, t2 = g.qubits
        if g.qubits == cx.qubits:
            return True
        # shared control or shared target only
        return (c2 == c and t2 != t and t2 != c) or (t2 == t and c2 != c and c2 != t) or not (set(g.qubits) & set(cx.qubits))
    return g.qubits[0] not in cx.qubits


def _touches(g: Gate, qubits) -> bool:
    return any(q in qubits for q in g.qubits)


def _try_rewrite(ops: list[list], initial_zero: bool) -> bool:
    """Apply the first applicable rule in place; return whether anything changed."""
    n_ops = len(ops)
    # R5: zero rotations
    for i, (g, a) in enumerate(ops):
        if g.is_rotation and _is_zero_angle(a):
            del ops[i]
            return True
    for i in range(n_ops):
        g, a = ops[i]
        if g.kind is GateKind.CNOT:
            # R1: cancel with the next identical CNOT through commuting gates
            for j in range(i + 1, n_ops):
                h = ops[j][0]
                if not _touches(h, g.qubits):
                    continue
                if h.kind is GateKind.CNOT and h.qubits == g.qubits:
                    del ops[j]
                    del ops[i]
                    return True
                if not _commutes_with_cnot(h, g):
                    break
        elif g.is_rotation:
            # R2: merge with the next same-axis rotation on the wire
            q = g.qubits[0]
            for j in range(i + 1, n_ops):
                h, b = ops[j]
                if q not in h.qubits:
                    continue
                if h.kind is g.kind:
                    ops[i] = [g, a + b]
                    del ops[j]
                    if _is_zero_angle(a + b):
                        del ops[i]
                    return True
                if h.kind is GateKind.CNOT and _commutes_with_cnot(g, h):
                    continue
                break
    if initial_zero:
        for i, (g, _a) in enumerate(ops):
            if g.kind not in (GateKind.RZ, GateKind.CNOT):
                continue
            # R3 / R4: the relevant wire has only seen diagonal action since |0>
            q = g.qubits[0]
            if all(_diagonal_on(ops[j][0], q) for j in range(i) if q in ops[j][0].qubits):
                del ops[i]
                return True
    return False


def _diagonal_on(g: Gate, q: int) -> bool:
    """Gate leaves wire ``q`` in its computational basis state (up to phase)."""
    if g.kind is GateKind.RZ:
        return True
    return g.kind is GateKind.CNOT and g.qubits[0] == q


def simplify_algebraic(c: Circuit, initial_zero: bool = True) -> Circuit:
    """Rewrite to a fixpoint with rules R1-R5.

    R1 cancels CNOT pairs, R2 merges same-axis rotations, R3/R4 drop an RZ or a
    CNOT whose (control) wire is still in ``|0>``, R5 drops zero rotations.
    Gates are looked past only when they commute (RZ on a control, RX on a
    target, CNOTs sharing only a control or only a target). Every rewrite
    deletes a gate, so the loop terminates. ``initial_zero=False`` disables
    R3/R4 for sub-circuits acting on arbitrary states.
    """
    ops = [list(x) for x in gates_with_angles(c)]
    while _try_rewrite(ops, initial_zero):
        pass
    return rebuild(c.n_qubits, [tuple(x) for x in ops])


def simplify_cost(
    c: Circuit,
    energy: DiagonalEnergy,
    accept_wall_now: float,
    ledger: BudgetLedger,
    e_full: float | None = None,
) -> tuple[Circuit, float]:
    """Greedily drop gates whose removal costs at most ``|E| / accept_wall_now``.

    Each scan tries every single-gate removal (one evaluation each) and keeps
    the acceptable removal with the lowest expectation. Stops when nothing is
    acceptable or the ledger runs dry.
    """
    if e_full is None:
        if ledger.exhausted:
            return c, math.nan
        e_full = evaluate(c, energy, ledger)
    while len(c):
        threshold = e_full + abs(e_full) / accept_wall_now
        best = None
        for pos in range(len(c)):
            if ledger.exhausted:
                return c, e_full
            trial = remove_gate(c, pos)
            e = evaluate(trial, energy, ledger)
            if e <= threshold and (best is None or e < best[0]):
                best = (e, trial)
        if best is None:
            break
        e_full, c = best
    return c, e_full


def accept_wall_schedule(cfg: VansConfig, iteration: int) -> float:
    """Linear from ``max_randomness`` to ``min_randomness`` over ceil(n_iterations / decrease_to) steps."""
    span = math.ceil(cfg.n_iterations / cfg.decrease_to)
    frac = min(iteration / span, 1.0) if span else 1.0
    return cfg.max_randomness - (cfg.max_randomness - cfg.min_randomness) * frac


def run(
    m: IsingModel,
    cfg: VansConfig,
    ledger: BudgetLedger,
    truth: GroundTruth | None = None,
    instance_id: str = "",
) -> AlgorithmResult:
    started = time.perf_counter()
    rng = as_stream(cfg.seed, "vans")
    energy = to_diagonal(m)
    circuit = initial_layer(cfg.initial_layer, m.n)
    res = optimize_circuit(circuit, energy, ledger)
    best = circuit.with_params(res.best_params)
    best_e = res.best_value
    current, current_e = best, best_e
    accept_perc = cfg.accept_perc
    accepted = iterations = 0

    for t in range(cfg.n_iterations):
        if ledger.exhausted:
            break
        iterations += 1
        cand = insert_blocks(current, sample_insertion(current, cfg, rng))
        res = optimize_circuit(cand, energy, ledger)
        cand, e = simplify_algebraic(cand.with_params(res.best_params)), res.best_value
        if not ledger.exhausted:
            before = len(cand)
            cand, e = simplify_cost(cand, energy, accept_wall_schedule(cfg, t), ledger, e)
            cand = simplify_algebraic(cand)
            if len(cand) < before and len(cand) and not ledger.exhausted:
                res = optimize_circuit(cand, energy, ledger)
                if res.best_value <= e:
                    cand, e = cand.with_params(res.best_params), res.best_value
        if len(cand) and e - best_e < accept_perc * abs(best_e):
            current, current_e = cand, e
            accepted += 1
            if e < best_e:
                best, best_e = cand, e
        else:
            current, current_e = best, best_e
        accept_perc *= cfg.factor_accept_perc

    return finish(
        "vans",
        m,
        best,
        best_e,
        ledger,
        started,
        truth,
        instance_id=instance_id,
        iterations=iterations,
        accepted=accepted,
        initial_layer=cfg.initial_layer.value,
    )
