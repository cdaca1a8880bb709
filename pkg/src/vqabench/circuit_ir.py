"""Parameterized circuit representation shared by every search algorithm.

A :class:`Circuit` is an immutable value: an ordered gate list over
``n_qubits`` wires plus a parameter vector. Rotation gates reference their
angle through ``param_slot``; slots are always exactly ``0..len(params)-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class CircuitError(ValueError):
    """Raised for structurally invalid circuits or edit positions."""


class GateKind(str, Enum):
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"

    @property
    def is_rotation(self) -> bool:
        return self in ROTATIONS

    @property
    def arity(self) -> int:
        return 2 if self is GateKind.CNOT else 1


ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    param_slot: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != self.kind.arity:
            raise CircuitError(f"{self.kind.value} takes {self.kind.arity} qubit(s), got {self.qubits}")
        if self.kind is GateKind.CNOT and self.qubits[0] == self.qubits[1]:
            raise CircuitError("CNOT control and target must differ")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if self.kind.is_rotation != (self.param_slot is not None):
            raise CircuitError(f"{self.kind.value} param_slot mismatch: {self.param_slot}")

    @property
    def is_rotation(self) -> bool:
        return self.kind.is_rotation

    def with_slot(self, slot: int | None) -> Gate:
        return Gate(self.kind, self.qubits, slot)


def rotation(kind: GateKind | str, qubit: int) -> Gate:
    """Unbound rotation gate; the slot is assigned on insertion."""
    return Gate(GateKind(kind), (qubit,), -1)


def hadamard(qubit: int) -> Gate:
    return Gate(GateKind.H, (qubit,))


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


@dataclass(frozen=True)
class GateCounts:
    total: int
    cnot: int
    depth: int


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        params = np.array(self.params, dtype=float).reshape(-1)
        params.setflags(write=False)
        object.__setattr__(self, "params", params)
        self.validate()

    def validate(self) -> None:
        if self.n_qubits < 1:
            raise CircuitError("n_qubits must be positive")
        slots = []
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise CircuitError(f"qubit index in {g.qubits} out of range for {self.n_qubits} qubits")
            if g.param_slot is not None:
                slots.append(g.param_slot)
        if sorted(slots) != list(range(len(self.params))):
            raise CircuitError(f"param slots {sorted(slots)} do not cover 0..{len(self.params) - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.gates == other.gates
            and np.array_equal(self.params, other.params)
        )

    def structure(self) -> tuple:
        """Hashable structural key (angles ignored)."""
        return (self.n_qubits, self.gates)

    def angle(self, position: int) -> float | None:
        slot = self.gates[position].param_slot
        return None if slot is None else float(self.params[slot])

    def with_params(self, params: Sequence[float]) -> Circuit:
        params = np.asarray(params, dtype=float)
        if params.shape != self.params.shape:
            raise CircuitError(f"expected {self.params.shape[0]} params, got {params.shape}")
        return Circuit(self.n_qubits, self.gates, params)

    def slot_positions(self) -> dict[int, int]:
        """Map param slot -> gate position."""
        return {g.param_slot: i for i, g in enumerate(self.gates) if g.param_slot is not None}

    def qubit_gate_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_qubits, dtype=int)
        for g in self.gates:
            for q in g.qubits:
                counts[q] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "gates": [
                {"kind": g.kind.value, "qubits": list(g.qubits), "param_slot": g.param_slot}
                for g in self.gates
            ],
            "params": [float(p) for p in self.params],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Circuit:
        gates = [Gate(GateKind(g["kind"]), tuple(g["qubits"]), g.get("param_slot")) for g in data["gates"]]
        return cls(int(data["n_qubits"]), gates, np.array(data["params"], dtype=float))

    def to_json(self) -> str:
        # repr-based float output in json round-trips doubles exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def from_gates(n_qubits: int, spec: Iterable[tuple]) -> Circuit:
    """Build a circuit from ``(kind, qubits[, angle])`` tuples, assigning slots in order.

    >>> c = from_gates(2, [("H", 0), ("CNOT", (0, 1)), ("RZ", 1, 0.3)])
    >>> count_gates(c).cnot
    1
    """
    gates, params = [], []
    for item in spec:
        kind = GateKind(item[0])
        qubits = item[1] if isinstance(item[1], (tuple, list)) else (item[1],)
        if kind.is_rotation:
            gates.append(Gate(kind, qubits, len(params)))
            params.append(float(item[2]) if len(item) > 2 else 0.0)
        else:
            gates.append(Gate(kind, qubits))
    return Circuit(n_qubits, gates, np.array(params, dtype=float))


def count_gates(c: Circuit) -> GateCounts:
    """Gate total, CNOT count and depth.

    Depth uses per-qubit layering: a gate sits one layer above the deepest
    previous gate on any of its qubits.
    """
    layer = [0] * c.n_qubits
    n_cnot = 0
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            n_cnot += 1
        top = 1 + max(layer[q] for q in g.qubits)
        for q in g.qubits:
            layer[q] = top
    return GateCounts(total=len(c.gates), cnot=n_cnot, depth=max(layer, default=0))


def insert_gate(c: Circuit, g: Gate, position: int, init_angle: float = 0.0) -> Circuit:
    """Return a copy of ``c`` with ``g`` inserted before ``position``.

    A rotation gets a fresh slot appended to the parameter vector, so existing
    slot references stay valid.
    """
    if not 0 <= position <= len(c.gates):
        raise CircuitError(f"insert position {position} out of range 0..{len(c.gates)}")
    if max(g.qubits) >= c.n_qubits:
        raise CircuitError(f"qubit index in {g.qubits} out of range for {c.n_qubits} qubits")
    params = c.params
    if g.kind.is_rotation:
        g = g.with_slot(len(params))
        params = np.append(params, float(init_angle))
    else:
        g = g.with_slot(None)
    gates = c.gates[:position] + (g,) + c.gates[position:]
    return Circuit(c.n_qubits, gates, params)


def append_gate(c: Circuit, g: Gate, init_angle: float = 0.0) -> Circuit:
    return insert_gate(c, g, len(c.gates), init_angle)


def remove_gate(c: Circuit, position: int) -> Circuit:
    """Return a copy of ``c`` without the gate at ``position``; slots are compacted."""
    if not 0 <= position < len(c.gates):
        raise CircuitError(f"remove position {position} out of range 0..{len(c.gates) - 1}")
    return remove_gates(c, [position])


def remove_gates(c: Circuit, positions: Iterable[int]) -> Circuit:
    drop = set(positions)
    keep = [g for i, g in enumerate(c.gates) if i not in drop]
    return _compact(c.n_qubits, keep, c.params)


def _compact(n_qubits: int, gates: Sequence[Gate], params: np.ndarray) -> Circuit:
    """Renumber the slots of ``gates`` in their existing relative order."""
    used = sorted(g.param_slot for g in gates if g.param_slot is not None)
    remap = {old: new for new, old in enumerate(used)}
    new_gates = [g if g.param_slot is None else g.with_slot(remap[g.param_slot]) for g in gates]
    return Circuit(n_qubits, new_gates, np.asarray(params, dtype=float)[used])


def rebuild(n_qubits: int, gates_with_angles: Sequence[tuple[Gate, float | None]]) -> Circuit:
    """Build a circuit from (gate, angle) pairs, assigning slots in gate order."""
    gates, params = [], []
    for g, theta in gates_with_angles:
        if g.kind.is_rotation:
            gates.append(g.with_slot(len(params)))
            params.append(float(theta))
        else:
            gates.append(g.with_slot(None))
    return Circuit(n_qubits, gates, np.array(params, dtype=float))


def gates_with_angles(c: Circuit) -> list[tuple[Gate, float | None]]:
    return [(g, None if g.param_slot is None else float(c.params[g.param_slot])) for g in c.gates]


def inverse(c: Circuit) -> Circuit:
    """Exact inverse: reversed order, negated angles (H and CNOT are self-inverse)."""
    return rebuild(c.n_qubits, [(g, None if a is None else -a) for g, a in reversed(gates_with_angles(c))])


def concatenate(a: Circuit, b: Circuit) -> Circuit:
    if a.n_qubits != b.n_qubits:
        raise CircuitError("qubit count mismatch")
    return rebuild(a.n_qubits, gates_with_angles(a) + gates_with_angles(b))
