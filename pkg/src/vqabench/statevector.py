"""Dense statevector simulation and diagonal-Hamiltonian expectation.

Qubit ``q`` is bit ``q`` of the basis-state index (qubit 0 is the least
significant bit). A bit value of 1 corresponds to spin ``z = -1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit_ir import Circuit, CircuitError, Gate, GateKind

MAX_QUBITS = 16

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_H = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)


@dataclass(frozen=True, eq=False)
class DiagonalEnergy:
    """Ising energy of every computational basis state."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).reshape(-1)
        n = e.size.bit_length() - 1
        if e.size == 0 or 1 << n != e.size:
            raise CircuitError(f"energy vector length {e.size} is not a power of two")
        if not np.all(np.isfinite(e)):
            raise ValueError("energy vector has non-finite entries")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @property
    def n_qubits(self) -> int:
        return self.energies.size.bit_length() - 1


@dataclass(eq=False)
class State:
    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> State:
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise CircuitError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        psi = np.zeros(1 << n_qubits, dtype=complex)
        psi[0] = 1.0
        return cls(n_qubits, psi)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def rotation_matrix(kind: GateKind, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    raise CircuitError(f"{kind} is not a rotation")


def gate_matrix(kind: GateKind, theta: float | None = None) -> np.ndarray:
    if kind is GateKind.H:
        return _H
    return rotation_matrix(kind, theta)


@lru_cache(maxsize=None)
def _cnot_permutation(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    flip = (idx >> control) & 1
    return idx ^ (flip << target)


def _apply_1q(psi: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    view = psi.reshape(1 << (n - q - 1), 2, 1 << q)
    return np.matmul(u, view).reshape(-1)


def _apply_phase(psi: np.ndarray, n: int, q: int, d0: complex, d1: complex) -> np.ndarray:
    view = psi.reshape(1 << (n - q - 1), 2, 1 << q)
    view *= np.array([[d0], [d1]])
    return psi


def _apply(psi: np.ndarray, n: int, kind: GateKind, qubits: tuple[int, ...], theta: float | None) -> np.ndarray:
    # psi is owned by the caller and may be overwritten
    if kind is GateKind.CNOT:
        return psi[_cnot_permutation(n, qubits[0], qubits[1])]
    if kind is GateKind.RZ:
        ph = np.exp(0.5j * theta)
        return _apply_phase(psi, n, qubits[0], ph.conjugate(), ph)
    return _apply_1q(psi, n, qubits[0], gate_matrix(kind, theta))


def apply_gate(s: State, g: Gate, angle: float | None = None) -> State:
    """Apply one gate, returning a new state."""
    if max(g.qubits) >= s.n_qubits:
        raise CircuitError(f"gate on {g.qubits} out of range for {s.n_qubits} qubits")
    if g.kind.is_rotation != (angle is not None):
        raise CircuitError(f"{g.kind.value}: angle must be given iff the gate is a rotation")
    psi = _apply(s.amplitudes.copy(), s.n_qubits, g.kind, g.qubits, angle)
    return State(s.n_qubits, psi)


_KIND_CODE = {GateKind.H: 0, GateKind.RX: 1, GateKind.RY: 2, GateKind.RZ: 3}


@dataclass(frozen=True, eq=False)
class _Schedule:
    """Static part of a simulation: which gates fuse together and when each run is applied.

    ``steps`` holds ``(run, qubit)`` for a fused single-qubit run or
    ``(-1, permutation)`` for a CNOT. ``layout[k, r]`` is the gate index of the
    k-th gate in run ``r`` (``-1`` pads short runs with the identity).
    """

    steps: tuple
    layout: np.ndarray
    kinds: np.ndarray
    slots: np.ndarray


@lru_cache(maxsize=512)
def _schedule(n: int, gates: tuple[Gate, ...]) -> _Schedule:
    runs: list[list[int]] = []
    steps: list[tuple] = []
    pending: dict[int, int] = {}

    def flush_all():
        # every pending wire in a fixed order, so the float results do not
        # depend on where identity-acting gates were inserted
        for q in sorted(pending):
            steps.append((pending.pop(q), q))

    for i, g in enumerate(gates):
        if g.kind is GateKind.CNOT:
            flush_all()
            steps.append((-1, _cnot_permutation(n, *g.qubits)))
            continue
        q = g.qubits[0]
        if q not in pending:
            pending[q] = len(runs)
            runs.append([])
        runs[pending[q]].append(i)
    flush_all()
    layout = np.full((max((len(r) for r in runs), default=0), len(runs)), -1, dtype=int)
    for r, run in enumerate(runs):
        layout[: len(run), r] = run
    kinds = np.array([_KIND_CODE.get(g.kind, -1) for g in gates], dtype=int)
    slots = np.array([-1 if g.param_slot is None else g.param_slot for g in gates], dtype=int)
    return _Schedule(tuple(steps), layout, kinds, slots)


def _gate_entries(sch: _Schedule, theta: np.ndarray) -> list[np.ndarray]:
    """Row-major 2x2 entries of every gate, plus a trailing identity used as padding."""
    half = np.where(sch.slots >= 0, theta[sch.slots] if theta.size else 0.0, 0.0) / 2
    c, s = np.cos(half), np.sin(half)
    k = sch.kinds
    zero = np.zeros_like(c)
    m00 = np.where(k == 0, _SQRT1_2, np.where(k == 3, c - 1j * s, c + 0j))
    m11 = np.where(k == 0, -_SQRT1_2, np.where(k == 3, c + 1j * s, c + 0j))
    m01 = np.where(k == 0, _SQRT1_2, np.where(k == 1, -1j * s, np.where(k == 2, -s + 0j, zero + 0j)))
    m10 = np.where(k == 0, _SQRT1_2, np.where(k == 1, -1j * s, np.where(k == 2, s + 0j, zero + 0j)))
    return [np.append(m, v) for m, v in zip((m00, m01, m10, m11), (1, 0, 0, 1))]


def _fuse(sch: _Schedule, entries: list[np.ndarray]) -> np.ndarray:
    """Left-fold each run (later gate times earlier product), all runs at once; shape (runs, 2, 2)."""
    a00, a01, a10, a11 = (e[sch.layout[0]] for e in entries)
    for row in sch.layout[1:]:
        b00, b01, b10, b11 = (e[row] for e in entries)
        a00, a01, a10, a11 = (
            b00 * a00 + b01 * a10,
            b00 * a01 + b01 * a11,
            b10 * a00 + b11 * a10,
            b10 * a01 + b11 * a11,
        )
    return np.stack([a00, a01, a10, a11], axis=-1).reshape(-1, 2, 2)


_last: tuple = (None, 0, None)


def simulate(c: Circuit, params: np.ndarray | None = None) -> np.ndarray:
    """Final amplitudes of ``c`` run on ``|0...0>``, optionally with substitute angles.

    Consecutive single-qubit gates on one wire are fused into one 2x2 product
    before touching the state vector.
    """
    n = c.n_qubits
    if not 1 <= n <= MAX_QUBITS:
        raise CircuitError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n}")
    theta = np.asarray(c.params if params is None else params, dtype=float)
    global _last
    if _last[0] is not c.gates or _last[1] != n:  # optimizers re-run one circuit many times
        _last = (c.gates, n, _schedule(n, c.gates))
    sch = _last[2]
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    if sch.layout.size:
        mats = _fuse(sch, _gate_entries(sch, theta))
        diagonal = ((mats[:, 0, 1] == 0) & (mats[:, 1, 0] == 0)).tolist()
    for r, arg in sch.steps:
        if r < 0:
            psi = psi[arg]
        elif diagonal[r]:
            psi = _apply_phase(psi, n, arg, mats[r, 0, 0], mats[r, 1, 1])
        else:
            psi = _apply_1q(psi, n, arg, mats[r])
    return psi


def run_circuit(c: Circuit) -> State:
    return State(c.n_qubits, simulate(c))


def expectation(s: State, e: DiagonalEnergy) -> float:
    """<psi|H|psi> for a diagonal H given by its per-basis-state energies."""
    if s.amplitudes.shape != e.energies.shape:
        raise CircuitError(f"state has {s.amplitudes.size} amplitudes, energy vector {e.energies.size}")
    return expectation_of(s.amplitudes, e.energies)


def expectation_of(psi: np.ndarray, energies: np.ndarray) -> float:
    p = psi.real * psi.real + psi.imag * psi.imag
    return float(p @ energies)


def basis_state_circuit(n: int, index: int) -> Circuit:
    """Circuit preparing basis state ``index`` with RX(pi) flips."""
    from .circuit_ir import from_gates

    return from_gates(n, [("RX", q, np.pi) for q in range(n) if (index >> q) & 1])


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    return float(abs(np.vdot(a, b)) ** 2)
