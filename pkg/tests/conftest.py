from __future__ import annotations

import numpy as np
import pytest

from vqabench.circuit_ir import Circuit, Gate, GateKind, from_gates

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def _single(kind: GateKind, theta):
    if kind is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    # exp(-i theta P / 2) written out from the Pauli matrices
    pauli = {
        GateKind.RX: X,
        GateKind.RY: np.array([[0, -1j], [1j, 0]]),
        GateKind.RZ: np.diag([1, -1]).astype(complex),
    }[kind]
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * pauli


def _embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    # qubit 0 is the least significant bit, so it is the rightmost kron factor
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def dense_unitary(c: Circuit) -> np.ndarray:
    n = c.n_qubits
    u = np.eye(1 << n, dtype=complex)
    for g in c.gates:
        if g.kind is GateKind.CNOT:
            ctl, tgt = g.qubits
            m = _embed({ctl: P0}, n) + _embed({ctl: P1, tgt: X}, n)
        else:
            theta = None if g.param_slot is None else c.params[g.param_slot]
            m = _embed({g.qubits[0]: _single(g.kind, theta)}, n)
        u = m @ u
    return u


def dense_state(c: Circuit) -> np.ndarray:
    return dense_unitary(c)[:, 0]


def random_circuit(n: int, n_gates: int, rng: np.random.Generator, kinds=None) -> Circuit:
    kinds = kinds or [GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CNOT]
    gates, params = [], []
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind is GateKind.CNOT and n < 2:
            kind = GateKind.RX
        if kind is GateKind.CNOT:
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(Gate(kind, (int(c), int(t))))
        elif kind.is_rotation:
            gates.append(Gate(kind, (int(rng.integers(n)),), len(params)))
            params.append(rng.uniform(-np.pi, np.pi))
        else:
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    return Circuit(n, gates, np.array(params))


REWRITE_KINDS = [GateKind.RZ, GateKind.RX, GateKind.RY, GateKind.H, GateKind.CNOT]


def rewrite_prone_circuit(rng, n, n_gates):
    """Random circuit with many zero / full-turn angles and repeated gates."""
    ops = []
    for _ in range(n_gates):
        if ops and rng.random() < 0.2:
            ops.append(ops[-1])
            continue
        # CNOT is last so single-qubit circuits never draw it
        kind = REWRITE_KINDS[int(rng.integers(len(REWRITE_KINDS) if n > 1 else len(REWRITE_KINDS) - 1))]
        if kind is GateKind.CNOT:
            c, t = (int(q) for q in rng.choice(n, size=2, replace=False))
            ops.append((kind, (c, t)))
        elif kind is GateKind.H:
            ops.append((kind, int(rng.integers(n))))
        else:
            theta = rng.choice([0.0, 2 * np.pi, -2 * np.pi, rng.uniform(-np.pi, np.pi)])
            ops.append((kind, int(rng.integers(n)), float(theta)))
    return from_gates(n, ops)


# acceptance criteria report, filled by test_acceptance and printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
