"""Exact state-vector simulation, used as the reference for every engine.

Qubit 0 is the least-significant bit of the basis index, so the two-qubit
ket |q0 q1> written qubit-0-first has index ``q0 + 2*q1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .circuit import Circuit, Gate, Kind, check, gate_matrix

MAX_QUBITS = 30


class ResourceError(RuntimeError):
    pass


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


def _guard(n: int):
    if n > MAX_QUBITS:
        raise ResourceError(f"exact simulation limited to {MAX_QUBITS} qubits, got {n}")
    if n < 1:
        raise ValueError("need at least one qubit")


def init_state(n: int, basis_index: int = 0) -> StateVector:
    _guard(n)
    if not 0 <= basis_index < 2**n:
        raise ValueError(f"basis index {basis_index} outside 0..{2**n - 1}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[basis_index] = 1.0
    return StateVector(n, amps)


@nb.njit(cache=True, nogil=True)
def _apply_1q(psi, m, q):
    stride = 1 << q
    for base in range(0, psi.shape[0], stride << 1):
        for i in range(base, base + stride):
            a, b = psi[i], psi[i + stride]
            psi[i] = m[0, 0] * a + m[0, 1] * b
            psi[i + stride] = m[1, 0] * a + m[1, 1] * b


@nb.njit(cache=True, nogil=True)
def _apply_cx(psi, c, t):
    cm, tm = 1 << c, 1 << t
    for i in range(psi.shape[0]):
        if (i & cm) and not (i & tm):
            j = i | tm
            psi[i], psi[j] = psi[j], psi[i]


@nb.njit(cache=True, nogil=True)
def _apply_cz(psi, a, b):
    mask = (1 << a) | (1 << b)
    for i in range(psi.shape[0]):
        if (i & mask) == mask:
            psi[i] = -psi[i]


def _apply(psi: np.ndarray, g: Gate):
    if g.kind == Kind.CX:
        _apply_cx(psi, *g.qubits)
    elif g.kind == Kind.CZ:
        _apply_cz(psi, *g.qubits)
    else:
        _apply_1q(psi, gate_matrix(g), g.qubits[0])


def apply_gate(state: StateVector, g: Gate, inplace: bool = False) -> StateVector:
    """U_g applied to ``state``; by default a new StateVector is returned."""
    n = state.n_qubits
    if any(not 0 <= q < n for q in g.qubits) or len(set(g.qubits)) != len(g.qubits):
        raise ValueError(f"gate {g} invalid for {n} qubits")
    out = state if inplace else state.copy()
    _apply(out.amplitudes, g)
    return out


def exact_sqp(state: StateVector) -> np.ndarray:
    """Probability of measuring each qubit in |1>."""
    probs = np.abs(state.amplitudes) ** 2
    n = state.n_qubits
    out = np.empty(n)
    for q in range(n):
        out[q] = probs.reshape(-1, 2, 1 << q)[:, 1, :].sum()
    return np.clip(out, 0.0, 1.0)


def exact_rdm(state: StateVector, q: int) -> np.ndarray:
    """Single-qubit reduced density matrix of qubit ``q`` (partial trace)."""
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit {q} outside 0..{state.n_qubits - 1}")
    psi = state.amplitudes.reshape(-1, 2, 1 << q)
    a, b = psi[:, 0, :], psi[:, 1, :]
    r00 = np.vdot(a, a).real
    r11 = np.vdot(b, b).real
    r01 = np.vdot(b, a)  # sum a * conj(b)
    return np.array([[r00, r01], [np.conj(r01), r11]], dtype=np.complex128)


def simulate(c: Circuit, basis_index: int = 0, record_states: bool = False):
    """Run ``c`` from a basis state.

    Returns the exact SQP trajectory, shape ``(depth + 1, N)`` with row 0 the
    initial state; with ``record_states`` also the list of StateVectors per step.
    """
    check(c)
    state = init_state(c.n_qubits, basis_index)
    traj = np.empty((c.depth + 1, c.n_qubits))
    traj[0] = exact_sqp(state)
    states = [state.copy()] if record_states else None
    for s in range(1, c.depth + 1):
        for g in c.step(s):
            _apply(state.amplitudes, g)
        traj[s] = exact_sqp(state)
        if record_states:
            states.append(state.copy())
    return (traj, states) if record_states else traj


def amplitudes_to_csv(state: StateVector) -> str:
    lines = ["index,re,im"]
    for i, a in enumerate(state.amplitudes):
        lines.append(f"{i},{a.real!r},{a.imag!r}")
    return "\n".join(lines) + "\n"
