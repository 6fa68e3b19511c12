"""Local-probability approximation: SQP update rules and circuit evolution.

Each qubit carries only its probability ``p`` of being measured in |1>.
Single-qubit gates act on the phase-averaged mean-field state
``sqrt(1-p)|0> +- sqrt(p)|1>``; CNOT flips the target when the control is
"more one than zero", with a separate rule at exactly ``p_c = 0.5``.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from .circuit import Circuit, Gate, Kind, check

# Equality band for the p_c = 0.5 and p_t in {0, 1} branches. LPA values are
# affine images of {0, 0.5, 1}, so nothing legitimate lands inside it.
HALF_TOL = 1e-9

_H, _X, _Y, _Z, _S, _T, _SX, _SY, _RX, _CX, _CZ = range(11)


@nb.njit(cache=True, nogil=True)
def _rule_1q(p, kind, theta):
    if kind == _X or kind == _Y:
        return 1.0 - p
    if kind == _H or kind == _SX or kind == _SY:
        return 0.5
    if kind == _RX:
        c = math.cos(0.5 * theta)
        s = math.sin(0.5 * theta)
        return p * c * c + (1.0 - p) * s * s
    return p  # Z, S, T


@nb.njit(cache=True, nogil=True)
def _rule_cnot_target(pc, pt):
    if abs(pc - 0.5) < HALF_TOL:
        if abs(pt) < HALF_TOL or abs(pt - 1.0) < HALF_TOL:
            return 0.5
        return 1.0 - pt
    if pc > 0.5:
        return 1.0 - pt
    return pt


@nb.njit(cache=True, nogil=True)
def _apply_range(p, kinds, q0, q1, thetas, lo, hi):
    for g in range(lo, hi):
        k = kinds[g]
        if k == _CX:
            p[q1[g]] = _rule_cnot_target(p[q0[g]], p[q1[g]])
        elif k == _CZ:
            pass
        else:
            p[q0[g]] = _rule_1q(p[q0[g]], k, thetas[g])


@nb.njit(cache=True, nogil=True)
def _evolve(p, kinds, q0, q1, thetas, offsets, out):
    record = out.shape[0] > 0
    if record:
        out[0, :] = p
    for s in range(offsets.shape[0] - 1):
        _apply_range(p, kinds, q0, q1, thetas, offsets[s], offsets[s + 1])
        if record:
            out[s + 1, :] = p


def lpa_apply_1q(p: float, g: Gate | Kind, theta: float | None = None) -> float:
    """LPA rule for a single-qubit gate."""
    if isinstance(g, Gate):
        kind, theta = g.kind, g.theta
    else:
        kind = Kind(g)
    if kind in (Kind.CX, Kind.CZ):
        raise ValueError(f"{kind.name} is a two-qubit gate")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if kind == Kind.RX and theta is None:
        raise ValueError("rx needs an angle")
    return float(_rule_1q(float(p), int(kind), float(theta) if theta is not None else 0.0))


def lpa_apply_cnot(pc: float, pt: float) -> tuple[float, float]:
    return float(pc), float(_rule_cnot_target(float(pc), float(pt)))


def lpa_apply_cz(pa: float, pb: float) -> tuple[float, float]:
    return float(pa), float(pb)


def initial_sqp(n: int, p0=None) -> np.ndarray:
    """``p0`` as a float array; ``None`` means all zeros, an int a basis index."""
    if p0 is None:
        return np.zeros(n)
    if isinstance(p0, (int, np.integer)):
        return bits_of(int(p0), n).astype(np.float64)
    p = np.array(p0, dtype=np.float64)
    if p.shape != (n,):
        raise ValueError(f"initial SQP vector has shape {p.shape}, expected ({n},)")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("initial SQPs must lie in [0, 1]")
    return p


def bits_of(index: int, n: int) -> np.ndarray:
    """Bits of a basis index, qubit 0 = least-significant bit."""
    if index < 0 or index.bit_length() > n:
        raise ValueError(f"basis index {index} does not fit in {n} qubits")
    raw = np.frombuffer(index.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(np.int8)


def evolve_lpa(c: Circuit, p0=None, record: bool = True, validate: bool = True) -> np.ndarray:
    """Evolve SQPs through ``c``.

    With ``record`` the result has shape ``(depth + 1, N)`` (row 0 = ``p0``);
    otherwise only the final vector of shape ``(N,)`` is returned.
    """
    if validate:
        check(c)
    p = initial_sqp(c.n_qubits, p0)
    out = np.empty((c.depth + 1 if record else 0, c.n_qubits))
    _evolve(p, c.kinds, c.q0, c.q1, c.thetas, c.offsets, out)
    return out if record else p


def lpa_step_range(p: np.ndarray, c: Circuit, first: int, last: int):
    """Apply steps ``first..last`` (1-indexed, inclusive) of ``c`` to ``p`` in place."""
    lo, hi = c.offsets[first - 1], c.offsets[last]
    _apply_range(p, c.kinds, c.q0, c.q1, c.thetas, lo, hi)
