"""Mean-field evolution of single-qubit reduced density matrices.

Single-qubit gates update a 1-RDM exactly (U rho U^dagger). A two-qubit gate
is applied to the product ``rho_c (x) rho_t`` and both factors are recovered
by partial trace, which is exact whenever the pair is not entangled.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from .circuit import TWO_QUBIT, Circuit, Gate, Kind, check, gate_matrix, single_qubit_table
from .lpa import bits_of

TOL = 1e-10

_CX, _CZ, _RX = int(Kind.CX), int(Kind.CZ), int(Kind.RX)
_TABLE = single_qubit_table()
_U_CX = gate_matrix(Kind.CX)
_U_CZ = gate_matrix(Kind.CZ)


class RdmInvariantError(RuntimeError):
    pass


def pure_rdm(bit: int) -> np.ndarray:
    rho = np.zeros((2, 2), dtype=np.complex128)
    rho[bit, bit] = 1.0
    return rho


@nb.njit(cache=True, nogil=True)
def _conj1(rho, u):
    # rho <- u rho u^dagger
    a00 = u[0, 0] * rho[0, 0] + u[0, 1] * rho[1, 0]
    a01 = u[0, 0] * rho[0, 1] + u[0, 1] * rho[1, 1]
    a10 = u[1, 0] * rho[0, 0] + u[1, 1] * rho[1, 0]
    a11 = u[1, 0] * rho[0, 1] + u[1, 1] * rho[1, 1]
    rho[0, 0] = a00 * np.conj(u[0, 0]) + a01 * np.conj(u[0, 1])
    rho[0, 1] = a00 * np.conj(u[1, 0]) + a01 * np.conj(u[1, 1])
    rho[1, 0] = a10 * np.conj(u[0, 0]) + a11 * np.conj(u[0, 1])
    rho[1, 1] = a10 * np.conj(u[1, 0]) + a11 * np.conj(u[1, 1])


@nb.njit(cache=True, nogil=True)
def _conj2(rc, rt, u):
    # m = u (rc x rt) u^dagger, then both partial traces
    r = np.empty((4, 4), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    r[2 * i + j, 2 * k + l] = rc[i, k] * rt[j, l]
    ur = np.zeros((4, 4), dtype=np.complex128)
    for i in range(4):
        for k in range(4):
            if u[i, k] != 0:
                for j in range(4):
                    ur[i, j] += u[i, k] * r[k, j]
    m = np.zeros((4, 4), dtype=np.complex128)
    for i in range(4):
        for j in range(4):
            acc = 0j
            for k in range(4):
                acc += ur[i, k] * np.conj(u[j, k])
            m[i, j] = acc
    for a in range(2):
        for b in range(2):
            rc[a, b] = m[2 * a, 2 * b] + m[2 * a + 1, 2 * b + 1]
            rt[a, b] = m[a, b] + m[2 + a, 2 + b]


@nb.njit(cache=True, nogil=True)
def _evolve(rhos, kinds, q0, q1, thetas, offsets, table, ucx, ucz, out):
    record = out.shape[0] > 0
    if record:
        out[0] = rhos
    u = np.empty((2, 2), dtype=np.complex128)
    for s in range(offsets.shape[0] - 1):
        for g in range(offsets[s], offsets[s + 1]):
            k = kinds[g]
            if k == _CX:
                _conj2(rhos[q0[g]], rhos[q1[g]], ucx)
            elif k == _CZ:
                _conj2(rhos[q0[g]], rhos[q1[g]], ucz)
            elif k == _RX:
                c = math.cos(0.5 * thetas[g])
                sn = math.sin(0.5 * thetas[g])
                u[0, 0] = c
                u[1, 1] = c
                u[0, 1] = -1j * sn
                u[1, 0] = -1j * sn
                _conj1(rhos[q0[g]], u)
            else:
                _conj1(rhos[q0[g]], table[k])
        if record:
            out[s + 1] = rhos


def rdm_apply_1q(rho: np.ndarray, g: Gate) -> np.ndarray:
    if g.is_two_qubit:
        raise ValueError(f"{g.kind.name} is a two-qubit gate")
    u = gate_matrix(g)
    return u @ rho @ u.conj().T


def rdm_apply_2q(rho_c: np.ndarray, rho_t: np.ndarray, g: Gate | Kind) -> tuple[np.ndarray, np.ndarray]:
    """Product-state update for CX/CZ; returns new (first, second) 1-RDMs."""
    kind = g.kind if isinstance(g, Gate) else Kind(g)
    if kind not in TWO_QUBIT:
        raise ValueError(f"{kind.name} is a single-qubit gate")
    rc = np.array(rho_c, dtype=np.complex128)
    rt = np.array(rho_t, dtype=np.complex128)
    _conj2(rc, rt, _U_CX if kind == Kind.CX else _U_CZ)
    return rc, rt


def rdm_sqp(rho: np.ndarray) -> float:
    p = float(np.real(rho[..., 1, 1]))
    if not -TOL <= p <= 1 + TOL:
        raise RdmInvariantError(f"<1|rho|1> = {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def check_rdms(rhos: np.ndarray, tol: float = TOL) -> None:
    """Raise unless every matrix in ``rhos`` (shape (..., 2, 2)) is a valid 1-RDM."""
    herm = np.abs(rhos - np.conj(np.swapaxes(rhos, -1, -2))).max(initial=0.0)
    if herm > tol:
        raise RdmInvariantError(f"non-Hermitian 1-RDM (deviation {herm:.3g})")
    tr = np.abs(rhos[..., 0, 0].real + rhos[..., 1, 1].real - 1.0).max(initial=0.0)
    if tr > tol:
        raise RdmInvariantError(f"1-RDM trace off by {tr:.3g}")
    d = 0.5 * (rhos[..., 0, 0].real - rhos[..., 1, 1].real)
    lam_min = 0.5 - np.sqrt(d * d + np.abs(rhos[..., 0, 1]) ** 2)
    if lam_min.size and lam_min.min() < -tol:
        raise RdmInvariantError(f"1-RDM eigenvalue {lam_min.min():.3g} below zero")


def initial_rdms(n: int, initial=0) -> np.ndarray:
    """Basis-state projectors from an int index, or an explicit (N, 2, 2) array."""
    if isinstance(initial, (int, np.integer)):
        bits = bits_of(int(initial), n)
        rhos = np.zeros((n, 2, 2), dtype=np.complex128)
        rhos[np.arange(n), bits, bits] = 1.0
        return rhos
    rhos = np.array(initial, dtype=np.complex128)
    if rhos.shape != (n, 2, 2):
        raise ValueError(f"initial 1-RDMs have shape {rhos.shape}, expected ({n}, 2, 2)")
    check_rdms(rhos)
    return rhos


def evolve_rdm(c: Circuit, initial=0, record: bool = True, validate: bool = True):
    """Evolve per-qubit 1-RDMs through ``c``.

    Returns ``(rdms, sqps)``: with ``record`` shapes ``(depth+1, N, 2, 2)`` and
    ``(depth+1, N)``; otherwise the final ``(N, 2, 2)`` and ``(N,)``.
    Invariants are checked on every returned matrix.
    """
    if validate:
        check(c)
    rhos = initial_rdms(c.n_qubits, initial)
    out = np.empty((c.depth + 1 if record else 0, c.n_qubits, 2, 2), dtype=np.complex128)
    _evolve(rhos, c.kinds, c.q0, c.q1, c.thetas, c.offsets, _TABLE, _U_CX, _U_CZ, out)
    result = out if record else rhos
    check_rdms(result)
    sqps = np.clip(result[..., 1, 1].real, 0.0, 1.0)
    return result, sqps


def rdm_trajectory_to_csv(rdms: np.ndarray) -> str:
    """Rows ``step,qubit,re00,im00,re01,im01,re10,im10,re11,im11``."""
    lines = ["step,qubit,re00,im00,re01,im01,re10,im10,re11,im11"]
    for s, frame in enumerate(rdms):
        for q, r in enumerate(frame):
            vals = ",".join(f"{x.real!r},{x.imag!r}" for x in r.ravel())
            lines.append(f"{s},{q},{vals}")
    return "\n".join(lines) + "\n"
