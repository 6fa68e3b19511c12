"""Constructors for the circuit families used in the experiments.

Random families draw from ``numpy.random.Generator(PCG64(seed))``; integer
draws use numpy's unbiased bounded-integer method, so a given seed produces
the same circuit on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, CircuitBuilder, Kind


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CliffordTLayout:
    variant: str = "half-and-half"  # or "alternating-layers"
    single_gate_set: tuple[Kind, ...] = (Kind.H, Kind.S, Kind.T)
    depth: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("half-and-half", "alternating-layers"):
            raise ValueError(f"unknown Clifford+T variant {self.variant!r}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        gates = tuple(Kind(k) for k in self.single_gate_set)
        if not gates:
            raise ValueError("single_gate_set must be non-empty")
        bad = [k for k in gates if k not in (Kind.H, Kind.S, Kind.T, Kind.X, Kind.Y, Kind.Z)]
        if bad:
            raise ValueError(f"gates {bad} are not allowed in the Clifford+T single-qubit set")
        object.__setattr__(self, "single_gate_set", gates)


def gen_clifford_t(n: int, layout: CliffordTLayout) -> Circuit:
    """Random Clifford+T circuit.

    half-and-half: each step, a random half of the qubits get independent
    uniform single-qubit gates and the other half is split into random
    (control, target) CNOT pairs. alternating-layers: odd steps put a random
    single-qubit gate on every qubit, even steps pair every qubit into CNOTs.
    """
    if layout.variant == "half-and-half" and (n < 4 or n % 4):
        raise ValueError(f"half-and-half Clifford+T needs n divisible by 4, got {n}")
    if layout.variant == "alternating-layers" and (n < 2 or n % 2):
        raise ValueError(f"alternating-layers Clifford+T needs even n, got {n}")
    rng = _rng(layout.seed)
    gset = np.array(layout.single_gate_set, dtype=np.int8)
    b = CircuitBuilder(n)
    for s in range(1, layout.depth + 1):
        perm = rng.permutation(n)
        if layout.variant == "half-and-half":
            singles, paired = perm[: n // 2], perm[n // 2:]
        elif s % 2:
            singles, paired = perm, perm[:0]
        else:
            singles, paired = perm[:0], perm
        kinds = gset[rng.integers(len(gset), size=len(singles))]
        ctrl, targ = paired[0::2], paired[1::2]
        b.add_step(
            np.concatenate([kinds, np.full(len(ctrl), Kind.CX, np.int8)]),
            np.concatenate([singles, ctrl]),
            np.concatenate([np.full(len(singles), -1), targ]),
        )
    return b.build()


# GRCS cz_v2 layer order: layer k uses internal pattern _CZ_LAYER_MAP[k % 8].
_CZ_LAYER_MAP = (0, 3, 2, 1, 4, 7, 6, 5)

_IDLE, _AFTER_CZ, _AFTER_NONDIAG, _AFTER_T = range(4)


def grid_shape(n: int) -> tuple[int, int]:
    """Most nearly square (rows, cols) with rows <= cols and rows * cols == n."""
    rows = max(r for r in range(1, int(np.sqrt(n)) + 1) if n % r == 0)
    return rows, n // rows


def _cz_layer(rows: int, cols: int, index: int) -> np.ndarray:
    internal = _CZ_LAYER_MAP[index % 8]
    dr = internal % 2
    dc = 1 - dr
    shift = (internal >> 1) % 4
    r, c = np.divmod(np.arange(rows * cols), cols)
    ok = (r + dr < rows) & (c + dc < cols) & ((r * (2 - dr) + c * (2 - dc)) % 4 == shift)
    a = np.flatnonzero(ok)
    return np.stack([a, a + dr * cols + dc], axis=1)


def gen_boixo_like(n: int, depth: int, seed, rows: int | None = None) -> Circuit:
    """GRCS cz_v2 random circuit on a rows x (n // rows) grid, H layers removed.

    Qubit (r, c) is index r * cols + c. Each step holds the next non-empty CZ
    layer; qubits it leaves free get T at step 1, later a random SX/SY if their
    previous-step gate was a CZ, T if it was SX/SY, and nothing otherwise.
    ``rows`` defaults to the most nearly square grid; ``rows=1`` is a chain.
    """
    if n < 4:
        raise ValueError(f"boixo-like circuits need n >= 4, got {n}")
    if rows is None:
        rows, cols = grid_shape(n)
    elif rows < 1 or n % rows:
        raise ValueError(f"rows={rows} does not divide n={n}")
    else:
        rows, cols = sorted((rows, n // rows))
    rng = _rng(seed)
    nondiag = np.array([Kind.SX, Kind.SY], dtype=np.int8)
    prev = np.full(n, _IDLE, dtype=np.int8)
    b = CircuitBuilder(n)
    layer = 0
    for s in range(depth):
        pairs = _cz_layer(rows, cols, layer)
        layer += 1
        while len(pairs) == 0:
            pairs = _cz_layer(rows, cols, layer)
            layer += 1
        in_cz = np.zeros(n, dtype=bool)
        in_cz[pairs.ravel()] = True
        free = ~in_cz
        if s == 0:
            t_mask, nd_mask = free, np.zeros(n, dtype=bool)
        else:
            t_mask, nd_mask = free & (prev == _AFTER_NONDIAG), free & (prev == _AFTER_CZ)
        kinds = np.full(n, -1, dtype=np.int8)
        kinds[t_mask] = Kind.T
        kinds[nd_mask] = nondiag[rng.integers(2, size=int(nd_mask.sum()))]
        singles = np.flatnonzero(kinds >= 0)
        b.add_step(
            np.concatenate([np.full(len(pairs), Kind.CZ, np.int8), kinds[singles]]),
            np.concatenate([pairs[:, 0], singles]),
            np.concatenate([pairs[:, 1], np.full(len(singles), -1)]),
        )
        prev = np.full(n, _IDLE, dtype=np.int8)
        prev[in_cz] = _AFTER_CZ
        prev[t_mask] = _AFTER_T
        prev[nd_mask] = _AFTER_NONDIAG
    return b.build()


def gen_nonrandom_scaling(n: int, repeats: int = 1) -> Circuit:
    """Deterministic 5-step family used for the scaling runs (n a multiple of 20).

    Per repeat: H on even / X on odd qubits; CX i -> i + n/2; Y on even / Z on
    odd; CX 4k+1 -> 4k in every 4-qubit block; H on qubits 0, 10, 20, ...
    The block CNOTs are controlled by the odd neighbour, which keeps the final
    SQP distribution the same for every n (including n = 20, where n/2 is not
    a multiple of 4).
    """
    if n < 20 or n % 20:
        raise ValueError(f"nonrandom circuits need n a positive multiple of 20, got {n}")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    idx = np.arange(n)
    even = idx % 2 == 0
    half = np.arange(n // 2)
    block = np.arange(0, n, 4)
    tens = np.arange(0, n, 10)
    b = CircuitBuilder(n)
    for _ in range(repeats):
        b.add_step(np.where(even, Kind.H, Kind.X).astype(np.int8), idx)
        b.add_step(Kind.CX, half, half + n // 2)
        b.add_step(np.where(even, Kind.Y, Kind.Z).astype(np.int8), idx)
        b.add_step(Kind.CX, block + 1, block)
        b.add_step(Kind.H, tens)
    return b.build()


def random_secret(register_size: int, seed, allow_zero: bool = False) -> np.ndarray:
    """Uniform random bit string; the all-zero string is redrawn unless allowed."""
    if register_size < 1:
        raise ValueError("register_size must be >= 1")
    rng = _rng(seed)
    while True:
        bits = rng.integers(2, size=register_size).astype(np.int8)
        if allow_zero or bits.any():
            return bits


def gen_bv(register_size: int, secret: Sequence[int]) -> Circuit:
    """Bernstein-Vazirani circuit; the ancilla is the last qubit.

    Steps: X on the ancilla; H on every qubit; one oracle CNOT per step from
    each register qubit with a 1 bit to the ancilla; H on the register.
    """
    bits = np.asarray(secret, dtype=np.int64)
    if bits.ndim != 1 or len(bits) != register_size:
        raise ValueError(f"secret has length {bits.size}, register size is {register_size}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("secret entries must be 0 or 1")
    n = register_size + 1
    anc = register_size
    b = CircuitBuilder(n)
    b.add_step(Kind.X, [anc])
    b.add_step(Kind.H, np.arange(n))
    ones = np.flatnonzero(bits)
    b.add_serial(Kind.CX, ones, np.full(len(ones), anc))
    b.add_step(Kind.H, np.arange(register_size))
    return b.build()


def gen_bell() -> Circuit:
    """H on qubit 0, then CNOT 0 -> 1."""
    b = CircuitBuilder(2)
    b.add_step(Kind.H, [0])
    b.add_step(Kind.CX, [0], [1])
    return b.build()


def gen_rx_product(thetas: Sequence[float]) -> Circuit:
    """One step of RX(theta_j) on qubit j."""
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.ndim != 1 or len(thetas) < 1:
        raise ValueError("need at least one angle")
    if not np.all(np.isfinite(thetas)):
        raise ValueError("angles must be finite")
    b = CircuitBuilder(len(thetas))
    b.add_step(Kind.RX, np.arange(len(thetas)), thetas=thetas)
    return b.build()


FAMILIES = ("clifford-t", "clifford-t-alt", "boixo", "nonrandom", "bell", "bv", "rx")


@dataclass(frozen=True)
class CircuitFamily:
    """A named family plus parameters; ``build(seed)`` makes one instance."""

    name: str
    n: int = 20
    depth: int = 20
    repeats: int = 1
    gate_set: tuple[Kind, ...] = (Kind.H, Kind.S, Kind.T)
    secret: tuple[int, ...] | None = None
    thetas: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family {self.name!r}; expected one of {', '.join(FAMILIES)}")

    @property
    def random(self) -> bool:
        return self.name in ("clifford-t", "clifford-t-alt", "boixo") or (
            self.name == "bv" and self.secret is None)

    def build(self, seed=0) -> Circuit:
        if self.name == "clifford-t":
            return gen_clifford_t(self.n, CliffordTLayout("half-and-half", self.gate_set, self.depth, seed))
        if self.name == "clifford-t-alt":
            return gen_clifford_t(self.n, CliffordTLayout("alternating-layers", self.gate_set, self.depth, seed))
        if self.name == "boixo":
            return gen_boixo_like(self.n, self.depth, seed)
        if self.name == "nonrandom":
            return gen_nonrandom_scaling(self.n, self.repeats)
        if self.name == "bell":
            return gen_bell()
        if self.name == "bv":
            register = self.n - 1
            secret = self.secret if self.secret is not None else random_secret(register, seed)
            return gen_bv(len(secret), secret)
        return gen_rx_product(self.thetas)
