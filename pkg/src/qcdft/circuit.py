"""Circuit representation, validation, text formats and gate matrices.

A :class:`Circuit` stores its gates column-wise (kind, first qubit, second
qubit, angle) with step offsets, so that circuits with tens of millions of
gates stay compact and can be handed directly to the compiled engines. The
per-gate view (:class:`Gate`) is materialized on demand.

Qubit ordering for two-qubit gates is ``(control, target)`` for CX and
``(first, second)`` for CZ; the first qubit of a CZ is called its control.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Sequence

import numpy as np


class Kind(IntEnum):
    H = 0
    X = 1
    Y = 2
    Z = 3
    S = 4
    T = 5
    SX = 6
    SY = 7
    RX = 8
    CX = 9
    CZ = 10


TWO_QUBIT = frozenset({Kind.CX, Kind.CZ})

NAMES = {
    Kind.H: "h", Kind.X: "x", Kind.Y: "y", Kind.Z: "z", Kind.S: "s",
    Kind.T: "t", Kind.SX: "sx", Kind.SY: "sy", Kind.RX: "rx",
    Kind.CX: "cx", Kind.CZ: "cz",
}
_BY_NAME = {v: k for k, v in NAMES.items()}
_ALIASES = {"cnot": Kind.CX, "x_1_2": Kind.SX, "y_1_2": Kind.SY}


def kind_from_name(name: str) -> Kind:
    """Look up a gate kind by its text name (case-insensitive)."""
    key = name.strip().lower()
    if key in _BY_NAME:
        return _BY_NAME[key]
    if key in _ALIASES:
        return _ALIASES[key]
    raise KeyError(f"unknown gate name {name!r}")


@dataclass(frozen=True)
class Gate:
    kind: Kind
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{NAMES[self.kind]} takes {arity} qubit(s), got {len(self.qubits)}")
        if self.kind == Kind.RX:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError("rx needs a finite angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{NAMES[self.kind]} takes no angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    def __str__(self):
        name = NAMES[self.kind]
        if self.kind == Kind.RX:
            name = f"rx({self.theta!r})"
        return " ".join([name, *map(str, self.qubits)])


def gate(name: str, *qubits: int, theta: float | None = None) -> Gate:
    """Shorthand constructor, e.g. ``gate("cx", 0, 1)`` or ``gate("rx", 2, theta=0.3)``."""
    return Gate(kind_from_name(name), qubits, theta)


class Circuit:
    """N qubits and an ordered list of steps (1-indexed) of gate applications.

    Construct from gate lists with :meth:`from_steps`, or column-wise with
    :class:`CircuitBuilder`. Instances are treated as immutable.
    """

    __slots__ = ("n_qubits", "kinds", "q0", "q1", "thetas", "offsets")

    def __init__(self, n_qubits, kinds, q0, q1, thetas, offsets):
        if int(n_qubits) < 0:
            raise ValueError("n_qubits must be non-negative")
        self.n_qubits = int(n_qubits)
        self.kinds = np.ascontiguousarray(kinds, dtype=np.int8)
        self.q0 = np.ascontiguousarray(q0, dtype=np.int64)
        self.q1 = np.ascontiguousarray(q1, dtype=np.int64)
        self.thetas = np.ascontiguousarray(thetas, dtype=np.float64)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        n = len(self.kinds)
        if not (len(self.q0) == len(self.q1) == len(self.thetas) == n):
            raise ValueError("gate columns must have equal length")
        if len(self.offsets) == 0 or self.offsets[0] != 0 or self.offsets[-1] != n:
            raise ValueError("offsets must start at 0 and end at the gate count")
        if np.any(np.diff(self.offsets) < 0):
            raise ValueError("offsets must be non-decreasing")

    @classmethod
    def from_steps(cls, n_qubits: int, steps: Iterable[Iterable[Gate]]) -> "Circuit":
        b = CircuitBuilder(n_qubits)
        for step in steps:
            b.add_gates(step)
        return b.build()

    @property
    def depth(self) -> int:
        return len(self.offsets) - 1

    @property
    def n_gates(self) -> int:
        return len(self.kinds)

    def _gate_at(self, i: int) -> Gate:
        k = Kind(int(self.kinds[i]))
        if k in TWO_QUBIT:
            return Gate(k, (int(self.q0[i]), int(self.q1[i])))
        return Gate(k, (int(self.q0[i]),), float(self.thetas[i]) if k == Kind.RX else None)

    def step(self, s: int) -> list[Gate]:
        """Gates of step ``s`` (1-indexed)."""
        if not 1 <= s <= self.depth:
            raise IndexError(f"step {s} outside 1..{self.depth}")
        return [self._gate_at(i) for i in range(self.offsets[s - 1], self.offsets[s])]

    @property
    def steps(self) -> list[list[Gate]]:
        return [self.step(s) for s in range(1, self.depth + 1)]

    def iter_gates(self) -> Iterator[tuple[int, Gate]]:
        for s in range(1, self.depth + 1):
            for g in self.step(s):
                yield s, g

    def gates_per_step(self) -> np.ndarray:
        return np.diff(self.offsets)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.kinds, other.kinds)
            and np.array_equal(self.q0, other.q0)
            and np.array_equal(self.q1, other.q1)
            and np.array_equal(self.thetas, other.thetas, equal_nan=True)
        )

    def __repr__(self):
        return f"Circuit(n_qubits={self.n_qubits}, depth={self.depth}, n_gates={self.n_gates})"


class CircuitBuilder:
    """Accumulates steps column-wise; used by the generators for large circuits."""

    def __init__(self, n_qubits: int):
        self.n_qubits = int(n_qubits)
        self._cols: list[tuple[np.ndarray, ...]] = []
        self._sizes = [0]

    def add_step(self, kinds, q0, q1=None, thetas=None):
        kinds = np.asarray(kinds, dtype=np.int8)
        q0 = np.asarray(q0, dtype=np.int64)
        if kinds.ndim == 0:
            kinds = np.full(len(q0), kinds, dtype=np.int8)
        q1 = np.full(len(q0), -1, dtype=np.int64) if q1 is None else np.asarray(q1, dtype=np.int64)
        thetas = np.full(len(q0), np.nan) if thetas is None else np.asarray(thetas, dtype=np.float64)
        self._cols.append((kinds, q0, q1, thetas))
        self._sizes.append(len(kinds))
        return self

    def add_serial(self, kinds, q0, q1=None, thetas=None):
        """Add ``len(q0)`` steps holding one gate each."""
        start = len(self._cols)
        self.add_step(kinds, q0, q1, thetas)
        self._sizes[-1:] = [1] * len(self._cols[start][0])
        return self

    def add_gates(self, gates: Iterable[Gate]):
        gates = list(gates)
        self.add_step(
            [g.kind for g in gates],
            [g.qubits[0] for g in gates],
            [g.qubits[1] if g.is_two_qubit else -1 for g in gates],
            [g.theta if g.theta is not None else np.nan for g in gates],
        )
        return self

    def add_empty_step(self):
        return self.add_step([], [])

    def build(self) -> Circuit:
        offsets = np.cumsum(self._sizes)
        if self._cols:
            cols = [np.concatenate(c) for c in zip(*self._cols)]
        else:
            cols = [np.empty(0, np.int8), np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)]
        return Circuit(self.n_qubits, *cols, offsets)


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Violation:
    step: int
    qubits: tuple[int, ...]
    message: str

    def __str__(self):
        return f"step {self.step}: {self.message}"


class InvalidCircuit(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid circuit: {head}{more}")


def validate(c: Circuit) -> list[Violation]:
    """Every invariant violation of ``c``; an empty list means the circuit is valid."""
    out: list[Violation] = []
    n = c.n_qubits
    if n < 1:
        out.append(Violation(0, (), "circuit needs at least one qubit"))
    step_of = np.repeat(np.arange(1, c.depth + 1), c.gates_per_step())
    kinds = c.kinds
    two = (kinds == Kind.CX) | (kinds == Kind.CZ)

    bad_kind = (kinds < 0) | (kinds > max(Kind))
    for i in np.flatnonzero(bad_kind):
        out.append(Violation(int(step_of[i]), (), f"unknown gate kind code {int(kinds[i])}"))

    bad_q0 = (c.q0 < 0) | (c.q0 >= n)
    bad_q1 = two & ((c.q1 < 0) | (c.q1 >= n))
    for i in np.flatnonzero(bad_q0 | bad_q1):
        qs = (int(c.q0[i]), int(c.q1[i])) if two[i] else (int(c.q0[i]),)
        out.append(Violation(int(step_of[i]), qs, f"qubit index out of range 0..{n - 1}"))

    for i in np.flatnonzero(two & (c.q0 == c.q1)):
        what = "control equals target" if kinds[i] == Kind.CX else "both qubits equal"
        out.append(Violation(int(step_of[i]), (int(c.q0[i]),), f"{NAMES[Kind(int(kinds[i]))]}: {what}"))

    rx = kinds == Kind.RX
    for i in np.flatnonzero(rx & ~np.isfinite(c.thetas)):
        out.append(Violation(int(step_of[i]), (int(c.q0[i]),), "rx angle missing or not finite"))

    # duplicate qubit use within a step
    qs = np.concatenate([c.q0, c.q1[two]])
    ss = np.concatenate([step_of, step_of[two]])
    keep = (qs >= 0) & (qs < n)
    keys = ss[keep] * max(n, 1) + qs[keep]
    uniq, counts = np.unique(keys, return_counts=True)
    for key in uniq[counts > 1]:
        s, q = divmod(int(key), max(n, 1))
        out.append(Violation(s, (q,), f"qubit {q} used {int(counts[uniq == key][0])} times in step"))
    out.sort(key=lambda v: v.step)
    return out


def check(c: Circuit) -> Circuit:
    """Raise :class:`InvalidCircuit` unless ``c`` is valid; returns ``c``."""
    violations = validate(c)
    if violations:
        raise InvalidCircuit(violations)
    return c


# --------------------------------------------------------------------------
# text formats

class CircuitSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN = re.compile(r"\S+")
_RX = re.compile(r"rx\((.*)\)$", re.IGNORECASE)


def _tokens(line: str):
    body = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]


def _int_token(tok, col, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise CircuitSyntaxError(f"expected integer {what}, got {tok!r}", lineno, col) from None


def _parse_gate(toks, lineno, n, grcs=False):
    (name, col) = toks[1]
    theta = None
    m = _RX.match(name)
    if m:
        try:
            theta = float(m.group(1))
        except ValueError:
            raise CircuitSyntaxError(f"bad rx angle {m.group(1)!r}", lineno, col + 3) from None
        kind = Kind.RX
    else:
        try:
            kind = kind_from_name(name)
        except KeyError:
            raise CircuitSyntaxError(f"unknown gate name {name!r}", lineno, col) from None
        if kind == Kind.RX:
            raise CircuitSyntaxError("rx needs an angle: rx(<radians>)", lineno, col)
    arity = 2 if kind in TWO_QUBIT else 1
    if len(toks) - 2 != arity:
        raise CircuitSyntaxError(
            f"{name} takes {arity} qubit(s), got {len(toks) - 2}", lineno, toks[-1][1])
    qubits = []
    for tok, qcol in toks[2:]:
        q = _int_token(tok, qcol, lineno, "qubit index")
        if not 0 <= q < n:
            raise CircuitSyntaxError(f"qubit index {q} outside 0..{n - 1}", lineno, qcol)
        qubits.append(q)
    if arity == 2 and qubits[0] == qubits[1]:
        raise CircuitSyntaxError(f"{name} on a single qubit {qubits[0]}", lineno, toks[3][1])
    return Gate(kind, tuple(qubits), theta)


def _assemble(n, entries, compact):
    """entries: (step_label, lineno, gate); labels non-decreasing."""
    b = CircuitBuilder(n)
    current, cur_gates, used = None, [], {}

    def flush():
        b.add_gates(cur_gates)

    for label, lineno, g in entries:
        if label != current:
            if current is not None:
                flush()
                if not compact:
                    for _ in range(label - current - 1):
                        b.add_empty_step()
            elif not compact:
                for _ in range(label - 1):
                    b.add_empty_step()
            current, cur_gates, used = label, [], {}
        for q in g.qubits:
            if q in used:
                raise CircuitSyntaxError(
                    f"qubit {q} already used in this step (line {used[q]})", lineno)
            used[q] = lineno
        cur_gates.append(g)
    if current is not None:
        flush()
    return b.build()


def parse_circuit(text: str) -> Circuit:
    """Parse the native line format::

        qubits <N>
        <step> <gate> <q> [<q2>]

    Steps are 1-indexed and non-decreasing; skipped step numbers are empty
    steps. ``#`` starts a comment.
    """
    n = None
    entries = []
    last = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line)
        if not toks:
            continue
        if n is None:
            if toks[0][0].lower() != "qubits" or len(toks) != 2:
                raise CircuitSyntaxError("missing header 'qubits <N>'", lineno, toks[0][1])
            n = _int_token(toks[1][0], toks[1][1], lineno, "qubit count")
            if n < 1:
                raise CircuitSyntaxError("qubit count must be positive", lineno, toks[1][1])
            continue
        if len(toks) < 3:
            raise CircuitSyntaxError("expected '<step> <gate> <qubit>...'", lineno, toks[-1][1])
        step = _int_token(toks[0][0], toks[0][1], lineno, "step")
        if step < 1:
            raise CircuitSyntaxError("steps start at 1", lineno, toks[0][1])
        if step < last:
            raise CircuitSyntaxError(f"step {step} after step {last}", lineno, toks[0][1])
        last = step
        entries.append((step, lineno, _parse_gate(toks, lineno, n)))
    if n is None:
        raise CircuitSyntaxError("missing header 'qubits <N>'", 1)
    return _assemble(n, entries, compact=False)


def parse_grcs(text: str, strip_h: bool = False) -> Circuit:
    """Parse a GRCS-style file: a qubit-count line, then ``<cycle> <name> <q> [<q2>]``.

    Names ``x_1_2``/``y_1_2`` map to SX/SY. Each distinct non-empty cycle
    becomes one step (so cycle 0 is step 1); with ``strip_h`` the H gates are
    dropped first, and cycles left empty are removed.
    """
    n = None
    entries = []
    last = -1
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line)
        if not toks:
            continue
        if n is None:
            if len(toks) != 1:
                raise CircuitSyntaxError("missing header: qubit count line", lineno, toks[0][1])
            n = _int_token(toks[0][0], toks[0][1], lineno, "qubit count")
            if n < 1:
                raise CircuitSyntaxError("qubit count must be positive", lineno, toks[0][1])
            continue
        if len(toks) < 3:
            raise CircuitSyntaxError("expected '<cycle> <gate> <qubit>...'", lineno, toks[-1][1])
        cycle = _int_token(toks[0][0], toks[0][1], lineno, "cycle")
        if cycle < last:
            raise CircuitSyntaxError(f"cycle {cycle} after cycle {last}", lineno, toks[0][1])
        last = cycle
        g = _parse_gate(toks, lineno, n, grcs=True)
        if strip_h and g.kind == Kind.H:
            continue
        entries.append((cycle, lineno, g))
    if n is None:
        raise CircuitSyntaxError("missing header: qubit count line", 1)
    return _assemble(n, entries, compact=True)


def serialize_circuit(c: Circuit) -> str:
    """Canonical native text; ``parse_circuit(serialize_circuit(c)) == c``
    for valid circuits without trailing empty steps."""
    lines = [f"qubits {c.n_qubits}"]
    for s in range(1, c.depth + 1):
        for g in c.step(s):
            lines.append(f"{s} {g}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# gate matrices

_S2 = 1 / math.sqrt(2)
_MATRICES = {
    Kind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    Kind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Kind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Kind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Kind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    Kind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    Kind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    Kind.SY: 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]], dtype=complex),
    # basis |control target>, index 2*control + target
    Kind.CX: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    Kind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
}


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def gate_matrix(g: Gate | Kind, theta: float | None = None) -> np.ndarray:
    """Unitary of a gate: 2x2, or 4x4 acting on ``kron(first, second)``."""
    if isinstance(g, Gate):
        kind, theta = g.kind, g.theta
    else:
        kind = Kind(g)
    if kind == Kind.RX:
        if theta is None:
            raise ValueError("rx needs an angle")
        return rx_matrix(theta)
    return _MATRICES[kind].copy()


def single_qubit_table() -> np.ndarray:
    """(len(Kind), 2, 2) array of fixed single-qubit matrices (RX/2q slots are identity)."""
    table = np.zeros((len(Kind), 2, 2), dtype=complex)
    for k in Kind:
        table[k] = _MATRICES[k] if k not in TWO_QUBIT and k != Kind.RX else np.eye(2)
    return table
