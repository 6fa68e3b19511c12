import numpy as np
import pytest

from qcdft import (
    CircuitFamily, CliffordTLayout, Kind, gate, gen_boixo_like, gen_bv, gen_clifford_t,
    gen_nonrandom_scaling, gen_rx_product, random_secret, simulate,
)
from qcdft.generators import grid_shape

SINGLE = {Kind.H, Kind.X, Kind.Y, Kind.Z, Kind.S, Kind.T, Kind.SX, Kind.SY, Kind.RX}


def _counts(step):
    kinds = [g.kind for g in step]
    return sum(k == Kind.CX for k in kinds), sum(k in SINGLE for k in kinds)


def test_half_and_half_layout():
    c = gen_clifford_t(20, CliffordTLayout("half-and-half", depth=20, seed=7))
    assert c.depth == 20
    for step in c.steps:
        assert _counts(step) == (5, 10)
        assert {g.kind for g in step} <= {Kind.H, Kind.S, Kind.T, Kind.CX}


def test_alternating_layout():
    c = gen_clifford_t(20, CliffordTLayout("alternating-layers", depth=20, seed=7))
    for s, step in enumerate(c.steps, 1):
        assert _counts(step) == ((0, 20) if s % 2 else (10, 0))


def test_clifford_t_seeded():
    lay = CliffordTLayout("half-and-half", depth=5, seed=11)
    assert gen_clifford_t(12, lay) == gen_clifford_t(12, lay)
    assert gen_clifford_t(12, lay) != gen_clifford_t(12, CliffordTLayout("half-and-half", depth=5, seed=12))


@pytest.mark.parametrize("n, variant", [(10, "half-and-half"), (7, "alternating-layers")])
def test_clifford_t_size_errors(n, variant):
    with pytest.raises(ValueError):
        gen_clifford_t(n, CliffordTLayout(variant))


def test_layout_validation():
    with pytest.raises(ValueError):
        CliffordTLayout("half-and-half", depth=0)
    with pytest.raises(ValueError):
        CliffordTLayout("half-and-half", single_gate_set=())
    with pytest.raises(ValueError):
        CliffordTLayout("stripes")


# ---- Boixo-style -------------------------------------------------------------

_LAYER_MAP = [0, 3, 2, 1, 4, 7, 6, 5]


def _reference_layer(rows, cols, index):
    internal = _LAYER_MAP[index % 8]
    dr = internal % 2
    dc = 1 - dr
    shift = (internal >> 1) % 4
    pairs = []
    for r in range(rows):
        for c in range(cols):
            if r + dr < rows and c + dc < cols and (r * (2 - dr) + c * (2 - dc)) % 4 == shift:
                pairs.append((r * cols + c, (r + dr) * cols + c + dc))
    return pairs


def _reference_structure(rows, cols, depth):
    """Per-step CZ pairs and per-qubit gate class (T or 'nd' for SX/SY), qubit by qubit."""
    n = rows * cols
    last = [None] * n
    layer = 0
    out = []
    for s in range(depth):
        pairs = []
        while not pairs:
            pairs = _reference_layer(rows, cols, layer)
            layer += 1
        busy = {q for p in pairs for q in p}
        singles = {}
        for q in range(n):
            if q in busy:
                continue
            if s == 0:
                singles[q] = "t"
            elif last[q] == "cz":
                singles[q] = "nd"
            elif last[q] == "nd":
                singles[q] = "t"
        out.append((sorted(pairs), singles))
        last = ["cz" if q in busy else singles.get(q) for q in range(n)]
    return out


def _structure(c):
    out = []
    for step in c.steps:
        pairs = sorted(g.qubits for g in step if g.kind == Kind.CZ)
        singles = {g.qubits[0]: "t" if g.kind == Kind.T else "nd" for g in step if g.kind != Kind.CZ}
        out.append((pairs, singles))
    return out


@pytest.mark.parametrize("rows, cols", [(4, 5), (1, 20), (2, 6), (3, 3)])
def test_boixo_matches_reference_rules(rows, cols):
    for seed in range(3):
        c = gen_boixo_like(rows * cols, 20, seed, rows=rows)
        assert _structure(c) == _reference_structure(rows, cols, 20)


def test_boixo_gate_set_and_determinism():
    c = gen_boixo_like(20, 20, 3)
    assert {g.kind for _, g in c.iter_gates()} == {Kind.T, Kind.SX, Kind.SY, Kind.CZ}
    assert c == gen_boixo_like(20, 20, 3)
    assert c != gen_boixo_like(20, 20, 4)


def test_boixo_no_sx_sy_without_preceding_cz():
    c = gen_boixo_like(20, 20, 5)
    prev = {}
    for step in c.steps:
        now = {}
        for g in step:
            for q in g.qubits:
                now[q] = g.kind
                if g.kind in (Kind.SX, Kind.SY):
                    assert prev.get(q) == Kind.CZ
        prev = now


def test_boixo_first_step_and_grid():
    assert grid_shape(20) == (4, 5)
    assert grid_shape(13) == (1, 13)
    first = gen_boixo_like(20, 1, 0).step(1)
    assert {g.kind for g in first if g.kind != Kind.CZ} == {Kind.T}
    assert len(first) == 20 - sum(g.kind == Kind.CZ for g in first)
    with pytest.raises(ValueError):
        gen_boixo_like(3, 5, 0)
    with pytest.raises(ValueError):
        gen_boixo_like(20, 5, 0, rows=3)


# ---- nonrandom ---------------------------------------------------------------

def test_nonrandom_pattern():
    n = 20
    c = gen_nonrandom_scaling(n)
    assert c.depth == 5
    s1, s2, s3, s4, s5 = c.steps
    assert s1 == [gate("h" if q % 2 == 0 else "x", q) for q in range(n)]
    assert sorted(g.qubits for g in s2) == [(i, i + 10) for i in range(10)]
    assert s3 == [gate("y" if q % 2 == 0 else "z", q) for q in range(n)]
    assert sorted(g.qubits for g in s4) == [(4 * k + 1, 4 * k) for k in range(5)]
    assert s5 == [gate("h", 0), gate("h", 10)]
    assert gen_nonrandom_scaling(n, repeats=3).depth == 15


def test_nonrandom_periodic_in_index():
    a, b = gen_nonrandom_scaling(20), gen_nonrandom_scaling(40)
    for s in (1, 3, 4, 5):
        ka = {g.qubits[0]: g.kind for g in a.step(s)}
        kb = {g.qubits[0]: g.kind for g in b.step(s)}
        for q in range(40):
            assert kb.get(q) == ka.get(q % 20)


def test_nonrandom_size_error():
    with pytest.raises(ValueError):
        gen_nonrandom_scaling(8)


# ---- BV and others -----------------------------------------------------------

def test_bv_layout():
    c = gen_bv(3, (1, 1, 0))
    assert c.steps == [
        [gate("x", 3)],
        [gate("h", q) for q in range(4)],
        [gate("cx", 0, 3)],
        [gate("cx", 1, 3)],
        [gate("h", q) for q in range(3)],
    ]


def test_bv_exact_recovers_secret():
    rng = np.random.default_rng(0)
    for _ in range(5):
        secret = rng.integers(2, size=8)
        p = simulate(gen_bv(8, secret))[-1]
        assert np.allclose(p[:8], secret, atol=1e-12)
    assert np.allclose(simulate(gen_bv(4, (0, 0, 0, 0)))[-1][:4], 0, atol=1e-12)


def test_bv_errors():
    with pytest.raises(ValueError):
        gen_bv(3, (1, 0))
    with pytest.raises(ValueError):
        gen_bv(2, (1, 2))


def test_random_secret():
    s = random_secret(1, 0)
    assert s.tolist() == [1]
    assert random_secret(50, 9).tolist() == random_secret(50, 9).tolist()
    with pytest.raises(ValueError):
        random_secret(0, 0)


def test_rx_product():
    c = gen_rx_product([0.1, 0.2])
    assert c.steps == [[gate("rx", 0, theta=0.1), gate("rx", 1, theta=0.2)]]
    with pytest.raises(ValueError):
        gen_rx_product([])


def test_family_dispatch():
    assert CircuitFamily("bell").build().n_qubits == 2
    assert CircuitFamily("bv", n=6).build(1).n_qubits == 6
    assert CircuitFamily("bv", n=4, secret=(1, 0, 1)).build().step(3) == [gate("cx", 0, 3)]
    assert CircuitFamily("rx", thetas=(0.5,)).build().n_qubits == 1
    with pytest.raises(ValueError):
        CircuitFamily("ising")
