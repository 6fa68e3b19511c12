import numpy as np
import pytest

from qcdft import CircuitFamily, gen_nonrandom_scaling, evolve_lpa
from qcdft.analysis import (
    accuracy, bench_scaling, compare_engines, energy_grid, exact_energy, grid_minima, mf_energy,
    run_accuracy_experiment, sqp_histogram, step_accuracies, value_proportions,
)
from qcdft.statevector import ResourceError


def test_accuracy_examples():
    assert accuracy([0.2, 0.4], [0.2, 0.4]) == 1.0
    assert accuracy([0.5, 0.0], [0.5, 1.0]) == 0.5
    assert accuracy([0.5] * 4, [0, 1, 1, 0]) == 0.0
    assert accuracy([0.1], [0.1 + 9e-4]) == 1.0
    with pytest.raises(ValueError):
        accuracy([0.1], [0.1, 0.2])
    with pytest.raises(ValueError):
        accuracy([0.1], [0.1], tol=0)


def test_accuracy_symmetric_and_permutation_invariant():
    rng = np.random.default_rng(0)
    a, b = rng.random(50), rng.random(50)
    b[:20] = a[:20]
    perm = rng.permutation(50)
    assert accuracy(a, b, 0.05) == accuracy(b, a, 0.05) == accuracy(a[perm], b[perm], 0.05)


def test_step_accuracies_shape():
    a = np.zeros((3, 4))
    assert step_accuracies(a, a).tolist() == [1, 1, 1]
    with pytest.raises(ValueError):
        step_accuracies(a, np.zeros((3, 5)))


def test_exact_against_itself():
    rep = run_accuracy_experiment(CircuitFamily("clifford-t", n=8, depth=6), "exact", instances=3, seed=2)
    assert np.all(rep.mean == 1.0) and np.all(rep.std == 0.0)
    assert rep.steps.tolist() == list(range(1, 7))
    assert len(list(rep.rows())) == 6


def test_compare_is_thread_independent():
    fam = CircuitFamily("boixo", n=12, depth=10)
    one = compare_engines(fam, ["lpa", "mga6", "rdm"], instances=6, seed=4, threads=1)
    three = compare_engines(fam, ["lpa", "mga6", "rdm"], instances=6, seed=4, threads=3)
    for k in one:
        assert np.array_equal(one[k].per_instance, three[k].per_instance)
        assert 0 <= one[k].mean.min() and one[k].mean.max() <= 1 and one[k].std.min() >= 0


def test_compare_guards_size():
    with pytest.raises(ResourceError):
        compare_engines(CircuitFamily("clifford-t", n=40), ["lpa"], instances=1)


def test_histogram():
    assert sqp_histogram([0.5] * 7).max() == 1.0
    assert sqp_histogram([0.0, 1.0], [0, 0.5, 1]).tolist() == [0.5, 0.5]
    assert sqp_histogram(np.random.default_rng(1).random(100)).sum() == pytest.approx(1)
    with pytest.raises(ValueError):
        sqp_histogram([])


def test_nonrandom_distribution_small_sizes():
    props = [value_proportions(evolve_lpa(gen_nonrandom_scaling(n), record=False)) for n in (20, 60, 200, 4000)]
    assert all(p == props[0] for p in props)
    assert props[0] == {0.0: 0.25, 0.5: 0.5, 1.0: 0.25}


def test_mf_energy_examples():
    assert mf_energy([np.pi, 0]) == pytest.approx(-1, abs=1e-15)
    assert mf_energy([0, 0, 0]) == 1.0
    assert mf_energy([np.pi / 2, 1.234]) == pytest.approx(0, abs=1e-12)
    rng = np.random.default_rng(2)
    for _ in range(50):
        th = rng.uniform(-7, 7, size=rng.integers(1, 17))
        assert abs(mf_energy(th) - exact_energy(th)) <= 1e-12


def test_energy_grid():
    surface, minima = energy_grid(2, 101)
    t1, t2 = np.meshgrid(surface.axis, surface.axis, indexing="ij")
    assert np.abs(surface.energies - np.cos(t1) * np.cos(t2)).max() <= 1e-12
    assert sorted((round(a, 12), round(b, 12)) for a, b, _ in minima) == [
        (0.0, round(np.pi, 12)), (round(np.pi, 12), 0.0)]
    assert all(e == pytest.approx(-1, abs=1e-12) for *_, e in minima)
    coarse, _ = energy_grid(2, 3)
    assert np.abs(coarse.energies).max() <= 1
    with pytest.raises(ValueError):
        energy_grid(3, 11)


def test_grid_minima_periodic_ties():
    i = np.arange(6)
    bowl = np.minimum(i, 6 - i) ** 2
    e = bowl[:, None] + bowl[None, :]  # periodic, unique minimum at the corner
    assert grid_minima(e) == [(0, 0)]
    assert grid_minima(np.roll(e, (2, 3), (0, 1))) == [(2, 3)]
    assert len(grid_minima(np.zeros((3, 3)))) == 9


def test_bench_small():
    rows = bench_scaling("lpa", [20, 200], repeats=2)
    assert [n for n, _ in rows] == [20, 200]
    assert all(t > 0 for _, t in rows)
    assert len(bench_scaling("mga3", [20], repeats=1)) == 1
    assert len(bench_scaling("rdm", [20], repeats=1)) == 1
    with pytest.raises(ValueError):
        bench_scaling("exact", [20])
