"""SQP accuracy against the exact oracle, and SQP distributions."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..engines import engine_name, resolve, sqp_trajectory
from ..generators import CircuitFamily
from ..statevector import MAX_QUBITS, ResourceError, simulate

DEFAULT_TOL = 1e-3


def accuracy(approx: Sequence[float], exact: Sequence[float], tol: float = DEFAULT_TOL) -> float:
    """Fraction of qubits with ``|approx - exact| <= tol``."""
    a = np.asarray(approx, dtype=float)
    e = np.asarray(exact, dtype=float)
    if a.shape != e.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {e.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a.size == 0:
        raise ValueError("empty SQP vectors")
    return float(np.count_nonzero(np.abs(a - e) <= tol) / a.size)


def step_accuracies(approx_traj: np.ndarray, exact_traj: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """A_s for every row of two trajectories."""
    if approx_traj.shape != exact_traj.shape:
        raise ValueError(f"trajectory shapes differ: {approx_traj.shape} vs {exact_traj.shape}")
    return np.mean(np.abs(approx_traj - exact_traj) <= tol, axis=1)


@dataclass
class AccuracyReport:
    engine: str
    family: str
    mean: np.ndarray  # A_s for s = 1..depth
    std: np.ndarray
    instances: int
    tol: float
    seed: int | None = None
    per_instance: np.ndarray = field(default=None, repr=False)

    @property
    def steps(self) -> np.ndarray:
        return np.arange(1, len(self.mean) + 1)

    def window_mean(self, first: int, last: int) -> float:
        """Mean of A_s over steps ``first..last`` inclusive."""
        return float(np.mean(self.mean[first - 1:last]))

    def rows(self):
        for s, m, d in zip(self.steps, self.mean, self.std):
            yield int(s), float(m), float(d)


def _instance_seeds(seed: int, instances: int):
    return np.random.SeedSequence(seed).spawn(instances)


def compare_engines(family: CircuitFamily, engines: Sequence, instances: int = 20, seed: int = 0,
                    tol: float = DEFAULT_TOL, threads: int = 1) -> dict[str, AccuracyReport]:
    """Run every engine on the same seeded instances and score against the oracle."""
    if family.n > MAX_QUBITS:
        raise ResourceError(f"accuracy needs the exact oracle; {family.n} qubits exceeds {MAX_QUBITS}")
    if instances < 1:
        raise ValueError("instances must be >= 1")
    resolved = [resolve(e) for e in engines]
    names = [engine_name(e) for e in resolved]
    seeds = _instance_seeds(seed, instances)

    def one(child):
        c = family.build(child)
        exact = simulate(c)
        return [step_accuracies(sqp_trajectory(c, e), exact, tol)[1:] for e in resolved]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    reports = {}
    for j, name in enumerate(names):
        acc = np.array([r[j] for r in results])
        reports[name] = AccuracyReport(
            engine=name, family=family.name, mean=acc.mean(axis=0), std=acc.std(axis=0),
            instances=instances, tol=tol, seed=seed, per_instance=acc)
    return reports


def run_accuracy_experiment(family: CircuitFamily, engine, instances: int = 20, seed: int = 0,
                            tol: float = DEFAULT_TOL, threads: int = 1) -> AccuracyReport:
    return next(iter(compare_engines(family, [engine], instances, seed, tol, threads).values()))


def sqp_histogram(p: Sequence[float], edges=None) -> np.ndarray:
    """Proportion of SQPs per bin; default 101 uniform bins on [0, 1]."""
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        raise ValueError("empty SQP vector")
    edges = np.linspace(0.0, 1.0, 102) if edges is None else np.asarray(edges, dtype=float)
    if edges[0] > p.min() or edges[-1] < p.max():
        raise ValueError("bin edges must cover the SQP values")
    counts, _ = np.histogram(p, bins=edges)
    return counts / p.size


def value_proportions(p: Sequence[float], decimals: int = 12) -> dict[float, float]:
    """Proportion of each distinct SQP value (rounded to ``decimals``)."""
    p = np.round(np.asarray(p, dtype=float), decimals)
    if p.size == 0:
        raise ValueError("empty SQP vector")
    values, counts = np.unique(p, return_counts=True)
    return {float(v): c / p.size for v, c in zip(values, counts)}
