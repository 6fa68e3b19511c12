"""Mean-field energy of the product-of-Z Hamiltonian for an RX product ansatz."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import Kind
from ..generators import gen_rx_product
from ..lpa import evolve_lpa, lpa_apply_1q


def mf_energy(thetas) -> float:
    """E_MF = prod_j (1 - 2 p_j), with p_j from the LPA RX rule starting at |0>."""
    p = evolve_lpa(gen_rx_product(thetas), record=False)
    return float(np.prod(1.0 - 2.0 * p))


def exact_energy(thetas) -> float:
    """<Psi|Z...Z|Psi> for the RX product state, in closed form."""
    return float(np.prod(np.cos(np.asarray(thetas, dtype=float))))


@dataclass
class EnergySurface:
    axis: np.ndarray  # angles used on both axes
    energies: np.ndarray  # energies[i, j] = E(axis[i], axis[j])

    def rows(self):
        for i, t1 in enumerate(self.axis):
            for j, t2 in enumerate(self.axis):
                yield float(t1), float(t2), float(self.energies[i, j])


def grid_minima(e: np.ndarray, tol: float = 1e-12) -> list[tuple[int, int]]:
    """Grid points not above any of their 8 periodic neighbours (ties allowed)."""
    neighbours = [np.roll(np.roll(e, di, 0), dj, 1)
                  for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj]
    low = np.min(neighbours, axis=0)
    return [(int(i), int(j)) for i, j in np.argwhere(e <= low + tol)]


def energy_grid(n_qubits: int = 2, resolution: int = 101):
    """E(theta1, theta2) on a ``resolution``-point grid over [0, 2pi] per axis.

    Both endpoints are included, so the last row and column repeat the first.
    Each axis angle goes through the LPA RX rule once; the surface is the
    outer product of the single-qubit mean-field energies. Minima are found
    on the periodic grid without the repeated edge and returned as
    ``(theta1, theta2, E)``.
    """
    if n_qubits != 2:
        raise ValueError("the energy grid is defined for two qubits")
    if resolution < 3:
        raise ValueError("resolution must be >= 3")
    axis = np.linspace(0.0, 2 * np.pi, resolution)
    eps = np.array([1.0 - 2.0 * lpa_apply_1q(0.0, Kind.RX, t) for t in axis])
    e = np.outer(eps, eps)
    surface = EnergySurface(axis, e)
    minima = [(float(axis[i]), float(axis[j]), float(e[i, j])) for i, j in grid_minima(e[:-1, :-1])]
    return surface, minima
