from .accuracy import (
    DEFAULT_TOL,
    AccuracyReport,
    accuracy,
    compare_engines,
    run_accuracy_experiment,
    sqp_histogram,
    step_accuracies,
    value_proportions,
)
from .energy import EnergySurface, energy_grid, exact_energy, grid_minima, mf_energy
from .scaling import bench_scaling

__all__ = [
    "DEFAULT_TOL", "AccuracyReport", "accuracy", "compare_engines", "run_accuracy_experiment",
    "sqp_histogram", "step_accuracies", "value_proportions", "EnergySurface", "energy_grid",
    "exact_energy", "grid_minima", "mf_energy", "bench_scaling",
]
