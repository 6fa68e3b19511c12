"""Uniform access to the SQP engines by name."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .circuit import Circuit
from .lpa import evolve_lpa
from .mga import MgaFunctional, builtin_functional, evolve_mga, load_functional
from .rdm import evolve_rdm
from .statevector import simulate

BUILTIN = ("lpa", "mga3", "mga2", "mga6", "rdm", "exact")


def resolve(engine: str | MgaFunctional):
    """Normalize an engine name; ``mga:<path>`` loads a JSON functional."""
    if isinstance(engine, MgaFunctional):
        return engine
    name = engine.strip()
    low = name.lower()
    if low in ("lpa", "rdm", "exact"):
        return low
    if low in ("mga3", "mga2", "mga6"):
        return builtin_functional(low)
    if low.startswith("mga:"):
        path = Path(name[4:])
        return load_functional(path.read_text(), name=path.stem)
    raise ValueError(f"unknown engine {engine!r}; expected one of {', '.join(BUILTIN)} or mga:<file>")


def engine_name(engine) -> str:
    e = resolve(engine)
    return e.name.lower() if isinstance(e, MgaFunctional) else e


def sqp_trajectory(c: Circuit, engine, initial: int = 0, record: bool = True) -> np.ndarray:
    """SQPs per step (``(depth+1, N)``) for any engine, from a basis state."""
    e = resolve(engine)
    if e == "exact":
        traj = simulate(c, initial)
        return traj if record else traj[-1]
    if e == "rdm":
        return evolve_rdm(c, initial, record=record)[1]
    if e == "lpa":
        return evolve_lpa(c, initial, record=record)
    return evolve_mga(c, e, initial, record=record)
