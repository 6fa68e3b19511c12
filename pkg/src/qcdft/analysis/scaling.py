"""Wall-clock scaling of the engines on the deterministic circuit family."""
from __future__ import annotations

import time
from typing import Sequence

from ..generators import gen_nonrandom_scaling
from ..lpa import evolve_lpa
from ..mga import builtin_functional, evolve_mga
from ..rdm import evolve_rdm

_ENGINES = {
    "lpa": lambda c: evolve_lpa(c, record=False, validate=False),
    "mga": lambda c: evolve_mga(c, builtin_functional("MGA3"), record=False, validate=False),
    "rdm": lambda c: evolve_rdm(c, record=False, validate=False),
}


def bench_scaling(engine: str, sizes: Sequence[int], repeats: int = 3,
                  pattern_repeats: int = 1) -> list[tuple[int, float]]:
    """Best-of-``repeats`` evolution time per size (circuit construction excluded)."""
    key = engine.lower()
    if key.startswith("mga"):
        key = "mga"
    if key not in _ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected lpa, mga or rdm")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    run = _ENGINES[key]
    run(gen_nonrandom_scaling(20))  # JIT warm-up
    out = []
    for n in sizes:
        c = gen_nonrandom_scaling(n, pattern_repeats)
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            run(c)
            best = min(best, time.perf_counter() - t0)
        out.append((n, best))
        del c
    return out
