"""Seeded random instances with uniform integer data."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..core import Instance


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    m: int
    k: int
    p_max: int = 12
    u_max: int = 6
    c_max: int = 8
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "m", "k", "p_max", "u_max", "c_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def generate_instance(params: GeneratorParams) -> Instance:
    """Draw processing times, then rates, then slot costs from one seeded stream.

    Processing times are capped at K so the instance stays valid when
    ``p_max`` exceeds the horizon.
    """
    rng = random.Random(params.seed)
    top = min(params.p_max, params.k)
    p = tuple(rng.randint(1, top) for _ in range(params.n))
    u = tuple(float(rng.randint(1, params.u_max)) for _ in range(params.m))
    c = tuple(float(rng.randint(1, params.c_max)) for _ in range(params.k))
    return Instance(p, u, c)
