"""Split-greedy construction of a minimum-TEC schedule within a horizon."""

from __future__ import annotations

import random
from typing import Optional, Sequence, Union

from ..core import TEC_TOL, Assignment, Instance, Schedule, distinct_ptimes, jobs_by_ptime
from .convert import convert_schedule

Seed = Union[int, random.Random, None]


def make_rng(seed: Seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def cheapest_locations(free: Sequence[int], costs: Sequence[float], d: int,
                       rate: float) -> tuple[float, list[tuple[int, ...]]]:
    """All minimum-cost free locations of ``d`` slots.

    ``free`` is the increasing list of idle slots; any ``d`` consecutive
    entries of it form a free (possibly split) location. Returns
    ``(cost, locations)`` with locations in increasing start order, or
    ``(inf, [])`` when fewer than ``d`` slots are idle.
    """
    n = len(free)
    if n < d:
        return float("inf"), []
    window = sum(costs[t - 1] for t in free[:d])
    sums = [window]
    for i in range(1, n - d + 1):
        window += costs[free[i + d - 1] - 1] - costs[free[i - 1] - 1]
        sums.append(window)
    # recompute exactly on the candidates to avoid drift from the running sum
    best = rate * min(sums)
    cand = [i for i, s in enumerate(sums) if rate * s <= best + 1e-7]
    exact = {i: rate * sum(costs[t - 1] for t in free[i:i + d]) for i in cand}
    low = min(exact.values())
    return low, [tuple(free[i:i + d]) for i in cand if exact[i] <= low + TEC_TOL]


def sgh(instance: Instance, horizon: Optional[int] = None, rng_seed: Seed = 0) -> Optional[Schedule]:
    """Greedy TEC-minimizing schedule with makespan at most ``horizon``.

    Processing times are handled longest first. Each job goes to a cheapest
    free location, which may interleave with already placed jobs; ties are
    drawn uniformly at random over all machines. The split-schedule obtained
    this way is converted to a feasible one before returning. ``None`` means
    some job found no free location.
    """
    k = instance.n_slots if horizon is None else horizon
    if k < 1 or k > instance.n_slots:
        raise ValueError(f"horizon {k} outside [1, {instance.n_slots}]")
    rng = make_rng(rng_seed)
    costs = instance.slot_costs
    rates = instance.consumption_rates
    m = instance.n_machines
    free = [list(range(1, k + 1)) for _ in range(m)]
    placed: list[Assignment] = []
    groups = jobs_by_ptime(instance)

    for d in sorted(distinct_ptimes(instance), reverse=True):
        best = [cheapest_locations(free[h], costs, d, rates[h]) for h in range(m)]
        for j in groups[d]:
            low = min(b[0] for b in best)
            if low == float("inf"):
                return None
            pool = [(h, loc) for h in range(m) if best[h][1] and best[h][0] <= low + TEC_TOL
                    for loc in best[h][1]]
            h, loc = pool[rng.randrange(len(pool))]
            placed.append(Assignment(j, h, loc))
            taken = set(loc)
            free[h] = [t for t in free[h] if t not in taken]
            best[h] = cheapest_locations(free[h], costs, d, rates[h])

    return convert_schedule(instance, Schedule(tuple(placed)))
