"""Epsilon-constraint drivers built on the split-greedy heuristic."""

from __future__ import annotations

from ..core import Front, FrontPoint, Instance, evaluate, lower_bound_makespan, pareto_filter
from .es import exchange_search
from .sgh import Seed, make_rng, sgh


def _scheduler(instance: Instance, rng_seed: Seed, improve: bool) -> Front:
    rng = make_rng(rng_seed)
    k_low = lower_bound_makespan(instance)
    found: list[FrontPoint] = []
    k = instance.n_slots
    while k >= k_low:
        schedule = sgh(instance, k, rng)
        if schedule is None:
            break
        if improve:
            schedule = exchange_search(instance, schedule, k)
        found.append(FrontPoint(evaluate(instance, schedule), schedule))
        k -= 1
    return pareto_filter(found)


def sgs(instance: Instance, rng_seed: Seed = 0) -> Front:
    """Run the split-greedy heuristic for every horizon from K down to the makespan lower bound.

    Stops at the first horizon where the heuristic places no schedule.
    """
    return _scheduler(instance, rng_seed, improve=False)


def sgs_es(instance: Instance, rng_seed: Seed = 0) -> Front:
    """As :func:`sgs`, with each heuristic schedule polished by exchange search."""
    return _scheduler(instance, rng_seed, improve=True)
