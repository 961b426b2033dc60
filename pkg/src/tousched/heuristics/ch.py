"""Constructive LPT baseline with block-shift improvement and feasibility checks."""

from __future__ import annotations

from typing import Optional

from ..core import TEC_TOL, Front, FrontPoint, Instance, Schedule, evaluate, pareto_filter
from .sgh import Seed, make_rng


def _prefix(instance: Instance) -> list[float]:
    out = [0.0]
    for c in instance.slot_costs:
        out.append(out[-1] + c)
    return out


def _greedy(instance: Instance, order: list[int], k_max: int,
            prefix: list[float]) -> Optional[dict[int, tuple[int, int]]]:
    """Place jobs in ``order`` on their cheapest contiguous idle window ending by ``k_max``.

    Ties go to the earliest start, then the lowest machine. None when a job
    cannot be placed.
    """
    p = instance.processing_times
    rates = instance.consumption_rates
    busy = [[False] * (k_max + 2) for _ in rates]
    starts: dict[int, tuple[int, int]] = {}
    for j in order:
        best: Optional[tuple[float, int, int]] = None
        for h, u in enumerate(rates):
            row = busy[h]
            run = 0
            for t in range(1, k_max + 1):
                run = 0 if row[t] else run + 1
                if run >= p[j]:
                    s = t - p[j] + 1
                    cost = u * (prefix[t] - prefix[s - 1])
                    if best is None or cost < best[0] - TEC_TOL or (
                            cost <= best[0] + TEC_TOL and (s, h) < (best[1], best[2])):
                        best = (cost, s, h)
        if best is None:
            return None
        _, s, h = best
        for t in range(s, s + p[j]):
            busy[h][t] = True
        starts[j] = (h, s)
    return starts


def block_shift(instance: Instance, starts: dict[int, tuple[int, int]], limit: int) -> dict[int, tuple[int, int]]:
    """Shift runs of consecutive jobs to cheaper slots, keeping each machine's job order.

    A move takes jobs ``i..k`` of a machine sequence, which must be
    back-to-back, and slides them between their neighbours without passing
    slot ``limit``. The best shift of each run is applied while it lowers TEC.
    """
    p = instance.processing_times
    prefix = _prefix(instance)
    starts = dict(starts)
    machines = sorted({h for h, _ in starts.values()})
    for h in machines:
        u = instance.consumption_rates[h]
        improved = True
        while improved:
            improved = False
            seq = sorted((s, j) for j, (hh, s) in starts.items() if hh == h)
            for i in range(len(seq)):
                for k in range(i, len(seq)):
                    if k > i and seq[k][0] != seq[k - 1][0] + p[seq[k - 1][1]]:
                        break
                    first = seq[i][0]
                    length = seq[k][0] + p[seq[k][1]] - first
                    lo = 1 if i == 0 else seq[i - 1][0] + p[seq[i - 1][1]]
                    hi = limit if k == len(seq) - 1 else seq[k + 1][0] - 1
                    here = u * (prefix[first + length - 1] - prefix[first - 1])
                    best_s, best_cost = first, here
                    for s in range(lo, hi - length + 2):
                        cost = u * (prefix[s + length - 1] - prefix[s - 1])
                        if cost < best_cost - TEC_TOL:
                            best_s, best_cost = s, cost
                    if best_s != first:
                        offset = best_s - first
                        for _, j in seq[i:k + 1]:
                            starts[j] = (h, starts[j][1] + offset)
                        improved = True
                        break
                if improved:
                    break
    return starts


def ch_j(instance: Instance, rng_seed: Seed = 0) -> Front:
    """Corrected constructive baseline.

    Jobs are ordered longest first with random tie-breaks. For the current
    makespan cap every job takes its cheapest contiguous idle window; a cap
    where some job cannot be placed emits nothing and the cap drops by one.
    Complete schedules are improved by :func:`block_shift` without worsening
    their makespan, recorded, and the cap is set below their makespan.
    """
    rng = make_rng(rng_seed)
    p = instance.processing_times
    tiebreak = {j: rng.random() for j in range(instance.n_jobs)}
    order = sorted(range(instance.n_jobs), key=lambda j: (-p[j], tiebreak[j]))
    prefix = _prefix(instance)
    k_min = sum(p) / instance.n_machines
    k_max = instance.n_slots
    found: list[FrontPoint] = []
    while k_max >= k_min and k_max >= 1:
        starts = _greedy(instance, order, k_max, prefix)
        if starts is None:
            k_max -= 1
            continue
        schedule = Schedule.from_starts(instance, starts)
        cmax = evaluate(instance, schedule).makespan
        schedule = Schedule.from_starts(instance, block_shift(instance, starts, cmax))
        objectives = evaluate(instance, schedule)
        found.append(FrontPoint(objectives, schedule))
        k_max = objectives.makespan - 1
    return pareto_filter(found)
