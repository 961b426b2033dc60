"""Exact Pareto fronts: the epsilon-constraint loop over MILP solves, and a brute-force oracle."""

from __future__ import annotations

import enum
import math
import time
from typing import Mapping, Optional

from ..core import (Front, FrontPoint, Instance, Schedule, ScheduleTag, classify, derive, distinct_ptimes,
                    evaluate, jobs_by_ptime, lower_bound_makespan, pareto_filter)
from ..heuristics.sgh import Seed, make_rng, sgh
from .backends import BuiltinBackend, SolverBackend, SolveStatus
from .model import MilpModel, build_f1, build_f2

YKey = tuple[int, int, int]  # (length d, machine h, start t)


class Feasibility(enum.Enum):
    PASS = "Pass"
    FAIL_CAPACITY = "FailCapacity"
    FAIL_DISTINCT = "FailDistinct"


def distinct_bound(n_machines: int, n_slots: int) -> int:
    """Largest number of distinct processing times that can fit: floor((sqrt(1 + 8MK) - 1) / 2)."""
    return (math.isqrt(1 + 8 * n_machines * n_slots) - 1) // 2


def necessary_feasibility(instance: Instance) -> Feasibility:
    """Cheap necessary conditions for a feasible schedule to exist. Passing proves nothing."""
    if sum(instance.processing_times) > instance.n_machines * instance.n_slots:
        return Feasibility.FAIL_CAPACITY
    if len(distinct_ptimes(instance)) > distinct_bound(instance.n_machines, instance.n_slots):
        return Feasibility.FAIL_DISTINCT
    return Feasibility.PASS


def schedule_from_y(instance: Instance, y: Mapping[YKey, float] | set[YKey]) -> Schedule:
    """Turn a set of selected (d, h, t) windows into a schedule.

    Jobs of each length are handed out in ascending index order. Raises
    ``ValueError`` when the counts do not match or windows overlap.
    """
    chosen = sorted(k for k in y if (y[k] > 0.5 if isinstance(y, Mapping) else True))
    groups = {d: list(js) for d, js in jobs_by_ptime(instance).items()}
    starts: dict[int, tuple[int, int]] = {}
    for d, h, t in chosen:
        pool = groups.get(d)
        if not pool:
            raise ValueError(f"more windows of length {d} than jobs")
        starts[pool.pop(0)] = (h, t)
    if any(groups.values()):
        raise ValueError("fewer windows than jobs for some length")
    schedule = Schedule.from_starts(instance, starts)
    cls = classify(instance, schedule)
    if cls.tag is not ScheduleTag.FEASIBLE:
        raise ValueError(f"windows do not form a feasible schedule: {cls.reason}")
    return schedule


def warm_start_from_schedule(instance: Instance, schedule: Schedule, horizon: int) -> dict[YKey, int]:
    """The y-vector (as the set of ones) describing a feasible schedule."""
    if classify(instance, schedule).tag is not ScheduleTag.FEASIBLE:
        raise ValueError("warm start needs a feasible schedule")
    if evaluate(instance, schedule).makespan > horizon:
        raise ValueError("schedule exceeds the horizon")
    p = instance.processing_times
    return {(p[j], h, t): 1 for j, (h, t) in schedule.starts().items()}


def model_values(model: MilpModel, instance: Instance, schedule: Schedule) -> list[float]:
    """Full variable vector of ``model`` (either formulation) for a feasible schedule."""
    values = [0.0] * model.n_variables
    p = instance.processing_times
    prefix = "x" if model.meta["formulation"] == "F1" else "y"
    for j, (h, t) in schedule.starts().items():
        lead = j if prefix == "x" else p[j]
        values[model.index(f"{prefix}_{lead}_{h}_{t}")] = 1.0
    obj = evaluate(instance, schedule)
    values[model.index("Cmax")] = float(obj.makespan)
    values[model.index("E")] = obj.tec
    return values


def schedule_from_values(instance: Instance, model: MilpModel, values) -> Schedule:
    """Read a schedule back from a solved F1 or F2 model."""
    keys = model.meta["keys"]
    if model.meta["formulation"] == "F1":
        starts = {}
        for i, (_, j, h, t) in keys.items():
            if values[i] > 0.5:
                starts[j] = (h, t)
        schedule = Schedule.from_starts(instance, starts)
        if classify(instance, schedule).tag is not ScheduleTag.FEASIBLE:
            raise ValueError("solution is not a feasible schedule")
        return schedule
    return schedule_from_y(instance, {(d, h, t) for i, (_, d, h, t) in keys.items() if values[i] > 0.5})


def solve_level(instance: Instance, horizon: int, backend: Optional[SolverBackend] = None,
                formulation: str = "F2", warm: Optional[Schedule] = None,
                time_limit: Optional[float] = None):
    """Minimum TEC with makespan at most ``horizon``, via the reduced model.

    Returns ``(status, schedule or None)``.
    """
    backend = backend or BuiltinBackend()
    builder = build_f2 if formulation.upper() == "F2" else build_f1
    model = builder(instance, horizon, reduced=True)
    start = None if warm is None else model_values(model, instance, warm)
    res = backend.solve(model, warm_start=start, time_limit=time_limit)
    if res.values is None or res.status is SolveStatus.INFEASIBLE:
        return res.status, None
    return res.status, schedule_from_values(instance, model, res.values)


def exact_pareto(instance: Instance, backend: Optional[SolverBackend] = None, warm_start: bool = False,
                 rng_seed: Seed = 0, time_limit: Optional[float] = None, formulation: str = "F2") -> Front:
    """Exact Pareto front by the epsilon-constraint method on the horizon.

    Starting from the full horizon, each level minimizes TEC under makespan
    at most K̂, then tightens K̂ to one below the makespan found. The loop
    ends on infeasibility or when K̂ drops under the makespan lower bound.
    With ``warm_start`` each solve is seeded by the split-greedy heuristic at
    that horizon. ``time_limit`` is an overall budget in seconds; running out
    returns the levels proved so far with ``truncated`` set.

    ``front.info["levels"]`` lists one dict per solve with the horizon, the
    status, the optimum and the warm-start objective (None when unused).
    """
    backend = backend or BuiltinBackend()
    rng = make_rng(rng_seed)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    k_low = lower_bound_makespan(instance)
    k = instance.n_slots
    found: list[FrontPoint] = []
    levels = []
    truncated = False
    while k >= k_low:
        warm = sgh(instance, k, rng) if warm_start else None
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        status, schedule = solve_level(instance, k, backend, formulation, warm, remaining)
        level = {"horizon": k, "status": status.value,
                 "warm_tec": None if warm is None else evaluate(instance, warm).tec, "tec": None}
        levels.append(level)
        if status is SolveStatus.TIME_LIMIT:
            truncated = True
            break
        if schedule is None:
            break
        obj = evaluate(instance, schedule)
        level["tec"] = obj.tec
        found.append(FrontPoint(obj, schedule))
        k = obj.makespan - 1
    front = pareto_filter(found, truncated=truncated)
    front.info.update(levels=levels, warm_start=warm_start)
    return front


class SearchSpaceTooLarge(ValueError):
    pass


def oracle_pareto(instance: Instance, max_jobs: int = 6, max_cells: int = 24, force: bool = False) -> Front:
    """Exact front by enumerating every feasible schedule.

    Jobs of equal length are interchangeable, so they are placed in
    increasing (machine, start) order only. Refuses instances with more than
    ``max_jobs`` jobs or ``max_cells`` machine-slots unless ``force`` is set.
    """
    if not force and (instance.n_jobs > max_jobs or instance.n_machines * instance.n_slots > max_cells):
        raise SearchSpaceTooLarge(
            f"N={instance.n_jobs}, M*K={instance.n_machines * instance.n_slots} exceeds the oracle limits")
    dd = derive(instance)
    p = instance.processing_times
    k = instance.n_slots
    order = sorted(range(instance.n_jobs), key=lambda j: (-p[j], j))
    options = {}
    for j in order:
        opts = []
        for h in range(instance.n_machines):
            for t in range(1, k - p[j] + 2):
                mask = ((1 << p[j]) - 1) << (t - 1)
                opts.append((h, t, mask, dd.location_cost(h, t, p[j])))
        options[j] = opts
    best: dict[int, tuple[float, dict]] = {}
    occupied = [0] * instance.n_machines
    placed: dict[int, tuple[int, int]] = {}

    def rec(n: int, lowest: int, span: int, tec: float) -> None:
        if n == len(order):
            cur = best.get(span)
            if cur is None or tec < cur[0]:
                best[span] = (tec, dict(placed))
            return
        j = order[n]
        same = n > 0 and p[order[n - 1]] == p[j]
        for idx, (h, t, mask, cost) in enumerate(options[j]):
            if same and idx <= lowest:
                continue
            if occupied[h] & mask:
                continue
            occupied[h] |= mask
            placed[j] = (h, t)
            rec(n + 1, idx, max(span, t + p[j] - 1), tec + cost)
            del placed[j]
            occupied[h] ^= mask

    rec(0, -1, 0, 0.0)
    points = []
    for span in sorted(best):
        _, starts = best[span]
        schedule = Schedule.from_starts(instance, starts)
        points.append(FrontPoint(evaluate(instance, schedule), schedule))
    return pareto_filter(points)


def min_tec_by_horizon(instance: Instance, **oracle_kwargs) -> dict[int, Optional[float]]:
    """Oracle minimum TEC for every horizon 1..K (None where nothing fits)."""
    front = oracle_pareto(instance, **oracle_kwargs)
    out: dict[int, Optional[float]] = {}
    for horizon in range(1, instance.n_slots + 1):
        fits = [pt.tec for pt in front if pt.makespan <= horizon]
        out[horizon] = min(fits) if fits else None
    return out


__all__ = ["Feasibility", "SearchSpaceTooLarge", "distinct_bound", "exact_pareto", "min_tec_by_horizon",
           "model_values", "necessary_feasibility", "oracle_pareto", "schedule_from_values", "schedule_from_y",
           "solve_level", "warm_start_from_schedule"]
