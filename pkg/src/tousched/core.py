"""Instance and schedule model for parallel-machine scheduling under time-of-use costs.

Conventions used across the package:

* jobs and machines are 0-based indices;
* time slots are 1-based (slot ``t`` costs ``slot_costs[t - 1]``);
* TEC comparisons use an absolute tolerance of :data:`TEC_TOL`.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

TEC_TOL = 1e-9


class InstanceError(ValueError):
    """Raised when instance data violates the model invariants."""


class InvalidScheduleError(ValueError):
    """Raised when a schedule cannot be evaluated (overlap, missing job, ...)."""

    def __init__(self, reason: "InvalidReason", detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)


@dataclass(frozen=True)
class Instance:
    processing_times: tuple[int, ...]
    consumption_rates: tuple[float, ...]
    slot_costs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "processing_times", tuple(int(p) for p in self.processing_times))
        object.__setattr__(self, "consumption_rates", tuple(float(u) for u in self.consumption_rates))
        object.__setattr__(self, "slot_costs", tuple(float(c) for c in self.slot_costs))
        if not self.processing_times or not self.consumption_rates or not self.slot_costs:
            raise InstanceError("an instance needs at least one job, one machine and one slot")
        k = self.n_slots
        for j, p in enumerate(self.processing_times):
            if not 1 <= p <= k:
                raise InstanceError(f"job {j}: processing time {p} outside [1, {k}]")
        if any(u < 0 or math.isnan(u) for u in self.consumption_rates):
            raise InstanceError("consumption rates must be non-negative")
        if any(c < 0 or math.isnan(c) for c in self.slot_costs):
            raise InstanceError("slot costs must be non-negative")

    @property
    def n_jobs(self) -> int:
        return len(self.processing_times)

    @property
    def n_machines(self) -> int:
        return len(self.consumption_rates)

    @property
    def n_slots(self) -> int:
        return len(self.slot_costs)

    def restricted(self, horizon: int) -> "Instance":
        """Same jobs and machines, slots ``horizon+1..K`` dropped.

        Raises InstanceError when some job no longer fits.
        """
        _check_horizon(self, horizon)
        return Instance(self.processing_times, self.consumption_rates, self.slot_costs[:horizon])


class Assignment(NamedTuple):
    job: int
    machine: int
    slots: tuple[int, ...]

    @property
    def start(self) -> int:
        return self.slots[0]

    @property
    def end(self) -> int:
        return self.slots[-1]

    def is_contiguous(self) -> bool:
        return self.slots[-1] - self.slots[0] + 1 == len(self.slots)


@dataclass(frozen=True)
class Schedule:
    """Job assignments, kept sorted by job index."""

    assignments: tuple[Assignment, ...]

    def __post_init__(self):
        normalized = tuple(
            sorted(
                (Assignment(int(a.job), int(a.machine), tuple(sorted(int(t) for t in a.slots)))
                 for a in self.assignments),
                key=lambda a: a.job,
            )
        )
        object.__setattr__(self, "assignments", normalized)

    @classmethod
    def from_starts(cls, instance: Instance, starts: Mapping[int, tuple[int, int]]) -> "Schedule":
        """Build a non-preemptive schedule from ``{job: (machine, start)}``."""
        return cls(tuple(
            Assignment(j, h, tuple(range(s, s + instance.processing_times[j])))
            for j, (h, s) in starts.items()
        ))

    def starts(self) -> dict[int, tuple[int, int]]:
        return {a.job: (a.machine, a.start) for a in self.assignments}

    def by_machine(self) -> dict[int, list[Assignment]]:
        out: dict[int, list[Assignment]] = defaultdict(list)
        for a in self.assignments:
            out[a.machine].append(a)
        for lst in out.values():
            lst.sort(key=lambda a: a.start)
        return dict(out)

    def __len__(self) -> int:
        return len(self.assignments)


class Objectives(NamedTuple):
    makespan: int
    tec: float


class ScheduleTag(enum.Enum):
    FEASIBLE = "feasible"
    SPLIT = "split"
    PREEMPTIVE_NON_SPLIT = "preemptive-non-split"
    INVALID = "invalid"


class InvalidReason(enum.Enum):
    OVERLAP = "overlap"
    MISSING_JOB = "missing-job"
    DUPLICATE_JOB = "duplicate-job"
    UNKNOWN_JOB = "unknown-job"
    OUT_OF_RANGE = "out-of-range"
    WRONG_CARDINALITY = "wrong-cardinality"


class ScheduleClass(NamedTuple):
    tag: ScheduleTag
    reason: Optional[InvalidReason] = None

    @property
    def feasible(self) -> bool:
        return self.tag is ScheduleTag.FEASIBLE


def _invalid_reason(instance: Instance, schedule: Schedule) -> Optional[tuple[InvalidReason, str]]:
    seen: set[int] = set()
    for a in schedule.assignments:
        if not 0 <= a.job < instance.n_jobs:
            return InvalidReason.UNKNOWN_JOB, f"job {a.job}"
        if a.job in seen:
            return InvalidReason.DUPLICATE_JOB, f"job {a.job}"
        seen.add(a.job)
    if len(seen) != instance.n_jobs:
        missing = sorted(set(range(instance.n_jobs)) - seen)
        return InvalidReason.MISSING_JOB, f"jobs {missing}"
    for a in schedule.assignments:
        if not 0 <= a.machine < instance.n_machines:
            return InvalidReason.OUT_OF_RANGE, f"job {a.job} on machine {a.machine}"
        if any(not 1 <= t <= instance.n_slots for t in a.slots):
            return InvalidReason.OUT_OF_RANGE, f"job {a.job} slots {a.slots}"
        if len(set(a.slots)) != instance.processing_times[a.job]:
            return InvalidReason.WRONG_CARDINALITY, f"job {a.job}"
    owner: dict[tuple[int, int], int] = {}
    for a in schedule.assignments:
        for t in a.slots:
            key = (a.machine, t)
            if key in owner:
                return InvalidReason.OVERLAP, f"jobs {owner[key]} and {a.job} at machine {a.machine} slot {t}"
            owner[key] = a.job
    return None


def evaluate(instance: Instance, schedule: Schedule) -> Objectives:
    """Makespan and total energy cost of a total, non-overlapping schedule.

    Split and preemptive schedules are accepted; they are evaluated on the
    slots they occupy.
    """
    bad = _invalid_reason(instance, schedule)
    if bad is not None:
        raise InvalidScheduleError(*bad)
    c, u = instance.slot_costs, instance.consumption_rates
    makespan = max(a.end for a in schedule.assignments)
    tec = math.fsum(u[a.machine] * math.fsum(c[t - 1] for t in a.slots) for a in schedule.assignments)
    return Objectives(makespan, tec)


def classify(instance: Instance, schedule: Schedule) -> ScheduleClass:
    bad = _invalid_reason(instance, schedule)
    if bad is not None:
        return ScheduleClass(ScheduleTag.INVALID, bad[0])
    broken = [a for a in schedule.assignments if not a.is_contiguous()]
    if not broken:
        return ScheduleClass(ScheduleTag.FEASIBLE)
    occupied: dict[int, set[int]] = defaultdict(set)
    for a in schedule.assignments:
        occupied[a.machine].update(a.slots)
    for a in broken:
        own = set(a.slots)
        busy = occupied[a.machine]
        for t0, t1 in zip(a.slots, a.slots[1:]):
            # every slot inside a gap must belong to some other job
            if any(t not in busy or t in own for t in range(t0 + 1, t1)):
                return ScheduleClass(ScheduleTag.PREEMPTIVE_NON_SPLIT)
    return ScheduleClass(ScheduleTag.SPLIT)


@dataclass(frozen=True)
class DerivedData:
    horizon: int
    distinct_ptimes: tuple[int, ...]
    jobs_by_ptime: Mapping[int, tuple[int, ...]]
    window_cost: Mapping[int, tuple[float, ...]]
    cum_price: tuple[tuple[float, ...], ...]
    p_max: int
    k_lower: int
    omega: int

    def b(self, d: int, t: int) -> float:
        """Cost of the ``d`` slots starting at ``t`` (1-based)."""
        return self.window_cost[d][t - 1]

    def location_cost(self, machine: int, start: int, length: int) -> float:
        mu = self.cum_price[machine]
        return mu[start + length - 1] - mu[start - 1]


def _check_horizon(instance: Instance, horizon: int) -> None:
    if not 1 <= horizon <= instance.n_slots:
        raise InstanceError(f"horizon {horizon} outside [1, {instance.n_slots}]")


def distinct_ptimes(instance: Instance) -> tuple[int, ...]:
    return tuple(sorted(set(instance.processing_times)))


def jobs_by_ptime(instance: Instance) -> dict[int, tuple[int, ...]]:
    groups: dict[int, list[int]] = defaultdict(list)
    for j, p in enumerate(instance.processing_times):
        groups[p].append(j)
    return {d: tuple(js) for d, js in sorted(groups.items())}


def lower_bound_makespan(instance: Instance) -> int:
    return max(sum(instance.processing_times) // instance.n_machines, max(instance.processing_times))


def derive(instance: Instance, horizon: Optional[int] = None) -> DerivedData:
    k = instance.n_slots if horizon is None else horizon
    _check_horizon(instance, k)
    costs = instance.slot_costs[:k]
    prefix = [0.0]
    for c in costs:
        prefix.append(prefix[-1] + c)
    ptimes = distinct_ptimes(instance)
    window = {d: tuple(math.fsum(costs[t:t + d]) for t in range(k - d + 1)) for d in ptimes}
    cum = tuple(tuple(u * s for s in prefix) for u in instance.consumption_rates)
    return DerivedData(
        horizon=k,
        distinct_ptimes=ptimes,
        jobs_by_ptime=jobs_by_ptime(instance),
        window_cost=window,
        cum_price=cum,
        p_max=max(ptimes),
        k_lower=lower_bound_makespan(instance),
        omega=min(instance.n_jobs, k),
    )


# -- Pareto fronts ----------------------------------------------------------


@dataclass(frozen=True)
class FrontPoint:
    objectives: Objectives
    schedule: Optional[Schedule] = None

    @property
    def makespan(self) -> int:
        return self.objectives.makespan

    @property
    def tec(self) -> float:
        return self.objectives.tec


@dataclass(frozen=True)
class Front:
    """Mutually non-dominated points sorted by increasing makespan."""

    points: tuple[FrontPoint, ...] = ()
    truncated: bool = False
    info: Mapping[str, object] = field(default_factory=dict, compare=False)

    def objectives(self) -> list[Objectives]:
        return [p.objectives for p in self.points]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def dominates(a: Sequence[float], b: Sequence[float], tol: float = TEC_TOL) -> bool:
    """Weak Pareto dominance for minimization (``a`` no worse anywhere)."""
    return a[0] <= b[0] and a[1] <= b[1] + tol


def pareto_filter(points: Iterable[Objectives | FrontPoint | tuple], *, truncated: bool = False) -> Front:
    """Keep the non-dominated points, collapsing duplicates.

    Accepts bare objective pairs or :class:`FrontPoint` objects; for duplicates
    the first occurrence (and its schedule) is kept.
    """
    items: list[FrontPoint] = []
    for p in points:
        if isinstance(p, FrontPoint):
            items.append(p)
        else:
            items.append(FrontPoint(Objectives(int(p[0]), float(p[1]))))
    order = sorted(range(len(items)), key=lambda i: (items[i].makespan, items[i].tec, i))
    kept: list[FrontPoint] = []
    for i in order:
        p = items[i]
        if kept and kept[-1].tec <= p.tec + TEC_TOL:
            continue
        kept.append(p)
    return Front(tuple(kept), truncated=truncated)
