"""Exchangeable period sequences (EPS): discovery, indexing and EPS moves.

An EPS is a window of adjacent slots on one machine that cuts no job: every
job touching the window lies entirely inside it. Two kinds drive the
exchange search:

* kind ``J``: the window is exactly the location of a single job;
* kind ``I``: the window holds at least one idle slot.

Records cache the cost statistics used by the move pruning bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from ..core import TEC_TOL, Instance, Schedule, ScheduleTag, classify, distinct_ptimes
from .convert import compact_in_start_order
from .sgh import cheapest_locations

IDLE = -1
OUTSIDE = -2


class EpsKind(enum.Enum):
    J = "J"
    I = "I"


@dataclass(frozen=True)
class EpsRecord:
    machine: int
    start: int
    length: int
    kind: EpsKind
    member_jobs: tuple[int, ...]
    assigned_count: int
    sorted_prefix: tuple[float, ...]
    window_sum: float
    sub_tec: float

    @property
    def end(self) -> int:
        return self.start + self.length - 1

    def overlaps(self, other: "EpsRecord") -> bool:
        return self.machine == other.machine and self.start <= other.end and other.start <= self.end


@dataclass
class EpsIndex:
    """EPS records of both kinds, addressed by ``horizon * machine + start``.

    Mutable: :func:`update_eps` edits it in place.
    """

    horizon: int
    by_length_J: dict[int, dict[int, EpsRecord]] = field(default_factory=dict)
    by_length_I: dict[int, dict[int, EpsRecord]] = field(default_factory=dict)

    def key(self, machine: int, start: int) -> int:
        return self.horizon * machine + start

    def table(self, kind: EpsKind, length: int) -> dict[int, EpsRecord]:
        tables = self.by_length_J if kind is EpsKind.J else self.by_length_I
        return tables.setdefault(length, {})

    def add(self, rec: EpsRecord) -> None:
        self.table(rec.kind, rec.length)[self.key(rec.machine, rec.start)] = rec

    def get(self, kind: EpsKind, length: int, machine: int, start: int) -> Optional[EpsRecord]:
        return self.table(kind, length).get(self.key(machine, start))

    def records(self, kind: EpsKind, length: int) -> list[EpsRecord]:
        t = self.table(kind, length)
        return [t[k] for k in sorted(t)]

    def snapshot(self) -> dict:
        """Plain comparable view (empty tables dropped)."""
        return {
            kind: {p: dict(sorted(t.items())) for p, t in sorted(tables.items()) if t}
            for kind, tables in (("J", self.by_length_J), ("I", self.by_length_I))
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsIndex):
            return NotImplemented
        return self.horizon == other.horizon and self.snapshot() == other.snapshot()


class Board:
    """Mutable slot-ownership grid for a non-preemptive schedule."""

    def __init__(self, instance: Instance, schedule: Schedule, horizon: int):
        self.instance = instance
        self.horizon = horizon
        self.owner = [[OUTSIDE] + [IDLE] * horizon + [OUTSIDE] for _ in range(instance.n_machines)]
        self.where: dict[int, tuple[int, int]] = {}
        for a in schedule.assignments:
            if a.end > horizon:
                raise ValueError(f"job {a.job} ends after the horizon {horizon}")
            self.place(a.job, a.machine, a.start)

    def place(self, job: int, machine: int, start: int) -> None:
        row = self.owner[machine]
        for t in range(start, start + self.instance.processing_times[job]):
            if row[t] != IDLE:
                raise ValueError(f"slot {t} on machine {machine} is not idle")
            row[t] = job
        self.where[job] = (machine, start)

    def lift(self, job: int) -> None:
        machine, start = self.where.pop(job)
        row = self.owner[machine]
        for t in range(start, start + self.instance.processing_times[job]):
            row[t] = IDLE

    def makespan(self) -> int:
        p = self.instance.processing_times
        return max(s + p[j] - 1 for j, (_, s) in self.where.items())

    def to_schedule(self) -> Schedule:
        return Schedule.from_starts(self.instance, self.where)


def _window_record(board: Board, machine: int, start: int, length: int) -> Optional[EpsRecord]:
    row = board.owner[machine]
    end = start + length - 1
    first, last = row[start], row[end]
    if first >= 0 and row[start - 1] == first:
        return None
    if last >= 0 and row[end + 1] == last:
        return None
    inst = board.instance
    u = inst.consumption_rates[machine]
    costs = inst.slot_costs[start - 1:end]
    members: list[int] = []
    idle = 0
    busy_cost = 0.0
    for t in range(start, end + 1):
        j = row[t]
        if j == IDLE:
            idle += 1
            continue
        busy_cost += inst.slot_costs[t - 1]
        if not members or members[-1] != j:
            members.append(j)
    if idle:
        kind = EpsKind.I
    elif len(members) == 1:
        kind = EpsKind.J
    else:
        return None
    prefix = [0.0]
    for c in sorted(costs):
        prefix.append(prefix[-1] + u * c)
    return EpsRecord(
        machine=machine,
        start=start,
        length=length,
        kind=kind,
        member_jobs=tuple(members),
        assigned_count=length - idle,
        sorted_prefix=tuple(prefix),
        window_sum=u * sum(costs),
        sub_tec=u * busy_cost,
    )


def _find(board: Board, machines: Iterable[int], lo: int, hi: int,
          ptimes: Iterable[int]) -> tuple[list[EpsRecord], list[EpsRecord]]:
    js: list[EpsRecord] = []
    idles: list[EpsRecord] = []
    lo, hi = max(1, lo), min(board.horizon, hi)
    machines = tuple(machines)
    for p in ptimes:
        for h in machines:
            for s in range(lo, hi - p + 2):
                rec = _window_record(board, h, s, p)
                if rec is not None:
                    (js if rec.kind is EpsKind.J else idles).append(rec)
    return js, idles


def _horizon_for(instance: Instance, schedule: Schedule, horizon: Optional[int]) -> int:
    return instance.n_slots if horizon is None else horizon


def find_eps(instance: Instance, schedule: Schedule, machines: Optional[Iterable[int]] = None,
             slot_range: Optional[tuple[int, int]] = None, ptimes: Optional[Iterable[int]] = None,
             horizon: Optional[int] = None) -> tuple[list[EpsRecord], list[EpsRecord]]:
    """EPS records of kind J and kind I with windows inside ``slot_range``.

    ``slot_range`` is an inclusive ``(lo, hi)`` pair of 1-based slots and
    defaults to the whole horizon. Windows holding several jobs and no idle
    slot are EPS but belong to neither kind and are omitted.
    """
    k = _horizon_for(instance, schedule, horizon)
    board = Board(instance, schedule, k)
    machines = range(instance.n_machines) if machines is None else machines
    lo, hi = slot_range if slot_range is not None else (1, k)
    ptimes = distinct_ptimes(instance) if ptimes is None else ptimes
    return _find(board, machines, lo, hi, ptimes)


def _build_index(board: Board) -> EpsIndex:
    index = EpsIndex(board.horizon)
    ptimes = distinct_ptimes(board.instance)
    for p in ptimes:
        index.table(EpsKind.J, p)
        index.table(EpsKind.I, p)
    js, idles = _find(board, range(board.instance.n_machines), 1, board.horizon, ptimes)
    for rec in js + idles:
        index.add(rec)
    return index


def build_index(instance: Instance, schedule: Schedule, horizon: Optional[int] = None) -> EpsIndex:
    return _build_index(Board(instance, schedule, _horizon_for(instance, schedule, horizon)))


def touched_range(horizon: int, p_max: int, start: int, end: int) -> tuple[int, int]:
    """Slots whose EPS status may change when ``start..end`` is rewritten."""
    return max(1, start - p_max + 1), min(horizon, end + p_max - 1)


def _update(board: Board, index: EpsIndex, machine: int, lo: int, hi: int) -> None:
    lo, hi = max(1, lo), min(board.horizon, hi)
    ptimes = distinct_ptimes(board.instance)
    for p in ptimes:
        for kind in EpsKind:
            table = index.table(kind, p)
            for s in range(lo, hi - p + 2):
                table.pop(index.key(machine, s), None)
    js, idles = _find(board, (machine,), lo, hi, ptimes)
    for rec in js + idles:
        index.add(rec)


def update_eps(instance: Instance, schedule: Schedule, index: EpsIndex, machine: int,
               touched: tuple[int, int]) -> EpsIndex:
    """Refresh ``index`` in place for windows of ``machine`` lying in ``touched``.

    Entries whose windows fit inside the inclusive range are dropped and
    rediscovered from ``schedule``. The range must contain every slot whose
    EPS membership could have changed, i.e. the rewritten window widened by
    ``p_max - 1`` on both sides (see :func:`touched_range`).
    """
    board = Board(instance, schedule, index.horizon)
    _update(board, index, machine, *touched)
    return index


# -- EPS moves ----------------------------------------------------------------


def move_is_pruned(eps_i: EpsRecord, eps_j: EpsRecord) -> bool:
    """Pruning test: the move cannot lower TEC when this returns True.

    After the move the single job of ``eps_j`` fills the idle window at its
    full cost, while the jobs leaving ``eps_i`` cost at least the cheapest
    ``assigned_count`` slots of the vacated window.
    """
    current = eps_i.sub_tec + eps_j.sub_tec
    best_case = eps_i.window_sum + eps_j.sorted_prefix[eps_i.assigned_count]
    return current <= best_case + TEC_TOL


def rearrange(instance: Instance, jobs: Iterable[int], start: int, length: int) -> dict[int, int]:
    """Pack ``jobs`` into the empty window ``start..start+length-1``.

    Longest jobs first, each on the cheapest free (possibly split) location
    inside the window, earliest start on ties; the packing is then compacted
    into contiguous locations. Returns ``{job: new_start}``.
    """
    p = instance.processing_times
    costs = instance.slot_costs
    free = list(range(start, start + length))
    firsts = []
    for j in sorted(jobs, key=lambda j: (-p[j], j)):
        _, locs = cheapest_locations(free, costs, p[j], 1.0)
        if not locs:
            raise ValueError("jobs do not fit in the window")
        loc = locs[0]
        taken = set(loc)
        free = [t for t in free if t not in taken]
        firsts.append((j, loc[0], p[j]))
    return dict(compact_in_start_order(firsts))


class _Plan(NamedTuple):
    delta: float
    job: int
    eps_i: EpsRecord
    eps_j: EpsRecord
    new_starts: dict[int, int]


def _plan(board: Board, eps_i: EpsRecord, eps_j: EpsRecord, makespan: int) -> Optional[_Plan]:
    """Evaluate the EPS move; None when pruned or when it would raise the makespan."""
    if move_is_pruned(eps_i, eps_j) or eps_i.end > makespan:
        return None
    inst = board.instance
    (job,) = eps_j.member_jobs
    new_starts = rearrange(inst, eps_i.member_jobs, eps_j.start, eps_j.length)
    p = inst.processing_times
    u_j = inst.consumption_rates[eps_j.machine]
    moved_cost = u_j * sum(inst.slot_costs[t - 1] for j, s in new_starts.items() for t in range(s, s + p[j]))
    delta = eps_i.window_sum + moved_cost - eps_i.sub_tec - eps_j.sub_tec
    return _Plan(delta, job, eps_i, eps_j, new_starts)


def _apply(board: Board, plan: _Plan) -> None:
    for j in plan.eps_i.member_jobs:
        board.lift(j)
    board.lift(plan.job)
    board.place(plan.job, plan.eps_i.machine, plan.eps_i.start)
    for j, s in plan.new_starts.items():
        board.place(j, plan.eps_j.machine, s)


def _check_pair(eps_i: EpsRecord, eps_j: EpsRecord) -> None:
    if eps_i.kind is not EpsKind.I or eps_j.kind is not EpsKind.J:
        raise ValueError("an EPS move pairs a kind-I window with a kind-J window")
    if eps_i.length != eps_j.length:
        raise ValueError("EPS windows must have the same length")
    if eps_i.overlaps(eps_j):
        raise ValueError("EPS windows on the same machine must be disjoint")


def evaluate_eps_move(instance: Instance, schedule: Schedule, eps_i: EpsRecord, eps_j: EpsRecord,
                      horizon: Optional[int] = None) -> tuple[Schedule, float]:
    """Outcome of the EPS move between an idle window and a single-job window.

    Returns ``(schedule, 0.0)`` unchanged when the pruning bound rules the
    move out or when it would increase the makespan; otherwise the moved
    schedule and its TEC change (negative when improving).
    """
    _check_pair(eps_i, eps_j)
    if classify(instance, schedule).tag is not ScheduleTag.FEASIBLE:
        raise ValueError("EPS moves need a feasible schedule")
    board = Board(instance, schedule, _horizon_for(instance, schedule, horizon))
    for rec in (eps_i, eps_j):
        fresh = _window_record(board, rec.machine, rec.start, rec.length)
        if fresh != rec:
            raise ValueError(f"record at machine {rec.machine} slot {rec.start} is stale")
    plan = _plan(board, eps_i, eps_j, board.makespan())
    if plan is None:
        return schedule, 0.0
    _apply(board, plan)
    return board.to_schedule(), plan.delta
