"""Repair of split-schedules into equivalent non-preemptive schedules."""

from __future__ import annotations

from ..core import Assignment, Instance, Schedule, ScheduleTag, classify


class ConversionError(ValueError):
    pass


def compact_in_start_order(jobs: list[tuple[int, int, int]]) -> list[tuple[int, int]]:
    """Re-time ``(job, start, length)`` triples on a single machine.

    Jobs are taken by increasing start; each one begins at the first slot that
    is both free and not earlier than its original start. Returns
    ``(job, new_start)`` pairs in the same order.
    """
    out = []
    k = 1
    for job, start, length in sorted(jobs, key=lambda x: (x[1], x[0])):
        s = max(k, start)
        out.append((job, s))
        k = s + length
    return out


def convert_schedule(instance: Instance, schedule: Schedule) -> Schedule:
    """Turn a split-schedule into a feasible one with the same slot usage.

    Feasible input is returned unchanged. Preemptive schedules whose gaps
    contain idle slots, and invalid schedules, are rejected.
    """
    cls = classify(instance, schedule)
    if cls.tag is ScheduleTag.FEASIBLE:
        return schedule
    if cls.tag is not ScheduleTag.SPLIT:
        raise ConversionError(f"cannot convert a {cls.tag.value} schedule"
                              + (f" ({cls.reason.value})" if cls.reason else ""))
    p = instance.processing_times
    out: list[Assignment] = []
    for machine, assigned in schedule.by_machine().items():
        for job, s in compact_in_start_order([(a.job, a.start, p[a.job]) for a in assigned]):
            out.append(Assignment(job, machine, tuple(range(s, s + p[job]))))
    return Schedule(tuple(out))
