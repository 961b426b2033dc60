"""Per-machine ordered maps of scheduled jobs keyed by start slot."""

from __future__ import annotations

from typing import Iterator, NamedTuple, Optional

from sortedcontainers import SortedDict

from ..core import Instance, Schedule


class Entry(NamedTuple):
    job: int
    start: int
    end: int


class MachineTimeline:
    """Jobs on one machine, ordered by start slot.

    Insert, delete and neighbour queries are logarithmic in the number of
    scheduled jobs. Intervals must not overlap.
    """

    def __init__(self, entries: Optional[list[Entry]] = None):
        self._tree: SortedDict = SortedDict()
        for e in entries or ():
            self.insert(e.job, e.start, e.end)

    def __len__(self) -> int:
        return len(self._tree)

    def __iter__(self) -> Iterator[Entry]:
        return iter(self._tree.values())

    def insert(self, job: int, start: int, end: int) -> None:
        if end < start:
            raise ValueError("end before start")
        prev = self.job_at_or_before(start)
        nxt = self.successor(start)
        if start in self._tree or (prev is not None and prev.end >= start) or (nxt is not None and nxt.start <= end):
            raise ValueError(f"interval [{start}, {end}] overlaps an existing job")
        self._tree[start] = Entry(job, start, end)

    def remove(self, start: int) -> Entry:
        return self._tree.pop(start)

    def successor(self, t: int) -> Optional[Entry]:
        """First job whose start is strictly greater than ``t``."""
        i = self._tree.bisect_right(t)
        if i < len(self._tree):
            return self._tree.peekitem(i)[1]
        return None

    def predecessor(self, t: int) -> Optional[Entry]:
        """Last job whose start is strictly smaller than ``t``."""
        i = self._tree.bisect_left(t)
        if i > 0:
            return self._tree.peekitem(i - 1)[1]
        return None

    def job_at_or_before(self, t: int) -> Optional[Entry]:
        i = self._tree.bisect_right(t)
        if i > 0:
            return self._tree.peekitem(i - 1)[1]
        return None

    def job_at(self, t: int) -> Optional[Entry]:
        e = self.job_at_or_before(t)
        if e is not None and e.end >= t:
            return e
        return None

    def is_free(self, t: int) -> bool:
        return self.job_at(t) is None

    def free_slots(self, lo: int, hi: int) -> list[int]:
        out: list[int] = []
        t = lo
        e = self.job_at(t)
        if e is not None:
            t = e.end + 1
        while t <= hi:
            nxt = self.successor(t - 1)
            stop = hi if nxt is None else min(hi, nxt.start - 1)
            out.extend(range(t, stop + 1))
            if nxt is None:
                break
            t = nxt.end + 1
        return out


def timelines_from_schedule(instance: Instance, schedule: Schedule) -> list[MachineTimeline]:
    lines = [MachineTimeline() for _ in range(instance.n_machines)]
    for a in schedule.assignments:
        lines[a.machine].insert(a.job, a.start, a.end)
    return lines
