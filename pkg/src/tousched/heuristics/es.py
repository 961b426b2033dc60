"""Exchange search: first-improvement local search over EPS moves."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

from ..core import TEC_TOL, Instance, Schedule, ScheduleTag, classify, distinct_ptimes
from .eps import Board, EpsIndex, EpsKind, EpsRecord, _apply, _build_index, _plan, _update, touched_range

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MoveEvent:
    """Accepted move, passed to the ``on_move`` hook of :func:`exchange_search`."""

    eps_i: EpsRecord
    eps_j: EpsRecord
    delta: float
    schedule: Schedule
    index: EpsIndex


class SweepLimitReached(RuntimeWarning):
    pass


def exchange_search(instance: Instance, schedule: Schedule, horizon: Optional[int] = None, *,
                    max_sweeps: Optional[int] = None,
                    on_move: Optional[Callable[[MoveEvent], None]] = None) -> Schedule:
    """Improve the TEC of a feasible schedule without increasing its makespan.

    Window lengths are visited longest first. For every single-job window the
    idle windows of the same length are scanned in (machine, start) order and
    the first improving move is applied, after which the index is refreshed
    around both rewritten windows. Sweeps repeat until one finds nothing.

    ``max_sweeps`` defaults to ``10 * horizon``; reaching it logs a warning
    and returns the current schedule.
    """
    k = instance.n_slots if horizon is None else horizon
    if classify(instance, schedule).tag is not ScheduleTag.FEASIBLE:
        raise ValueError("exchange search needs a feasible schedule")
    board = Board(instance, schedule, k)
    index = _build_index(board)
    p_max = max(instance.processing_times)
    lengths = sorted(distinct_ptimes(instance), reverse=True)
    cap = 10 * k if max_sweeps is None else max_sweeps
    makespan = board.makespan()

    for _ in range(cap):
        improved = False
        for p in lengths:
            j_table = index.table(EpsKind.J, p)
            i_table = index.table(EpsKind.I, p)
            i_keys = sorted(i_table)
            for key_j in sorted(j_table):
                eps_j = j_table.get(key_j)
                if eps_j is None:
                    continue
                for key_i in i_keys:
                    eps_i = i_table.get(key_i)
                    if eps_i is None or eps_i.overlaps(eps_j):
                        continue
                    plan = _plan(board, eps_i, eps_j, makespan)
                    if plan is None or plan.delta >= -TEC_TOL:
                        continue
                    _apply(board, plan)
                    makespan = board.makespan()
                    _update(board, index, eps_j.machine, *touched_range(k, p_max, eps_j.start, eps_j.end))
                    _update(board, index, eps_i.machine, *touched_range(k, p_max, eps_i.start, eps_i.end))
                    improved = True
                    if on_move is not None:
                        on_move(MoveEvent(eps_i, eps_j, plan.delta, board.to_schedule(), index))
                    break
        if not improved:
            return board.to_schedule()
    log.warning("exchange search stopped after %d sweeps without converging", cap)
    return board.to_schedule()
