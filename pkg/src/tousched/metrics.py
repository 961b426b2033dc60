"""Quality metrics for approximated Pareto fronts of two minimized objectives.

Fronts may be given as :class:`~tousched.core.Front` objects or as plain
sequences of ``(makespan, tec)`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .core import Front, FrontPoint, Instance, Schedule, ScheduleTag, classify, pareto_filter

Point = tuple[float, float]
FrontLike = Union[Front, Iterable[Union[FrontPoint, Sequence[float]]]]

NORMALIZATIONS = ("none", "reference-extremes")


def as_points(front: FrontLike) -> list[Point]:
    out = []
    for p in front:
        if isinstance(p, FrontPoint):
            out.append((float(p.makespan), float(p.tec)))
        else:
            out.append((float(p[0]), float(p[1])))
    return out


def d_r(front: FrontLike, reference: FrontLike, normalization: str = "none") -> float:
    """Mean distance from each reference point to its nearest front point."""
    ref = as_points(reference)
    pts = as_points(front)
    if not ref:
        raise ValueError("reference front is empty")
    if not pts:
        raise ValueError("front is empty")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    if normalization == "reference-extremes":
        scale = []
        for axis in (0, 1):
            lo = min(p[axis] for p in ref)
            hi = max(p[axis] for p in ref)
            scale.append((lo, hi - lo if hi > lo else 1.0))

        def norm(p):
            return tuple((p[a] - scale[a][0]) / scale[a][1] for a in (0, 1))

        ref = [norm(p) for p in ref]
        pts = [norm(p) for p in pts]
    return math.fsum(min(math.dist(r, p) for p in pts) for r in ref) / len(ref)


def _key(p: Point) -> tuple[float, float]:
    return (p[0], round(p[1], 9))


def purity(front: FrontLike, reference: FrontLike) -> float:
    """Share of the front's points that belong to the reference front."""
    pts = as_points(front)
    if not pts:
        raise ValueError("front is empty")
    ref = {_key(p) for p in as_points(reference)}
    return sum(_key(p) in ref for p in pts) / len(pts)


def hypervolume(front: FrontLike, reference_point: Sequence[float]) -> float:
    """Area dominated by the front and bounded by ``reference_point``.

    Points beyond the reference point in either coordinate add nothing.
    """
    rx, ry = float(reference_point[0]), float(reference_point[1])
    pts = sorted(p for p in as_points(front) if p[0] < rx and p[1] < ry)
    area = 0.0
    ceiling = ry
    for x, y in pts:
        if y < ceiling:
            area += (rx - x) * (ceiling - y)
            ceiling = y
    return area


def spacing(front: FrontLike) -> Optional[float]:
    """Spread of nearest-neighbour Manhattan distances; None for fewer than two points.

    Points are ordered by makespan; the mean distance is taken over the first
    N-1 of them and the squared deviations are averaged over all N.
    """
    pts = sorted(as_points(front))
    n = len(pts)
    if n < 2:
        return None
    delta = [min(abs(a[0] - b[0]) + abs(a[1] - b[1]) for k, b in enumerate(pts) if k != i)
             for i, a in enumerate(pts)]
    mean = math.fsum(delta[:n - 1]) / (n - 1)
    return math.sqrt(math.fsum((d - mean) ** 2 for d in delta) / n)


def spread(front: FrontLike, reference: Optional[FrontLike] = None) -> Optional[float]:
    """Uniformity and extent of the front; None for fewer than two points.

    With a reference front, the boundary terms are the distances from the
    reference's minimum-makespan and minimum-TEC points to the front's first
    and last points. Without one they are zero.
    """
    pts = sorted(as_points(front))
    n = len(pts)
    if n < 2:
        return None
    gaps = [math.dist(pts[i], pts[i + 1]) for i in range(n - 1)]
    mean = math.fsum(gaps) / len(gaps)
    d_f = d_l = 0.0
    if reference is not None:
        ref = as_points(reference)
        if ref:
            d_f = math.dist(min(ref), pts[0])
            d_l = math.dist(min(ref, key=lambda p: (p[1], p[0])), pts[-1])
    denom = d_f + d_l + (n - 1) * mean
    if denom == 0:
        return 0.0
    return (d_f + d_l + math.fsum(abs(g - mean) for g in gaps)) / denom


@dataclass(frozen=True)
class PointStatus:
    """Feasibility annotation of one front point."""

    feasible: bool
    unscheduled: int = 0


def annotate(instance: Instance, schedule: Optional[Schedule]) -> PointStatus:
    """Feasibility of a (possibly partial) schedule; missing jobs count as unscheduled."""
    if schedule is None:
        return PointStatus(False, instance.n_jobs)
    missing = instance.n_jobs - len({a.job for a in schedule.assignments})
    ok = missing == 0 and classify(instance, schedule).tag is ScheduleTag.FEASIBLE
    return PointStatus(ok, missing)


def fm1(flags: Sequence[PointStatus | bool]) -> float:
    """Fraction of front points that are infeasible."""
    if not flags:
        raise ValueError("front is empty")
    return sum(not _feasible(f) for f in flags) / len(flags)


def fm2(flags: Sequence[PointStatus], n_jobs: int) -> float:
    """Average fraction of jobs left unscheduled over the infeasible points; 0 when all are feasible."""
    if not flags:
        raise ValueError("front is empty")
    bad = [f for f in flags if not _feasible(f)]
    if not bad:
        return 0.0
    return sum(f.unscheduled for f in bad) / (len(bad) * n_jobs)


def _feasible(f: PointStatus | bool) -> bool:
    return f if isinstance(f, bool) else f.feasible


def eaf(fronts: Sequence[FrontLike], queries: Iterable[Sequence[float]]) -> list[float]:
    """For each query point, the fraction of runs whose front weakly dominates it."""
    runs = [as_points(f) for f in fronts]
    if not runs:
        raise ValueError("need at least one run")
    out = []
    for q in queries:
        qx, qy = float(q[0]), float(q[1])
        hit = sum(any(x <= qx and y <= qy for x, y in run) for run in runs)
        out.append(hit / len(runs))
    return out


def reference_front(fronts: Iterable[FrontLike]) -> Front:
    """Non-dominated points of the union of several fronts."""
    points = []
    for f in fronts:
        points.extend(f.points if isinstance(f, Front) else f)
    return pareto_filter(points)


@dataclass(frozen=True)
class MetricReport:
    hypervolume: Optional[float] = None
    purity: Optional[float] = None
    d_r: Optional[float] = None
    spacing: Optional[float] = None
    spread: Optional[float] = None
    fm1: Optional[float] = None
    fm2: Optional[float] = None
    reference_id: str = ""
    reference_point: Optional[tuple[float, float]] = None

    COLUMNS = ("hypervolume", "purity", "d_r", "spacing", "spread", "fm1", "fm2")


def report(front: FrontLike, reference: FrontLike, reference_point: Optional[Sequence[float]] = None,
           reference_id: str = "", flags: Optional[Sequence[PointStatus]] = None,
           n_jobs: Optional[int] = None) -> MetricReport:
    """All metrics of one front against a reference; a metric that does not apply is None.

    Hypervolume needs ``reference_point``. Without ``flags`` every point is
    taken as feasible.
    """
    pts = as_points(front)
    ref = as_points(reference)
    return MetricReport(
        hypervolume=None if reference_point is None else hypervolume(pts, reference_point),
        purity=purity(pts, ref) if pts else None,
        d_r=d_r(pts, ref) if pts and ref else None,
        spacing=spacing(pts),
        spread=spread(pts, ref or None),
        fm1=fm1(flags) if flags else (0.0 if pts else None),
        fm2=fm2(flags, n_jobs) if flags and n_jobs else (None if flags else (0.0 if pts else None)),
        reference_id=reference_id,
        reference_point=None if reference_point is None else (float(reference_point[0]), float(reference_point[1])),
    )


def default_reference_point(fronts: Iterable[FrontLike]) -> Optional[tuple[float, float]]:
    """One past the worst coordinates seen in any front, or None if all are empty."""
    pts = [p for f in fronts for p in as_points(f)]
    if not pts:
        return None
    return (max(p[0] for p in pts) + 1.0, max(p[1] for p in pts) + 1.0)
