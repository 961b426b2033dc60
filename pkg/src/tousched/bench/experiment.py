"""Repeated solver runs and metric tables."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..core import Front, FrontPoint, Instance, evaluate
from ..exact import backend_from_spec, exact_pareto, oracle_pareto
from ..heuristics import ch_j, sgh, sgs, sgs_es
from .. import metrics
from .io import sidecar_path, write_front, write_rows, write_schedules

ALGORITHMS = ("sgh", "sgs", "sgs-es", "ch", "exact", "oracle")
SINGLE_RUN = ("exact", "oracle")


@dataclass(frozen=True)
class RunConfig:
    algorithm: str
    seed: int = 0
    runs: int = 1
    time_limit: Optional[float] = None
    warm_start: bool = False
    backend: str = "builtin"
    horizon: Optional[int] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be positive")


@dataclass
class ExperimentResult:
    fronts: list[Front]
    seeds: list[int]
    timings: list[float]
    paths: list[str] = field(default_factory=list)


def _solve(config: RunConfig, instance: Instance, seed: int) -> Front:
    algo = config.algorithm
    if algo == "sgh":
        schedule = sgh(instance, instance.n_slots, seed)
        return Front(() if schedule is None else (FrontPoint(evaluate(instance, schedule), schedule),))
    if algo == "sgs":
        return sgs(instance, seed)
    if algo == "sgs-es":
        return sgs_es(instance, seed)
    if algo == "ch":
        return ch_j(instance, seed)
    if algo == "exact":
        return exact_pareto(instance, backend_from_spec(config.backend), warm_start=config.warm_start,
                            rng_seed=seed, time_limit=config.time_limit)
    return oracle_pareto(instance, force=True)


def run_experiment(config: RunConfig, instance: Instance, out_dir: Optional[str] = None) -> ExperimentResult:
    """Run the configured algorithm with seeds ``seed, seed + 1, ...``.

    Exact and oracle runs happen once. With ``out_dir`` each run writes
    ``<algo>_run<i>.csv`` plus a schedule sidecar, and the tab-separated
    ``summary.tsv`` gets one row per run (kept out of ``*.csv`` globs).
    """
    if config.horizon is not None:
        instance = instance.restricted(config.horizon)
    runs = 1 if config.algorithm in SINGLE_RUN else config.runs
    result = ExperimentResult([], [], [])
    for r in range(runs):
        seed = config.seed + r
        t0 = time.perf_counter()
        front = _solve(config, instance, seed)
        result.timings.append(time.perf_counter() - t0)
        result.fronts.append(front)
        result.seeds.append(seed)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        rows = []
        for r, (front, seed, secs) in enumerate(zip(result.fronts, result.seeds, result.timings)):
            path = os.path.join(out_dir, f"{config.algorithm}_run{r}.csv")
            write_front(front, path)
            write_schedules(front, sidecar_path(path))
            result.paths.append(path)
            rows.append([config.algorithm, r, seed, len(front), int(front.truncated),
                         int(bool(front.info.get("warm_start"))), secs])
        write_rows(os.path.join(out_dir, "summary.tsv"),
                   ["algorithm", "run", "seed", "points", "truncated", "warm_start", "seconds"], rows, "\t")
    return result


METRIC_HEADER = ("front",) + metrics.MetricReport.COLUMNS


def emit_metrics(fronts: Sequence, reference=None, ref_point: Optional[Sequence[float]] = None,
                 labels: Optional[Sequence[str]] = None, flags: Optional[Sequence] = None,
                 n_jobs: Optional[int] = None) -> list[list]:
    """One metric row per front plus a final ``average`` row.

    ``reference`` defaults to the non-dominated union of the fronts and
    ``ref_point`` to one past the worst coordinates of all fronts. ``flags``
    optionally gives per-front feasibility annotations for fm1 and fm2.
    Averages skip metrics that are undefined for some front.
    """
    if not fronts:
        raise ValueError("no fronts given")
    if reference is None:
        reference = metrics.reference_front(fronts)
    if ref_point is None:
        ref_point = metrics.default_reference_point(list(fronts) + [reference])
    labels = list(labels) if labels is not None else [f"run{i}" for i in range(len(fronts))]
    rows = []
    for i, front in enumerate(fronts):
        rep = metrics.report(front, reference, ref_point, flags=None if flags is None else flags[i], n_jobs=n_jobs)
        rows.append([labels[i]] + [getattr(rep, c) for c in metrics.MetricReport.COLUMNS])
    avg = ["average"]
    for col in range(1, len(METRIC_HEADER)):
        vals = [r[col] for r in rows if r[col] is not None]
        avg.append(sum(vals) / len(vals) if vals else None)
    rows.append(avg)
    return rows
