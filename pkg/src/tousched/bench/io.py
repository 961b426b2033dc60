"""Plain-text formats for instances, fronts and schedules.

Instance files are whitespace separated with ``#`` comments::

    N M K
    p_1 ... p_N
    u_1 ... u_M
    c_1 ... c_K

Front files are CSV with header ``makespan,tec``. A schedule sidecar holds
one block per front point: a ``point MAKESPAN TEC`` line followed by
``job machine start`` lines (jobs and machines from 0, slots from 1).
"""

from __future__ import annotations

import csv
import io
import os
from typing import Iterable, Sequence

from ..core import Front, Instance, InstanceError, Schedule


class FormatError(ValueError):
    def __init__(self, path, line: int, token: str, message: str):
        super().__init__(f"{path}:{line}: {message} (token {token!r})")
        self.path = path
        self.line = line
        self.token = token


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if toks:
            out.append((n, toks))
    return out


def _numbers(path, line: int, toks: list[str], kind, count: int, what: str) -> list:
    if len(toks) != count:
        raise FormatError(path, line, toks[min(len(toks), count) - 1] if toks else "",
                          f"expected {count} {what}, found {len(toks)}")
    out = []
    for t in toks:
        try:
            out.append(kind(t))
        except ValueError:
            raise FormatError(path, line, t, f"not a valid {what[:-1] if what.endswith('s') else what}") from None
    return out


def parse_instance(text: str, path: str = "<string>") -> Instance:
    lines = _content_lines(text)
    if len(lines) != 4:
        line = lines[4][0] if len(lines) > 4 else (lines[-1][0] if lines else 1)
        raise FormatError(path, line, "", f"expected 4 content lines, found {len(lines)}")
    (l0, head), (l1, ps), (l2, us), (l3, cs) = lines
    n, m, k = _numbers(path, l0, head, int, 3, "integers")
    p = _numbers(path, l1, ps, int, n, "processing times")
    u = _numbers(path, l2, us, float, m, "rates")
    c = _numbers(path, l3, cs, float, k, "costs")
    for j, pj in enumerate(p):
        if not 1 <= pj <= k:
            raise FormatError(path, l1, ps[j], f"processing time must lie in [1, {k}]")
    for line, vals, toks in ((l2, u, us), (l3, c, cs)):
        for v, t in zip(vals, toks):
            if not v >= 0:
                raise FormatError(path, line, t, "value must be non-negative")
    try:
        return Instance(tuple(p), tuple(u), tuple(c))
    except InstanceError as exc:
        raise FormatError(path, l0, head[0], str(exc)) from None


def _real(x: float) -> str:
    return repr(float(x))


def format_instance(instance: Instance) -> str:
    return "\n".join([
        f"{instance.n_jobs} {instance.n_machines} {instance.n_slots}",
        " ".join(str(p) for p in instance.processing_times),
        " ".join(_real(u) for u in instance.consumption_rates),
        " ".join(_real(c) for c in instance.slot_costs),
    ]) + "\n"


def read_instance(path) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read(), str(path))


def write_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_instance(instance))


def format_front(points: Iterable) -> str:
    buf = io.StringIO()
    buf.write("makespan,tec\n")
    for p in sorted((int(q[0]), float(q[1])) for q in _pairs(points)):
        buf.write(f"{p[0]},{p[1]:.6f}\n")
    return buf.getvalue()


def _pairs(points) -> list[tuple[int, float]]:
    if isinstance(points, Front):
        return [(pt.makespan, pt.tec) for pt in points]
    return [(q.makespan, q.tec) if hasattr(q, "makespan") else (q[0], q[1]) for q in points]


def write_front(points, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_front(points))


def read_front(path) -> list[tuple[int, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [r.strip() for r in rows[0]] != ["makespan", "tec"]:
        raise FormatError(path, 1, ",".join(rows[0]) if rows else "", "missing header makespan,tec")
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise FormatError(path, n, ",".join(row), "expected two columns")
        try:
            out.append((int(row[0]), float(row[1])))
        except ValueError:
            raise FormatError(path, n, ",".join(row), "not a number") from None
    return out


def sidecar_path(front_path) -> str:
    root, _ = os.path.splitext(str(front_path))
    return root + ".sched"


def format_schedules(front: Front) -> str:
    out = []
    for pt in sorted(front, key=lambda q: q.makespan):
        if pt.schedule is None:
            continue
        out.append(f"point {pt.makespan} {pt.tec:.6f}")
        for j, (h, t) in sorted(pt.schedule.starts().items()):
            out.append(f"{j} {h} {t}")
    return "\n".join(out) + ("\n" if out else "")


def read_schedules(instance: Instance, path) -> list[tuple[tuple[int, float], Schedule]]:
    """Parse a sidecar into ``((makespan, tec) as written, schedule)`` pairs."""
    blocks: list[tuple[tuple[int, float], dict]] = []
    with open(path) as fh:
        for n, raw in enumerate(fh, start=1):
            toks = raw.split()
            if not toks:
                continue
            if toks[0] == "point":
                if len(toks) != 3:
                    raise FormatError(path, n, raw.strip(), "expected 'point MAKESPAN TEC'")
                blocks.append(((int(toks[1]), float(toks[2])), {}))
            elif len(toks) == 3 and blocks:
                j, h, t = (int(x) for x in toks)
                blocks[-1][1][j] = (h, t)
            else:
                raise FormatError(path, n, raw.strip(), "expected 'job machine start'")
    return [(obj, Schedule.from_starts(instance, starts)) for obj, starts in blocks]


def write_schedules(front: Front, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_schedules(front))


def read_points(path) -> list[tuple[float, float]]:
    """Query points: CSV or whitespace pairs, optional header line."""
    out = []
    with open(path) as fh:
        for n, raw in enumerate(fh, start=1):
            toks = raw.split("#", 1)[0].replace(",", " ").split()
            if not toks:
                continue
            try:
                x, y = (float(t) for t in toks)
            except ValueError:
                if n == 1 and not out:
                    continue
                raise FormatError(path, n, raw.strip(), "expected two numbers") from None
            out.append((x, y))
    return out


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence], delimiter: str = ",") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else (f"{v:.9g}" if isinstance(v, float) else v) for v in r])
