"""Indexed linear models for the two MILP formulations, with LP-format export and import."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Optional

from ..core import Instance, derive, distinct_ptimes, jobs_by_ptime


class Sense(enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass(frozen=True)
class Variable:
    name: str
    binary: bool
    lb: float = 0.0
    ub: Optional[float] = None


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple[tuple[int, float], ...]
    sense: Sense
    rhs: float

    def activity(self, values) -> float:
        return sum(c * values[i] for i, c in self.coeffs)

    def satisfied(self, values, tol: float = 1e-6) -> bool:
        a = self.activity(values)
        if self.sense is Sense.LE:
            return a <= self.rhs + tol
        if self.sense is Sense.GE:
            return a >= self.rhs - tol
        return abs(a - self.rhs) <= tol


@dataclass
class MilpModel:
    """Minimization model over binary and continuous variables.

    ``objective`` maps variable index to coefficient. ``meta`` carries the
    formulation tag, the horizon and the reduced flag, plus whatever a
    builder needs to map solutions back (``keys`` lists the index tuple of
    each binary variable).
    """

    variables: list[Variable] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    objective: dict[int, float] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    _by_name: dict[str, int] = field(default_factory=dict, repr=False)

    def add_var(self, name: str, binary: bool, lb: float = 0.0, ub: Optional[float] = None) -> int:
        if name in self._by_name:
            raise ValueError(f"duplicate variable {name}")
        self._by_name[name] = len(self.variables)
        self.variables.append(Variable(name, binary, lb, ub))
        return len(self.variables) - 1

    def set_bounds(self, index: int, lb: float, ub: Optional[float]) -> None:
        v = self.variables[index]
        self.variables[index] = Variable(v.name, v.binary, lb, ub)

    def add_row(self, name: str, coeffs, sense: Sense, rhs: float) -> None:
        merged: dict[int, float] = {}
        for i, c in coeffs:
            merged[i] = merged.get(i, 0.0) + c
        self.rows.append(Row(name, tuple((i, c) for i, c in merged.items() if c != 0), sense, float(rhs)))

    def index(self, name: str) -> int:
        return self._by_name[name]

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def objective_value(self, values) -> float:
        return sum(c * values[i] for i, c in self.objective.items())

    def is_feasible(self, values, tol: float = 1e-6) -> bool:
        for i, v in enumerate(self.variables):
            x = values[i]
            if x < v.lb - tol or (v.ub is not None and x > v.ub + tol):
                return False
            if v.binary and min(abs(x), abs(x - 1)) > tol:
                return False
        return all(r.satisfied(values, tol) for r in self.rows)

    def values_from_names(self, named: dict[str, float]) -> list[float]:
        """Dense value vector; names unknown to the model are ignored, missing ones are 0."""
        out = [0.0] * self.n_variables
        for name, value in named.items():
            i = self._by_name.get(name)
            if i is not None:
                out[i] = float(value)
        return out


def _add_common(model: MilpModel, horizon: int) -> tuple[int, int]:
    cmax = model.add_var("Cmax", False, 0.0, None)
    e = model.add_var("E", False, 0.0, None)
    model.objective = {e: 1.0}
    return cmax, e


def build_f1(instance: Instance, horizon: Optional[int] = None, reduced: bool = False) -> MilpModel:
    """Job-indexed model: x_j_h_t = 1 when job j starts at slot t on machine h.

    Starts that would overrun the horizon keep their variable but get upper
    bound 0, so the variable count stays N*M*K + 2.
    """
    k = instance.n_slots if horizon is None else horizon
    dd = derive(instance, k)
    p = instance.processing_times
    model = MilpModel(meta={"formulation": "F1", "horizon": k, "reduced": reduced,
                            "trivially_infeasible": k < dd.p_max})
    keys = {}
    x = {}
    for j in range(instance.n_jobs):
        for h in range(instance.n_machines):
            for t in range(1, k + 1):
                i = model.add_var(f"x_{j}_{h}_{t}", True, 0.0, 1.0 if t <= k - p[j] + 1 else 0.0)
                x[j, h, t] = i
                keys[i] = ("x", j, h, t)
    model.meta["keys"] = keys
    cmax, e = _add_common(model, k)

    terms = [(e, 1.0)]
    for (j, h, t), i in x.items():
        if t <= k - p[j] + 1:
            terms.append((i, -dd.location_cost(h, t, p[j])))
    model.add_row("tec", terms, Sense.EQ, 0.0)
    for j in range(instance.n_jobs):
        model.add_row(f"assign_{j}", [(x[j, h, t], 1.0) for h in range(instance.n_machines)
                                      for t in range(1, k + 1)], Sense.EQ, 1.0)
    for h in range(instance.n_machines):
        for t in range(1, k + 1):
            model.add_row(f"busy_{h}_{t}", [(x[j, h, s], 1.0) for j in range(instance.n_jobs)
                                            for s in range(max(1, t - p[j] + 1), t + 1)], Sense.LE, 1.0)
    if not reduced:
        for j in range(instance.n_jobs):
            terms = [(x[j, h, t], float(t + p[j] - 1)) for h in range(instance.n_machines)
                     for t in range(1, k + 1)]
            model.add_row(f"done_{j}", terms + [(cmax, -1.0)], Sense.LE, 0.0)
        model.add_row("horizon", [(cmax, 1.0)], Sense.LE, float(k))
    return model


def build_f2(instance: Instance, horizon: Optional[int] = None, reduced: bool = False) -> MilpModel:
    """Length-indexed model: y_d_h_t = 1 when some job of length d starts at slot t on machine h.

    Only windows that fit inside the horizon get a variable in the cost,
    cardinality and completion rows; the rest are bounded to 0.
    """
    k = instance.n_slots if horizon is None else horizon
    dd = derive(instance, k)
    lengths = sorted(distinct_ptimes(instance), reverse=True)
    groups = jobs_by_ptime(instance)
    model = MilpModel(meta={"formulation": "F2", "horizon": k, "reduced": reduced,
                            "trivially_infeasible": k < dd.p_max})
    keys = {}
    y = {}
    for d in lengths:
        for h in range(instance.n_machines):
            for t in range(1, k + 1):
                i = model.add_var(f"y_{d}_{h}_{t}", True, 0.0, 1.0 if t <= k - d + 1 else 0.0)
                y[d, h, t] = i
                keys[i] = ("y", d, h, t)
    model.meta["keys"] = keys
    cmax, e = _add_common(model, k)

    terms = [(e, 1.0)]
    for (d, h, t), i in y.items():
        if t <= k - d + 1:
            terms.append((i, -dd.location_cost(h, t, d)))
    model.add_row("tec", terms, Sense.EQ, 0.0)
    for d in lengths:
        model.add_row(f"count_{d}", [(y[d, h, t], 1.0) for h in range(instance.n_machines)
                                     for t in range(1, k - d + 2)], Sense.EQ, float(len(groups[d])))
    for h in range(instance.n_machines):
        for t in range(1, k + 1):
            model.add_row(f"busy_{h}_{t}", [(y[d, h, s], 1.0) for d in lengths
                                            for s in range(max(1, t - d + 1), t + 1)], Sense.LE, 1.0)
    if not reduced:
        for d in lengths:
            for h in range(instance.n_machines):
                for t in range(1, k - d + 2):
                    model.add_row(f"done_{d}_{h}_{t}", [(y[d, h, t], float(t + d - 1)), (cmax, -1.0)],
                                  Sense.LE, 0.0)
        model.add_row("horizon", [(cmax, 1.0)], Sense.LE, float(k))
    return model


def _num(c: float) -> str:
    return str(int(c)) if float(c).is_integer() else repr(float(c))


def _expr(model: MilpModel, coeffs) -> str:
    parts = []
    for n, (i, c) in enumerate(coeffs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = model.variables[i].name if mag == 1 else f"{_num(mag)} {model.variables[i].name}"
        if n == 0:
            parts.append(term if sign == "+" else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    if not parts:
        return "0 " + model.variables[0].name
    lines = [" ".join(parts[i:i + 8]) for i in range(0, len(parts), 8)]
    return "\n   ".join(lines)


def export_lp(model: MilpModel) -> str:
    """LP-format text of the model. Identical models give identical text."""
    m = model.meta
    out = [f"\\ {m.get('formulation', 'model')} horizon={m.get('horizon')} reduced={int(bool(m.get('reduced')))}",
           "Minimize", " obj: " + _expr(model, sorted(model.objective.items())), "Subject To"]
    for r in model.rows:
        out.append(f" {r.name}: {_expr(model, r.coeffs)} {r.sense.value} {_num(r.rhs)}")
    out.append("Bounds")
    for v in model.variables:
        if v.binary and v.ub == 0:
            out.append(f" {v.name} = 0")
        elif not v.binary:
            out.append(f" {_num(v.lb)} <= {v.name}" + ("" if v.ub is None else f" <= {_num(v.ub)}"))
    out.append("Binary")
    for v in model.variables:
        if v.binary:
            out.append(f" {v.name}")
    out.append("End")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")


def _parse_expr(text: str) -> list[tuple[str, float]]:
    terms = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None:
            raise ValueError(f"cannot parse LP expression near {text[pos:pos + 20]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        terms.append((m.group(3), sign * coef))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return terms


def read_lp(text: str) -> MilpModel:
    """Parse the LP subset written by :func:`export_lp` back into a model."""
    section = None
    header = {}
    stmts: dict[str, list[str]] = {"Minimize": [], "Subject To": [], "Bounds": [], "Binary": []}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            for tok in line[1:].split():
                if "=" in tok:
                    a, b = tok.split("=", 1)
                    header[a] = b
                else:
                    header.setdefault("formulation", tok)
            continue
        if line in stmts or line == "End":
            section = line
            continue
        if section is None or section == "End":
            raise ValueError(f"unexpected line outside a section: {line!r}")
        if raw.startswith("   ") and stmts[section]:
            stmts[section][-1] += " " + line
        else:
            stmts[section].append(line)

    binaries = [s.strip() for s in stmts["Binary"]]
    bounds: dict[str, tuple[float, Optional[float]]] = {}
    continuous: list[str] = []
    for s in stmts["Bounds"]:
        toks = s.split()
        if len(toks) == 3 and toks[1] == "=":
            bounds[toks[0]] = (0.0, float(toks[2]))
        elif len(toks) in (3, 5) and toks[1] == "<=":
            bounds[toks[2]] = (float(toks[0]), float(toks[4]) if len(toks) == 5 else None)
            continuous.append(toks[2])
        else:
            raise ValueError(f"unsupported bound {s!r}")

    model = MilpModel(meta={"formulation": header.get("formulation"),
                            "horizon": int(header["horizon"]) if "horizon" in header else None,
                            "reduced": header.get("reduced") == "1"})
    for name in binaries:
        lb, ub = bounds.get(name, (0.0, 1.0))
        model.add_var(name, True, lb, ub)
    for name in continuous:
        lb, ub = bounds[name]
        model.add_var(name, False, lb, ub)

    def resolve(terms):
        return [(model.index(n), c) for n, c in terms]

    (obj,) = stmts["Minimize"]
    model.objective = dict(resolve(_parse_expr(obj.split(":", 1)[1])))
    for s in stmts["Subject To"]:
        name, body = s.split(":", 1)
        for sense in (Sense.LE, Sense.GE, Sense.EQ):
            if f" {sense.value} " in body:
                lhs, rhs = body.rsplit(f" {sense.value} ", 1)
                model.add_row(name.strip(), resolve(_parse_expr(lhs)), sense, float(rhs))
                break
        else:
            raise ValueError(f"row without sense: {s!r}")
    return model
