"""Solver backends for :class:`MilpModel`.

Every backend answers ``solve(model, warm_start=None, time_limit=None, gap=1e-4)``
with a :class:`SolveResult`.
"""

from __future__ import annotations

import enum
import math
import os
import subprocess
import tempfile
import time
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

from .model import MilpModel, Sense, export_lp

GAP = 1e-4


class SolveStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    TIME_LIMIT = "TimeLimit"


@dataclass
class SolveResult:
    status: SolveStatus
    values: Optional[list[float]] = None
    objective: Optional[float] = None
    nodes: int = 0


class SolverBackend(Protocol):
    def solve(self, model: MilpModel, warm_start: Optional[Sequence[float]] = None,
              time_limit: Optional[float] = None, gap: float = GAP) -> SolveResult:
        ...


class UnsupportedModel(ValueError):
    pass


class _Deadline(Exception):
    pass


class BuiltinBackend:
    """Exact depth-first branch and bound for 0/1 assignment models.

    The model must have the shape both formulations share: a minimized
    continuous variable defined by one equality row over binaries, every
    other continuous variable appearing only with a non-positive coefficient
    in ``<=`` rows or alone in an upper-bound row, and binaries covered by
    unit-coefficient equality rows (each binary in at most one) plus
    non-negative ``<=`` packing rows.

    Other continuous variables are fixed at their tightest upper bound, which
    is safe for this shape. The search fills equality rows in model order,
    choosing variables in increasing index order within a row, and bounds
    each node by the cheapest still-compatible candidates of every open row.
    It solves to gap 0.
    """

    def solve(self, model: MilpModel, warm_start: Optional[Sequence[float]] = None,
              time_limit: Optional[float] = None, gap: float = GAP) -> SolveResult:
        prob = _Compiled(model)
        deadline = None if time_limit is None else time.monotonic() + time_limit
        return prob.search(warm_start, deadline)


class _Compiled:
    def __init__(self, model: MilpModel):
        self.model = model
        n = model.n_variables
        binaries = [i for i, v in enumerate(model.variables) if v.binary]
        cont = [i for i, v in enumerate(model.variables) if not v.binary]
        if len(model.objective) != 1:
            raise UnsupportedModel("objective must be a single continuous variable")
        (obj_var, obj_coef), = model.objective.items()
        if model.variables[obj_var].binary or obj_coef <= 0:
            raise UnsupportedModel("objective must minimize a continuous variable")

        # settle continuous variables
        ub = {i: model.variables[i].ub for i in cont}
        cost = [0.0] * n
        defined = False
        packing: list[tuple[dict[int, float], float]] = []
        equal: list[tuple[list[int], int]] = []
        for r in model.rows:
            cont_terms = [(i, c) for i, c in r.coeffs if not model.variables[i].binary]
            if any(i == obj_var for i, _ in cont_terms):
                if r.sense is not Sense.EQ or len(cont_terms) != 1 or defined:
                    raise UnsupportedModel("objective variable must be defined by one equality row")
                c0 = cont_terms[0][1]
                for i, c in r.coeffs:
                    if i != obj_var:
                        cost[i] = -c / c0
                if abs(r.rhs) > 0:
                    raise UnsupportedModel("objective definition must have zero right-hand side")
                defined = True
            elif len(r.coeffs) == 1 and cont_terms and r.sense is Sense.LE and cont_terms[0][1] > 0:
                i, c = cont_terms[0]
                bound = r.rhs / c
                ub[i] = bound if ub[i] is None else min(ub[i], bound)
        if not defined:
            raise UnsupportedModel("objective variable has no defining row")
        self.cost = cost

        fixed_zero = {i for i in binaries if model.variables[i].ub == 0}
        self.empty_violated = False
        for r in model.rows:
            cont_terms = [(i, c) for i, c in r.coeffs if not model.variables[i].binary]
            bin_terms = [(i, c) for i, c in r.coeffs if model.variables[i].binary]
            if not r.coeffs and not r.satisfied({}):
                self.empty_violated = True
            if any(i == obj_var for i, _ in cont_terms) or not bin_terms:
                continue
            rhs = r.rhs
            if cont_terms:
                if r.sense is not Sense.LE or any(c > 0 for _, c in cont_terms):
                    raise UnsupportedModel(f"row {r.name} limits a continuous variable from below")
                for i, c in cont_terms:
                    if ub[i] is None:
                        raise UnsupportedModel(f"row {r.name} uses an unbounded continuous variable")
                    rhs -= c * ub[i]
                packing.append((dict(bin_terms), rhs))
                continue
            if r.sense is Sense.EQ:
                if any(c != 1 for _, c in bin_terms) or not float(r.rhs).is_integer():
                    raise UnsupportedModel(f"equality row {r.name} is not a cardinality row")
                equal.append(([i for i, _ in bin_terms], int(r.rhs)))
            elif r.sense is Sense.LE and all(c >= 0 for _, c in bin_terms):
                packing.append((dict(bin_terms), rhs))
            else:
                raise UnsupportedModel(f"row {r.name} is not a packing row")

        # a single variable whose coefficient exceeds the row capacity can never be 1
        for coeffs, rhs in packing:
            for i, c in coeffs.items():
                if c > rhs + 1e-9:
                    fixed_zero.add(i)
        seen: set[int] = set()
        for members, _ in equal:
            if seen.intersection(members):
                raise UnsupportedModel("a binary appears in two cardinality rows")
            seen.update(members)
        self.free_binaries = [i for i in binaries if i not in seen and i not in fixed_zero]
        if any(cost[i] < 0 for i in self.free_binaries):
            raise UnsupportedModel("unconstrained binary with negative cost")

        self.rows = [(sorted(i for i in members if i not in fixed_zero), need) for members, need in equal]
        self.packing = [(coeffs, rhs) for coeffs, rhs in packing]
        self.var_packs: dict[int, list[int]] = {}
        for pi, (coeffs, _) in enumerate(self.packing):
            for i in coeffs:
                self.var_packs.setdefault(i, []).append(pi)
        self.obj_var = obj_var
        self.obj_coef = obj_coef
        self.cont_ub = ub
        self.binaries = binaries

    def _complete(self, chosen: list[int]) -> list[float]:
        values = [0.0] * self.model.n_variables
        for i in chosen:
            values[i] = 1.0
        for i, u in self.cont_ub.items():
            values[i] = u if u is not None else 0.0
        e = sum(self.cost[i] for i in chosen)
        values[self.obj_var] = e
        # keep continuous makespan-like variables as tight as the solution allows
        for i in self.cont_ub:
            if i == self.obj_var:
                continue
            need = 0.0
            for r in self.model.rows:
                c = dict(r.coeffs).get(i)
                if c is not None and c < 0 and r.sense is Sense.LE:
                    rest = sum(cc * values[j] for j, cc in r.coeffs if j != i)
                    need = max(need, (rest - r.rhs) / -c)
            values[i] = max(need, self.model.variables[i].lb)
        return values

    def search(self, warm_start, deadline) -> SolveResult:
        best_cost = math.inf
        best: Optional[list[int]] = None
        if warm_start is not None and self.model.is_feasible(warm_start):
            best = [i for i in self.binaries if warm_start[i] > 0.5]
            best_cost = sum(self.cost[i] for i in best)
        slack = [rhs for _, rhs in self.packing]
        cost = self.cost
        rows = self.rows
        var_packs = self.var_packs
        packing = self.packing
        chosen: list[int] = []
        nodes = 0

        def fits(i: int) -> bool:
            return all(packing[p][0][i] <= slack[p] + 1e-9 for p in var_packs.get(i, ()))

        def bound(r: int) -> float:
            total = 0.0
            for members, need in rows[r:]:
                cands = sorted(cost[i] for i in members if fits(i))
                if len(cands) < need:
                    return math.inf
                total += sum(cands[:need])
            return total

        def dfs(r: int, pos: int, left: int, acc: float) -> None:
            nonlocal best_cost, best, nodes
            nodes += 1
            if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
                raise _Deadline
            if left == 0:
                r += 1
                pos = 0
                if r == len(rows):
                    if acc < best_cost - 1e-12:
                        best_cost = acc
                        best = list(chosen)
                    return
                left = rows[r][1]
                if left == 0:
                    dfs(r, 0, 0, acc)
                    return
            members = rows[r][0]
            rest = acc + bound(r + 1)
            if rest >= best_cost - 1e-12:
                return
            cands = [(cost[members[q]], q) for q in range(pos, len(members)) if fits(members[q])]
            if len(cands) < left:
                return
            cheapest = sorted(c for c, _ in cands)
            if rest + sum(cheapest[:left]) >= best_cost - 1e-12:
                return
            for n, (c, q) in enumerate(cands):
                if len(cands) - n < left:
                    break
                i = members[q]
                for p in var_packs.get(i, ()):
                    slack[p] -= packing[p][0][i]
                chosen.append(i)
                dfs(r, q + 1, left - 1, acc + c)
                chosen.pop()
                for p in var_packs.get(i, ()):
                    slack[p] += packing[p][0][i]

        status = SolveStatus.OPTIMAL
        if self.empty_violated:
            return SolveResult(SolveStatus.INFEASIBLE)
        if not rows:
            best, best_cost = [], 0.0
        else:
            try:
                dfs(-1, 0, 0, 0.0)
            except _Deadline:
                status = SolveStatus.TIME_LIMIT
        if best is None:
            return SolveResult(SolveStatus.INFEASIBLE if status is SolveStatus.OPTIMAL else status, nodes=nodes)
        values = self._complete(best)
        return SolveResult(status, values, self.model.objective_value(values), nodes)


class HighsBackend:
    """HiGHS through ``scipy.optimize.milp`` (needs the optional scipy dependency)."""

    def solve(self, model: MilpModel, warm_start: Optional[Sequence[float]] = None,
              time_limit: Optional[float] = None, gap: float = GAP) -> SolveResult:
        import numpy as np
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import lil_matrix

        n = model.n_variables
        c = np.zeros(n)
        for i, v in model.objective.items():
            c[i] = v
        a = lil_matrix((model.n_rows, n))
        lo = np.full(model.n_rows, -np.inf)
        hi = np.full(model.n_rows, np.inf)
        for r, row in enumerate(model.rows):
            for i, v in row.coeffs:
                a[r, i] = v
            if row.sense is not Sense.GE:
                hi[r] = row.rhs
            if row.sense is not Sense.LE:
                lo[r] = row.rhs
        lb = np.array([v.lb for v in model.variables])
        ub = np.array([np.inf if v.ub is None else v.ub for v in model.variables])
        integrality = np.array([1 if v.binary else 0 for v in model.variables])
        options = {"mip_rel_gap": gap}
        if time_limit is not None:
            options["time_limit"] = time_limit
        res = milp(c, constraints=LinearConstraint(a.tocsr(), lo, hi), bounds=Bounds(lb, ub),
                   integrality=integrality, options=options)
        if res.status == 0:
            return SolveResult(SolveStatus.OPTIMAL, list(res.x), float(res.fun))
        if res.status == 1:
            x = None if res.x is None else list(res.x)
            return SolveResult(SolveStatus.TIME_LIMIT, x, None if x is None else float(res.fun))
        if res.status == 2:
            return SolveResult(SolveStatus.INFEASIBLE)
        raise RuntimeError(f"HiGHS failed: {res.message}")


def parse_solution(text: str, model: MilpModel) -> SolveResult:
    """Read ``name value`` lines; an optional ``status <Optimal|Infeasible|TimeLimit>`` line sets the status."""
    status = SolveStatus.OPTIMAL
    named: dict[str, float] = {}
    for line in text.splitlines():
        toks = line.split()
        if not toks or toks[0].startswith("#"):
            continue
        if toks[0].lower() == "status":
            status = {s.value.lower(): s for s in SolveStatus}[toks[1].lower()]
            continue
        if len(toks) != 2:
            raise ValueError(f"bad solution line {line!r}")
        named[toks[0]] = float(toks[1])
    if status is SolveStatus.INFEASIBLE or not named:
        return SolveResult(SolveStatus.INFEASIBLE if status is not SolveStatus.TIME_LIMIT else status)
    values = model.values_from_names(named)
    return SolveResult(status, values, model.objective_value(values))


class ExternalBackend:
    """Run ``command + [lp_path, solution_path]`` and read the solution file it writes.

    Warm starts are written next to the LP file as ``<lp>.start`` in the
    solution format and passed as a third argument.
    """

    def __init__(self, command: Sequence[str] | str):
        self.command = [command] if isinstance(command, str) else list(command)

    def solve(self, model: MilpModel, warm_start: Optional[Sequence[float]] = None,
              time_limit: Optional[float] = None, gap: float = GAP) -> SolveResult:
        with tempfile.TemporaryDirectory() as tmp:
            lp = os.path.join(tmp, "model.lp")
            sol = os.path.join(tmp, "model.sol")
            with open(lp, "w") as fh:
                fh.write(export_lp(model))
            args = self.command + [lp, sol]
            if warm_start is not None:
                start = lp + ".start"
                with open(start, "w") as fh:
                    for v, x in zip(model.variables, warm_start):
                        if x:
                            fh.write(f"{v.name} {x!r}\n")
                args.append(start)
            env = dict(os.environ, TOUSCHED_GAP=repr(gap))
            try:
                subprocess.run(args, check=True, timeout=time_limit, env=env)
            except subprocess.TimeoutExpired:
                return SolveResult(SolveStatus.TIME_LIMIT)
            if not os.path.exists(sol):
                return SolveResult(SolveStatus.INFEASIBLE)
            with open(sol) as fh:
                return parse_solution(fh.read(), model)


def backend_from_spec(spec: str) -> SolverBackend:
    """``builtin``, ``highs`` or ``external:COMMAND`` (the command is split on whitespace)."""
    if spec == "builtin":
        return BuiltinBackend()
    if spec == "highs":
        return HighsBackend()
    if spec.startswith("external:") and spec[9:].strip():
        return ExternalBackend(spec[9:].split())
    raise ValueError(f"unknown backend {spec!r}")
