import random
import sys
import textwrap

import pytest
from hypothesis import given, settings, strategies as st

from support import SIX_PAIRS, THREE_JOBS, brute_front, random_instance
from tousched import Instance, Schedule, ScheduleTag, classify, evaluate, lower_bound_makespan
from tousched.exact import (BuiltinBackend, ExternalBackend, Feasibility, HighsBackend, MilpModel,
                            SearchSpaceTooLarge, Sense, SolveStatus, UnsupportedModel, build_f1, build_f2,
                            distinct_bound, exact_pareto, export_lp, min_tec_by_horizon, model_values,
                            necessary_feasibility, oracle_pareto, parse_solution, read_lp, schedule_from_y,
                            solve_level, warm_start_from_schedule)
from tousched.heuristics import sgh


def objs(front):
    return [(o.makespan, o.tec) for o in front.objectives()]


class TestModels:
    def test_f1_counts(self):
        inst = Instance((1,) * 6, (1.0,) * 3, (1.0,) * 50)
        m = build_f1(inst, 50)
        assert m.n_variables == 902
        assert m.n_rows == 164

    def test_f2_equal_times_is_smaller(self):
        inst = Instance((2,) * 5, (1.0, 1.0), (1.0,) * 7)
        assert build_f2(inst, 7).n_variables == 2 * 7 + 2
        assert build_f1(inst, 7).n_variables == 5 * 2 * 7 + 2

    def test_distinct_times_counts_coincide(self):
        inst = Instance((1, 2, 3), (1.0, 2.0), (1.0,) * 6)
        assert build_f1(inst, 6).n_variables == build_f2(inst, 6).n_variables

    def test_f2_row_families(self):
        inst = Instance((1, 2, 2), (1.0, 1.0), (1.0,) * 5)
        m = build_f2(inst, 5)
        lengths, machines, k = (1, 2), 2, 5
        completion = machines * sum(k - d + 1 for d in lengths)
        assert m.n_rows == 1 + len(lengths) + machines * k + completion + 1
        # the prose count multiplies the completion family by |P| once more
        prose = len(lengths) + machines * k + len(lengths) * completion + 2
        assert prose != m.n_rows

    def test_reduced_models_never_mention_makespan(self):
        inst = Instance((1, 2), (1.0,), (1.0,) * 4)
        for build in (build_f1, build_f2):
            m = build(inst, 4, reduced=True)
            cmax = m.index("Cmax")
            assert all(cmax not in dict(r.coeffs) for r in m.rows)
            assert m.objective == {m.index("E"): 1.0}
            assert m.meta["reduced"]

    def test_single_job_has_one_pattern(self):
        inst = Instance((3,), (1.0,), (1.0, 2.0, 3.0))
        m = build_f1(inst, 3)
        open_vars = [v for v in m.variables if v.binary and v.ub != 0]
        assert [v.name for v in open_vars] == ["x_0_0_1"]

    def test_trivially_infeasible_flag(self):
        inst = Instance((3,), (1.0,), (1.0,) * 4)
        assert build_f2(inst, 2).meta["trivially_infeasible"]
        assert BuiltinBackend().solve(build_f2(inst, 2, reduced=True)).status is SolveStatus.INFEASIBLE


class TestLpFormat:
    def test_single_binary_declaration(self):
        inst = Instance((1,), (1.0,), (2.0,))
        text = export_lp(build_f2(inst, 1, reduced=True))
        binary = text.split("Binary\n", 1)[1].split("End")[0]
        assert binary.split() == ["y_1_0_1"]

    def test_deterministic_bytes(self):
        assert export_lp(build_f2(THREE_JOBS)) == export_lp(build_f2(THREE_JOBS))
        assert export_lp(build_f1(SIX_PAIRS, 7, True)) == export_lp(build_f1(SIX_PAIRS, 7, True))

    def test_round_trip(self):
        for model in (build_f2(THREE_JOBS), build_f1(THREE_JOBS, 8, True), build_f2(SIX_PAIRS, 7, True)):
            back = read_lp(export_lp(model))
            assert export_lp(back) == export_lp(model)
            direct = BuiltinBackend().solve(model)
            again = BuiltinBackend().solve(back)
            assert again.objective == pytest.approx(direct.objective, abs=1e-9)

    def test_fractional_coefficients_survive(self):
        inst = Instance((1, 2), (0.5, 1.25), (0.1, 2.7, 3.3))
        model = build_f2(inst)
        back = read_lp(export_lp(model))
        assert [r.coeffs for r in back.rows] == [r.coeffs for r in model.rows]

    def test_bad_lp_rejected(self):
        with pytest.raises(ValueError):
            read_lp("Minimize\n obj: E\nSubject To\n r: E ?? 1\nBounds\n 0 <= E\nBinary\nEnd\n")


class TestBackends:
    def test_builtin_matches_brute_force_per_horizon(self):
        table = min_tec_by_horizon(THREE_JOBS)
        for k in range(1, THREE_JOBS.n_slots + 1):
            for formulation in ("F1", "F2"):
                status, s = solve_level(THREE_JOBS, k, formulation=formulation)
                if table[k] is None:
                    assert status is SolveStatus.INFEASIBLE
                else:
                    assert evaluate(THREE_JOBS, s).tec == pytest.approx(table[k])

    def test_full_model_agrees_with_reduced(self):
        for k in (6, 7, 10):
            full = BuiltinBackend().solve(build_f2(THREE_JOBS, k))
            red = BuiltinBackend().solve(build_f2(THREE_JOBS, k, reduced=True))
            assert full.objective == red.objective
            assert build_f2(THREE_JOBS, k).is_feasible(full.values)

    def test_highs_agrees(self):
        pytest.importorskip("scipy")
        for k in (6, 7, 10):
            for build in (build_f1, build_f2):
                model = build(THREE_JOBS, k, reduced=True)
                h = HighsBackend().solve(model, gap=0.0)
                b = BuiltinBackend().solve(model)
                assert h.status is SolveStatus.OPTIMAL
                assert h.objective == pytest.approx(b.objective, abs=1e-6)

    def test_warm_start_is_used_as_incumbent(self):
        model = build_f2(SIX_PAIRS, 7, reduced=True)
        warm = sgh(SIX_PAIRS, 7, 0)
        values = model_values(model, SIX_PAIRS, warm)
        assert model.is_feasible(values)
        assert model.objective_value(values) == evaluate(SIX_PAIRS, warm).tec
        res = BuiltinBackend().solve(model, warm_start=values)
        assert res.objective == 72

    def test_time_limit(self):
        inst = Instance((1,) * 6, (1.0, 1.5, 2.0), tuple(float((7 * t) % 11) for t in range(1, 25)))
        res = BuiltinBackend().solve(build_f1(inst, 24, reduced=True), time_limit=1e-9)
        assert res.status is SolveStatus.TIME_LIMIT

    def test_unsupported_shape(self):
        m = MilpModel()
        a = m.add_var("a", True, 0, 1)
        e = m.add_var("E", False, 0, None)
        m.objective = {e: 1.0}
        m.add_row("tec", [(e, 1.0), (a, -1.0)], Sense.EQ, 0)
        m.add_row("odd", [(a, 2.0)], Sense.EQ, 1)
        with pytest.raises(UnsupportedModel):
            BuiltinBackend().solve(m)

    def test_parse_solution(self):
        model = build_f2(Instance((1,), (1.0,), (3.0, 1.0)), reduced=True)
        res = parse_solution("# from somewhere\nstatus Optimal\ny_1_0_2 1\nE 1\nunrelated 7\n", model)
        assert res.status is SolveStatus.OPTIMAL and res.objective == 1
        assert parse_solution("status Infeasible\n", model).status is SolveStatus.INFEASIBLE
        with pytest.raises(ValueError):
            parse_solution("y_1_0_2 1 2\n", model)

    def test_external_backend_round_trip(self, tmp_path):
        script = tmp_path / "solver.py"
        script.write_text(textwrap.dedent("""
            import sys
            from tousched.exact import BuiltinBackend, SolveStatus, read_lp
            model = read_lp(open(sys.argv[1]).read())
            res = BuiltinBackend().solve(model)
            with open(sys.argv[2], "w") as fh:
                fh.write(f"status {res.status.value}\\n")
                for v, x in zip(model.variables, res.values or []):
                    fh.write(f"{v.name} {x!r}\\n")
        """))
        backend = ExternalBackend([sys.executable, str(script)])
        assert objs(exact_pareto(THREE_JOBS, backend)) == [(6, 24), (7, 23)]


class TestFeasibilityCheck:
    def test_distinct_bound(self):
        assert distinct_bound(10, 200) == 62

    def test_capacity_boundary(self):
        assert necessary_feasibility(Instance((2, 2), (1.0,), (1.0,) * 4)) is Feasibility.PASS
        assert necessary_feasibility(Instance((2, 3), (1.0,), (1.0,) * 4)) is Feasibility.FAIL_CAPACITY

    def test_distinct_failure(self):
        # distinct lengths 1, 2, 3 need 6 slots; one machine with 5 slots fails the distinct test first
        inst = Instance((1, 2, 3), (1.0, 1.0, 1.0), (1.0,) * 3)
        assert distinct_bound(3, 3) == 3
        inst = Instance((1, 2, 3), (1.0,), (1.0,) * 5)
        assert necessary_feasibility(inst) is Feasibility.FAIL_CAPACITY
        inst = Instance((1, 2, 3, 4), (1.0,) * 2, (1.0,) * 4)
        assert distinct_bound(2, 4) == 3
        assert necessary_feasibility(inst) is Feasibility.FAIL_CAPACITY
        inst = Instance((1, 2, 3), (1.0,) * 10, (1.0,) * 3)
        assert necessary_feasibility(inst) is Feasibility.PASS

    def test_pass_is_not_sufficient(self):
        inst = Instance((2, 9, 9, 10), (1.0,) * 3, (1.0,) * 10)
        assert necessary_feasibility(inst) is Feasibility.PASS
        assert lower_bound_makespan(inst) == 10
        status, _ = solve_level(inst, 10)
        assert status is SolveStatus.INFEASIBLE


class TestReconstruction:
    def test_single_variable(self):
        inst = Instance((3,), (1.0,), (1.0,) * 5)
        s = schedule_from_y(inst, {(3, 0, 2): 1})
        assert s.starts() == {0: (0, 2)}

    def test_equal_jobs_in_index_order(self):
        inst = Instance((2, 2), (1.0, 1.0), (1.0, 2.0, 3.0, 4.0))
        s = schedule_from_y(inst, {(2, 1, 1), (2, 0, 3)})
        assert s.starts() == {0: (0, 3), 1: (1, 1)}
        swapped = Schedule.from_starts(inst, {0: (1, 1), 1: (0, 3)})
        assert evaluate(inst, s) == evaluate(inst, swapped)

    def test_rejects_inconsistent(self):
        inst = Instance((2, 2), (1.0,), (1.0,) * 6)
        with pytest.raises(ValueError):
            schedule_from_y(inst, {(2, 0, 1)})
        with pytest.raises(ValueError):
            schedule_from_y(inst, {(2, 0, 1), (2, 0, 2)})
        with pytest.raises(ValueError):
            schedule_from_y(inst, {(2, 0, 1), (2, 0, 3), (2, 0, 5)})

    def test_warm_start_single_job(self):
        inst = Instance((3,), (1.0, 1.0), (1.0,) * 5)
        s = Schedule.from_starts(inst, {0: (1, 2)})
        assert warm_start_from_schedule(inst, s, 5) == {(3, 1, 2): 1}
        with pytest.raises(ValueError):
            warm_start_from_schedule(inst, s, 3)

    def test_warm_start_of_heuristic_schedule_is_feasible(self):
        s = sgh(SIX_PAIRS, 7, 4)
        y = warm_start_from_schedule(SIX_PAIRS, s, 7)
        model = build_f2(SIX_PAIRS, 7)
        values = [0.0] * model.n_variables
        for (d, h, t) in y:
            values[model.index(f"y_{d}_{h}_{t}")] = 1.0
        obj = evaluate(SIX_PAIRS, s)
        values[model.index("E")] = obj.tec
        values[model.index("Cmax")] = obj.makespan
        assert model.is_feasible(values)
        assert evaluate(SIX_PAIRS, schedule_from_y(SIX_PAIRS, y)) == obj

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_random_round_trip(self, seed):
        rng = random.Random(seed)
        inst = random_instance(rng, n_max=6, m_max=3, k_max=10)
        s = sgh(inst, None, seed)
        if s is None:
            return
        back = schedule_from_y(inst, warm_start_from_schedule(inst, s, inst.n_slots))
        assert classify(inst, back).tag is ScheduleTag.FEASIBLE
        assert evaluate(inst, back) == evaluate(inst, s)
        p = inst.processing_times
        for d in set(p):
            assert sum(1 for j, _ in back.starts().items() if p[j] == d) == p.count(d)


class TestFronts:
    def test_three_job_instance(self):
        assert objs(exact_pareto(THREE_JOBS)) == [(6, 24), (7, 23)]
        assert objs(oracle_pareto(THREE_JOBS)) == [(6, 24), (7, 23)]

    def test_six_pair_instance(self):
        assert objs(exact_pareto(SIX_PAIRS)) == [(6, 72)]
        assert objs(exact_pareto(SIX_PAIRS, warm_start=True)) == [(6, 72)]

    def test_single_job(self):
        inst = Instance((3,), (2.5,), (1.0,) * 5)
        assert objs(exact_pareto(inst)) == [(3, 7.5)]

    def test_oracle_small_cases(self):
        assert objs(oracle_pareto(Instance((1,), (1.0,), (3.0, 1.0, 2.0)))) == [(1, 3), (2, 1)]
        assert len(oracle_pareto(Instance((2, 2), (1.0,), (1.0,) * 3))) == 0

    def test_oracle_guard(self):
        big = Instance((1,) * 7, (1.0,), (1.0,) * 8)
        with pytest.raises(SearchSpaceTooLarge):
            oracle_pareto(big)
        assert len(oracle_pareto(big, force=True)) == 1

    def test_time_limit_truncates(self):
        inst = Instance((1,) * 6, (1.0, 1.5, 2.0), tuple(float((7 * t) % 11) for t in range(1, 25)))
        front = exact_pareto(inst, time_limit=1e-9, formulation="F1")
        assert front.truncated

    def test_levels_record_warm_start(self):
        front = exact_pareto(THREE_JOBS, warm_start=True)
        levels = front.info["levels"]
        # the makespan lower bound is 6, so the loop ends after that level
        assert [lv["horizon"] for lv in levels] == [10, 6]
        for lv in levels:
            if lv["tec"] is not None and lv["warm_tec"] is not None:
                assert lv["warm_tec"] >= lv["tec"] - 1e-9

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_oracle_matches_product_enumeration(self, seed):
        inst = random_instance(random.Random(seed), n_max=4, m_max=2, k_max=6)
        assert [tuple(o) for o in oracle_pareto(inst).objectives()] == pytest.approx(brute_front(inst))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 9))
    def test_exact_points_carry_schedules(self, seed):
        inst = random_instance(random.Random(seed), n_max=5, m_max=2, k_max=8, integer_costs=False)
        front = exact_pareto(inst)
        assert objs(front) == pytest.approx(objs(oracle_pareto(inst)))
        for pt in front:
            assert classify(inst, pt.schedule).tag is ScheduleTag.FEASIBLE
            assert evaluate(inst, pt.schedule) == pt.objectives
        tecs = [pt.tec for pt in front]
        assert all(a > b for a, b in zip(tecs, tecs[1:]))
