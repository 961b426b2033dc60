import csv
import os
import random

import pytest

from support import SIX_PAIRS, THREE_JOBS
from tousched import Instance, Objectives, evaluate
from tousched.bench import (FormatError, GeneratorParams, RunConfig, emit_metrics, format_front, format_instance,
                            generate_instance, parse_instance, read_front, read_instance, read_schedules,
                            run_experiment, sidecar_path, write_instance)
from tousched.bench.cli import main
from tousched.bench.experiment import METRIC_HEADER
from tousched.metrics import hypervolume


class TestInstanceFiles:
    def test_minimal_file(self):
        inst = parse_instance("1 1 1\n1\n1.0\n1.0\n")
        assert inst == Instance((1,), (1.0,), (1.0,))

    def test_comments_and_blank_lines(self):
        text = "# header\n3 1 10  # N M K\n\n3 2 1\n1\n1 5 2 3 9 4 8 13 7 6\n"
        assert parse_instance(text) == THREE_JOBS

    def test_round_trip(self, tmp_path):
        path = tmp_path / "fig.txt"
        write_instance(THREE_JOBS, path)
        text = path.read_text()
        assert read_instance(path) == THREE_JOBS
        assert format_instance(parse_instance(text)) == text

    def test_random_round_trip(self, tmp_path):
        rng = random.Random(1)
        for i in range(20):
            inst = generate_instance(GeneratorParams(rng.randint(1, 9), rng.randint(1, 4), rng.randint(1, 30),
                                                     seed=i))
            assert parse_instance(format_instance(inst)) == inst

    def test_fractional_costs_survive(self):
        inst = Instance((1, 2), (0.1, 2.5), (0.3, 1 / 3, 7.25))
        assert parse_instance(format_instance(inst)) == inst

    @pytest.mark.parametrize("text,line,token", [
        ("2 1 3\n1 4\n1\n1 1 1\n", 2, "4"),
        ("2 1 3\n1 x\n1\n1 1 1\n", 2, "x"),
        ("1 1 2\n1\n1\n1 -1\n", 4, "-1"),
        ("1 1 2\n1 1\n1\n1 1\n", 2, "1"),
    ])
    def test_errors_name_line_and_token(self, text, line, token):
        with pytest.raises(FormatError) as err:
            parse_instance(text, "f.txt")
        assert err.value.line == line and err.value.token == token
        assert f"f.txt:{line}:" in str(err.value)

    def test_missing_lines(self):
        with pytest.raises(FormatError):
            parse_instance("1 1 1\n1\n")


class TestFrontFiles:
    def test_format(self):
        assert format_front([(7, 23), (6, 24)]) == "makespan,tec\n6,24.000000\n7,23.000000\n"

    def test_read_back(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text(format_front([(6, 24.5), (7, 23)]))
        assert read_front(path) == [(6, 24.5), (7, 23.0)]

    def test_bad_rows(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("makespan,tec\n6,24\n7\n")
        with pytest.raises(FormatError) as err:
            read_front(path)
        assert err.value.line == 3
        path.write_text("a,b\n")
        with pytest.raises(FormatError):
            read_front(path)


class TestGenerator:
    def test_deterministic(self):
        params = GeneratorParams(8, 3, 20, seed=11)
        assert generate_instance(params) == generate_instance(params)
        assert generate_instance(params) != generate_instance(GeneratorParams(8, 3, 20, seed=12))

    def test_unit_processing_times(self):
        inst = generate_instance(GeneratorParams(30, 2, 10, p_max=1, seed=3))
        assert set(inst.processing_times) == {1}

    def test_large_shape_ranges(self):
        inst = generate_instance(GeneratorParams(250, 25, 350, seed=5))
        assert (inst.n_jobs, inst.n_machines, inst.n_slots) == (250, 25, 350)
        assert all(1 <= p <= 12 for p in inst.processing_times)
        assert all(1 <= u <= 6 for u in inst.consumption_rates)
        assert all(1 <= c <= 8 for c in inst.slot_costs)

    def test_processing_times_capped_at_horizon(self):
        inst = generate_instance(GeneratorParams(20, 1, 3, seed=0))
        assert max(inst.processing_times) <= 3

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            GeneratorParams(0, 1, 1)


def sidecar_matches(instance, path):
    rows = read_front(path)
    blocks = read_schedules(instance, sidecar_path(path))
    assert [obj for obj, _ in blocks] == rows
    for (span, tec), schedule in blocks:
        obj = evaluate(instance, schedule)
        assert obj.makespan == span and round(obj.tec, 6) == tec


class TestExperiment:
    def test_oracle_on_three_job_instance(self, tmp_path):
        res = run_experiment(RunConfig("oracle", runs=5), THREE_JOBS, str(tmp_path))
        assert len(res.fronts) == 1
        assert read_front(res.paths[0]) == [(6, 24.0), (7, 23.0)]
        sidecar_matches(THREE_JOBS, res.paths[0])

    def test_sgs_es_runs_are_seeded(self, tmp_path):
        inst = generate_instance(GeneratorParams(6, 2, 12, p_max=4, seed=2))
        a = run_experiment(RunConfig("sgs-es", seed=3, runs=2), inst, str(tmp_path / "a"))
        b = run_experiment(RunConfig("sgs-es", seed=3, runs=2), inst, str(tmp_path / "b"))
        assert a.seeds == [3, 4]
        for pa, pb in zip(a.paths, b.paths):
            assert open(pa).read() == open(pb).read()
            sidecar_matches(inst, pa)

    def test_exact_with_warm_start(self, tmp_path):
        res = run_experiment(RunConfig("exact", warm_start=True, runs=3), SIX_PAIRS, str(tmp_path))
        assert len(res.fronts) == 1
        assert res.fronts[0].objectives() == [Objectives(6, 72.0)]
        assert res.fronts[0].info["warm_start"]
        with open(tmp_path / "summary.tsv") as fh:
            row = next(csv.DictReader(fh, delimiter="\t"))
        assert row["warm_start"] == "1" and row["points"] == "1"

    @pytest.mark.parametrize("algo", ["sgh", "sgs", "ch"])
    def test_heuristic_sidecars_revalidate(self, algo, tmp_path):
        inst = generate_instance(GeneratorParams(7, 2, 14, p_max=4, seed=8))
        res = run_experiment(RunConfig(algo, seed=1, runs=2), inst, str(tmp_path))
        for path in res.paths:
            sidecar_matches(inst, path)

    def test_horizon_override(self):
        res = run_experiment(RunConfig("oracle", horizon=6), THREE_JOBS)
        assert res.fronts[0].objectives() == [Objectives(6, 24.0)]

    def test_config_validation(self):
        for bad in (dict(algorithm="nsga"), dict(algorithm="sgh", runs=0), dict(algorithm="sgh", time_limit=0)):
            with pytest.raises(ValueError):
                RunConfig(**bad)


class TestEmitMetrics:
    def test_front_equals_reference(self):
        ref = [(6, 24), (7, 23)]
        rows = emit_metrics([ref], ref)
        row = dict(zip(METRIC_HEADER, rows[0]))
        assert row["purity"] == 1 and row["d_r"] == 0
        assert rows[-1][0] == "average"

    def test_identical_runs_average(self):
        f = [(5, 30), (6, 24), (8, 20)]
        rows = emit_metrics([f, f], [(5, 28), (7, 20)], (10, 40))
        assert rows[-1][1:] == pytest.approx(rows[0][1:])

    def test_exchange_search_never_loses_volume(self):
        for seed in range(5):
            inst = generate_instance(GeneratorParams(5, 2, 10, p_max=3, seed=seed))
            plain = run_experiment(RunConfig("sgs", seed=seed), inst).fronts[0]
            improved = run_experiment(RunConfig("sgs-es", seed=seed), inst).fronts[0]
            rows = emit_metrics([plain, improved], labels=["sgs", "sgs-es"])
            assert rows[1][1] >= rows[0][1] - 1e-9
            r = (inst.n_slots + 1, 1e6)
            assert hypervolume(improved, r) >= hypervolume(plain, r) - 1e-9

    def test_empty(self):
        with pytest.raises(ValueError):
            emit_metrics([])


class TestCli:
    def test_generate_solve_metrics_eaf(self, tmp_path, capsys):
        inst = tmp_path / "inst.txt"
        assert main(["generate", "--n", "5", "--m", "2", "--k", "10", "--p-max", "3", "--seed", "4",
                     "--out", str(inst)]) == 0
        out = tmp_path / "out"
        assert main(["solve", "--algo", "sgs-es", "--instance", str(inst), "--runs", "2", "--out-dir", str(out)]) == 0
        assert main(["solve", "--algo", "oracle", "--instance", str(inst), "--out-dir", str(tmp_path / "ref")]) == 0
        table = tmp_path / "m.csv"
        assert main(["metrics", "--fronts", str(out / "*.csv"), "--ref", str(tmp_path / "ref" / "oracle_run0.csv"),
                     "--instance", str(inst), "--out", str(table)]) == 0
        with open(table) as fh:
            rows = list(csv.DictReader(fh))
        assert [r["front"] for r in rows] == ["sgs-es_run0.csv", "sgs-es_run1.csv", "average"]
        assert all(float(r["fm1"]) == 0 for r in rows)
        queries = tmp_path / "q.txt"
        queries.write_text("makespan,tec\n100,100000\n0,0\n")
        eaf_out = tmp_path / "e.csv"
        assert main(["eaf", "--fronts", str(out / "*.csv"), "--queries", str(queries), "--out", str(eaf_out)]) == 0
        with open(eaf_out) as fh:
            assert [r["attainment"] for r in csv.DictReader(fh)] == ["1", "0"]

    def test_empty_result_exit_code(self, tmp_path):
        inst = tmp_path / "inst.txt"
        write_instance(SIX_PAIRS, inst)
        # the constructive baseline finds nothing on this instance
        assert main(["solve", "--algo", "ch", "--instance", str(inst), "--out-dir", str(tmp_path / "o")]) == 1

    def test_usage_errors(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("1 1 1\n2\n1\n1\n")
        assert main([]) == 2
        assert main(["solve", "--algo", "magic", "--instance", str(bad), "--out-dir", str(tmp_path)]) == 2
        assert main(["solve", "--algo", "sgh", "--instance", str(bad), "--out-dir", str(tmp_path)]) == 2
        assert "bad.txt:2:" in capsys.readouterr().err
        assert main(["solve", "--algo", "sgh", "--instance", str(tmp_path / "none.txt"),
                     "--out-dir", str(tmp_path)]) == 2
        assert main(["metrics", "--fronts", str(tmp_path / "*.nothing"), "--out", str(tmp_path / "m.csv")]) == 2
        assert main(["solve", "--algo", "sgh", "--instance", str(bad), "--backend", "cplex",
                     "--out-dir", str(tmp_path)]) == 2

    def test_help_exits_cleanly(self, capsys):
        assert main(["--help"]) == 0
        assert "solve" in capsys.readouterr().out

    def test_solve_is_byte_deterministic(self, tmp_path):
        inst = tmp_path / "inst.txt"
        write_instance(generate_instance(GeneratorParams(7, 2, 14, p_max=4, seed=1)), inst)
        outs = []
        for name in ("a", "b"):
            d = tmp_path / name
            assert main(["solve", "--algo", "sgs-es", "--seed", "7", "--instance", str(inst),
                         "--out-dir", str(d)]) == 0
            outs.append((d / "sgs-es_run0.csv").read_bytes() + (d / "sgs-es_run0.sched").read_bytes())
        assert outs[0] == outs[1]
        assert os.path.getsize(tmp_path / "a" / "sgs-es_run0.csv") > len("makespan,tec\n")
