import csv
import json
import math
from functools import partial

import pytest

from tunebench import bench, cli
from tunebench.bench import (
    ExperimentConfig,
    aggregates_from_summary,
    emit_reports,
    read_trace_csv,
    run_comparison,
    run_random_search,
    run_threshold_study,
    write_trace_csv,
)
from tunebench.bo import BoConfig, ObjectiveFailure
from tunebench.params import ParamBox, ParamPoint, sample_uniform
from tunebench.xor import XorObjective

BOX = ParamBox()


class Bowl:
    """Cheap deterministic objective; picklable so it can cross process boundaries."""

    def __init__(self, seed):
        self.cx = 0.2 + 0.05 * (seed % 10)

    def __call__(self, p):
        return (p.alpha - self.cx) ** 2 + (p.theta - 0.5) ** 2


class FailsOnSeed(Bowl):
    def __init__(self, seed):
        super().__init__(seed)
        self.fail = seed == 1

    def __call__(self, p):
        if self.fail:
            raise ValueError("bad seed")
        return super().__call__(p)


def test_random_search_trace():
    f = Bowl(0)
    rec = run_random_search(20, BOX, 5, f)
    assert rec.n_evals == 20 and rec.terminated_by == "budget"
    assert [e.point for e in rec.trace] == sample_uniform(BOX, 5, 20)
    assert [e.value for e in rec.trace] == [e.value for e in run_random_search(20, BOX, 5, f).trace]


def test_random_search_single():
    rec = run_random_search(1, BOX, 2, Bowl(0))
    assert rec.best_value == rec.trace[0].value


def test_random_search_propagates_failure():
    with pytest.raises(ObjectiveFailure):
        run_random_search(5, BOX, 0, FailsOnSeed(1))


def test_degenerate_budgets_evaluate_same_point():
    cfg = ExperimentConfig(bo=BoConfig(budget=1), rs_budget=1, seeds=[8])
    (r,) = run_comparison(cfg, Bowl, write=False).per_seed
    assert r.bo.trace[0].point == r.random.trace[0].point
    assert r.bo.best_value == r.random.best_value


def test_comparison_pairs_share_objective():
    cfg = ExperimentConfig(seeds=[0, 1, 2], epochs=100)
    report = run_comparison(cfg, bench.xor_factory(100), write=False)
    for r in report.per_seed:
        f = XorObjective(r.seed, 100)
        for e in r.bo.trace[:3] + r.random.trace[:3]:
            assert f(e.point) == e.value


def test_aggregates_and_failures():
    cfg = ExperimentConfig(seeds=[0, 1, 2, 3])
    report = run_comparison(cfg, FailsOnSeed, write=False)
    assert [f.seed for f in report.failures] == [1]
    assert "bad seed" in report.failures[0].error
    done = report.completed
    assert len(done) == 3
    agg = report.aggregates()
    assert agg["bo"]["median_best_mse"] == sorted(r.bo.best_value for r in done)[1]
    assert agg["random"]["median_evals"] == 20
    assert report.win_rate == sum(r.bo.best_value <= r.random.best_value for r in done) / 3


def test_parallel_matches_serial():
    cfg = ExperimentConfig(seeds=[3, 1, 2])
    serial = run_comparison(cfg, Bowl, workers=1, write=False)
    par = run_comparison(cfg, Bowl, workers=2, write=False)
    assert [r.seed for r in par.per_seed] == [3, 1, 2]
    for a, b in zip(serial.per_seed, par.per_seed):
        assert [e[:3] for e in a.bo.trace] == [e[:3] for e in b.bo.trace]
        assert [e[:3] for e in a.random.trace] == [e[:3] for e in b.random.trace]


def test_env_caps_workers(monkeypatch):
    monkeypatch.setenv("TUNEBENCH_THREADS", "3")
    assert bench.default_workers() == 3
    monkeypatch.delenv("TUNEBENCH_THREADS")
    assert bench.default_workers() == 1


@pytest.mark.parametrize("kwargs", [dict(seeds=[]), dict(thresholds=[0.1, 0.2]), dict(rs_budget=0)])
def test_experiment_config_validation(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_trace_csv_round_trip(tmp_path):
    rec = run_random_search(20, BOX, 0, Bowl(0))
    path = write_trace_csv(rec, tmp_path / "t.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 21
    assert lines[0] == "iter,alpha,theta,mse,cum_time_s"
    assert read_trace_csv(path) == rec.trace


def test_emit_reports(tmp_path):
    cfg = ExperimentConfig(seeds=[0, 1], epochs=50)
    report = run_comparison(cfg, bench.xor_factory(50), write=False)
    files = emit_reports(report, tmp_path, surface_grid_n=25)
    names = {f.name for f in files}
    assert {"trace_bo_0.csv", "trace_random_1.csv", "summary.json", "surface_0.csv", "surface_1.csv"} <= names
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary) == {"config", "per_seed", "aggregates", "win_rate"}
    assert summary["aggregates"] == report.aggregates()
    assert aggregates_from_summary(summary) == report.aggregates()
    assert summary["win_rate"] == report.win_rate
    assert summary["config"]["bo"]["box"]["grid_n"] == 100
    with open(tmp_path / "surface_0.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["alpha", "theta", "mse"] and len(rows) == 626
    f = XorObjective(0, 50)
    a, t, m = rows[1 + 24 * 25 + 24]
    assert float(m) == f(ParamPoint(float(a), float(t)))


def test_emit_reports_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    report = run_comparison(ExperimentConfig(seeds=[0]), Bowl, write=False)
    with pytest.raises(OSError, match="file"):
        emit_reports(report, blocker / "sub")


def test_csv_uses_dot_decimal_and_17_digits(tmp_path):
    rec = run_random_search(3, BOX, 0, lambda p: 1 / 3)
    text = write_trace_csv(rec, tmp_path / "t.csv").read_text()
    assert "0.33333333333333331" in text


def test_threshold_trivial_cases():
    f = Bowl(0)
    (row,) = run_threshold_study(BOX, [1.0], f, max_evals=5, seed=0)
    assert row.evals == 1 and row.time_s >= 0
    (row,) = run_threshold_study(BOX, [0.0], f, max_evals=10, seed=0)
    assert not row.reached and row.evals is None


def test_threshold_xor_zero_never_reached():
    (row,) = run_threshold_study(BOX, [0.0], XorObjective(0, 100), max_evals=10, seed=0)
    assert not row.reached


def test_threshold_matches_running_best():
    f = Bowl(0)
    pts = sample_uniform(BOX, 4, 300)
    running = []
    for p in pts:
        running.append(min(running[-1], f(p)) if running else f(p))
    thresholds = [0.2, 0.05, 0.01, 1e-9]
    rows = run_threshold_study(BOX, thresholds, f, max_evals=300, seed=4)
    for r in rows:
        hit = next((i + 1 for i, b in enumerate(running) if b <= r.threshold), None)
        assert r.evals == hit


def test_threshold_chunked_matches_sequential():
    f = XorObjective(1, 100)
    seq = run_threshold_study(BOX, [0.24, 0.2], f, max_evals=200, seed=1, chunk_size=1)
    chunked = run_threshold_study(BOX, [0.24, 0.2], f, max_evals=200, seed=1, chunk_size=64)
    assert [r.evals for r in seq] == [r.evals for r in chunked]


def test_threshold_validation_and_wall_cap():
    with pytest.raises(ValueError):
        run_threshold_study(BOX, [0.1, 0.2], Bowl(0))
    with pytest.raises(ValueError):
        run_threshold_study(BOX, [0.1], Bowl(0), max_evals=0)
    (row,) = run_threshold_study(BOX, [0.0], Bowl(0), max_evals=10**6, max_seconds=0.05)
    assert not row.reached


# -- CLI ---------------------------------------------------------------------


def test_cli_tune_and_random_search(tmp_path, capsys):
    assert cli.main(["tune", "--epochs", "50", "--seed", "1", "--out", str(tmp_path)]) == 0
    assert cli.main(["random-search", "--epochs", "50", "--budget", "5", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "bo: best mse" in out and "random: best mse" in out
    assert len(read_trace_csv(tmp_path / "trace_random_0.csv")) == 5
    assert (tmp_path / "trace_bo_1.csv").exists()


def test_cli_compare(tmp_path, capsys):
    rc = cli.main(["compare", "--epochs", "50", "--seeds", "0-2", "--acquisition", "paper",
                   "--grid-n", "20", "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert [s["seed"] for s in summary["per_seed"]] == [0, 1, 2]
    assert summary["config"]["bo"]["acquisition_variant"] == "paper"
    assert all(s["bo"]["evals"] == 1 for s in summary["per_seed"])
    assert "win rate" in capsys.readouterr().out


def test_cli_threshold_and_surface(tmp_path, capsys):
    assert cli.main(["threshold-study", "--epochs", "50", "--thresholds", "1.0,0.0", "--max-evals", "20",
                     "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "threshold_0.json").read_text())
    assert rows[0]["evals"] == 1 and rows[1]["evals"] is None
    assert cli.main(["surface", "--epochs", "20", "--grid-n", "5", "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "surface_0.csv").read_text().splitlines()) == 26


def test_cli_failure_exit_code(tmp_path):
    assert cli.main(["tune", "--budget", "0"]) != 0
    assert cli.main(["threshold-study", "--thresholds", "0.1,0.2", "--max-evals", "5"]) != 0


def test_cli_seed_ranges():
    assert cli._ints("0-3,7, 9") == [0, 1, 2, 3, 7, 9]
