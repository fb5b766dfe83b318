"""Random-search baseline, paired comparisons, threshold study and report files."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .bo import BoConfig, ObjectiveFailure, Objective, RunRecord, TraceEntry, run_bo
from .params import ParamBox, ParamPoint, grid_array, sample_indices, sample_uniform
from .xor import DEFAULT_EPOCHS, XorObjective

log = logging.getLogger(__name__)

TRACE_HEADER = ["iter", "alpha", "theta", "mse", "cum_time_s"]
METHODS = ("bo", "random")
ObjectiveFactory = Callable[[int], Objective]


def fmt(x: float) -> str:
    return format(x, ".17g")


def run_random_search(budget: int, box: ParamBox, seed: int, objective: Objective) -> RunRecord:
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    record = RunRecord(terminated_by="budget")
    start = time.perf_counter()
    for i, p in enumerate(sample_uniform(box, seed, budget), start=1):
        try:
            y = float(objective(p))
        except Exception as exc:
            record.total_time = time.perf_counter() - start
            raise ObjectiveFailure(f"objective failed at {p}: {exc}", record) from exc
        record.trace.append(TraceEntry(i, p, y, time.perf_counter() - start))
    record.total_time = time.perf_counter() - start
    return record


# -- paired comparison -------------------------------------------------------


@dataclass
class ExperimentConfig:
    bo: BoConfig = field(default_factory=BoConfig)
    rs_budget: int = 20
    epochs: int = DEFAULT_EPOCHS
    seeds: list[int] = field(default_factory=lambda: [0])
    thresholds: list[float] = field(default_factory=lambda: [0.190, 0.185, 0.177])
    output_dir: Optional[str] = None

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if any(b >= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError(f"thresholds must be strictly decreasing, got {self.thresholds}")
        if self.rs_budget < 1:
            raise ValueError(f"rs_budget must be >= 1, got {self.rs_budget}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bo"]["box"] = {"lo": list(self.bo.box.lo), "hi": list(self.bo.box.hi), "grid_n": self.bo.box.grid_n}
        return d


@dataclass
class SeedResult:
    seed: int
    bo: Optional[RunRecord] = None
    random: Optional[RunRecord] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ComparisonReport:
    config: ExperimentConfig
    per_seed: list[SeedResult]

    @property
    def completed(self) -> list[SeedResult]:
        return [r for r in self.per_seed if r.ok]

    @property
    def failures(self) -> list[SeedResult]:
        return [r for r in self.per_seed if not r.ok]

    def aggregates(self) -> dict:
        return compute_aggregates(
            [(r.bo.best_value, r.bo.n_evals, r.bo.total_time, r.random.best_value, r.random.n_evals, r.random.total_time)
             for r in self.completed]
        )

    @property
    def win_rate(self) -> float:
        done = self.completed
        if not done:
            return math.nan
        return sum(r.bo.best_value <= r.random.best_value for r in done) / len(done)


def compute_aggregates(rows: Sequence[tuple]) -> dict:
    """Aggregate ``(bo_best, bo_evals, bo_time, rs_best, rs_evals, rs_time)`` rows per method."""
    out = {}
    for k, method in enumerate(METHODS):
        best = [r[3 * k] for r in rows]
        evals = [r[3 * k + 1] for r in rows]
        times = [r[3 * k + 2] for r in rows]
        out[method] = {
            "median_best_mse": statistics.median(best) if rows else math.nan,
            "mean_best_mse": statistics.fmean(best) if rows else math.nan,
            "median_evals": statistics.median(evals) if rows else math.nan,
            "median_time_s": statistics.median(times) if rows else math.nan,
        }
    return out


def _run_seed(config: ExperimentConfig, factory: ObjectiveFactory, seed: int) -> SeedResult:
    objective = factory(seed)
    bo_cfg = BoConfig(**{**config.bo.__dict__, "seed": seed})
    res = SeedResult(seed)
    try:
        res.bo = run_bo(bo_cfg, objective)
        res.random = run_random_search(config.rs_budget, config.bo.box, seed, objective)
    except Exception as exc:  # recorded per seed, excluded from aggregates
        res.error = f"{type(exc).__name__}: {exc}"
        log.warning("seed %d failed: %s", seed, res.error)
    return res


def default_workers() -> int:
    env = os.environ.get("TUNEBENCH_THREADS")
    if env:
        return max(1, int(env))
    return 1


def xor_factory(epochs: int = DEFAULT_EPOCHS) -> ObjectiveFactory:
    return partial(XorObjective, epochs=epochs)


def run_comparison(
    config: ExperimentConfig,
    objective_factory: Optional[ObjectiveFactory] = None,
    workers: Optional[int] = None,
    write: bool = True,
) -> ComparisonReport:
    """Run BO and random search for every seed against one shared objective per seed.

    ``objective_factory(seed)`` builds the objective; the default is the XOR
    network with ``config.epochs`` epochs. Seeds may fan out over worker
    processes; results are always returned in seed order.
    """
    factory = objective_factory or xor_factory(config.epochs)
    workers = min(workers or default_workers(), len(config.seeds))
    task = partial(_run_seed, config, factory)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(task, config.seeds))
    else:
        per_seed = [task(s) for s in config.seeds]
    report = ComparisonReport(config, per_seed)
    if write and config.output_dir:
        emit_reports(report, config.output_dir)
    return report


# -- threshold study ---------------------------------------------------------


@dataclass
class ThresholdRow:
    threshold: float
    evals: Optional[int] = None  # None means not reached
    time_s: Optional[float] = None

    @property
    def reached(self) -> bool:
        return self.evals is not None


def run_threshold_study(
    box: ParamBox,
    thresholds: Sequence[float],
    objective: Objective,
    max_evals: int = 10_000,
    seed: int = 0,
    max_seconds: Optional[float] = None,
    chunk_size: int = 1,
) -> list[ThresholdRow]:
    """Random grid search until each threshold is beaten or the budget runs out.

    With ``chunk_size > 1`` and an objective exposing ``batch(points)``,
    points are trained together; evaluation order is unchanged and wall time
    is spread evenly across the points of a chunk.
    """
    if any(b >= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError(f"thresholds must be strictly decreasing, got {list(thresholds)}")
    if max_evals < 1:
        raise ValueError(f"max_evals must be >= 1, got {max_evals}")
    rows = [ThresholdRow(float(t)) for t in thresholds]
    points = grid_array(box)[sample_indices(box, seed, max_evals)]
    batched = chunk_size > 1 and hasattr(objective, "batch")
    step = chunk_size if batched else 1

    best = math.inf
    start = time.perf_counter()
    done = 0
    while done < max_evals and not all(r.reached for r in rows):
        if max_seconds is not None and time.perf_counter() - start > max_seconds:
            log.info("threshold study stopped by wall-clock cap after %d evaluations", done)
            break
        chunk = points[done:done + step]
        t0 = time.perf_counter() - start
        if batched:
            values = np.asarray(objective.batch(chunk), dtype=float)
        else:
            values = [float(objective(ParamPoint(float(chunk[0, 0]), float(chunk[0, 1]))))]
        t1 = time.perf_counter() - start
        for k, v in enumerate(values, start=1):
            best = min(best, v)
            for r in rows:
                if not r.reached and best <= r.threshold:
                    r.evals = done + k
                    r.time_s = t0 + (t1 - t0) * k / len(values)
        done += len(values)
    return rows


# -- report files ------------------------------------------------------------


def write_trace_csv(record: RunRecord, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_HEADER)
            for e in record.trace:
                w.writerow([e.iteration, fmt(e.point.alpha), fmt(e.point.theta), fmt(e.value), fmt(e.cum_time)])
    except OSError as exc:
        raise OSError(f"cannot write trace {path}: {exc}") from exc
    return path


def read_trace_csv(path) -> list[TraceEntry]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {header} in {path}")
        return [
            TraceEntry(int(it), ParamPoint(float(a), float(t)), float(m), float(c))
            for it, a, t, m, c in reader
        ]


def _record_summary(r: RunRecord) -> dict:
    return {
        "best_mse": r.best_value,
        "best_point": {"alpha": r.best_point.alpha, "theta": r.best_point.theta},
        "evals": r.n_evals,
        "terminated_by": r.terminated_by,
        "total_time_s": r.total_time,
    }


def summary_dict(report: ComparisonReport) -> dict:
    per_seed = []
    for r in report.per_seed:
        entry = {"seed": r.seed, "error": r.error}
        if r.ok:
            entry.update(bo=_record_summary(r.bo), random=_record_summary(r.random))
        per_seed.append(entry)
    return {
        "config": report.config.to_dict(),
        "per_seed": per_seed,
        "aggregates": report.aggregates(),
        "win_rate": report.win_rate,
    }


def aggregates_from_summary(summary: dict) -> dict:
    """Recompute aggregates from the per-seed section of a parsed summary."""
    rows = [
        (s["bo"]["best_mse"], s["bo"]["evals"], s["bo"]["total_time_s"],
         s["random"]["best_mse"], s["random"]["evals"], s["random"]["total_time_s"])
        for s in summary["per_seed"] if s["error"] is None
    ]
    return compute_aggregates(rows)


def write_surface_csv(box: ParamBox, objective: Objective, path) -> Path:
    """Objective over the full grid of ``box`` (rows ``alpha,theta,mse``)."""
    pts = grid_array(box)
    if hasattr(objective, "batch"):
        values = objective.batch(pts)
    else:
        values = [objective(ParamPoint(float(a), float(t))) for a, t in pts]
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "theta", "mse"])
        for (a, t), v in zip(pts, values):
            w.writerow([fmt(a), fmt(t), fmt(float(v))])
    return path


def emit_reports(
    report: ComparisonReport,
    out_dir,
    surface_grid_n: Optional[int] = None,
    objective_factory: Optional[ObjectiveFactory] = None,
) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    for r in report.completed:
        written.append(write_trace_csv(r.bo, out / f"trace_bo_{r.seed}.csv"))
        written.append(write_trace_csv(r.random, out / f"trace_random_{r.seed}.csv"))
    summary_path = out / "summary.json"
    try:
        summary_path.write_text(json.dumps(summary_dict(report), indent=2))
    except OSError as exc:
        raise OSError(f"cannot write {summary_path}: {exc}") from exc
    written.append(summary_path)
    if surface_grid_n:
        factory = objective_factory or xor_factory(report.config.epochs)
        box = ParamBox(report.config.bo.box.lo, report.config.bo.box.hi, surface_grid_n)
        for s in report.config.seeds:
            written.append(write_surface_csv(box, factory(s), out / f"surface_{s}.csv"))
    return written
