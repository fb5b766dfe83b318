"""Grid-based Bayesian optimization with a confidence-bound acquisition."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Literal, NamedTuple, Optional

import numpy as np

from . import gp
from .params import ParamBox, ParamPoint, grid_array, sample_uniform

Variant = Literal["paper", "standard"]
VARIANTS = ("paper", "standard")
Objective = Callable[[ParamPoint], float]


class ObjectiveFailure(RuntimeError):
    """Objective raised mid-run; ``record`` holds the trace evaluated so far."""

    def __init__(self, message: str, record: "RunRecord"):
        super().__init__(message)
        self.record = record


@dataclass(frozen=True)
class BoConfig:
    budget: int = 20
    gamma: float = 1.0
    box: ParamBox = field(default_factory=ParamBox)
    seed: int = 0
    acquisition_variant: Variant = "standard"
    jitter: float = 1e-10
    center_y: bool = False

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma}")
        if self.acquisition_variant not in VARIANTS:
            raise ValueError(f"unknown acquisition variant {self.acquisition_variant!r}")


class TraceEntry(NamedTuple):
    iteration: int
    point: ParamPoint
    value: float
    cum_time: float


@dataclass
class RunRecord:
    trace: list[TraceEntry] = field(default_factory=list)
    terminated_by: Optional[Literal["budget", "repeat"]] = None
    # wall time of the whole run, including work after the last evaluation
    total_time: float = 0.0

    @property
    def n_evals(self) -> int:
        return len(self.trace)

    @property
    def best_index(self) -> int:
        values = [e.value for e in self.trace]
        return values.index(min(values))

    @property
    def best_value(self) -> float:
        return self.trace[self.best_index].value

    @property
    def best_point(self) -> ParamPoint:
        return self.trace[self.best_index].point

    def best_so_far(self) -> list[float]:
        out, best = [], math.inf
        for e in self.trace:
            best = min(best, e.value)
            out.append(best)
        return out


def lcb(post: gp.Posterior, gamma: float, variant: Variant = "standard") -> float:
    """Confidence-bound score to be minimized.

    ``paper`` adds the uncertainty term (mean + gamma*sd); ``standard``
    subtracts it (mean - gamma*sd). Note that with a zero prior mean and
    non-negative observations the ``paper`` form always prefers an already
    observed point, so a run stops after its first evaluation.
    """
    if variant == "paper":
        return post.mean + gamma * post.sd
    if variant == "standard":
        return post.mean - gamma * post.sd
    raise ValueError(f"unknown acquisition variant {variant!r}")


def lcb_grid(model: gp.GpModel, box: ParamBox, gamma: float, variant: Variant = "standard") -> np.ndarray:
    """Acquisition value at every grid point, in grid order."""
    mean, sd = gp.predict_many(model, grid_array(box))
    sign = {"paper": 1.0, "standard": -1.0}[variant]
    return mean + sign * gamma * sd


def propose_next(model: gp.GpModel, box: ParamBox, gamma: float, variant: Variant = "standard") -> ParamPoint:
    # np.argmin returns the first occurrence, i.e. grid order on ties
    return box.point_at(int(np.argmin(lcb_grid(model, box, gamma, variant))))


def run_bo(config: BoConfig, objective: Objective) -> RunRecord:
    """Evaluate one seeded random grid point, then iterate propose/evaluate/refit.

    Stops when the budget is spent or the acquisition proposes a point that
    was already evaluated; that proposal is not re-evaluated.
    """
    record = RunRecord()
    data: list[gp.Observation] = []
    start = time.perf_counter()

    def evaluate(p: ParamPoint) -> None:
        try:
            obs = gp.Observation(p, float(objective(p)))
        except Exception as exc:
            record.total_time = time.perf_counter() - start
            raise ObjectiveFailure(f"objective failed at {p}: {exc}", record) from exc
        record.trace.append(TraceEntry(len(record.trace) + 1, p, obs.y, time.perf_counter() - start))
        data.append(obs)

    evaluate(sample_uniform(config.box, config.seed, 1)[0])
    visited = {data[0].x}
    record.terminated_by = "budget"
    while len(record.trace) < config.budget:
        model = gp.fit(data, config.jitter, center_y=config.center_y)
        nxt = propose_next(model, config.box, config.gamma, config.acquisition_variant)
        if nxt in visited:
            record.terminated_by = "repeat"
            break
        evaluate(nxt)
        visited.add(nxt)
    record.total_time = time.perf_counter() - start
    return record
