"""Bayesian optimization of XOR-network training parameters with a GP surrogate."""

from .bo import BoConfig, ObjectiveFailure, RunRecord, TraceEntry, lcb, propose_next, run_bo
from .gp import Observation, Posterior, fit, kernel, predict, predict_naive
from .params import ParamBox, ParamPoint, grid_points, sample_uniform
from .xor import XorObjective, objective, train

__all__ = [
    "BoConfig",
    "ObjectiveFailure",
    "Observation",
    "ParamBox",
    "ParamPoint",
    "Posterior",
    "RunRecord",
    "TraceEntry",
    "XorObjective",
    "fit",
    "grid_points",
    "kernel",
    "lcb",
    "objective",
    "predict",
    "predict_naive",
    "propose_next",
    "run_bo",
    "sample_uniform",
    "train",
]
