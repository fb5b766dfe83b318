"""Noise-free Gaussian-process regression with a unit squared-exponential kernel."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .params import ParamPoint


class DuplicatePoint(ValueError):
    pass


class FactorizationFailure(np.linalg.LinAlgError):
    pass


class SingularMatrix(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class Observation:
    x: ParamPoint
    y: float

    def __post_init__(self):
        if not math.isfinite(self.y) or self.y < 0:
            raise ValueError(f"observation value must be finite and >= 0, got {self.y}")


@dataclass(frozen=True)
class Posterior:
    mean: float
    sd: float


def kernel(a: ParamPoint, b: ParamPoint) -> float:
    d0 = a.alpha - b.alpha
    d1 = a.theta - b.theta
    return math.exp(-0.5 * (d0 * d0 + d1 * d1))


def gram(X1: np.ndarray, X2: np.ndarray) -> np.ndarray:
    """Kernel matrix between rows of ``X1`` (n, 2) and ``X2`` (m, 2)."""
    diff = X1[:, None, :] - X2[None, :, :]
    return np.exp(-0.5 * np.sum(diff * diff, axis=-1))


def _as_xy(data: Sequence[Observation]) -> tuple[np.ndarray, np.ndarray]:
    if len(data) == 0:
        raise ValueError("at least one observation is required")
    X = np.array([[o.x.alpha, o.x.theta] for o in data], dtype=float)
    y = np.array([o.y for o in data], dtype=float)
    return X, y


@dataclass(frozen=True, eq=False)
class GpModel:
    data: tuple[Observation, ...]
    jitter: float
    chol: np.ndarray
    alpha_vec: np.ndarray
    X: np.ndarray
    y_offset: float = 0.0


def fit(data: Sequence[Observation], jitter: float = 1e-10, center_y: bool = False) -> GpModel:
    """Factor ``K + jitter*I = L L^T`` and solve for the posterior weights.

    With ``center_y`` the prior mean is the sample mean of the observations
    instead of zero.
    """
    if not jitter > 0:
        raise ValueError(f"jitter must be positive, got {jitter}")
    X, y = _as_xy(data)
    seen = set()
    for o in data:
        if o.x in seen:
            raise DuplicatePoint(f"observation at {o.x} appears more than once")
        seen.add(o.x)

    offset = float(y.mean()) if center_y else 0.0
    K = gram(X, X)
    K[np.diag_indices_from(K)] += jitter
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(
            f"Cholesky failed on {len(data)} points with jitter {jitter:g}"
        ) from exc
    w = solve_triangular(L, y - offset, lower=True)
    alpha_vec = solve_triangular(L.T, w, lower=False)
    return GpModel(tuple(data), float(jitter), L, alpha_vec, X, offset)


def predict_many(model: GpModel, Xq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and standard deviation at each row of ``Xq``."""
    Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
    Ks = gram(model.X, Xq)
    mean = Ks.T @ model.alpha_vec + model.y_offset
    v = solve_triangular(model.chol, Ks, lower=True)
    var = 1.0 - np.sum(v * v, axis=0)
    return mean, np.sqrt(np.maximum(var, 0.0))


def predict(model: GpModel, x: ParamPoint) -> Posterior:
    mean, sd = predict_many(model, x.as_array()[None, :])
    return Posterior(float(mean[0]), float(sd[0]))


def predict_naive(data: Sequence[Observation], jitter: float, x: ParamPoint) -> Posterior:
    """Reference posterior via an explicit inverse of ``K + jitter*I``."""
    X, y = _as_xy(data)
    K = gram(X, X) + jitter * np.eye(len(y))
    try:
        K_inv = np.linalg.inv(K)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    ks = gram(X, x.as_array()[None, :])[:, 0]
    mean = ks @ K_inv @ y
    var = 1.0 - ks @ K_inv @ ks
    return Posterior(float(mean), math.sqrt(max(var, 0.0)))
