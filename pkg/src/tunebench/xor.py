"""2-2-1 sigmoid network trained on XOR; its final MSE is the tuning objective.

Every node computes ``1 / (1 + exp(-theta * z))`` where ``z`` is the weighted
input sum plus a bias. Training is full-batch gradient descent on the mean
squared error over the four XOR rows, one step per epoch.

The numerical core works on a leading batch axis so that many (alpha, theta)
points can be trained at once; the single-network API is the batch-of-one
case of the same code, which keeps both routes bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import expit

from .params import ParamPoint

DEFAULT_EPOCHS = 1000
N_WEIGHTS = 9


class Diverged(FloatingPointError):
    pass


@dataclass(frozen=True)
class XorDataset:
    inputs: np.ndarray
    labels: np.ndarray


XOR = XorDataset(
    inputs=np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
    labels=np.array([0.0, 1.0, 1.0, 0.0]),
)


@dataclass
class XorNet:
    w_hidden: np.ndarray  # (2, 2), row j holds the input weights of hidden node j
    b_hidden: np.ndarray  # (2,)
    w_out: np.ndarray  # (2,)
    b_out: float
    theta: float = 1.0
    alpha: float = 0.1
    epochs: int = DEFAULT_EPOCHS

    def flat(self) -> np.ndarray:
        return np.concatenate(
            [np.ravel(self.w_hidden), np.ravel(self.b_hidden), np.ravel(self.w_out), [self.b_out]]
        ).astype(float)

    def with_flat(self, w: np.ndarray) -> "XorNet":
        w = np.asarray(w, dtype=float)
        return replace(
            self, w_hidden=w[0:4].reshape(2, 2), b_hidden=w[4:6].copy(), w_out=w[6:8].copy(), b_out=float(w[8])
        )

    @classmethod
    def from_flat(cls, w, theta=1.0, alpha=0.1, epochs=DEFAULT_EPOCHS) -> "XorNet":
        w = np.asarray(w, dtype=float)
        return cls(w[0:4].reshape(2, 2), w[4:6].copy(), w[6:8].copy(), float(w[8]), theta, alpha, epochs)


@dataclass
class TrainResult:
    final_mse: float
    mse_curve: Optional[np.ndarray] = field(default=None, repr=False)


def sigmoid(theta, z):
    return expit(np.multiply(theta, z))


def tanh_node(theta, z):
    return np.tanh(np.multiply(theta, z))


def init_weights(init_seed: int) -> np.ndarray:
    """Flat weight vector drawn i.i.d. uniform on [-1, 1]."""
    return np.random.default_rng(init_seed).uniform(-1.0, 1.0, N_WEIGHTS)


# -- batched core ------------------------------------------------------------
# W: (P, 9) flat weights, theta: (P,), X: (R, 2), y: (R,)


def _rowsum(a):
    # explicit left-to-right sum over the 4 data rows keeps results independent of batch size
    return a[:, 0] + a[:, 1] + a[:, 2] + a[:, 3]


def _forward_batch(W, theta, X):
    x0, x1 = X[None, :, 0], X[None, :, 1]
    t = theta[:, None]
    z_h0 = W[:, 0, None] * x0 + W[:, 1, None] * x1 + W[:, 4, None]
    z_h1 = W[:, 2, None] * x0 + W[:, 3, None] * x1 + W[:, 5, None]
    h0 = expit(t * z_h0)
    h1 = expit(t * z_h1)
    out = expit(t * (W[:, 6, None] * h0 + W[:, 7, None] * h1 + W[:, 8, None]))
    return h0, h1, out


def _mse_batch(W, theta, data: XorDataset):
    _, _, out = _forward_batch(W, theta, data.inputs)
    r = out - data.labels[None, :]
    return _rowsum(r * r) / 4.0


def _grads_batch(W, theta, data: XorDataset):
    X = data.inputs
    x0, x1 = X[None, :, 0], X[None, :, 1]
    t = theta[:, None]
    h0, h1, out = _forward_batch(W, theta, X)
    d_out = (out - data.labels[None, :]) * 0.5
    dz_o = d_out * t * out * (1.0 - out)
    dz_h0 = dz_o * W[:, 6, None] * t * h0 * (1.0 - h0)
    dz_h1 = dz_o * W[:, 7, None] * t * h1 * (1.0 - h1)
    G = np.empty_like(W)
    G[:, 0] = _rowsum(dz_h0 * x0)
    G[:, 1] = _rowsum(dz_h0 * x1)
    G[:, 2] = _rowsum(dz_h1 * x0)
    G[:, 3] = _rowsum(dz_h1 * x1)
    G[:, 4] = _rowsum(dz_h0)
    G[:, 5] = _rowsum(dz_h1)
    G[:, 6] = _rowsum(dz_o * h0)
    G[:, 7] = _rowsum(dz_o * h1)
    G[:, 8] = _rowsum(dz_o)
    return G


def train_batch(
    points: np.ndarray,
    epochs: int = DEFAULT_EPOCHS,
    init_seed: int = 0,
    data: XorDataset = XOR,
    keep_curve: bool = False,
):
    """Train one network per row of ``points`` (columns alpha, theta) from a shared init.

    Returns the final MSE per point, or ``(final, curve)`` with ``curve`` of
    shape ``(epochs, P)`` when ``keep_curve`` is set. Non-finite weights are
    reported as NaN entries; callers decide whether that is an error.
    """
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    alpha, theta = points[:, 0].copy(), points[:, 1].copy()
    W = np.tile(init_weights(init_seed), (len(points), 1))
    curve = np.empty((epochs, len(points))) if keep_curve else None
    a = alpha[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        for e in range(epochs):
            W = W - a * _grads_batch(W, theta, data)
            if keep_curve:
                curve[e] = _mse_batch(W, theta, data)
        final = _mse_batch(W, theta, data)
    bad = ~np.all(np.isfinite(W), axis=1)
    final[bad] = np.nan
    return (final, curve) if keep_curve else final


# -- single-network API ------------------------------------------------------


def _one(net: XorNet):
    return net.flat()[None, :], np.array([float(net.theta)])


def forward(net: XorNet, inp) -> float:
    W, t = _one(net)
    _, _, out = _forward_batch(W, t, np.asarray(inp, dtype=float).reshape(1, 2))
    return float(out[0, 0])


def mse(net: XorNet, data: XorDataset = XOR) -> float:
    W, t = _one(net)
    return float(_mse_batch(W, t, data)[0])


def backprop_grads(net: XorNet, data: XorDataset = XOR) -> XorNet:
    """Gradient of :func:`mse` w.r.t. every weight and bias, shaped like ``net``."""
    W, t = _one(net)
    return net.with_flat(_grads_batch(W, t, data)[0])


def train(
    point: ParamPoint, epochs: int = DEFAULT_EPOCHS, init_seed: int = 0, keep_curve: bool = False
) -> TrainResult:
    res = train_batch(np.array([[point.alpha, point.theta]]), epochs, init_seed, keep_curve=keep_curve)
    final, curve = res if keep_curve else (res, None)
    if not np.isfinite(final[0]):
        raise Diverged(f"weights became non-finite training at {point}")
    return TrainResult(float(final[0]), None if curve is None else curve[:, 0])


def derive_init_seed(experiment_seed: int) -> int:
    return int(np.random.SeedSequence([int(experiment_seed), 0x584F52]).generate_state(1)[0])


@dataclass(frozen=True)
class XorObjective:
    """Final training MSE as a deterministic function of (alpha, theta).

    All points in one experiment share the same initial weights, derived
    from ``experiment_seed``.
    """

    experiment_seed: int = 0
    epochs: int = DEFAULT_EPOCHS

    @property
    def init_seed(self) -> int:
        return derive_init_seed(self.experiment_seed)

    def __call__(self, point: ParamPoint) -> float:
        return train(point, self.epochs, self.init_seed).final_mse

    def batch(self, points: np.ndarray) -> np.ndarray:
        out = train_batch(points, self.epochs, self.init_seed)
        if not np.all(np.isfinite(out)):
            raise Diverged("weights became non-finite for some points in batch")
        return out


def objective(point: ParamPoint, experiment_seed: int = 0, epochs: int = DEFAULT_EPOCHS) -> float:
    return XorObjective(experiment_seed, epochs)(point)
