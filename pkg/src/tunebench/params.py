"""Parameter box over (learning rate, activation scale) and its grid discretization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class ParamPoint:
    alpha: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite parameter point ({self.alpha}, {self.theta})")

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.theta], dtype=float)


@dataclass(frozen=True)
class ParamBox:
    lo: tuple[float, float] = (0.001, 0.001)
    hi: tuple[float, float] = (1.0, 1.0)
    grid_n: int = 100

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != 2 or len(self.hi) != 2:
            raise ValueError("ParamBox bounds must have length 2")
        if any(not lo < hi for lo, hi in zip(self.lo, self.hi)):
            raise ValueError(f"lower bounds {self.lo} must be below upper bounds {self.hi}")
        if int(self.grid_n) != self.grid_n or self.grid_n < 2:
            raise ValueError(f"grid_n must be an integer >= 2, got {self.grid_n}")

    @property
    def size(self) -> int:
        return self.grid_n * self.grid_n

    def axis_values(self, dim: int) -> np.ndarray:
        return np.linspace(self.lo[dim], self.hi[dim], self.grid_n)

    def contains(self, p: ParamPoint) -> bool:
        return (self.lo[0] <= p.alpha <= self.hi[0]) and (self.lo[1] <= p.theta <= self.hi[1])

    def point_at(self, index: int) -> ParamPoint:
        """Grid point at a row-major flat index."""
        i, j = divmod(int(index), self.grid_n)
        return ParamPoint(float(self.axis_values(0)[i]), float(self.axis_values(1)[j]))


@lru_cache(maxsize=16)
def grid_array(box: ParamBox) -> np.ndarray:
    """All grid points as a read-only ``(grid_n**2, 2)`` array, row-major over (alpha, theta)."""
    a, t = np.meshgrid(box.axis_values(0), box.axis_values(1), indexing="ij")
    out = np.column_stack([a.ravel(), t.ravel()])
    out.flags.writeable = False
    return out


def grid_points(box: ParamBox) -> list[ParamPoint]:
    return [ParamPoint(float(a), float(t)) for a, t in grid_array(box)]


def sample_indices(box: ParamBox, rng_seed: int, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(rng_seed)
    return rng.integers(0, box.size, size=count)


def sample_uniform(box: ParamBox, rng_seed: int, count: int) -> list[ParamPoint]:
    """Draw ``count`` grid points i.i.d. uniformly (with replacement).

    Sampling is restricted to the same grid the acquisition scan uses, so
    random search and Bayesian optimization share one candidate set.
    """
    a_vals, t_vals = box.axis_values(0), box.axis_values(1)
    out = []
    for idx in sample_indices(box, rng_seed, count):
        i, j = divmod(int(idx), box.grid_n)
        out.append(ParamPoint(float(a_vals[i]), float(t_vals[j])))
    return out
