"""Parameter-sweep grids: gain contours, time-zero drift fields, beta sweeps.

Grids are emitted as data, never plotted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .dynamics import PredictionPath, drift, solve_fixed_point
from .model import ModelParams, g_value

__all__ = [
    "GridSpec",
    "FieldGrid",
    "g_contour_grid",
    "drift_field_grid",
    "beta_sweep_limits",
]


@dataclass(frozen=True)
class GridSpec:
    """Inclusive uniform grids for two sweep axes."""

    x_min: float
    x_max: float
    x_count: int
    y_min: float
    y_max: float
    y_count: int

    def __post_init__(self):
        for name in ("x_min", "x_max", "y_min", "y_max"):
            if not math.isfinite(float(getattr(self, name))):
                raise ValueError(f"{name} must be finite")
        if self.x_count < 2 or self.y_count < 2:
            raise ValueError("axis counts must be >= 2")
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        if not self.y_min < self.y_max:
            raise ValueError("y_min must be below y_max")

    def x_values(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.x_count)

    def y_values(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.y_count)


@dataclass
class FieldGrid:
    """Scalar field sampled on a GridSpec; values[i, j] = f(x_i, y_j)."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.spec.x_count, self.spec.y_count):
            raise ValueError("values shape must be (x_count, y_count)")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.values = values


def g_contour_grid(params: ModelParams, spec: GridSpec) -> FieldGrid:
    """Gain values on a (ratio, waiting-cost) grid.

    x axis is the market ratio p in [0, 1]; y axis is the cost rate c >= 0.
    Monotone nondecreasing along both axes.
    """
    ps = spec.x_values()
    cs = spec.y_values()
    if ps[0] < 0.0 or ps[-1] > 1.0:
        raise ValueError("p axis must lie within [0, 1]")
    if cs[0] < 0.0:
        raise ValueError("c axis must be >= 0")
    values = np.empty((spec.x_count, spec.y_count))
    for j, c in enumerate(cs):
        values[:, j] = g_value(replace(params, c=float(c)), ps)
    return FieldGrid(spec, values)


def drift_field_grid(params: ModelParams, spec: GridSpec) -> FieldGrid:
    """Time-zero drift on a (starting ratio, random-switching rate) grid.

    x axis is p0 in [0, 1]; y axis is beta >= 0, substituted into the rates
    node by node.
    """
    p0s = spec.x_values()
    betas = spec.y_values()
    if p0s[0] < 0.0 or p0s[-1] > 1.0:
        raise ValueError("p0 axis must lie within [0, 1]")
    if betas[0] < 0.0:
        raise ValueError("beta axis must be >= 0")
    values = np.empty((spec.x_count, spec.y_count))
    for j, beta in enumerate(betas):
        values[:, j] = drift(replace(params, beta=float(beta)), p0s)
    return FieldGrid(spec, values)


def beta_sweep_limits(
    params: ModelParams,
    p0: float,
    beta_list: Sequence[float],
    t_end: float = 10.0,
    n_steps: int = 2000,
) -> list[PredictionPath]:
    """Swarm-limit trajectories from p0 for each random-switching rate.

    For p0 above the critical ratio the trajectories are pointwise ordered:
    a larger beta pulls the long-run level down toward 1/2.
    """
    if not beta_list:
        raise ValueError("beta_list must be non-empty")
    return [
        solve_fixed_point(replace(params, beta=float(b)), p0, t_end, n_steps)
        for b in beta_list
    ]
