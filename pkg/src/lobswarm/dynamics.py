"""Two-state switching dynamics of the trader population.

Each trader holds one of the two prices and switches at a rate proportional
to the gain a switch would earn under the current market ratio, plus a
zero-intelligence rate ``beta``:

    alpha1(p) = beta + alpha * max(0, -g(p, c))    (cheap -> pricey)
    alpha2(p) = beta + alpha * max(0,  g(p, c))    (pricey -> cheap)

The market fraction x(t) of cheap-price traders then obeys the nonlinear
fixed-point equation dx/dt = -alpha1(x) x + alpha2(x) (1 - x).  Traders that
only *predict* the market update their prediction by solving the linear
equation with coefficients frozen from the previous prediction path; iterating
that update converges uniformly to the fixed point regardless of the initial
prediction, which is the swarm limit this module computes and certifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    ModelParams,
    check_ratio,
    g_lipschitz_constant,
    g_value,
)

__all__ = [
    "CLAMP_TOL",
    "IntegrationFaultError",
    "TransitionRates",
    "PredictionPath",
    "IterationReport",
    "Equilibrium",
    "rates_at",
    "linear_coefficients",
    "drift",
    "initial_prediction",
    "solve_linear_step",
    "picard_iterate",
    "solve_fixed_point",
    "ode_residual",
    "sup_distance",
    "find_equilibria",
    "gronwall_constant",
]

# Values that leave [0, 1] by more than this after an integration step signal
# a solver misuse (step too coarse for the rates), not a model regime.
CLAMP_TOL = 1e-9

INITIAL_PREDICTION_KINDS = ("decreasing", "oscillating", "static")


class IntegrationFaultError(RuntimeError):
    """An integration step left [0, 1] by more than CLAMP_TOL."""


@dataclass(frozen=True)
class TransitionRates:
    """Switching rates at a fixed market ratio; at most one side exceeds beta."""

    alpha1: float  # cheap -> pricey
    alpha2: float  # pricey -> cheap


def rates_at(params: ModelParams, p) -> TransitionRates:
    """Switching rates at market ratio p (scalar or array)."""
    check_ratio(p)
    g = g_value(params, p)
    return TransitionRates(
        alpha1=params.beta + params.alpha * np.maximum(0.0, -g),
        alpha2=params.beta + params.alpha * np.maximum(0.0, g),
    )


def linear_coefficients(params: ModelParams, p):
    """Coefficients (a, b) of the frozen-market equation dx/dt = a x + b.

    a = -(alpha1 + alpha2) = -2 beta - alpha |g|,  b = alpha2.  Both inherit
    the Lipschitz continuity and boundedness of g on [0, 1].
    """
    rates = rates_at(params, p)
    return -(rates.alpha1 + rates.alpha2), rates.alpha2


def drift(params: ModelParams, x):
    """Rate of change of the cheap-price fraction: -alpha1(x) x + alpha2(x) (1 - x)."""
    rates = rates_at(params, x)
    return -rates.alpha1 * x + rates.alpha2 * (1.0 - x)


@dataclass
class PredictionPath:
    """A market-ratio trajectory sampled on the uniform grid t_k = k * t_end / n_steps."""

    t_end: float
    values: np.ndarray

    def __post_init__(self):
        self.t_end = float(self.t_end)
        if not (self.t_end > 0.0 and math.isfinite(self.t_end)):
            raise ValueError("t_end must be positive and finite")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.shape[0] < 3:
            raise ValueError("values must be a 1-d grid with n_steps >= 2")
        check_ratio(values, "path values")
        self.values = values

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.values.shape[0])


@dataclass
class IterationReport:
    """Convergence certificate of a prediction-update run."""

    sup_diffs: list[float]
    n_iters: int
    converged: bool
    residual: float
    iterates: list[PredictionPath] | None = field(default=None, repr=False)


@dataclass(frozen=True)
class Equilibrium:
    """A rest point of the drift with its one-sided stability classification."""

    ratio: float
    stable: bool


def initial_prediction(kind: str, p0: float, t_end: float, n_steps: int) -> PredictionPath:
    """A stock initial prediction path: 'decreasing', 'oscillating' or 'static'.

    decreasing   p0 * exp(-t)
    oscillating  alternating 0/1 on six equal subintervals, starting at 0,
                 right-continuous at the jump nodes
    static       constant p0

    Only iterates n >= 1 are pinned to p0 at t = 0; the initial prediction is
    an arbitrary path and may start elsewhere (the oscillating one starts at 0).
    """
    check_ratio(p0, "p0")
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    times = np.linspace(0.0, float(t_end), n_steps + 1)
    if kind == "decreasing":
        values = p0 * np.exp(-times)
    elif kind == "oscillating":
        segment = np.minimum(5, 6 * np.arange(n_steps + 1) // n_steps)
        values = (segment % 2).astype(float)
    elif kind == "static":
        values = np.full(n_steps + 1, float(p0))
    else:
        raise ValueError(f"init must be one of {INITIAL_PREDICTION_KINDS}")
    return PredictionPath(t_end, values)


def _clamp_step(x: float) -> float:
    if x < 0.0:
        if x < -CLAMP_TOL:
            raise IntegrationFaultError(f"integration step left [0, 1] by {-x:.3e}")
        return 0.0
    if x > 1.0:
        if x > 1.0 + CLAMP_TOL:
            raise IntegrationFaultError(f"integration step left [0, 1] by {x - 1.0:.3e}")
        return 1.0
    return x


_SCAN_CHUNK = 2048


def _scan_scalar(A, B, out, start, end, cur):
    """Step-by-step affine recursion with the per-step clamp policy."""
    for k in range(start, end):
        cur = _clamp_step(A[k] * cur + B[k])
        out[k + 1] = cur
    return cur


def _scan_affine(A, B, x0: float) -> np.ndarray:
    """Run x_{k+1} = A_k x_k + B_k from x0, clamping per the CLAMP_TOL policy.

    Chunks are evaluated with prefix products (A_k > 0 and monotone products,
    so each term's rounding is damped exactly as in the step-by-step
    recursion); any chunk that produces a value outside [0, 1], a nonpositive
    factor, or a vanishing product is redone scalar so the clamp can act per
    step.
    """
    n = A.shape[0]
    out = np.empty(n + 1)
    out[0] = x0
    cur = float(x0)
    pos = 0
    while pos < n:
        end = min(pos + _SCAN_CHUNK, n)
        factors = A[pos:end]
        if np.any(factors <= 0.0):
            cur = _scan_scalar(A, B, out, pos, end, cur)
            pos = end
            continue
        prod = np.cumprod(factors)
        if prod[-1] < 1e-250:
            cur = _scan_scalar(A, B, out, pos, end, cur)
            pos = end
            continue
        segment = prod * (cur + np.cumsum(B[pos:end] / prod))
        if segment.min() < 0.0 or segment.max() > 1.0:
            cur = _scan_scalar(A, B, out, pos, end, cur)
        else:
            out[pos + 1 : end + 1] = segment
            cur = float(segment[-1])
        pos = end
    return out


def solve_linear_step(params: ModelParams, driving: PredictionPath, p0: float) -> PredictionPath:
    """One prediction update: solve dx/dt = a(y(t)) x + b(y(t)), x(0) = p0.

    y is the driving (previous) prediction path; the solution lives on the
    same grid.  Classical fourth-order Runge-Kutta with fixed step
    h = t_end / n_steps; the driving path is evaluated at half-steps by linear
    interpolation.
    """
    check_ratio(p0, "p0")
    v = driving.values
    n = driving.n_steps
    h = driving.t_end / n

    a_nodes, b_nodes = linear_coefficients(params, v)
    a_mid, b_mid = linear_coefficients(params, 0.5 * (v[:-1] + v[1:]))
    a0, b0 = a_nodes[:-1], b_nodes[:-1]
    a1, b1 = a_nodes[1:], b_nodes[1:]

    # Stage k_i = p_i x + q_i; the step is affine in x because the equation is
    # linear, so the whole sweep reduces to a scan of x <- A x + B.
    p1, q1 = a0, b0
    p2 = a_mid * (1.0 + 0.5 * h * p1)
    q2 = a_mid * (0.5 * h * q1) + b_mid
    p3 = a_mid * (1.0 + 0.5 * h * p2)
    q3 = a_mid * (0.5 * h * q2) + b_mid
    p4 = a1 * (1.0 + h * p3)
    q4 = a1 * (h * q3) + b1
    A = 1.0 + (h / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4)
    B = (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4)

    return PredictionPath(driving.t_end, _scan_affine(A, B, float(p0)))


def picard_iterate(
    params: ModelParams,
    x0: PredictionPath,
    p0: float,
    tol: float = 1e-8,
    max_iters: int = 200,
    keep_iterates: bool = False,
) -> tuple[PredictionPath, IterationReport]:
    """Iterate prediction updates until successive paths agree in sup norm.

    Starts from the arbitrary initial path x0 and repeatedly applies
    solve_linear_step, always re-pinning x(0) = p0.  Stops when the sup-norm
    distance between successive iterates drops to ``tol`` or after
    ``max_iters`` updates; non-convergence is reported, not raised.  The
    report carries the per-iteration distances and the fixed-point ODE
    residual of the final path.
    """
    if not (tol > 0.0 and math.isfinite(tol)):
        raise ValueError("tol must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    check_ratio(p0, "p0")

    current = x0
    sup_diffs: list[float] = []
    iterates = [x0] if keep_iterates else None
    converged = False
    for _ in range(max_iters):
        update = solve_linear_step(params, current, p0)
        diff = float(np.max(np.abs(update.values - current.values)))
        sup_diffs.append(diff)
        current = update
        if keep_iterates:
            iterates.append(update)
        if diff <= tol:
            converged = True
            break

    report = IterationReport(
        sup_diffs=sup_diffs,
        n_iters=len(sup_diffs),
        converged=converged,
        residual=ode_residual(params, current),
        iterates=iterates,
    )
    return current, report


def solve_fixed_point(
    params: ModelParams,
    p0: float,
    t_end: float = 10.0,
    n_steps: int = 2000,
) -> PredictionPath:
    """Integrate the nonlinear equation dx/dt = drift(x), x(0) = p0, directly.

    Same fixed-step fourth-order Runge-Kutta and clamp policy as the linear
    update; agrees with the iterated-prediction limit up to discretisation.
    """
    check_ratio(p0, "p0")
    if not (t_end > 0.0 and math.isfinite(t_end)):
        raise ValueError("t_end must be positive and finite")
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")

    h = float(t_end) / n_steps
    values = np.empty(n_steps + 1)
    x = float(p0)
    values[0] = x
    for k in range(n_steps):
        k1 = drift(params, x)
        k2 = drift(params, _clamp_step(x + 0.5 * h * k1))
        k3 = drift(params, _clamp_step(x + 0.5 * h * k2))
        k4 = drift(params, _clamp_step(x + h * k3))
        x = _clamp_step(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        values[k + 1] = x
    return PredictionPath(t_end, values)


def ode_residual(params: ModelParams, path: PredictionPath) -> float:
    """Sup-norm residual of dx/dt - drift(x) on the interior grid nodes.

    Centred differences, so the value carries an O(h^2) discretisation floor
    even for the exact flow.
    """
    v = path.values
    h = path.t_end / path.n_steps
    approx_rate = (v[2:] - v[:-2]) / (2.0 * h)
    return float(np.max(np.abs(approx_rate - drift(params, v[1:-1]))))


def sup_distance(first: PredictionPath, second: PredictionPath) -> float:
    """Sup-norm distance between two paths on the same grid."""
    if first.values.shape != second.values.shape or first.t_end != second.t_end:
        raise ValueError("prediction paths are on different grids")
    return float(np.max(np.abs(first.values - second.values)))


def _bisect_root(params: ModelParams, lo: float, hi: float, f_lo: float) -> float:
    """Bisect a sign change of the drift down to an interval of 1e-10."""
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        f_mid = float(drift(params, mid))
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _classify(params: ModelParams, root: float) -> bool:
    """Stability from the drift sign on either side (the drift is continuous
    but kinked at the critical ratio, so no derivative test)."""
    eps = 1e-6
    left = float(drift(params, max(0.0, root - eps)))
    right = float(drift(params, min(1.0, root + eps)))
    return left >= 0.0 >= right


def find_equilibria(params: ModelParams, grid_resolution: int = 2000) -> list[Equilibrium]:
    """All rest points of the drift on [0, 1], each tagged stable/unstable.

    Interior roots come from a sign scan on a uniform grid refined by
    bisection; the endpoints are included when the boundary rate vanishes
    there (only possible for beta = 0), in which case the interior drift
    points at the absorbing endpoint.
    """
    if grid_resolution < 100:
        raise ValueError("grid_resolution must be >= 100")

    xs = np.linspace(0.0, 1.0, grid_resolution + 1)
    ds = np.asarray(drift(params, xs))

    roots: list[float] = []
    boundary_rates = rates_at(params, np.array([0.0, 1.0]))
    if float(np.asarray(boundary_rates.alpha2)[0]) == 0.0:
        roots.append(0.0)  # drift(0) = alpha2(0)
    for i in range(grid_resolution):
        lo, hi = float(xs[i]), float(xs[i + 1])
        f_lo, f_hi = float(ds[i]), float(ds[i + 1])
        if f_lo == 0.0 and lo not in roots:
            roots.append(lo)
        elif f_lo * f_hi < 0.0:
            roots.append(_bisect_root(params, lo, hi, f_lo))
    if float(np.asarray(boundary_rates.alpha1)[1]) == 0.0:
        roots.append(1.0)  # drift(1) = -alpha1(1)
    elif float(ds[-1]) == 0.0:
        roots.append(1.0)

    deduped: list[float] = []
    for r in sorted(roots):
        if not deduped or r - deduped[-1] > 1e-8:
            deduped.append(r)
    return [Equilibrium(r, _classify(params, r)) for r in deduped]


def gronwall_constant(params: ModelParams, t_end: float) -> float:
    """Growth constant L such that successive prediction updates obey
    sup |x_{n+1} - x_n| <= C (L t)^n / n! on [0, t_end].

    L = L2 * exp(L1 * t_end) with L1 = sup |a| = 2 beta + alpha * max |g| and
    L2 the joint Lipschitz bound of (a, b) in the driving path, 2 alpha * K
    for K the g slope bound.
    """
    K = g_lipschitz_constant(params)
    g_max = max(abs(float(g_value(params, 0.0))), abs(float(g_value(params, 1.0))))
    growth = 2.0 * params.beta + params.alpha * g_max
    lipschitz = 2.0 * params.alpha * K
    return lipschitz * math.exp(growth * float(t_end))
