"""Stationary analytics for a two-price, one-sided limit order book.

Sell orders arrive as a Poisson stream of rate ``lam`` and carry one of two
limit prices ``theta1 < theta2``; orders at the cheaper price form a strict
priority class that is always executed first.  Market buy orders arrive at
rate ``mu`` and each lifts the head of the priority queue, falling back to
the ``theta2`` queue, so execution epochs are exactly the buy arrivals.  With
``p`` the fraction of sellers choosing ``theta1`` and ``rho = lam / mu < 1``
(buy-dominant market), the book is a stationary two-class M/M/1 priority
queue with closed forms

    E[W1] = 1 / (mu - lam * p)
    E[W2] = mu / ((mu - lam) * (mu - lam * p))
    p * E[W1] + (1 - p) * E[W2] = 1 / (mu - lam)       (workload conservation)

A seller earns ``theta_i - c * W_i`` from a price-``theta_i`` order when
waiting costs ``c`` per unit time.  The g-value

    g(p, c) = (rho * c / mu) / ((1 - rho) * (1 - rho * p)) - (theta2 - theta1)

is the expected gain of the cheaper price over the pricier one; it is
increasing and convex in ``p``, and its root is the critical ratio where both
prices break even.

All functions are pure; ``p`` may be a float or a numpy array.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "GainRegime",
    "CriticalRatio",
    "expected_wait_priority",
    "expected_wait_low",
    "workload_conservation_residual",
    "expected_reward",
    "g_value",
    "critical_ratio",
    "g_lipschitz_constant",
]


@dataclass(frozen=True)
class ModelParams:
    """Market and behaviour constants.

    lam, mu         sell / buy order arrival rates (per unit time)
    theta1, theta2  the two admissible limit prices, theta1 < theta2
    c               waiting cost per unit time while an order sits unexecuted
    alpha           gain-sensitivity of strategy switching
    beta            rate of random (zero-intelligence) strategy switching

    Defaults are the reference parameter set used throughout the docs and
    tests: rho = 0.9, c = 0.03, delta_theta = 1, alpha = 5, beta = 0.1, with
    time normalised so that mu = 1 (prices enter the dynamics only through
    the spread, so theta1 defaults to 0).
    """

    lam: float = 0.9
    mu: float = 1.0
    theta1: float = 0.0
    theta2: float = 1.0
    c: float = 0.03
    alpha: float = 5.0
    beta: float = 0.1

    def __post_init__(self):
        for name in ("lam", "mu", "theta1", "theta2", "c", "alpha", "beta"):
            value = getattr(self, name)
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"{_FIELD_LABEL[name]} must be finite")
            object.__setattr__(self, name, value)
        if self.lam <= 0.0:
            raise ValueError("lambda (sell arrival rate) must be positive")
        if self.mu <= 0.0:
            raise ValueError("mu (buy arrival rate) must be positive")
        if self.lam / self.mu >= 1.0:
            raise ValueError("rho = lambda/mu must be < 1 (buy-dominant market)")
        if self.theta2 - self.theta1 <= 0.0:
            raise ValueError("theta2 must exceed theta1 (positive price spread)")
        if self.c < 0.0:
            raise ValueError("c (waiting cost rate) must be >= 0")
        if self.alpha < 0.0:
            raise ValueError("alpha (gain sensitivity) must be >= 0")
        if self.beta < 0.0:
            raise ValueError("beta (random switching rate) must be >= 0")

    @property
    def rho(self) -> float:
        """Traffic intensity lam / mu, strictly below 1."""
        return self.lam / self.mu

    @property
    def delta_theta(self) -> float:
        """Price spread theta2 - theta1, strictly positive."""
        return self.theta2 - self.theta1


_FIELD_LABEL = {
    "lam": "lambda",
    "mu": "mu",
    "theta1": "theta1",
    "theta2": "theta2",
    "c": "c",
    "alpha": "alpha",
    "beta": "beta",
}


def check_ratio(p, name: str = "p") -> None:
    """Raise ValueError unless every entry of ``p`` lies in [0, 1]."""
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")


def expected_wait_priority(params: ModelParams, p):
    """Mean stationary wait of a priority-class order: 1 / (mu - lam * p).

    The priority class alone is an M/M/1 queue with arrival rate lam * p and
    service epochs given by the buy arrivals, so lower-class traffic never
    delays it.
    """
    check_ratio(p)
    return 1.0 / (params.mu - params.lam * p)


def expected_wait_low(params: ModelParams, p):
    """Mean stationary wait of a low-priority order.

    Obtained from workload conservation: priority scheduling redistributes
    waiting between the classes without changing the total, which equals the
    single-class M/M/1 value 1 / (mu - lam).
    """
    check_ratio(p)
    return params.mu / ((params.mu - params.lam) * (params.mu - params.lam * p))


def workload_conservation_residual(params: ModelParams, p):
    """p * E[W1] + (1 - p) * E[W2] - 1 / (mu - lam).

    Analytically zero for every p; exposed so tests can pin the identity to a
    floating-point tolerance.
    """
    check_ratio(p)
    w1 = expected_wait_priority(params, p)
    w2 = expected_wait_low(params, p)
    return p * w1 + (1.0 - p) * w2 - 1.0 / (params.mu - params.lam)


def expected_reward(params: ModelParams, p, order_class: int):
    """Expected reward theta_i - c * E[W_i] of a class-1 or class-2 order."""
    check_ratio(p)
    if order_class == 1:
        return params.theta1 - params.c * expected_wait_priority(params, p)
    if order_class == 2:
        return params.theta2 - params.c * expected_wait_low(params, p)
    raise ValueError("order_class must be 1 or 2")


def g_value(params: ModelParams, p):
    """Expected gain from choosing the cheaper (priority) price at ratio p.

    Equals expected_reward(p, 1) - expected_reward(p, 2); positive when the
    waiting-cost saving of the priority queue outweighs the price spread.
    """
    check_ratio(p)
    rho = params.rho
    return (rho * params.c / params.mu) / ((1.0 - rho) * (1.0 - rho * p)) - params.delta_theta


class GainRegime(enum.Enum):
    """Where the g-value root sits relative to the admissible ratios [0, 1]."""

    INTERIOR = "interior"
    ALWAYS_POSITIVE = "always-positive"  # root below 0: cheaper price favoured at every ratio
    ALWAYS_NEGATIVE = "always-negative"  # root above 1: pricier order favoured at every ratio


@dataclass(frozen=True)
class CriticalRatio:
    """Root of the g-value in p, tagged with the regime when no interior root exists."""

    value: float | None
    regime: GainRegime

    @property
    def interior(self) -> bool:
        return self.regime is GainRegime.INTERIOR


def critical_ratio(params: ModelParams) -> CriticalRatio:
    """Market ratio at which both prices yield the same expected reward.

    Closed form root of g: p_e = 1/rho - (c/mu) / (delta_theta * (1 - rho)).
    When the root falls outside (0, 1) the gain keeps one sign on the whole
    interval and the selection problem is one-sided; boundary roots are folded
    into the one-sided regimes.
    """
    rho = params.rho
    root = 1.0 / rho - (params.c / params.mu) / (params.delta_theta * (1.0 - rho))
    if root <= 0.0:
        return CriticalRatio(None, GainRegime.ALWAYS_POSITIVE)
    if root >= 1.0:
        return CriticalRatio(None, GainRegime.ALWAYS_NEGATIVE)
    return CriticalRatio(root, GainRegime.INTERIOR)


def g_lipschitz_constant(params: ModelParams) -> float:
    """Upper bound rho^2 (c/mu) / (1-rho)^3 on dg/dp over [0, 1].

    g is convex in p, so its slope is maximised at p = 1.
    """
    rho = params.rho
    return rho * rho * (params.c / params.mu) / (1.0 - rho) ** 3
