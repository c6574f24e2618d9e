"""Priority-queue order book analytics and mean-field swarm dynamics.

The package is organised around five pieces:

* :mod:`lobswarm.model` -- closed-form stationary analytics of the two-price
  priority book (waits, rewards, gain, critical ratio).
* :mod:`lobswarm.dynamics` -- the two-state switching dynamics: transition
  rates, drift, the prediction-update iteration and its fixed-point solve,
  equilibria, convergence certificates.
* :mod:`lobswarm.simulate` -- independent stochastic validators: an
  event-driven order-book simulation and an exact finite-population agent
  simulation, plus deterministic replication seeding.
* :mod:`lobswarm.sweeps` -- gain contours, drift fields, beta sweeps.
* :mod:`lobswarm.cli` / :mod:`lobswarm.output` -- command line front end and
  bit-stable CSV/JSON emission.
"""

from .model import (
    CriticalRatio,
    GainRegime,
    ModelParams,
    critical_ratio,
    expected_reward,
    expected_wait_low,
    expected_wait_priority,
    g_lipschitz_constant,
    g_value,
    workload_conservation_residual,
)
from .dynamics import (
    CLAMP_TOL,
    Equilibrium,
    IntegrationFaultError,
    IterationReport,
    PredictionPath,
    TransitionRates,
    drift,
    find_equilibria,
    gronwall_constant,
    initial_prediction,
    linear_coefficients,
    ode_residual,
    picard_iterate,
    rates_at,
    solve_fixed_point,
    solve_linear_step,
    sup_distance,
)
from .simulate import (
    AgentSimConfig,
    AgentSimPath,
    PooledQueueStats,
    QueueSimConfig,
    QueueSimStats,
    pool_queue_stats,
    replicate,
    replication_seeds,
    simulate_agents,
    simulate_priority_queue,
)
from .sweeps import (
    FieldGrid,
    GridSpec,
    beta_sweep_limits,
    drift_field_grid,
    g_contour_grid,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "GainRegime", "CriticalRatio",
    "expected_wait_priority", "expected_wait_low",
    "workload_conservation_residual", "expected_reward", "g_value",
    "critical_ratio", "g_lipschitz_constant",
    "CLAMP_TOL", "IntegrationFaultError", "TransitionRates", "PredictionPath",
    "IterationReport", "Equilibrium", "rates_at", "linear_coefficients",
    "drift", "initial_prediction", "solve_linear_step", "picard_iterate",
    "solve_fixed_point", "ode_residual", "sup_distance", "find_equilibria",
    "gronwall_constant",
    "QueueSimConfig", "QueueSimStats", "PooledQueueStats", "AgentSimConfig",
    "AgentSimPath", "simulate_priority_queue", "simulate_agents",
    "replication_seeds", "replicate", "pool_queue_stats",
    "GridSpec", "FieldGrid", "g_contour_grid", "drift_field_grid",
    "beta_sweep_limits",
    "__version__",
]
