"""Command-line front end.

    lobswarm <subcommand> [--config FILE] [flags...]

Subcommands: analytic, picard, fixed-point, equilibria, queue-sim, agent-sim,
g-contour, drift-field, beta-sweep.  Flags override config-file values, which
override the built-in defaults (the reference parameter set).  Results are
written as CSV or JSON; every output embeds (JSON) or is accompanied by
(CSV sidecar ``<out>.meta.json``) the fully resolved configuration, so any
run is reproducible from its own output.

Exit status: 0 success, 1 validation or I/O error, 2 mathematical
non-convergence of the prediction iteration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, replace

from .dynamics import (
    INITIAL_PREDICTION_KINDS,
    IntegrationFaultError,
    find_equilibria,
    initial_prediction,
    picard_iterate,
    solve_fixed_point,
)
from .model import (
    ModelParams,
    critical_ratio,
    expected_wait_low,
    expected_wait_priority,
    g_value,
)
from .output import emit_csv, emit_json, write_meta_sidecar
from .simulate import (
    AgentSimConfig,
    QueueSimConfig,
    pool_queue_stats,
    replicate,
    simulate_agents,
    simulate_priority_queue,
)
from .sweeps import GridSpec, beta_sweep_limits, drift_field_grid, g_contour_grid

OUTPUT_DIR_ENV = "LOBSWARM_OUTPUT_DIR"

COMMANDS = (
    "analytic",
    "picard",
    "fixed-point",
    "equilibria",
    "queue-sim",
    "agent-sim",
    "g-contour",
    "drift-field",
    "beta-sweep",
)

_DEFAULTS = {
    "rho": 0.9,
    "mu": 1.0,
    "theta1": 0.0,
    "delta_theta": 1.0,
    "c": 0.03,
    "alpha": 5.0,
    "beta": 0.1,
    "p0": 0.9,
    "t_end": 10.0,
    "n_steps": 2000,
    "tol": 1e-8,
    "max_iters": 200,
    "init": "static",
    "grid_resolution": 2000,
    "n_agents": 10_000,
    "n_orders": 100_000,
    "warmup": 10_000,
    "seed": 12345,
    "replications": 1,
    "beta_list": (0.0, 0.05, 0.1, 0.15, 0.2, 0.25),
    "format": "csv",
}

_GRID_DEFAULTS = {
    "g-contour": {"x_min": 0.0, "x_max": 1.0, "x_count": 201, "y_min": 0.0, "y_max": 0.06, "y_count": 201},
    "drift-field": {"x_min": 0.0, "x_max": 1.0, "x_count": 201, "y_min": 0.0, "y_max": 0.3, "y_count": 201},
}

_FLOAT_KEYS = {
    "lambda", "rho", "mu", "theta1", "theta2", "delta_theta", "c", "alpha", "beta",
    "p0", "t_end", "tol", "x_min", "x_max", "y_min", "y_max",
}
_INT_KEYS = {
    "n_steps", "max_iters", "grid_resolution", "n_agents", "n_orders", "warmup",
    "seed", "replications", "x_count", "y_count",
}
_STR_KEYS = {"init", "format", "out"}
_LIST_KEYS = {"beta_list"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS | _LIST_KEYS


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one run (canonical: lambda and theta2 derived)."""

    command: str
    lam: float
    mu: float
    theta1: float
    theta2: float
    c: float
    alpha: float
    beta: float
    p0: float
    t_end: float
    n_steps: int
    tol: float
    max_iters: int
    init: str
    grid_resolution: int
    n_agents: int
    n_orders: int
    warmup: int
    seed: int
    replications: int
    x_min: float
    x_max: float
    x_count: int
    y_min: float
    y_max: float
    y_count: int
    beta_list: tuple[float, ...]
    out: str
    format: str

    def params(self) -> ModelParams:
        return ModelParams(
            lam=self.lam, mu=self.mu, theta1=self.theta1, theta2=self.theta2,
            c=self.c, alpha=self.alpha, beta=self.beta,
        )

    def grid_spec(self) -> GridSpec:
        return GridSpec(self.x_min, self.x_max, self.x_count,
                        self.y_min, self.y_max, self.y_count)

    def to_meta(self) -> dict:
        meta = asdict(self)
        meta["lambda"] = meta.pop("lam")
        meta["beta_list"] = list(self.beta_list)
        return meta

    @classmethod
    def from_meta(cls, meta: dict) -> "RunConfig":
        data = dict(meta)
        data["lam"] = data.pop("lambda")
        data["beta_list"] = tuple(data["beta_list"])
        return cls(**data)


class CliUsageError(ValueError):
    """Bad flags or config input; reported on stderr with exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise CliUsageError(message)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    grp = common.add_argument_group("model")
    grp.add_argument("--lambda", dest="lam", type=float, help="sell arrival rate (exclusive with --rho)")
    grp.add_argument("--rho", type=float, help="traffic intensity lambda/mu (exclusive with --lambda)")
    grp.add_argument("--mu", type=float, help="buy arrival rate")
    grp.add_argument("--theta1", type=float, help="cheaper limit price")
    grp.add_argument("--theta2", type=float, help="pricier limit price (exclusive with --delta-theta)")
    grp.add_argument("--delta-theta", dest="delta_theta", type=float, help="price spread (exclusive with --theta2)")
    grp.add_argument("--c", type=float, help="waiting cost rate")
    grp.add_argument("--alpha", type=float, help="gain sensitivity of switching")
    grp.add_argument("--beta", type=float, help="random switching rate")
    grp = common.add_argument_group("dynamics")
    grp.add_argument("--p0", type=float, help="current market ratio / priority share")
    grp.add_argument("--t-end", dest="t_end", type=float, help="horizon")
    grp.add_argument("--n-steps", dest="n_steps", type=int, help="grid steps")
    grp.add_argument("--tol", type=float, help="sup-norm convergence tolerance")
    grp.add_argument("--max-iters", dest="max_iters", type=int, help="iteration cap")
    grp.add_argument("--init", choices=INITIAL_PREDICTION_KINDS, help="initial prediction shape")
    grp.add_argument("--grid-resolution", dest="grid_resolution", type=int, help="equilibria scan resolution")
    grp = common.add_argument_group("simulation")
    grp.add_argument("--n-agents", dest="n_agents", type=int, help="population size")
    grp.add_argument("--n-orders", dest="n_orders", type=int, help="sell orders to execute")
    grp.add_argument("--warmup", type=int, help="sell arrivals discarded before measuring")
    grp.add_argument("--seed", type=int, help="64-bit seed")
    grp.add_argument("--replications", type=int, help="independent replications")
    grp = common.add_argument_group("sweep")
    grp.add_argument("--x-min", dest="x_min", type=float)
    grp.add_argument("--x-max", dest="x_max", type=float)
    grp.add_argument("--x-count", dest="x_count", type=int)
    grp.add_argument("--y-min", dest="y_min", type=float)
    grp.add_argument("--y-max", dest="y_max", type=float)
    grp.add_argument("--y-count", dest="y_count", type=int)
    grp.add_argument("--beta-list", dest="beta_list", type=str, help="comma-separated beta values")
    grp = common.add_argument_group("output")
    grp.add_argument("--config", type=str, help="JSON config file (flat key/value)")
    grp.add_argument("--out", type=str, help="output file path")
    grp.add_argument("--format", choices=("csv", "json"), help="output format")

    parser = _Parser(prog="lobswarm", description="Order-book swarm dynamics toolkit")
    subparsers = parser.add_subparsers(dest="command", metavar="subcommand", parser_class=_Parser)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise CliUsageError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliUsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CliUsageError("config file must hold a flat JSON object")
    for key in data:
        if key not in _ALL_KEYS:
            raise CliUsageError(f"unknown config key: {key}")
    return data


def _coerce(key: str, value):
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
        if key in _LIST_KEYS:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip() != ""]
            return tuple(float(v) for v in value)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise CliUsageError(f"invalid value for {key}: {value!r}") from exc


def resolve_config(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    """Merge defaults <- config file <- flags into a canonical RunConfig."""
    explicit = {k: _coerce(k, v) for k, v in file_values.items()}
    explicit.update({k: _coerce(k, v) for k, v in flag_values.items() if v is not None})

    if "lambda" in explicit and "rho" in explicit:
        raise CliUsageError("lambda and rho are mutually exclusive; give exactly one")
    if "theta2" in explicit and "delta_theta" in explicit:
        raise CliUsageError("theta2 and delta_theta are mutually exclusive; give exactly one")

    merged = dict(_DEFAULTS)
    merged.update(_GRID_DEFAULTS.get(command, _GRID_DEFAULTS["g-contour"]))
    merged.update(explicit)

    mu = float(merged["mu"])
    lam = float(merged["lambda"]) if "lambda" in merged else float(merged["rho"]) * mu
    theta1 = float(merged["theta1"])
    theta2 = float(merged["theta2"]) if "theta2" in merged else theta1 + float(merged["delta_theta"])

    fmt = merged["format"]
    if fmt not in ("csv", "json"):
        raise CliUsageError("format must be csv or json")
    init = merged["init"]
    if init not in INITIAL_PREDICTION_KINDS:
        raise CliUsageError(f"init must be one of {INITIAL_PREDICTION_KINDS}")

    out = merged.get("out")
    if out is None:
        out_dir = os.environ.get(OUTPUT_DIR_ENV, ".")
        out = os.path.join(out_dir, f"{command}.{fmt}")

    return RunConfig(
        command=command,
        lam=lam, mu=mu, theta1=theta1, theta2=theta2,
        c=float(merged["c"]), alpha=float(merged["alpha"]), beta=float(merged["beta"]),
        p0=float(merged["p0"]), t_end=float(merged["t_end"]),
        n_steps=int(merged["n_steps"]), tol=float(merged["tol"]),
        max_iters=int(merged["max_iters"]), init=str(merged["init"]),
        grid_resolution=int(merged["grid_resolution"]),
        n_agents=int(merged["n_agents"]), n_orders=int(merged["n_orders"]),
        warmup=int(merged["warmup"]), seed=int(merged["seed"]),
        replications=int(merged["replications"]),
        x_min=float(merged["x_min"]), x_max=float(merged["x_max"]),
        x_count=int(merged["x_count"]),
        y_min=float(merged["y_min"]), y_max=float(merged["y_max"]),
        y_count=int(merged["y_count"]),
        beta_list=tuple(float(b) for b in merged["beta_list"]),
        out=str(out), format=fmt,
    )


def _emit(cfg: RunConfig, result, extra: dict | None = None) -> None:
    if cfg.format == "json":
        emit_json(result, cfg.out, cfg.to_meta(), extra)
    else:
        emit_csv(result, cfg.out)
        write_meta_sidecar(cfg.out, cfg.to_meta())


def _report_path(cfg: RunConfig) -> str:
    root, ext = os.path.splitext(cfg.out)
    return f"{root}.report{ext or '.csv'}"


def _cmd_analytic(cfg: RunConfig) -> int:
    params = cfg.params()
    crit = critical_ratio(params)
    w1 = float(expected_wait_priority(params, cfg.p0))
    w2 = float(expected_wait_low(params, cfg.p0))
    gain = float(g_value(params, cfg.p0))
    summary = {
        "p_e": crit.value if crit.interior else crit.regime.value,
        "regime": crit.regime.value,
        "expected_wait_priority": w1,
        "expected_wait_low": w2,
        "g_value": gain,
    }
    _emit(cfg, summary)
    pe_text = repr(crit.value) if crit.interior else crit.regime.value
    print(f"p_e={pe_text} E_W1={w1!r} E_W2={w2!r} g_p0={gain!r} -> {cfg.out}")
    return 0


def _cmd_picard(cfg: RunConfig) -> int:
    params = cfg.params()
    x0 = initial_prediction(cfg.init, cfg.p0, cfg.t_end, cfg.n_steps)
    limit, report = picard_iterate(
        params, x0, cfg.p0, tol=cfg.tol, max_iters=cfg.max_iters, keep_iterates=True,
    )
    extra = {
        "converged": report.converged,
        "n_iters": report.n_iters,
        "residual": report.residual,
        "sup_diffs": [float(d) for d in report.sup_diffs],
    }
    _emit(cfg, report.iterates, extra)
    if cfg.format == "csv":
        emit_csv(replace_iterates_report(report), _report_path(cfg))
    last = report.sup_diffs[-1] if report.sup_diffs else float("nan")
    print(
        f"converged={report.converged} iters={report.n_iters} "
        f"last_sup_diff={last!r} residual={report.residual!r} -> {cfg.out}"
    )
    return 0 if report.converged else 2


def replace_iterates_report(report):
    """Report copy without the bulky iterate list, for standalone emission."""
    return replace(report, iterates=None)


def _cmd_fixed_point(cfg: RunConfig) -> int:
    path = solve_fixed_point(cfg.params(), cfg.p0, cfg.t_end, cfg.n_steps)
    _emit(cfg, path)
    print(f"x_end={float(path.values[-1])!r} n_steps={cfg.n_steps} -> {cfg.out}")
    return 0


def _cmd_equilibria(cfg: RunConfig) -> int:
    eq = find_equilibria(cfg.params(), cfg.grid_resolution)
    _emit(cfg, eq)
    desc = ", ".join(f"{e.ratio!r}({'s' if e.stable else 'u'})" for e in eq) or "none"
    print(f"equilibria={desc} -> {cfg.out}")
    return 0


def _cmd_queue_sim(cfg: RunConfig) -> int:
    base = QueueSimConfig(
        params=cfg.params(), p=cfg.p0, n_orders=cfg.n_orders,
        warmup_orders=cfg.warmup, seed=cfg.seed,
    )
    if cfg.replications == 1:
        stats = simulate_priority_queue(base)
        _emit(cfg, stats, {"discarded_buys": stats.discarded_buys})
        print(
            f"mean_wait_1={stats.mean_wait_1!r} mean_wait_2={stats.mean_wait_2!r} "
            f"n={stats.n_1 + stats.n_2} -> {cfg.out}"
        )
        return 0
    reps = replicate(
        lambda seed: simulate_priority_queue(replace(base, seed=seed)),
        cfg.replications, cfg.seed,
    )
    pooled = pool_queue_stats(reps)
    _emit(cfg, pooled, {"replications": [asdict(s) for s in reps]})
    print(
        f"pooled mean_wait_1={pooled.mean_wait_1!r} mean_wait_2={pooled.mean_wait_2!r} "
        f"reps={pooled.n_replications} -> {cfg.out}"
    )
    return 0


def _cmd_agent_sim(cfg: RunConfig) -> int:
    base = AgentSimConfig(
        params=cfg.params(), n_agents=cfg.n_agents, p0=cfg.p0,
        t_end=cfg.t_end, seed=cfg.seed,
    )
    if cfg.replications == 1:
        paths = [simulate_agents(base)]
    else:
        paths = replicate(
            lambda seed: simulate_agents(replace(base, seed=seed)),
            cfg.replications, cfg.seed,
        )
    _emit(cfg, paths)
    final = float(paths[0].fractions[-1])
    events = sum(len(p.times) - 1 for p in paths)
    print(f"final_fraction={final!r} events={events} series={len(paths)} -> {cfg.out}")
    return 0


def _cmd_g_contour(cfg: RunConfig) -> int:
    grid = g_contour_grid(cfg.params(), cfg.grid_spec())
    _emit(cfg, grid)
    print(f"grid {cfg.x_count}x{cfg.y_count} (p, c) -> {cfg.out}")
    return 0


def _cmd_drift_field(cfg: RunConfig) -> int:
    grid = drift_field_grid(cfg.params(), cfg.grid_spec())
    _emit(cfg, grid)
    print(f"grid {cfg.x_count}x{cfg.y_count} (p0, beta) -> {cfg.out}")
    return 0


def _cmd_beta_sweep(cfg: RunConfig) -> int:
    paths = beta_sweep_limits(cfg.params(), cfg.p0, cfg.beta_list, cfg.t_end, cfg.n_steps)
    _emit(cfg, paths)
    print(f"{len(paths)} trajectories for beta in {list(cfg.beta_list)} -> {cfg.out}")
    return 0


_HANDLERS = {
    "analytic": _cmd_analytic,
    "picard": _cmd_picard,
    "fixed-point": _cmd_fixed_point,
    "equilibria": _cmd_equilibria,
    "queue-sim": _cmd_queue_sim,
    "agent-sim": _cmd_agent_sim,
    "g-contour": _cmd_g_contour,
    "drift-field": _cmd_drift_field,
    "beta-sweep": _cmd_beta_sweep,
}

_FLAG_KEYS = {
    "lam": "lambda", "rho": "rho", "mu": "mu", "theta1": "theta1", "theta2": "theta2",
    "delta_theta": "delta_theta", "c": "c", "alpha": "alpha", "beta": "beta",
    "p0": "p0", "t_end": "t_end", "n_steps": "n_steps", "tol": "tol",
    "max_iters": "max_iters", "init": "init", "grid_resolution": "grid_resolution",
    "n_agents": "n_agents", "n_orders": "n_orders", "warmup": "warmup",
    "seed": "seed", "replications": "replications",
    "x_min": "x_min", "x_max": "x_max", "x_count": "x_count",
    "y_min": "y_min", "y_max": "y_max", "y_count": "y_count",
    "beta_list": "beta_list", "out": "out", "format": "format",
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliUsageError(f"a subcommand is required: one of {', '.join(COMMANDS)}")
        file_values = _load_config_file(args.config) if args.config else {}
        flag_values = {key: getattr(args, dest) for dest, key in _FLAG_KEYS.items()}
        cfg = resolve_config(args.command, file_values, flag_values)
        return _HANDLERS[args.command](cfg)
    except (ValueError, IntegrationFaultError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
