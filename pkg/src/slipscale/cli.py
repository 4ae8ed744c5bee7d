"""Command-line entry point: config parsing, run orchestration, artifacts.

A run reads a flat key=value config file, executes one command and writes
``records.csv`` (frozen schema, 12 significant digits, LF endings),
``run.json`` (resolved config, versions, seed, grid notes) and optionally
``plot.svg``.  Exit codes: 0 success, 2 validation error, 3 solver failure.
"""

from __future__ import annotations

import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import constructions as cons
from .analysis import BoundPair, analytic_bounds, q_alpha
from .energy import MaterialParams, scalar_energy, total_energy
from .geometry import BCKind, Dimension, DomainSpec, make_grid
from .minimizer import SolverConfig, brute_force_minimize, minimize
from .sweep import (
    BRACKET_SLACK,
    SweepRecord,
    _bracket_ok,
    boundary_case_study,
    regime_map,
    sweep_L,
    sweep_gamma,
)

CSV_HEADER = "L,gamma,sigma,tau,j_numeric,lower,upper_min,regime,bracket_ok,runtime_s"

COMMANDS = (
    "evaluate-construction", "minimize", "sweep-L", "sweep-gamma",
    "regime-map", "boundary-case", "q-alpha", "oracle-check",
)

_BC = {"bc1": BCKind.BC1_DIAGONAL, "bc2": BCKind.BC2_HORIZONTAL, "scalar": BCKind.SCALAR_SHEAR}

_KEYS = {
    "evaluate-construction": {"command", "name", "l", "gamma", "sigma", "tau", "n",
                              "epsilon", "alpha", "output_dir", "rng_seed", "plot"},
    "minimize": {"command", "bc", "l", "gamma", "sigma", "tau", "n", "single_slip",
                 "output_dir", "rng_seed", "plot", "n_random_starts"},
    "sweep-L": {"command", "bc", "gamma", "sigma", "tau", "ls", "n",
                "output_dir", "rng_seed", "plot", "n_random_starts"},
    "sweep-gamma": {"command", "bc", "l", "sigma", "tau", "gammas", "n",
                    "output_dir", "rng_seed", "plot", "n_random_starts"},
    "regime-map": {"command", "bc", "ls", "gamma", "sigma", "n",
                   "output_dir", "rng_seed", "plot", "n_random_starts"},
    "boundary-case": {"command", "case", "gamma", "alphas", "n", "output_dir", "rng_seed", "plot"},
    "q-alpha": {"command", "alphas", "output_dir", "rng_seed", "plot"},
    "oracle-check": {"command", "instances", "n", "output_dir", "rng_seed", "plot"},
}


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


def parse_config(path: str) -> dict:
    """Read the flat key=value file; lowercase snake-case keys, # comments."""
    config = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
                key, val = line.split("=", 1)
                key = key.strip().lower()
                if not key.replace("_", "").isalnum():
                    raise ConfigError(f"{path}:{ln}: bad key {key!r}")
                config[key] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "command" not in config:
        raise ConfigError("config must set command=<...>")
    cmd = config["command"]
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; options: {', '.join(COMMANDS)}")
    allowed = _KEYS[cmd]
    unknown = set(config) - allowed
    if unknown:
        raise ConfigError(f"unknown keys for {cmd}: {', '.join(sorted(unknown))}")
    return config


def _get_float(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key}")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key {key}: not a number: {cfg[key]!r}") from exc


def _get_int(cfg, key, default=None):
    v = _get_float(cfg, key, default)
    if v != int(v):
        raise ConfigError(f"key {key}: expected integer, got {v}")
    return int(v)


def _get_list(cfg, key):
    if key not in cfg or not cfg[key].strip():
        raise ConfigError(f"missing or empty list for key {key}")
    try:
        vals = [float(t) for t in cfg[key].replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"key {key}: bad list {cfg[key]!r}") from exc
    if not vals:
        raise ConfigError(f"empty list for key {key}")
    return vals


def _get_bool(cfg, key, default=False):
    if key not in cfg:
        return default
    v = cfg[key].lower()
    if v in ("true", "1", "yes"):
        return True
    if v in ("false", "0", "no"):
        return False
    raise ConfigError(f"key {key}: expected true/false, got {cfg[key]!r}")


def _get_bc(cfg):
    name = cfg.get("bc", "")
    if name not in _BC:
        raise ConfigError(f"key bc must be one of {sorted(_BC)}, got {name!r}")
    return _BC[name]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.12g}"
    return str(x)


def _record_row(r: SweepRecord) -> str:
    # runtime_s is written as 0 so identical runs stay byte-identical;
    # measured per-record wall times are reported in run.json
    lower = r.bounds.lower if r.bounds.lower_determined else None
    cols = [r.L, r.gamma, r.sigma, r.tau, r.j_numeric, lower,
            r.bounds.upper_min, r.regime, r.bracket_ok, 0.0]
    return ",".join(_fmt(c) for c in cols)


def _write_outputs(outdir, records, config, notes, failed, plot_spec=None):
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, "records.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(_record_row(r) + "\n")
    run_info = {
        "config": dict(sorted(config.items())),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "seed": config.get("rng_seed", "0"),
        "bracket_slack": BRACKET_SLACK,
        "notes": notes,
        "solver_failures": failed,
        "runtimes_s": [r.runtime_seconds for r in records],
    }
    with open(os.path.join(outdir, "run.json"), "w", encoding="utf-8") as fh:
        json.dump(run_info, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if plot_spec is not None:
        _write_plot(os.path.join(outdir, "plot.svg"), records, plot_spec)
    return csv_path


def _write_plot(path, records, spec):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xkey, log = spec
    xs = [getattr(r, xkey) for r in records]
    ys = [max(r.j_numeric, 1e-16) for r in records]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(xs, ys, "o-", label="j_numeric")
    lo = [r.bounds.lower if r.bounds.lower_determined else None for r in records]
    if any(v is not None for v in lo):
        ax.plot(xs, [v if v else float("nan") for v in lo], "k--", label="lower bound")
    up = [r.bounds.upper_min for r in records]
    if all(math.isfinite(v) for v in up):
        ax.plot(xs, up, "k:", label="min upper bound")
    if log:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(xkey)
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# ---------------------------------------------------------------------------

_CONSTRUCTIONS = {
    "bc1_elastic": (cons.bc1_elastic, ()),
    "bc2_elastic": (cons.bc2_elastic, ()),
    "bc1_shear_band": (cons.bc1_shear_band, ("epsilon",)),
    "bc2_double_band": (cons.bc2_double_band, ()),
    "bc2_crossing_bands": (cons.bc2_crossing_bands, ()),
    "bc1_transition": (cons.bc1_transition, ("epsilon", "alpha")),
    "bc2_transition": (cons.bc2_transition, ("epsilon", "alpha")),
}


def _cmd_evaluate(config):
    name = config.get("name", "")
    if name not in _CONSTRUCTIONS:
        raise ConfigError(f"unknown construction {name!r}; options: {sorted(_CONSTRUCTIONS)}")
    fn, extra_keys = _CONSTRUCTIONS[name]
    L = _get_float(config, "l")
    gamma = _get_float(config, "gamma")
    sigma = _get_float(config, "sigma", 0.0)
    tau = _get_float(config, "tau", 0.0)
    n = _get_int(config, "n")
    g = make_grid(DomainSpec(L), n)
    args = [g, gamma] + [_get_float(config, k) for k in extra_keys]
    t0 = time.perf_counter()
    u, p = fn(*args)
    bd = total_energy(u, p, g, MaterialParams(sigma=sigma, tau=tau))
    bc_kind = BCKind.BC1_DIAGONAL if name.startswith("bc1") else BCKind.BC2_HORIZONTAL
    bounds = analytic_bounds(bc_kind, g.L, gamma, sigma, tau)
    rec = SweepRecord(
        L=g.L, gamma=gamma, sigma=sigma, tau=tau, j_numeric=bd.total,
        bounds=bounds, bracket_ok=_bracket_ok(bd.total, bounds, gamma, BRACKET_SLACK),
        runtime_seconds=time.perf_counter() - t0, warm_start=name,
    )
    return [rec], [f"grid: {g.nx}x{g.ny}" + (f" ({g.rounding_note})" if g.rounding_note else "")], None


def _solver_cfg(config):
    return SolverConfig(
        rng_seed=_get_int(config, "rng_seed", 0),
        n_random_starts=_get_int(config, "n_random_starts", 2),
    )


def _cmd_minimize(config):
    bc_kind = _get_bc(config)
    L = _get_float(config, "l")
    gamma = _get_float(config, "gamma")
    sigma = _get_float(config, "sigma", 0.0)
    tau = _get_float(config, "tau", 0.0)
    n = _get_int(config, "n")
    single = _get_bool(config, "single_slip", True)
    dim = Dimension.SCALAR_TWO_D if bc_kind is BCKind.SCALAR_SHEAR else Dimension.TWO_D
    g = make_grid(DomainSpec(L, dim), n)
    from .geometry import BoundaryCondition

    t0 = time.perf_counter()
    res = minimize(g, BoundaryCondition(bc_kind, gamma), MaterialParams(sigma, tau),
                   _solver_cfg(config), single_slip=single)
    bounds = analytic_bounds(bc_kind, g.L, gamma, sigma, tau)
    rec = SweepRecord(
        L=g.L, gamma=gamma, sigma=sigma, tau=tau, j_numeric=res.energy.total,
        bounds=bounds,
        bracket_ok=_bracket_ok(res.energy.total, bounds, gamma, BRACKET_SLACK),
        runtime_seconds=time.perf_counter() - t0,
        converged=res.converged, warm_start=res.warm_start_used,
    )
    return [rec], [], None


def _cmd_sweep_L(config):
    records, monotone = sweep_L(
        _get_bc(config), _get_float(config, "gamma"), _get_float(config, "sigma", 0.0),
        _get_float(config, "tau", 0.0), sorted(_get_list(config, "ls")),
        _get_int(config, "n"), _solver_cfg(config),
    )
    return records, [f"monotone_ok={monotone}"], ("L", True)


def _cmd_sweep_gamma(config):
    records, expo, label = sweep_gamma(
        _get_bc(config), _get_float(config, "l"), _get_float(config, "sigma", 0.0),
        _get_float(config, "tau", 0.0), _get_list(config, "gammas"),
        _get_int(config, "n"), _solver_cfg(config),
    )
    return records, [f"exponent={_fmt(expo)}", f"regime={label}"], ("gamma", True)


def _cmd_regime_map(config):
    table = regime_map(
        _get_bc(config), sorted(_get_list(config, "ls")), _get_float(config, "gamma"),
        _get_float(config, "sigma", 0.0), _get_int(config, "n"), _solver_cfg(config),
    )
    bc_kind = _get_bc(config)
    gamma = _get_float(config, "gamma")
    sigma = _get_float(config, "sigma", 0.0)
    records, notes = [], []
    for row in table:
        bounds = analytic_bounds(bc_kind, row["L"], gamma, sigma, 0.0)
        records.append(SweepRecord(
            L=row["L"], gamma=gamma, sigma=sigma, tau=0.0, j_numeric=row["j"],
            bounds=bounds, bracket_ok=_bracket_ok(row["j"], bounds, gamma, BRACKET_SLACK),
            runtime_seconds=0.0, regime=row["regime"],
        ))
        notes.append(
            f"L={_fmt(row['L'])}: exponent={_fmt(row['exponent'])} regime={row['regime']} "
            f"j_sigma0={_fmt(row['j_sigma0'])} j_multislip={_fmt(row['j_multislip'])}"
        )
    return records, notes, ("L", True)


def _cmd_boundary_case(config):
    case = config.get("case", "")
    records = boundary_case_study(
        case, _get_float(config, "gamma"),
        sorted(_get_list(config, "alphas"), reverse=True), _get_int(config, "n"),
    )
    return records, [], None


def _cmd_q_alpha(config):
    alphas = _get_list(config, "alphas")
    records = []
    for a in alphas:
        t0 = time.perf_counter()
        q = q_alpha(a)
        # the L column carries alpha for q-alpha records (see README)
        records.append(SweepRecord(
            L=a, gamma=0.0, sigma=0.0, tau=0.0, j_numeric=q,
            bounds=BoundPair(None, (), "q_alpha"),
            bracket_ok=True, runtime_seconds=time.perf_counter() - t0,
            regime="q_alpha",
        ))
    return records, ["L column carries alpha"], None


def _cmd_oracle_check(config):
    from .geometry import BoundaryCondition

    n_inst = _get_int(config, "instances", 20)
    seed = _get_int(config, "rng_seed", 0)
    rng = np.random.default_rng(seed)
    records, notes = [], []
    cfg = SolverConfig(rng_seed=seed, n_random_starts=6)
    for k in range(n_inst):
        gamma = float(rng.uniform(0.05, 0.5))
        sigma = float(rng.uniform(0.0, 0.3))
        L = float(rng.choice([0.5, 1.0]))
        g = make_grid(DomainSpec(L), 2)  # 2 or 4 cells: enumerable
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
        m = MaterialParams(sigma=sigma)
        t0 = time.perf_counter()
        res = minimize(g, bc, m, cfg)
        oracle = brute_force_minimize(g, bc, m, cfg)
        gap = res.energy.total - oracle.energy.total
        ok = gap <= 1e-6 + 0.01 * oracle.energy.total
        bounds = analytic_bounds(BCKind.BC2_HORIZONTAL, g.L, gamma, sigma, 0.0)
        records.append(SweepRecord(
            L=g.L, gamma=gamma, sigma=sigma, tau=0.0, j_numeric=res.energy.total,
            bounds=bounds, bracket_ok=ok, runtime_seconds=time.perf_counter() - t0,
            regime="oracle",
        ))
        notes.append(f"instance {k}: oracle={_fmt(oracle.energy.total)} gap={_fmt(gap)} ok={ok}")
    return records, notes, None


_RUNNERS = {
    "evaluate-construction": _cmd_evaluate,
    "minimize": _cmd_minimize,
    "sweep-L": _cmd_sweep_L,
    "sweep-gamma": _cmd_sweep_gamma,
    "regime-map": _cmd_regime_map,
    "boundary-case": _cmd_boundary_case,
    "q-alpha": _cmd_q_alpha,
    "oracle-check": _cmd_oracle_check,
}


def run(config_path: str) -> int:
    """Execute one config file; returns the process exit status."""
    try:
        config = parse_config(config_path)
        outdir = config.get("output_dir", ".")
        plot = _get_bool(config, "plot", False)
        records, notes, plot_spec = _RUNNERS[config["command"]](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = [i for i, r in enumerate(records) if not r.converged]
    csv_path = _write_outputs(outdir, records, config, notes, failed,
                              plot_spec if plot else None)
    print(f"wrote {csv_path} ({len(records)} records)")
    if failed:
        print(f"solver failures on records: {failed}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(
        prog="slipscale",
        description="Energy-scaling laboratory for single-slip crystal plasticity",
    )
    parser.add_argument("config", help="path to a key=value run configuration")
    args = parser.parse_args(argv)
    return run(args.config)


if __name__ == "__main__":
    sys.exit(main())
