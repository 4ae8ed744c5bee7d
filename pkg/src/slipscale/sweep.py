"""Experiment harness: parameter sweeps, regime detection, bound bracketing.

Sweep points are independent jobs run on a bounded thread pool; output order
always follows input order.  Every record carries the analytic bounds of its
regime and a bracket flag with the slack used.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constructions as cons
from .analysis import BoundPair, analytic_bounds, harmonic_complete
from .energy import MaterialParams
from .fields import DisplacementField
from .geometry import BCKind, BoundaryCondition, Dimension, DomainSpec, make_grid
from .minimizer import MinimizeResult, SolverConfig, minimize

#: default relative slack between j_numeric and the analytic bounds
#: (discretization plus smoothing allowance)
BRACKET_SLACK = 0.10


@dataclass
class SweepRecord:
    L: float
    gamma: float
    sigma: float
    tau: float
    j_numeric: float
    bounds: BoundPair
    bracket_ok: bool
    runtime_seconds: float
    regime: str = ""
    converged: bool = True
    warm_start: str = ""
    slack: float = BRACKET_SLACK

    def __post_init__(self):
        if not self.regime:
            self.regime = self.bounds.regime


def _worker_count() -> int:
    env = os.environ.get("SLIPSCALE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _bracket_ok(j: float, bounds: BoundPair, gamma: float, slack: float) -> bool:
    scale = max(abs(j), gamma * gamma * 1e-6, 1e-300)
    hi_ok = j <= bounds.upper_min * (1.0 + slack) + slack * scale * 1e-3 + 1e-12
    if bounds.lower_determined:
        lo_ok = j >= bounds.lower * (1.0 - slack) - 1e-12
    else:
        lo_ok = True
    return bool(hi_ok and lo_ok)


def _run_point(bc_kind: BCKind, L: float, gamma: float, sigma: float, tau: float,
               n: int, cfg: SolverConfig, single_slip: bool = True) -> SweepRecord:
    t0 = time.perf_counter()
    dim = Dimension.SCALAR_TWO_D if bc_kind is BCKind.SCALAR_SHEAR else Dimension.TWO_D
    g = make_grid(DomainSpec(L, dim), n)
    bc = BoundaryCondition(bc_kind, gamma)
    m = MaterialParams(sigma=sigma, tau=tau)
    res = minimize(g, bc, m, cfg, single_slip=single_slip)
    bounds = analytic_bounds(bc_kind, g.L, gamma, sigma, tau)
    j = res.energy.total
    return SweepRecord(
        L=g.L, gamma=gamma, sigma=sigma, tau=tau, j_numeric=j, bounds=bounds,
        bracket_ok=_bracket_ok(j, bounds, gamma, BRACKET_SLACK),
        runtime_seconds=time.perf_counter() - t0,
        converged=res.converged, warm_start=res.warm_start_used,
    )


def _map_ordered(fn, jobs):
    with ThreadPoolExecutor(max_workers=_worker_count()) as ex:
        return list(ex.map(fn, jobs))


# ---------------------------------------------------------------------------

def sweep_L(bc_kind: BCKind, gamma: float, sigma: float, tau: float,
            L_values, n: int, cfg: SolverConfig):
    """Minimize at each L (ascending); flags monotonicity violations > 5%.

    Returns (records, monotone_ok).
    """
    L_values = list(L_values)
    if any(b < a for a, b in zip(L_values, L_values[1:])):
        raise ValueError("L values must be sorted ascending")
    records = _map_ordered(
        lambda L: _run_point(bc_kind, L, gamma, sigma, tau, n, cfg), L_values
    )
    monotone_ok = True
    for a, b in zip(records, records[1:]):
        if b.j_numeric > a.j_numeric * 1.05 + 1e-6 * gamma * gamma:
            monotone_ok = False
    return records, monotone_ok


def fit_growth_exponent(gammas, energies):
    """Log-log slope over the top half of the gamma range; None if degenerate."""
    gammas = np.asarray(gammas, dtype=float)
    energies = np.asarray(energies, dtype=float)
    order = np.argsort(gammas)
    gammas, energies = gammas[order], energies[order]
    top = gammas >= gammas[-1] / (gammas[-1] / gammas[0]) ** 0.5
    gs, es = gammas[top], energies[top]
    if np.any(es <= 0.0):
        return None
    slope, _ = np.polyfit(np.log(gs), np.log(es), 1)
    return float(slope)


def classify_regime(exponent, energies, gammas) -> str:
    """Wide bands around the asymptotic exponents.

    Energies at or below 1e-4 * gamma^2 are classified zero outright (a
    fitted slope on roundoff-level values carries no information); otherwise
    the exponent decides.
    """
    emax = max(e / (g * g) for e, g in zip(energies, gammas))
    if emax < 1e-4:
        return "zero"
    if exponent is None:
        return "unclassified"
    if 0.75 <= exponent <= 1.25:
        return "linear"
    if 1.8 <= exponent <= 2.2:
        return "quadratic"
    return "unclassified"


def sweep_gamma(bc_kind: BCKind, L: float, sigma: float, tau: float,
                gamma_values, n: int, cfg: SolverConfig):
    """Minimize over a log-spaced gamma list and fit the growth exponent.

    Returns (records, exponent, regime_label).
    """
    gamma_values = list(gamma_values)
    if len(gamma_values) < 4:
        raise ValueError("need at least 4 gamma points")
    if max(gamma_values) / min(gamma_values) < 8.0:
        raise ValueError("gamma range must span at least a factor of 8")
    records = _map_ordered(
        lambda gam: _run_point(bc_kind, L, gam, sigma, tau, n, cfg), gamma_values
    )
    energies = [r.j_numeric for r in records]
    exponent = fit_growth_exponent(gamma_values, energies)
    label = classify_regime(exponent, energies, gamma_values)
    for r in records:
        r.regime = label
    return records, exponent, label


def boundary_case_study(case: str, gamma: float, alphas, n: int):
    """Energies of the decaying construction sequences at the critical heights.

    ``case`` is one of BC1_L1, BC2_L2, scalar_Lhalf; alphas must be
    decreasing.  Returns records whose j_numeric is the completed
    construction energy (elastic completion + sigma-free curl).
    """
    alphas = list(alphas)
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha list must be strictly decreasing")
    setups = {
        "BC1_L1": (BCKind.BC1_DIAGONAL, 1.0, Dimension.TWO_D, cons.bc1_sigmoid),
        "BC2_L2": (BCKind.BC2_HORIZONTAL, 2.0, Dimension.TWO_D, cons.bc2_L2_sigmoid),
        "scalar_Lhalf": (BCKind.SCALAR_SHEAR, 0.5, Dimension.SCALAR_TWO_D, cons.scalar_half_construction),
    }
    if case not in setups:
        raise ValueError(f"unknown boundary case {case!r}; options: {sorted(setups)}")
    bc_kind, L, dim, builder = setups[case]
    g = make_grid(DomainSpec(L, dim), n)
    records = []
    for alpha in alphas:
        t0 = time.perf_counter()
        p, data = builder(g, gamma, alpha)
        energy = 0.0
        for _, (bot, top) in data.components.items():
            _, de = harmonic_complete(g, bot, top)
            energy += de
        bounds = analytic_bounds(bc_kind, g.L, gamma, 0.0, 0.0)
        records.append(SweepRecord(
            L=g.L, gamma=gamma, sigma=0.0, tau=0.0, j_numeric=energy,
            bounds=bounds, bracket_ok=True,
            runtime_seconds=time.perf_counter() - t0, regime="boundary",
            warm_start=f"alpha={alpha}",
        ))
    return records


def regime_map(bc_kind: BCKind, L_values, gamma: float, sigma: float, n: int,
               cfg: SolverConfig):
    """Qualitative scaling map over L, with the sigma = 0 comparison column.

    For each L a gamma sweep {1, 2, 4, 8} * gamma classifies the growth;
    the constrained run, the sigma = 0 run and the multi-slip run are
    reported side by side.
    """
    gammas = [gamma, 2 * gamma, 4 * gamma, 8 * gamma]
    table = []
    for L in L_values:
        _, expo, label = sweep_gamma(bc_kind, L, sigma, 0.0, gammas, n, cfg)
        rec0 = _run_point(bc_kind, L, gamma, 0.0, 0.0, n, cfg)
        rec_rel = _run_point(bc_kind, L, gamma, sigma, 0.0, n, cfg, single_slip=False)
        rec = _run_point(bc_kind, L, gamma, sigma, 0.0, n, cfg)
        table.append({
            "L": L,
            "exponent": expo,
            "regime": label,
            "j": rec.j_numeric,
            "j_sigma0": rec0.j_numeric,
            "j_multislip": rec_rel.j_numeric,
        })
    return table
