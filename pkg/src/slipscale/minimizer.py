"""Numerical minimization of the non-convex energy over (u, labels, s).

The inner problem at fixed slip-system labels is convex: a quadratic elastic
term plus Huber-smoothed TV and hardening, minimized jointly over the free
displacement nodes and the slip magnitudes with L-BFGS under a smoothing
continuation.  The combinatorial label field is handled by deterministic
ICM-style sweeps (with optional Metropolis annealing); reported energies are
always re-evaluated with the exact non-smooth functional, so every result is
the energy of a feasible point and hence a rigorous upper estimate of the
discrete infimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import constructions as cons
from .analysis import harmonic_complete
from .energy import (
    EnergyBreakdown,
    MaterialParams,
    cell_gradient,
    diag_deta,
    diag_dxi,
    relaxed_total_energy,
    rotated_components,
    scalar_energy,
    scalar_gradient,
    total_energy,
)
from .fields import (
    LABEL_ETA_XI,
    LABEL_NONE,
    LABEL_XI_ETA,
    DisplacementField,
    PlasticField,
)
from .geometry import SQRT2, BCKind, BoundaryCondition, Dimension, Grid

_TV_W = lambda h: h / SQRT2


@dataclass(frozen=True)
class AnnealConfig:
    temperatures: tuple = (3e-3, 1e-3, 3e-4)
    moves_per_temp: int = 40
    block: int = 4
    seed: int = 0


@dataclass(frozen=True)
class SolverConfig:
    """Inner-solver and outer-loop controls."""

    huber_delta: float = 1e-2       # initial TV smoothing (relative to gamma)
    huber_delta_final: float = 1e-6
    inner_tol: float = 1e-9         # projected-gradient stopping threshold
    max_inner: int = 2000
    max_outer: int = 8
    n_random_starts: int = 2
    rng_seed: int = 0
    anneal: AnnealConfig | None = None

    def __post_init__(self):
        if self.huber_delta <= 0 or self.huber_delta_final <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")

    def delta_schedule(self, scale: float):
        scale = max(scale, 1e-8)
        deltas = []
        d = self.huber_delta
        while d > self.huber_delta_final * 1.0001:
            deltas.append(d * scale)
            d *= 1e-2
        deltas.append(self.huber_delta_final * scale)
        return deltas


@dataclass
class MinimizeResult:
    energy: EnergyBreakdown
    u: DisplacementField
    p: PlasticField | None
    warm_start_used: str
    outer_iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# Huber helpers

def _huber(t, d):
    a = np.abs(t)
    return np.where(a <= d, 0.5 * t * t / d, a - 0.5 * d)


def _huber_grad(t, d):
    return np.clip(t / d, -1.0, 1.0)


# ---------------------------------------------------------------------------
# convex inner solve (labels fixed)

class _VectorProblem:
    """Smoothed convex energy at fixed labels for the 2-d vector model."""

    def __init__(self, g: Grid, bc: BoundaryCondition, labels, m: MaterialParams, relaxed=False):
        self.g, self.bc, self.m = g, bc, m
        self.relaxed = relaxed
        self.h = g.h
        self.w = _TV_W(g.h)
        if relaxed:
            self.mask_xe = np.ones((g.ny, g.nx), dtype=bool)
            self.mask_ex = np.ones((g.ny, g.nx), dtype=bool)
        else:
            self.mask_xe = labels == LABEL_XI_ETA
            self.mask_ex = labels == LABEL_ETA_XI
        self.labels = labels
        self.n_xe = int(self.mask_xe.sum())
        self.n_ex = int(self.mask_ex.sum())
        self.nu = (g.ny - 1) * (g.nx + 1)  # free nodes per component

    # -- packing -----------------------------------------------------------

    def pack(self, uxi, ueta, s_xe, s_ex):
        return np.concatenate([
            uxi[1:-1, :].ravel(), ueta[1:-1, :].ravel(), s_xe, s_ex,
        ])

    def unpack(self, z, uxi_full, ueta_full):
        nu = self.nu
        g = self.g
        uxi_full[1:-1, :] = z[:nu].reshape(g.ny - 1, g.nx + 1)
        ueta_full[1:-1, :] = z[nu:2 * nu].reshape(g.ny - 1, g.nx + 1)
        s_xe = z[2 * nu:2 * nu + self.n_xe]
        s_ex = z[2 * nu + self.n_xe:]
        return s_xe, s_ex

    def boundary_rows(self):
        """Rotated components of the Dirichlet rows."""
        u = DisplacementField(self.g, self.bc)
        return rotated_components(u.values)

    def objective(self, z, uxi, ueta, delta):
        g, h, w, m = self.g, self.h, self.w, self.m
        s_xe, s_ex = self.unpack(z, uxi, ueta)
        A = np.zeros((g.ny, g.nx))
        B = np.zeros((g.ny, g.nx))
        A[self.mask_xe] = s_xe
        B[self.mask_ex] = s_ex
        mxx = diag_dxi(uxi, h)
        mxe = diag_deta(uxi, h)
        mex = diag_dxi(ueta, h)
        mee = diag_deta(ueta, h)
        off = mxe + mex - A - B
        f = h * h * float(np.sum(mxx**2 + mee**2 + 0.5 * off**2))

        dA_pairs = A[1:, 1:] - A[:-1, :-1]
        dB_pairs = B[1:, :-1] - B[:-1, 1:]
        f += m.sigma * w * float(np.sum(_huber(dA_pairs, delta)) + np.sum(_huber(dB_pairs, delta)))
        if m.tau > 0.0:
            if self.relaxed:
                r = np.sqrt(A * A + B * B + delta * delta) - delta
                f += m.tau * h * h * float(np.sum(r))
            else:
                f += m.tau * h * h * float(np.sum(_huber(s_xe, delta)) + np.sum(_huber(s_ex, delta)))

        # gradient
        g_uxi = np.zeros_like(uxi)
        g_ueta = np.zeros_like(ueta)
        c = h * h / (SQRT2 * h)
        t = 2.0 * c * mxx
        g_uxi[1:, 1:] += t
        g_uxi[:-1, :-1] -= t
        t = 2.0 * c * mee
        g_ueta[1:, :-1] += t
        g_ueta[:-1, 1:] -= t
        t = c * off
        g_uxi[1:, :-1] += t
        g_uxi[:-1, 1:] -= t
        g_ueta[1:, 1:] += t
        g_ueta[:-1, :-1] -= t

        gA = -h * h * off
        gB = gA.copy()
        t = m.sigma * w * _huber_grad(dA_pairs, delta)
        gA[1:, 1:] += t
        gA[:-1, :-1] -= t
        t = m.sigma * w * _huber_grad(dB_pairs, delta)
        gB[1:, :-1] += t
        gB[:-1, 1:] -= t
        if m.tau > 0.0:
            if self.relaxed:
                r = np.sqrt(A * A + B * B + delta * delta)
                gA += m.tau * h * h * A / r
                gB += m.tau * h * h * B / r
            else:
                gA[self.mask_xe] += m.tau * h * h * _huber_grad(s_xe, delta)
                gB[self.mask_ex] += m.tau * h * h * _huber_grad(s_ex, delta)

        grad = np.concatenate([
            g_uxi[1:-1, :].ravel(), g_ueta[1:-1, :].ravel(),
            gA[self.mask_xe], gB[self.mask_ex],
        ])
        return f, grad


class _ScalarProblem:
    """Smoothed convex energy at fixed labels for the scalar model."""

    def __init__(self, g: Grid, bc: BoundaryCondition, labels, m: MaterialParams):
        self.g, self.bc, self.m = g, bc, m
        self.h, self.w = g.h, _TV_W(g.h)
        self.mask_eta = labels == LABEL_XI_ETA  # carries beta_eta
        self.mask_xi = labels == LABEL_ETA_XI   # carries beta_xi
        self.labels = labels
        self.n_eta = int(self.mask_eta.sum())
        self.n_xi = int(self.mask_xi.sum())
        self.nu = (g.ny - 1) * (g.nx + 1)

    def pack(self, u, s_eta, s_xi):
        return np.concatenate([u[1:-1, :].ravel(), s_eta, s_xi])

    def unpack(self, z, u_full):
        u_full[1:-1, :] = z[:self.nu].reshape(self.g.ny - 1, self.g.nx + 1)
        return z[self.nu:self.nu + self.n_eta], z[self.nu + self.n_eta:]

    def objective(self, z, u, delta):
        g, h, w, m = self.g, self.h, self.w, self.m
        s_eta, s_xi = self.unpack(z, u)
        Beta_e = np.zeros((g.ny, g.nx))
        Beta_x = np.zeros((g.ny, g.nx))
        Beta_e[self.mask_eta] = s_eta
        Beta_x[self.mask_xi] = s_xi
        gx = diag_dxi(u, h)
        ge = diag_deta(u, h)
        rx = gx - Beta_x
        re = ge - Beta_e
        f = h * h * float(np.sum(rx * rx + re * re))
        dE = Beta_e[1:, 1:] - Beta_e[:-1, :-1]
        dX = Beta_x[1:, :-1] - Beta_x[:-1, 1:]
        f += m.sigma * w * float(np.sum(_huber(dE, delta)) + np.sum(_huber(dX, delta)))
        if m.tau > 0.0:
            f += m.tau * h * h * float(np.sum(_huber(s_eta, delta)) + np.sum(_huber(s_xi, delta)))

        gu = np.zeros_like(u)
        c = h * h / (SQRT2 * h)
        t = 2.0 * c * rx
        gu[1:, 1:] += t
        gu[:-1, :-1] -= t
        t = 2.0 * c * re
        gu[1:, :-1] += t
        gu[:-1, 1:] -= t
        gE = -2.0 * h * h * re
        gX = -2.0 * h * h * rx
        t = m.sigma * w * _huber_grad(dE, delta)
        gE[1:, 1:] += t
        gE[:-1, :-1] -= t
        t = m.sigma * w * _huber_grad(dX, delta)
        gX[1:, :-1] += t
        gX[:-1, 1:] -= t
        if m.tau > 0.0:
            gE[self.mask_eta] += m.tau * h * h * _huber_grad(s_eta, delta)
            gX[self.mask_xi] += m.tau * h * h * _huber_grad(s_xi, delta)
        grad = np.concatenate([gu[1:-1, :].ravel(), gE[self.mask_eta], gX[self.mask_xi]])
        return f, grad


def solve_convex(
    g: Grid,
    bc: BoundaryCondition,
    labels: np.ndarray,
    m: MaterialParams,
    cfg: SolverConfig,
    u0: DisplacementField | None = None,
    s0: np.ndarray | None = None,
    relaxed: bool = False,
    s0_b: np.ndarray | None = None,
):
    """Jointly minimize the smoothed convex energy at a fixed label field.

    Returns (u, p_or_components, breakdown, converged); with ``relaxed`` the
    second element is the pair (beta_xi_eta, beta_eta_xi).
    """
    scalar = bc.kind is BCKind.SCALAR_SHEAR
    if u0 is None:
        u0 = DisplacementField(g, bc)
    scale = max(abs(bc.gamma), 1e-8)
    converged = True

    if scalar:
        prob = _ScalarProblem(g, bc, labels, m)
        u = u0.values.copy()
        s_eta = np.zeros(prob.n_eta) if s0 is None else s0[prob.mask_eta]
        s_xi = np.zeros(prob.n_xi) if s0 is None else s0[prob.mask_xi]
        z = prob.pack(u, s_eta, s_xi)
        deltas = cfg.delta_schedule(scale)
        for k, delta in enumerate(deltas):
            gtol = cfg.inner_tol if k == len(deltas) - 1 else 30.0 * cfg.inner_tol
            res = optimize.minimize(
                prob.objective, z, args=(u, delta), jac=True, method="L-BFGS-B",
                options={"maxiter": cfg.max_inner, "maxfun": 4 * cfg.max_inner,
                         "gtol": gtol, "ftol": 1e-16},
            )
            z = res.x
            converged = converged and (res.success or res.status == 1)
        s_eta, s_xi = prob.unpack(z, u)
        s = np.zeros((g.ny, g.nx))
        s[prob.mask_eta] = s_eta
        s[prob.mask_xi] = s_xi
        uf = DisplacementField(g, bc, u).apply_bc()
        p = PlasticField(g, Dimension.SCALAR_TWO_D, labels, s)
        return uf, p, scalar_energy(uf, p, g, m), converged

    prob = _VectorProblem(g, bc, labels, m, relaxed=relaxed)
    uxi, ueta = rotated_components(u0.values)
    uxi = uxi.copy()
    ueta = ueta.copy()
    if relaxed:
        s_xe = np.zeros(prob.n_xe) if s0 is None else np.asarray(s0)[prob.mask_xe]
        s_ex = np.zeros(prob.n_ex) if s0_b is None else np.asarray(s0_b)[prob.mask_ex]
    else:
        if s0 is None:
            s_xe = np.zeros(prob.n_xe)
            s_ex = np.zeros(prob.n_ex)
        else:
            s_xe = np.asarray(s0)[prob.mask_xe]
            s_ex = np.asarray(s0)[prob.mask_ex]
    z = prob.pack(uxi, ueta, s_xe, s_ex)
    deltas = cfg.delta_schedule(scale)
    for k, delta in enumerate(deltas):
        # intermediate smoothing stages only need a rough solution
        gtol = cfg.inner_tol if k == len(deltas) - 1 else 30.0 * cfg.inner_tol
        res = optimize.minimize(
            prob.objective, z, args=(uxi, ueta, delta), jac=True, method="L-BFGS-B",
            options={"maxiter": cfg.max_inner, "maxfun": 4 * cfg.max_inner,
                     "gtol": gtol, "ftol": 1e-16},
        )
        z = res.x
        converged = converged and (res.success or res.status == 1)
    s_xe, s_ex = prob.unpack(z, uxi, ueta)
    values = np.stack([(uxi - ueta) / SQRT2, (uxi + ueta) / SQRT2], axis=-1)
    uf = DisplacementField(g, bc, values).apply_bc()
    if relaxed:
        A = np.zeros((g.ny, g.nx))
        B = np.zeros((g.ny, g.nx))
        A[prob.mask_xe] = s_xe
        B[prob.mask_ex] = s_ex
        return uf, (A, B), relaxed_total_energy(uf, A, B, g, m), converged
    s = np.zeros((g.ny, g.nx))
    s[prob.mask_xe] = s_xe
    s[prob.mask_ex] = s_ex
    p = PlasticField(g, Dimension.TWO_D, labels, s)
    return uf, p, total_energy(uf, p, g, m), converged


# ---------------------------------------------------------------------------
# label updates (ICM sweep)

def _local_candidates(target, nb, sig_w, tau_h2, quad):
    """Minimizer candidates of the local piecewise-quadratic cost.

    ``quad`` is the curvature of the elastic part; stationary points of each
    linear piece plus every kink location are enumerated and scored exactly.
    """
    cands = [0.0, target]
    cands.extend(nb)
    signs = (-1.0, 0.0, 1.0)
    for e1 in signs:
        for e2 in signs:
            if tau_h2 > 0.0:
                for e3 in signs:
                    cands.append(target - (sig_w * (e1 + e2) + tau_h2 * e3) / quad)
            else:
                cands.append(target - sig_w * (e1 + e2) / quad)
    return cands


def update_labels(u: DisplacementField, p: PlasticField, g: Grid, m: MaterialParams) -> PlasticField:
    """One deterministic lexicographic ICM sweep over the cells.

    For each cell the three labels are scored with the slip magnitude
    re-optimized exactly against the local quadratic elastic term and the
    adjacent TV/hardening kinks; ties prefer none, then eta_xi.
    """
    scalar = p.dimension is Dimension.SCALAR_TWO_D
    h2 = g.h * g.h
    sig_w = m.sigma * _TV_W(g.h)
    tau_h2 = m.tau * h2
    labels = p.labels.copy()
    if scalar:
        gx, ge = scalar_gradient(u)
    else:
        _, mxe, mex, _ = cell_gradient(u)
        msum = mxe + mex
    A = np.where(labels == LABEL_XI_ETA, p.s, 0.0)
    B = np.where(labels == LABEL_ETA_XI, p.s, 0.0)
    ny, nx = g.ny, g.nx

    def tv_terms(val, F, j, i, family):
        # family "A": xi-direction pairs (j+-1, i+-1); "B": eta pairs (j+-1, i-+1)
        t = 0.0
        if family == "A":
            if j > 0 and i > 0:
                t += abs(val - F[j - 1, i - 1])
            if j < ny - 1 and i < nx - 1:
                t += abs(val - F[j + 1, i + 1])
        else:
            if j > 0 and i < nx - 1:
                t += abs(val - F[j - 1, i + 1])
            if j < ny - 1 and i > 0:
                t += abs(val - F[j + 1, i - 1])
        return t

    for j in range(ny):
        for i in range(nx):
            if scalar:
                exx, eee = gx[j, i], ge[j, i]
                # none: both residuals stay
                best = (h2 * (exx**2 + eee**2)
                        + sig_w * (tv_terms(0.0, A, j, i, "A") + tv_terms(0.0, B, j, i, "B")))
                best_lab, best_s = LABEL_NONE, 0.0
                for lab, target, fam in ((LABEL_ETA_XI, exx, "B"), (LABEL_XI_ETA, eee, "A")):
                    other = eee if lab == LABEL_ETA_XI else exx
                    nb = []
                    F = B if fam == "B" else A
                    if fam == "A":
                        if j > 0 and i > 0:
                            nb.append(F[j - 1, i - 1])
                        if j < ny - 1 and i < nx - 1:
                            nb.append(F[j + 1, i + 1])
                    else:
                        if j > 0 and i < nx - 1:
                            nb.append(F[j - 1, i + 1])
                        if j < ny - 1 and i > 0:
                            nb.append(F[j + 1, i - 1])
                    for s in _local_candidates(target, nb, sig_w, tau_h2, 2.0 * h2):
                        cost = (h2 * ((target - s) ** 2 + other**2) + tau_h2 * abs(s)
                                + sig_w * tv_terms(s, F, j, i, fam)
                                + sig_w * tv_terms(0.0, A if fam == "B" else B, j, i,
                                                   "A" if fam == "B" else "B"))
                        if cost < best - 1e-15 * (1.0 + abs(best)):
                            best, best_lab, best_s = cost, lab, s
            else:
                mloc = msum[j, i]
                base_a = tv_terms(0.0, A, j, i, "A")
                base_b = tv_terms(0.0, B, j, i, "B")
                best = 0.5 * h2 * mloc**2 + sig_w * (base_a + base_b)
                best_lab, best_s = LABEL_NONE, 0.0
                for lab, F, fam, other_base in (
                    (LABEL_ETA_XI, B, "B", base_a),
                    (LABEL_XI_ETA, A, "A", base_b),
                ):
                    nb = []
                    if fam == "A":
                        if j > 0 and i > 0:
                            nb.append(F[j - 1, i - 1])
                        if j < ny - 1 and i < nx - 1:
                            nb.append(F[j + 1, i + 1])
                    else:
                        if j > 0 and i < nx - 1:
                            nb.append(F[j - 1, i + 1])
                        if j < ny - 1 and i > 0:
                            nb.append(F[j + 1, i - 1])
                    for s in _local_candidates(mloc, nb, sig_w, tau_h2, h2):
                        cost = (0.5 * h2 * (mloc - s) ** 2 + tau_h2 * abs(s)
                                + sig_w * (tv_terms(s, F, j, i, fam) + other_base))
                        if cost < best - 1e-15 * (1.0 + abs(best)):
                            best, best_lab, best_s = cost, lab, s
            labels[j, i] = best_lab
            A[j, i] = best_s if best_lab == LABEL_XI_ETA else 0.0
            B[j, i] = best_s if best_lab == LABEL_ETA_XI else 0.0

    s_new = A + B
    return PlasticField(g, p.dimension, labels, s_new)


# ---------------------------------------------------------------------------
# warm starts

def _completed_vector(g, bc, data):
    vals = data.u_beta.copy()
    for comp, (bot, top) in data.components.items():
        v, _ = harmonic_complete(g, bot, top)
        if comp == "xi":
            vals[..., 0] += v / SQRT2
            vals[..., 1] += v / SQRT2
        elif comp == "eta":
            vals[..., 0] -= v / SQRT2
            vals[..., 1] += v / SQRT2
    return DisplacementField(g, bc, vals).apply_bc()


def warm_starts(g: Grid, bc: BoundaryCondition, cfg: SolverConfig):
    """Elastic baseline, every applicable construction, and random fields."""
    L = g.L
    gamma = bc.gamma
    starts = []
    if bc.kind is BCKind.SCALAR_SHEAR:
        u, p = cons.scalar_elastic(g, gamma)
        starts.append(("elastic", u, p))
        if g.nx == 2 * g.ny:
            p2, data = cons.scalar_half_construction(g, gamma, 0.1)
            v, _ = harmonic_complete(g, *data.components["scalar"])
            u2 = DisplacementField(g, bc, data.u_beta + v).apply_bc()
            starts.append(("scalar_half", u2, p2))
    elif bc.kind is BCKind.BC1_DIAGONAL:
        u, p = cons.bc1_elastic(g, gamma)
        starts.append(("elastic", u, p))
        if L > 1.0 and (g.ny - g.nx) >= 1:
            eps = min(0.45 * (L - 1.0) / SQRT2, 0.2)
            try:
                starts.append(("shear_band", *cons.bc1_shear_band(g, gamma, eps)))
            except ValueError:
                pass
        elif L == 1.0:
            p2, data = cons.bc1_sigmoid(g, gamma, 0.1)
            starts.append(("sigmoid", _completed_vector(g, bc, data), p2))
        elif L < 1.0:
            try:
                eps = min(0.1, 0.4 * (1.0 - L) / SQRT2)
                starts.append(("transition", *cons.bc1_transition(g, gamma, eps, eps * eps)))
            except ValueError:
                pass
    else:  # BC2
        u, p = cons.bc2_elastic(g, gamma)
        starts.append(("elastic", u, p))
        if L > 2.0:
            try:
                starts.append(("double_band", *cons.bc2_double_band(g, gamma)))
            except ValueError:
                pass
        elif L == 2.0:
            p2, data = cons.bc2_L2_sigmoid(g, gamma, 0.1)
            starts.append(("sigmoid", _completed_vector(g, bc, data), p2))
        elif 1.0 < L < 2.0:
            starts.append(("crossing_bands", *cons.bc2_crossing_bands(g, gamma)))
        elif L < 1.0:
            try:
                eps = min(0.1, 0.4 * (1.0 - L) / SQRT2)
                starts.append(("transition", *cons.bc2_transition(g, gamma, eps, eps * eps)))
            except ValueError:
                pass
    rng = np.random.default_rng(cfg.rng_seed)
    dim = Dimension.SCALAR_TWO_D if bc.kind is BCKind.SCALAR_SHEAR else Dimension.TWO_D
    for r in range(cfg.n_random_starts):
        labels = rng.integers(0, 3, size=(g.ny, g.nx)).astype(np.uint8)
        s = gamma * rng.standard_normal((g.ny, g.nx))
        u0 = starts[0][1].copy()
        starts.append((f"random{r}", u0, PlasticField(g, dim, labels, s)))
    return starts


# ---------------------------------------------------------------------------
# outer loop

def _exact_energy(u, p, g, m):
    if p.dimension is Dimension.SCALAR_TWO_D:
        return scalar_energy(u, p, g, m)
    return total_energy(u, p, g, m)


def minimize(
    g: Grid,
    bc: BoundaryCondition,
    m: MaterialParams,
    cfg: SolverConfig = SolverConfig(),
    single_slip: bool = True,
) -> MinimizeResult:
    """Best-of-warm-starts alternating minimization (upper estimate of J_L).

    With ``single_slip=False`` the side condition is dropped: both
    off-diagonal components are kept per cell and a single convex solve is
    performed from each warm start.
    """
    if g.spec.dimension is Dimension.THREE_D:
        raise ValueError("minimize supports the 2-d vector and scalar models")
    if not single_slip:
        if bc.kind is BCKind.SCALAR_SHEAR:
            raise ValueError("the relaxed ablation applies to the vector model")
        best = None
        for name, u0, p0 in warm_starts(g, bc, cfg):
            _, mxe0, mex0, _ = cell_gradient(u0)
            A0 = np.where(p0.labels == LABEL_XI_ETA, p0.s, mxe0)
            B0 = np.where(p0.labels == LABEL_ETA_XI, p0.s, mex0)
            u1, (A, B), bd, ok = solve_convex(
                g, bc, p0.labels, m, cfg, u0=u0, s0=A0, s0_b=B0, relaxed=True
            )
            start_bd = relaxed_total_energy(u0, A0, B0, g, m)
            cand = (bd, u1, ok) if bd.total <= start_bd.total else (start_bd, u0, ok)
            if best is None or cand[0].total < best[0].total:
                best = cand
                best_name = name
        bd, u1, ok = best
        return MinimizeResult(bd, u1, None, best_name, 1, ok)

    floor = 1e-7 * max(bc.gamma, 1e-8) ** 2
    best = None
    for name, u0, p0 in warm_starts(g, bc, cfg):
        bd0 = _exact_energy(u0, p0, g, m)
        cand = (bd0, u0, p0, name, 0, True)
        labels = p0.labels.copy()
        u_cur, s_cur = u0, p0.s
        outer = 0
        all_ok = True
        prev_total = math.inf
        for outer in range(1, cfg.max_outer + 1):
            u_cur, p_cur, bd, ok = solve_convex(g, bc, labels, m, cfg, u0=u_cur, s0=s_cur)
            all_ok = all_ok and ok
            if bd.total < cand[0].total:
                cand = (bd, u_cur, p_cur, name, outer, ok)
            p_new = update_labels(u_cur, p_cur, g, m)
            stalled = bd.total >= prev_total - max(1e-4 * abs(prev_total), floor)
            if np.array_equal(p_new.labels, labels) or stalled:
                bd_new = _exact_energy(u_cur, p_new, g, m)
                if bd_new.total < cand[0].total:
                    cand = (bd_new, u_cur, p_new, name, outer, all_ok)
                break
            prev_total = bd.total
            labels = p_new.labels
            s_cur = p_new.s
        if best is None or cand[0].total < best[0].total:
            best = cand
    bd, u1, p1, name, outer, ok = best
    if cfg.anneal is not None:
        bd, u1, p1 = _anneal(g, bc, m, cfg, bd, u1, p1)
    return MinimizeResult(bd, u1, p1, name, outer, ok)


def _anneal(g, bc, m, cfg, bd, u, p):
    """Metropolis block-label flips around the incumbent, exact energies."""
    an = cfg.anneal
    rng = np.random.default_rng(an.seed)
    _, mxe, mex, _ = cell_gradient(u)
    msum = mxe + mex
    cur = (bd, u, p)
    for T in an.temperatures:
        for _ in range(an.moves_per_temp):
            labels = cur[2].labels.copy()
            s = cur[2].s.copy()
            j0 = rng.integers(0, max(g.ny - an.block, 1))
            i0 = rng.integers(0, max(g.nx - an.block, 1))
            lab = rng.integers(0, 3)
            sl = (slice(j0, j0 + an.block), slice(i0, i0 + an.block))
            labels[sl] = lab
            s[sl] = msum[sl] if lab != LABEL_NONE else 0.0
            p_try = PlasticField(g, p.dimension, labels, s)
            bd_try = _exact_energy(cur[1], p_try, g, m)
            dE = bd_try.total - cur[0].total
            if dE <= 0 or rng.random() < math.exp(-dE / max(T, 1e-300)):
                cur = (bd_try, cur[1], p_try)
    # polish the annealed incumbent
    u2, p2, bd2, _ = solve_convex(g, bc, cur[2].labels, m, cfg, u0=cur[1], s0=cur[2].s)
    if bd2.total < cur[0].total:
        cur = (bd2, u2, p2)
    return cur if cur[0].total < bd.total else (bd, u, p)


def brute_force_minimize(g: Grid, bc: BoundaryCondition, m: MaterialParams,
                         cfg: SolverConfig = SolverConfig()) -> MinimizeResult:
    """Exact oracle: enumerate every label field on a tiny grid (<= 16 cells).

    Each labeling's inner problem is convex, so the best convex solve over
    the full enumeration is the global discrete minimum (up to smoothing)."""
    ncells = g.ny * g.nx
    if ncells > 16:
        raise ValueError(f"brute force needs <= 16 cells, got {ncells}")
    tight = SolverConfig(
        huber_delta=cfg.huber_delta, huber_delta_final=1e-9,
        inner_tol=min(cfg.inner_tol, 1e-11), max_inner=cfg.max_inner,
        max_outer=1, n_random_starts=0, rng_seed=cfg.rng_seed,
    )
    best = None
    for combo in itertools.product((LABEL_NONE, LABEL_ETA_XI, LABEL_XI_ETA), repeat=ncells):
        labels = np.array(combo, dtype=np.uint8).reshape(g.ny, g.nx)
        u, p, bd, ok = solve_convex(g, bc, labels, m, tight)
        if best is None or bd.total < best[0].total:
            best = (bd, u, p, ok)
    bd, u, p, ok = best
    return MinimizeResult(bd, u, p, "oracle", 1, ok)
