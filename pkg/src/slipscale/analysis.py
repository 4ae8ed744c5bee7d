"""Supporting analysis: H^{1/2} quadrature, harmonic completion, bound formulas.

The fractional-seminorm integrals Q(alpha) are evaluated by graded product
Gauss panels (production path) and cross-checked by an importance-sampled
Monte-Carlo estimator (independent oracle); the two share nothing numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import BCKind, Grid

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BoundPair:
    """Analytic lower bound (or undetermined) plus labelled upper candidates."""

    lower: float | None
    upper_candidates: tuple
    regime: str  # zero | linear | quadratic | boundary | unclassified

    @property
    def lower_determined(self) -> bool:
        return self.lower is not None

    @property
    def upper_min(self) -> float:
        vals = [v for _, v in self.upper_candidates if v is not None]
        return min(vals) if vals else math.inf


# ---------------------------------------------------------------------------
# Q(alpha) quadrature

@lru_cache(maxsize=8)
def _gauss(npts: int):
    x, w = np.polynomial.legendre.leggauss(npts)
    return x, w


def _panel_nodes(edges: np.ndarray, npts: int):
    """Gauss nodes/weights on a sequence of panels given by edge array."""
    x, w = _gauss(npts)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def _geometric_edges(lo: float, hi: float, n_panels: int, toward_lo: bool):
    """Panel edges on [lo, hi] graded geometrically toward one endpoint."""
    t = np.concatenate([[0.0], 2.0 ** (-np.arange(n_panels - 1, -1, -1, dtype=float))])
    if toward_lo:
        return lo + (hi - lo) * t
    return hi - (hi - lo) * t[::-1]


def q_alpha(alpha: float, npts: int = 12) -> float:
    """H^{1/2}(0,1) seminorm Q(alpha) of f_alpha(x) = 1 - x^alpha.

    Double integral of (x^a - y^a)^2/(x - y)^2 over the unit square via the
    substitution t = x - y: the integrand is bounded along the diagonal (by
    a^2 x^{2a-2}), so for each outer node x the inner t integral uses panels
    graded toward the x^alpha kink at t = x, and the outer integral uses
    panels graded toward x = 0.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    # the dyadic outer grading must stay above the double-precision floor;
    # the capped tail contributes < 2^(-2*alpha*900), i.e. < 4e-6 for
    # alpha >= 0.01
    n_outer = min(int(math.ceil(30.0 / alpha)), 900)
    xs, wxs = _panel_nodes(_geometric_edges(0.0, 1.0, n_outer, toward_lo=True), npts)
    # inner panels on [0, x] in units s = t/x: uniform half, then geometric
    # refinement into the x^alpha kink at s = 1.  The scaled integrand
    # ((x^a - (x-t)^a)/t)^2 = x^{2a-2} ((1-(1-s)^a)/s)^2 splits off the
    # x power, which is summed against the outer nodes without overflow.
    s_template = np.concatenate([
        np.linspace(0.0, 0.5, 9),
        1.0 - 0.5 * 2.0 ** (-np.arange(1.0, 45.0)),
        [1.0],
    ])
    s_nodes, s_weights = _panel_nodes(s_template, npts)
    kern = np.where(s_nodes > 0, ((1.0 - (1.0 - s_nodes) ** alpha) / np.where(s_nodes > 0, s_nodes, 1.0)) ** 2, 0.0)
    inner = float(np.sum(s_weights * kern))
    outer = float(np.sum(wxs * np.exp((2.0 * alpha - 1.0) * np.log(xs))))
    return 2.0 * inner * outer


def q_alpha_cross(alpha: float, npts: int = 12) -> float:
    """Cross term of the reflected seminorm: (x^a - z^a)^2/(x + z)^2 integral."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    n_outer = min(int(math.ceil(30.0 / alpha)), 900)
    xs, wxs = _panel_nodes(_geometric_edges(0.0, 1.0, n_outer, toward_lo=True), npts)
    # inner over z = s*x, s in (0, 1), graded toward the z^alpha kink at 0;
    # the x power splits off as in q_alpha, and the z > x half by symmetry
    s_template = np.concatenate([[0.0], 2.0 ** (-np.arange(44.0, -1.0, -1.0))])
    s_nodes, s_weights = _panel_nodes(s_template, npts)
    kern = ((1.0 - s_nodes**alpha) / (1.0 + s_nodes)) ** 2
    inner = float(np.sum(s_weights * kern))
    outer = float(np.sum(wxs * np.exp((2.0 * alpha - 1.0) * np.log(xs))))
    return 2.0 * inner * outer


def q_alpha_reflected(alpha: float, npts: int = 12) -> float:
    """H^{1/2}(-1,1) seminorm of the even reflection 1 - |x|^alpha."""
    return 2.0 * q_alpha(alpha, npts) + 2.0 * q_alpha_cross(alpha, npts)


def q_alpha_mc(alpha: float, n_samples: int = 1_000_000, seed: int = 0):
    """Monte-Carlo oracle for Q(alpha): importance-sampled, unbiased.

    Sampling x with density 2a x^{2a-1} (and y uniform below x) keeps the
    estimator bounded, so the reported standard error is meaningful even for
    small alpha; plain uniform sampling has a heavy tail at the origin.
    Returns (estimate, standard_error).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    rng = np.random.default_rng(seed)
    x = rng.random(n_samples) ** (1.0 / (2.0 * alpha))
    y = rng.random(n_samples) * x
    ok = (x > 0.0) & (x > y)
    xs, ys = x[ok], y[ok]
    z = np.zeros(n_samples)
    # evaluate the x-scaled kernel in the ratio r = y/x for stability
    r = ys / xs
    z[ok] = (1.0 / alpha) * ((1.0 - r**alpha) / (1.0 - r)) ** 2
    est = float(np.mean(z))
    se = float(np.std(z) / math.sqrt(n_samples))
    return est, se


def q_alpha_cross_mc(alpha: float, n_samples: int = 1_000_000, seed: int = 0):
    """Monte-Carlo oracle for the reflected cross term."""
    rng = np.random.default_rng(seed)
    x = rng.random(n_samples) ** (1.0 / (2.0 * alpha))
    r = rng.random(n_samples)
    z = (1.0 / alpha) * ((1.0 - r**alpha) / (1.0 + r)) ** 2
    return float(np.mean(z)), float(np.std(z) / math.sqrt(n_samples))


# ---------------------------------------------------------------------------
# discrete harmonic completion on the reflected cylinder

def harmonic_complete(g: Grid, bottom: np.ndarray, top: np.ndarray, lateral: str = "reflect_periodic"):
    """Minimise the Dirichlet energy of v given clamped-row data, free sides.

    The domain is doubled by even reflection about x1 = 0 and the resulting
    lateral boundaries identified (a cylinder); the 5-point Laplace problem is
    solved there and restricted back, which realises the mixed
    Dirichlet/Neumann problem of the free-boundary specimen.  Returns the
    restricted nodal field and its Dirichlet energy integral.
    """
    if lateral != "reflect_periodic":
        raise ValueError(f"unsupported lateral treatment {lateral!r}")
    bottom = np.asarray(bottom, dtype=float)
    top = np.asarray(top, dtype=float)
    if bottom.shape != (g.nx + 1,) or top.shape != (g.nx + 1,):
        raise ValueError("data rows must have nx + 1 node values")
    ncol = 2 * g.nx
    nrow = g.ny - 1  # interior rows

    def mirror(row):
        out = np.empty(ncol)
        out[: g.nx + 1] = row
        out[g.nx + 1:] = row[-2:0:-1]
        return out

    d_bot, d_top = mirror(bottom), mirror(top)

    # 5-point Laplacian, periodic in columns, Dirichlet top/bottom rows
    ex = np.ones(ncol)
    Tx = sp.diags([ex, ex], [-1, 1], shape=(ncol, ncol), format="lil")
    Tx[0, ncol - 1] = 1.0
    Tx[ncol - 1, 0] = 1.0
    Tx = Tx.tocsr()
    ey = np.ones(nrow)
    Ty = sp.diags([ey, ey], [-1, 1], shape=(nrow, nrow), format="csr")
    Ix = sp.identity(ncol, format="csr")
    Iy = sp.identity(nrow, format="csr")
    A = 4.0 * sp.kron(Iy, Ix) - sp.kron(Iy, Tx) - sp.kron(Ty, Ix)
    rhs = np.zeros((nrow, ncol))
    rhs[0, :] += d_bot
    rhs[-1, :] += d_top
    sol = spla.spsolve(A.tocsc(), rhs.ravel())
    resid = np.linalg.norm(A @ sol - rhs.ravel())
    scale = max(np.max(np.abs(d_bot)), np.max(np.abs(d_top)), 1e-300)
    if resid > 1e-10 * scale * math.sqrt(sol.size):
        raise RuntimeError(f"harmonic solve did not converge: residual {resid:.3e}")
    v_cyl = sol.reshape(nrow, ncol)

    v = np.empty((g.ny + 1, g.nx + 1))
    v[0, :] = bottom
    v[-1, :] = top
    v[1:-1, :] = v_cyl[:, : g.nx + 1]
    return v, dirichlet_energy(v, g.h)


def dirichlet_energy(v: np.ndarray, h: float) -> float:
    """Cell-averaged discrete integral of |grad v|^2 (exact for affine v)."""
    dx = 0.5 * (v[:-1, 1:] - v[:-1, :-1] + v[1:, 1:] - v[1:, :-1]) / h
    dy = 0.5 * (v[1:, :-1] - v[:-1, :-1] + v[1:, 1:] - v[:-1, 1:]) / h
    return float(np.sum(dx * dx + dy * dy)) * h * h


# ---------------------------------------------------------------------------
# closed-form bound formulas

def analytic_bounds(bc_kind: BCKind, L: float, gamma: float, sigma: float, tau: float = 0.0) -> BoundPair:
    """Paper-proved lower bound and upper-candidate set for the given regime.

    The intermediate horizontal-shear lower bound (1 < L < 2) contains an
    unreported constant and is returned as undetermined-positive; with
    tau > 0 the band constructions add their measured hardening 2*tau*gamma
    to the relevant uppers (the purely elastic candidates carry none).
    """
    if L <= 0 or gamma < 0 or sigma < 0 or tau < 0:
        raise ValueError("invalid bound inputs")
    g2 = gamma * gamma
    hard_band = 2.0 * tau * gamma  # two-band / single-band measured coefficient

    if bc_kind is BCKind.BC1_DIAGONAL:
        if L > 1.0:
            return BoundPair(0.0, (("shear_band", hard_band),), "zero")
        if L == 1.0:
            return BoundPair(0.0, (("sigmoid_sequence", hard_band),), "boundary")
        uppers = (
            ("elastic", 1.5 * g2 / L),
            ("transition", None),  # gamma^2 (1-L)/L + c_L sigma gamma, c_L unreported
        )
        return BoundPair(g2 * (1.0 - L) / L, uppers, "quadratic")

    if bc_kind in (BCKind.BC2_HORIZONTAL, BCKind.BC3_HORIZONTAL_3D):
        s_eff = sigma * (SQRT2 if bc_kind is BCKind.BC3_HORIZONTAL_3D else 1.0)
        if L > 2.0:
            return BoundPair(0.0, (("double_band", hard_band), ("elastic", 0.5 * g2 / L)), "zero")
        if L == 2.0:
            return BoundPair(0.0, (("sigmoid_sequence", hard_band), ("elastic", 0.5 * g2 / L)), "boundary")
        if L > 1.0 or L == 1.0:
            uppers = (
                ("elastic", 0.5 * g2 / L),
                ("crossing_bands", 2.0 * SQRT2 * gamma * s_eff + hard_band),
            )
            return BoundPair(None, uppers, "linear")
        uppers = (
            ("elastic", 0.5 * g2 / L),
            ("transition", None),  # gamma^2 (1-L)/(2L) + c_L sigma gamma
        )
        return BoundPair(g2 * (1.0 - L) / (2.0 * L), uppers, "quadratic")

    if bc_kind is BCKind.SCALAR_SHEAR:
        if L > 0.5:
            return BoundPair(0.0, (("elastic", g2 / L),), "zero")
        if L == 0.5:
            return BoundPair(0.0, (("sigmoid_sequence", None), ("elastic", g2 / L)), "boundary")
        # positivity below 1/2 is open in the scalar model
        return BoundPair(None, (("elastic", g2 / L),), "unclassified")

    raise ValueError(f"unknown boundary-condition kind {bc_kind}")
