"""Explicit test fields: shear bands, transition layers, sigmoid constructions.

All region boundaries are diagonal lines snapped to node diagonals, so the
piecewise-affine pieces are represented exactly: region membership is decided
with the integer diagonals q = j - i (x2 - x1 in units of h) and
k = i + j (x1 + x2).  Plastic fields are built from the discrete cell
gradient of the constructed displacement, which makes the compatible parts
exactly elastic-free on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import cell_gradient, diag_dxi, diag_deta
from .fields import (
    LABEL_ETA_XI,
    LABEL_NONE,
    LABEL_PLANE_ETA,
    LABEL_PLANE_XI,
    LABEL_PLANE_ZETA,
    LABEL_XI_ETA,
    BURGERS_RAYS,
    DisplacementField,
    PlasticField,
)
from .geometry import SQRT2, BCKind, BoundaryCondition, Dimension, DomainSpec, Grid, make_grid


@dataclass(frozen=True)
class ConstructionParams:
    """Band width, transition exponent and lamination period defaults."""

    epsilon: float = 0.05
    alpha: float = 0.25
    lamination_period: float = 0.125

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.lamination_period <= 0.0:
            raise ValueError("lamination_period must be positive")


@dataclass
class CompletionData:
    """Residual Dirichlet data of a curl-free construction, plus the carrier.

    ``components`` maps a component name ("xi", "eta" or "scalar") to the
    (bottom_row, top_row) node data of the harmonic correction v; the traces
    are cell-averaged so unresolvable x^alpha layers enter with the mass the
    grid can actually carry.  ``u_beta`` is the raw (BC-violating) carrier
    displacement whose gradient defines beta.
    """

    components: dict
    u_beta: np.ndarray


# ---------------------------------------------------------------------------
# helpers

def _node_q_int(g: Grid):
    i = np.arange(g.nx + 1)
    j = np.arange(g.ny + 1)
    return j[:, None] - i[None, :]


def _node_k_int(g: Grid):
    i = np.arange(g.nx + 1)
    j = np.arange(g.ny + 1)
    return j[:, None] + i[None, :]


def _to_x_frame(u_xi, u_eta):
    """Stack rotated components into specimen-frame nodal vectors."""
    u1 = (u_xi - u_eta) / SQRT2
    u2 = (u_xi + u_eta) / SQRT2
    return np.stack([u1, u2], axis=-1)


def _displacement(g: Grid, bc: BoundaryCondition, u_xi, u_eta) -> DisplacementField:
    u = DisplacementField(g, bc, _to_x_frame(u_xi, u_eta))
    if not u.bc_satisfied():
        # constructions must hit the Dirichlet rows exactly; rewrite them to
        # remove pure roundoff, then re-check
        u.apply_bc()
    return u

def _field_from_gradient(g: Grid, u: DisplacementField) -> PlasticField:
    """Plastic field absorbing the full off-diagonal discrete gradient.

    Cells where both off-diagonal components are active get a single slip
    system carrying their sum, which leaves the symmetrized elastic residual
    untouched; elsewhere the active component keeps its own system.
    """
    _, m_xe, m_ex, _ = cell_gradient(u)
    labels = np.full((g.ny, g.nx), LABEL_NONE, dtype=np.uint8)
    s = np.zeros((g.ny, g.nx))
    # the x-frame round trip leaves ~1e-16 noise on exactly-zero components
    tol = 1e-10 * max(np.max(np.abs(m_xe)), np.max(np.abs(m_ex)), 1e-300)
    a_on = np.abs(m_xe) > tol
    b_on = np.abs(m_ex) > tol
    labels[a_on] = LABEL_XI_ETA
    s[a_on] = m_xe[a_on]
    only_b = b_on & ~a_on
    labels[only_b] = LABEL_ETA_XI
    s[only_b] = m_ex[only_b]
    both = a_on & b_on
    s[both] = m_xe[both] + m_ex[both]
    return PlasticField(g, Dimension.TWO_D, labels, s)


def _snap_diag(g: Grid, width: float, name: str, minimum: int = 1) -> int:
    """Snap a slip-frame width to a count of h-diagonals (>= minimum)."""
    w_int = max(round(width * SQRT2 / g.h), minimum)
    if width * SQRT2 / g.h < 0.5:
        raise ValueError(f"{name}={width} is below the grid resolution (needs >= {g.h / SQRT2})")
    return w_int


# ---------------------------------------------------------------------------
# purely elastic baselines

def bc1_elastic(g: Grid, gamma: float):
    """Linear diagonal shear u = gamma*(1,1)*x2/L with beta = 0."""
    bc = BoundaryCondition(BCKind.BC1_DIAGONAL, gamma)
    x2 = (np.arange(g.ny + 1)[:, None] * g.h) * np.ones((1, g.nx + 1))
    ramp = gamma * x2 / g.L
    u = DisplacementField(g, bc, np.stack([ramp, ramp], axis=-1))
    return u, PlasticField(g)


def bc2_elastic(g: Grid, gamma: float):
    """Linear horizontal shear u = gamma*(1,0)*x2/L with beta = 0."""
    bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
    x2 = (np.arange(g.ny + 1)[:, None] * g.h) * np.ones((1, g.nx + 1))
    u = DisplacementField(g, bc, np.stack([gamma * x2 / g.L, np.zeros_like(x2)], axis=-1))
    return u, PlasticField(g)


def scalar_elastic(g: Grid, gamma: float):
    bc = BoundaryCondition(BCKind.SCALAR_SHEAR, gamma)
    x2 = (np.arange(g.ny + 1)[:, None] * g.h) * np.ones((1, g.nx + 1))
    u = DisplacementField(g, bc, gamma * x2 / g.L)
    return u, PlasticField(g, Dimension.SCALAR_TWO_D)


# ---------------------------------------------------------------------------
# zero-energy shear bands

def bc1_shear_band(g: Grid, gamma: float, epsilon: float):
    """Single simple-shear band for diagonal shear, L > 1: zero total energy.

    The band is a strip of constant x2 - x1 that crosses between the free
    lateral sides; u_xi ramps from 0 to sqrt(2)*gamma across it.
    """
    L = g.L
    if L <= 1.0:
        raise ValueError(f"bc1_shear_band requires L > 1, got L={L}")
    if not epsilon < (L - 1.0) / SQRT2:
        raise ValueError(f"band width {epsilon} does not fit: need epsilon < {(L - 1) / SQRT2}")
    bc = BoundaryCondition(BCKind.BC1_DIAGONAL, gamma)
    w = _snap_diag(g, epsilon, "epsilon")
    span = g.ny - g.nx  # (L-1)/h, the admissible q range
    q0 = (span - w) // 2
    if q0 < 0 or q0 + w > span:
        raise ValueError("snapped band does not fit between the Dirichlet corners")
    qi = _node_q_int(g)
    ramp = np.clip((qi - q0) / w, 0.0, 1.0)
    u = _displacement(g, bc, SQRT2 * gamma * ramp, np.zeros_like(ramp))
    return u, _field_from_gradient(g, u)


def bc2_double_band(g: Grid, gamma: float):
    """Two alternating shear bands for horizontal shear, L > 2: zero energy."""
    L = g.L
    if L <= 2.0:
        raise ValueError(f"bc2_double_band requires L > 2, got L={L}")
    bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
    qi = _node_q_int(g)
    ki = _node_k_int(g)
    # lower band S2: 0 <= x2 - x1 <= L/2 - 1; upper band S1: 1 + L/2 <= x1 + x2 <= L
    q_hi = round((L / 2.0 - 1.0) / g.h)
    k_lo = round((1.0 + L / 2.0) / g.h)
    if q_hi < 1 or g.ny - k_lo < 1:
        raise ValueError("bands collapse at this resolution")
    u_xi = (gamma / SQRT2) * np.clip(qi / q_hi, 0.0, 1.0)
    u_eta = -(gamma / SQRT2) * np.clip((ki - k_lo) / (g.ny - k_lo), 0.0, 1.0)
    u = _displacement(g, bc, u_xi, u_eta)
    return u, _field_from_gradient(g, u)


def bc2_crossing_bands(g: Grid, gamma: float):
    """Crossing shear bands for 1 < L < 2: elastic-free, curl 2*sqrt(2)*gamma.

    Both bands have the maximal width (L-1)/sqrt(2); beta follows the
    discrete gradient except on the intersection, where the symmetrized
    residual is cancelled by a single system carrying the summed twist.
    """
    L = g.L
    if not 1.0 < L < 2.0:
        raise ValueError(f"bc2_crossing_bands requires 1 < L < 2, got L={L}")
    bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
    span = g.ny - g.nx  # (L-1)/h
    qi = _node_q_int(g)
    ki = _node_k_int(g)
    u_xi = (gamma / SQRT2) * np.clip(qi / span, 0.0, 1.0)
    u_eta = -(gamma / SQRT2) * np.clip((ki - g.nx) / span, 0.0, 1.0)
    u = _displacement(g, bc, u_xi, u_eta)
    return u, _field_from_gradient(g, u)


# ---------------------------------------------------------------------------
# transition-layer constructions (L < 1)

def _layer_profile(qi, j, w_half, g: Grid, alpha: float, morph: bool):
    """Rising cross-layer profile on q >= -w_half (in h units).

    Blends the linear interior ramp x2/L with the rigid value 1 through an
    x^alpha cross profile; the corner collar min(1, 2*x2/W) keeps the bottom
    Dirichlet row exact at an o(alpha) elastic cost.  With ``morph`` the
    exponent relaxes to 1 above the corner zone so that layer crossings in
    the two-component construction cancel symmetrically.
    """
    P = np.clip((qi + w_half) / (2.0 * w_half), 0.0, 1.0)
    if morph:
        x2 = j * g.h
        W = 2.0 * w_half * g.h
        m_len = max(g.L / 2.0 - 2.0 * W, 2.0 * g.h)
        a_eff = alpha + (1.0 - alpha) * np.clip((x2 - W) / m_len, 0.0, 1.0)
    else:
        a_eff = alpha
    phi = 1.0 - (1.0 - P) ** a_eff
    collar = np.minimum(1.0, j / w_half)
    return (1.0 - phi) * (j / g.ny) + phi * collar


def _transition_scalar_profile(g: Grid, w_half: int, alpha: float, morph: bool):
    """Global profile Phi(q, x2) in [0, 1]: 0 below, x2/L in the middle strip,
    1 above, with transition layers centred on the corner diagonals."""
    span = g.ny - g.nx  # (L-1)/h < 0
    if not -w_half > span + w_half:
        raise ValueError("transition layers overlap; reduce epsilon")
    qi = _node_q_int(g)
    j = (np.arange(g.ny + 1)[:, None]) * np.ones((1, g.nx + 1))
    up = _layer_profile(qi, j, w_half, g, alpha, morph)
    low = 1.0 - _layer_profile(span - qi, g.ny - j, w_half, g, alpha, morph)
    mid = j / g.ny
    phi = np.where(qi >= -w_half, up, np.where(qi <= span + w_half, low, mid))
    return phi


def bc1_transition(g: Grid, gamma: float, epsilon: float, alpha: float):
    """Five-region construction for diagonal shear, L < 1.

    Elastic energy tends to gamma^2 (1-L)/L as epsilon -> 0 with
    alpha = epsilon^2; the dislocation energy stays O(gamma).
    """
    L = g.L
    if L >= 1.0:
        raise ValueError(f"bc1_transition requires L < 1, got L={L}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    bc = BoundaryCondition(BCKind.BC1_DIAGONAL, gamma)
    w_half = max(_snap_diag(g, epsilon, "epsilon", minimum=2) // 2, 1)
    phi = _transition_scalar_profile(g, w_half, alpha, morph=False)
    u = _displacement(g, bc, SQRT2 * gamma * phi, np.zeros((g.ny + 1, g.nx + 1)))
    return u, _field_from_gradient(g, u)


def bc2_transition(g: Grid, gamma: float, epsilon: float, alpha: float):
    """Two-component transition construction for horizontal shear, L < 1.

    u_xi crosses the constant-(x2-x1) layers, u_eta the constant-(x1+x2)
    ones; on layer intersections beta is dropped and the symmetric twist
    cancels, on the central strip overlap the two linear ramps cancel
    exactly.  Elastic -> gamma^2 (1-L)/(2L), plastic O(sigma*gamma).
    """
    L = g.L
    if L >= 1.0:
        raise ValueError(f"bc2_transition requires L < 1, got L={L}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
    w_half = max(_snap_diag(g, epsilon, "epsilon", minimum=2) // 2, 1)
    phi_q = _transition_scalar_profile(g, w_half, alpha, morph=True)
    # the eta component uses the same profile along the x1+x2 diagonals,
    # obtained by the reflection x1 -> 1 - x1 (k - nx plays the role of q)
    gq = g
    span = g.ny - g.nx
    ki = _node_k_int(g) - g.nx
    j = (np.arange(g.ny + 1)[:, None]) * np.ones((1, g.nx + 1))
    up = _layer_profile(ki, j, w_half, gq, alpha, morph=True)
    low = 1.0 - _layer_profile(span - ki, g.ny - j, w_half, gq, alpha, morph=True)
    phi_k = np.where(ki >= -w_half, up, np.where(ki <= span + w_half, low, j / g.ny))
    u = _displacement(g, bc, (gamma / SQRT2) * phi_q, -(gamma / SQRT2) * phi_k)

    # region-based single-slip assignment
    qc = g.cell_q_int()
    kc = g.cell_k_int() - g.nx  # shifted so the k-strips align with q-strips
    def strip(c):
        in_layer = (np.abs(c) <= w_half) | (np.abs(c - span) <= w_half)
        in_mid = (c < -w_half) & (c > span + w_half)
        return in_layer, in_mid
    q_layer, q_mid = strip(qc)
    k_layer, k_mid = strip(kc)
    _, m_xe, m_ex, _ = cell_gradient(u)
    labels = np.full((g.ny, g.nx), LABEL_NONE, dtype=np.uint8)
    s = np.zeros((g.ny, g.nx))
    take_a = (q_layer & ~k_layer) | (q_mid & ~(k_layer | k_mid))
    take_b = (k_layer & ~q_layer) | (k_mid & ~(q_layer | q_mid))
    labels[take_a] = LABEL_XI_ETA
    s[take_a] = m_xe[take_a]
    labels[take_b] = LABEL_ETA_XI
    s[take_b] = m_ex[take_b]
    return u, PlasticField(g, Dimension.TWO_D, labels, s)


# ---------------------------------------------------------------------------
# curl-free sigmoid constructions (boundary aspect ratios)

def _cell_avg_power(x_nodes: np.ndarray, h: float, alpha: float):
    """Cell-averaged x^alpha over [x - h/2, x + h/2] clipped to [0, 1]."""
    lo = np.clip(x_nodes - h / 2.0, 0.0, 1.0)
    hi = np.clip(x_nodes + h / 2.0, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        avg = (hi ** (alpha + 1.0) - lo ** (alpha + 1.0)) / ((alpha + 1.0) * (hi - lo))
    return np.where(hi > lo, avg, x_nodes ** alpha)


def bc1_sigmoid(g: Grid, gamma: float, alpha: float):
    """Curl-free steep transition for diagonal shear at L = 1.

    Returns the single-slip field beta = grad(u^beta) and the residual
    Dirichlet data of v = u - u^beta on the clamped rows (f_alpha shaped,
    cell-averaged traces).
    """
    if g.ny != g.nx:
        raise ValueError(f"bc1_sigmoid requires L = 1, got L={g.L}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    qi = _node_q_int(g)
    # u_xi = g(eta): (gamma/sqrt2)(1 + sgn(eta) (sqrt2 |eta|)^alpha), sqrt2|eta| = |q|
    mag = (np.abs(qi) * g.h) ** alpha
    u_xi = (gamma / SQRT2) * (1.0 + np.sign(qi) * mag)
    u_beta = _to_x_frame(u_xi, np.zeros_like(u_xi))
    u_carrier = DisplacementField(g, BoundaryCondition(BCKind.BC1_DIAGONAL, gamma), u_beta.copy())
    p = _field_from_gradient(g, u_carrier)

    x = np.arange(g.nx + 1) * g.h
    f_bot = 1.0 - _cell_avg_power(x, g.h, alpha)
    f_top = 1.0 - _cell_avg_power(1.0 - x, g.h, alpha)
    data = CompletionData(
        components={"xi": (-(gamma / SQRT2) * f_bot, (gamma / SQRT2) * f_top)},
        u_beta=u_beta,
    )
    return p, data


def bc2_L2_sigmoid(g: Grid, gamma: float, alpha: float):
    """Curl-free quadrant construction for horizontal shear at L = 2."""
    if g.ny != 2 * g.nx:
        raise ValueError(f"bc2_L2_sigmoid requires L = 2, got L={g.L}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    qi = _node_q_int(g)
    ki = _node_k_int(g) - 2 * g.nx  # anchored at (1, 1), the right-edge midpoint
    u_xi = np.where(qi >= 0, gamma / SQRT2, (gamma / SQRT2) * (1.0 - (-np.minimum(qi, 0) * g.h) ** alpha))
    u_eta = np.where(ki > 0, -(gamma / SQRT2) * (np.maximum(ki, 0) * g.h) ** alpha, 0.0)
    u_beta = _to_x_frame(u_xi, u_eta)
    u_carrier = DisplacementField(g, BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma), u_beta.copy())
    p = _field_from_gradient(g, u_carrier)

    x = np.arange(g.nx + 1) * g.h
    f = 1.0 - _cell_avg_power(x, g.h, alpha)
    zero = np.zeros_like(f)
    data = CompletionData(
        components={
            "xi": (-(gamma / SQRT2) * f, zero),
            "eta": (zero, -(gamma / SQRT2) * f),
        },
        u_beta=u_beta,
    )
    return p, data


def scalar_half_construction(g: Grid, gamma: float, alpha: float):
    """Scalar-model quadrant construction at L = 1/2 (curl-free)."""
    if g.nx != 2 * g.ny:
        raise ValueError(f"scalar_half_construction requires L = 1/2, got L={g.L}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    qi = _node_q_int(g)
    ki = _node_k_int(g) - g.nx  # anchored at (1/2, 1/2), the top-edge midpoint
    u = np.zeros((g.ny + 1, g.nx + 1))
    pos_k = ki > 0
    pos_q = qi > 0
    u[pos_k] = gamma * (2.0 * ki[pos_k] * g.h) ** alpha
    u[pos_q] = gamma * (2.0 * qi[pos_q] * g.h) ** alpha
    u_beta = u.copy()
    gx = diag_dxi(u, g.h)
    ge = diag_deta(u, g.h)
    labels = np.full((g.ny, g.nx), LABEL_NONE, dtype=np.uint8)
    s = np.zeros((g.ny, g.nx))
    tol = 1e-10 * max(np.max(np.abs(gx)), np.max(np.abs(ge)), 1e-300)
    on_x = np.abs(gx) > tol
    labels[on_x] = LABEL_ETA_XI  # scalar: only beta_xi nonzero
    s[on_x] = gx[on_x]
    on_e = (np.abs(ge) > tol) & ~on_x
    labels[on_e] = LABEL_XI_ETA  # only beta_eta nonzero
    s[on_e] = ge[on_e]
    p = PlasticField(g, Dimension.SCALAR_TWO_D, labels, s)

    # top data gamma * f_alpha(|2 x1 - 1|), cell-averaged; bottom data is zero
    x = np.arange(g.nx + 1) * g.h
    lo = np.clip(x - g.h / 2.0, 0.0, 1.0)
    hi = np.clip(x + g.h / 2.0, 0.0, 1.0)

    def antideriv(t):
        # integral of |2 s - 1|^alpha from 0 to t
        below = (1.0 - (1.0 - 2.0 * np.minimum(t, 0.5)) ** (alpha + 1.0)) / (2.0 * (alpha + 1.0))
        above = np.where(t > 0.5, (2.0 * np.maximum(t, 0.5) - 1.0) ** (alpha + 1.0) / (2.0 * (alpha + 1.0)), 0.0)
        return below + above

    avg = (antideriv(hi) - antideriv(lo)) / (hi - lo)
    top = gamma * (1.0 - avg)
    data = CompletionData(components={"scalar": (np.zeros_like(top), top)}, u_beta=u_beta)
    return p, data


# ---------------------------------------------------------------------------
# 3-d extension

def extrude_3d(u2d: DisplacementField, p2d: PlasticField):
    """Extend a 2-d pair constantly in the zeta direction (unit depth).

    The horizontal-shear boundary condition becomes the 3-d one; in-plane
    slip systems map to the slip planes with the matching normal column.
    """
    g2 = u2d.grid
    if p2d.dimension is not Dimension.TWO_D:
        raise ValueError("extrude_3d takes a 2-d vector-model pair")
    if u2d.bc.kind is not BCKind.BC2_HORIZONTAL:
        raise ValueError("the 3-d model imposes horizontal shear (BC2 -> BC3)")
    spec3 = DomainSpec(g2.L, Dimension.THREE_D)
    g3 = make_grid(spec3, g2.n)
    bc3 = BoundaryCondition(BCKind.BC3_HORIZONTAL_3D, u2d.bc.gamma)
    vals = np.zeros((g3.nz + 1, g3.ny + 1, g3.nx + 1, 3))
    vals[..., :2] = u2d.values[None, :, :, :]
    u3 = DisplacementField(g3, bc3, vals)

    labels = np.zeros((g3.nz, g3.ny, g3.nx), dtype=np.uint8)
    s_a = np.zeros_like(labels, dtype=float)
    lab2 = np.broadcast_to(p2d.labels, labels.shape)
    s2 = np.broadcast_to(p2d.s, labels.shape)
    labels[lab2 == LABEL_XI_ETA] = LABEL_PLANE_ETA   # beta_xi_eta -> column eta
    labels[lab2 == LABEL_ETA_XI] = LABEL_PLANE_XI    # beta_eta_xi -> column xi
    s_a[labels != 0] = s2[labels != 0]
    p3 = PlasticField(g3, Dimension.THREE_D, labels, s_a, np.zeros_like(s_a))
    return u3, p3


def laminate_burgers(p3d: PlasticField, period: float) -> PlasticField:
    """Replace each relaxed in-plane Burgers vector by a fine oscillation
    between the two allowed face-diagonal vectors with the same average.

    Layers alternate along the slip-plane normal, so the oscillation itself
    is curl-free while every pre-existing jump picks up the sqrt(2) factor.
    """
    g = p3d.grid
    if p3d.dimension is not Dimension.THREE_D:
        raise ValueError("laminate_burgers takes a 3-d field")
    if period < 2.0 * g.h:
        raise ValueError(f"lamination period must be >= 2h = {2 * g.h}")
    i = np.arange(g.nx)
    j = np.arange(g.ny)
    k = np.arange(g.nz)
    xi_c = (j[None, :, None] + i[None, None, :] + 1.0) * g.h / SQRT2 * np.ones((g.nz, 1, 1))
    eta_c = (j[None, :, None] - i[None, None, :]) * g.h / SQRT2 * np.ones((g.nz, 1, 1))
    zeta_c = (k[:, None, None] + 0.5) * g.h * np.ones((1, g.ny, g.nx))
    normal_coord = {
        LABEL_PLANE_XI: xi_c,
        LABEL_PLANE_ETA: eta_c,
        LABEL_PLANE_ZETA: zeta_c,
    }
    out = p3d.copy()
    for lab, (d1, d2) in BURGERS_RAYS.items():
        mask = p3d.labels == lab
        if not mask.any():
            continue
        sa, sb = p3d.s[mask], p3d.s_b[mask]
        det = d1[0] * d2[1] - d1[1] * d2[0]
        c1 = (sa * d2[1] - sb * d2[0]) / det
        c2 = (d1[0] * sb - d1[1] * sa) / det
        parity = np.floor(normal_coord[lab][mask] / period).astype(int) % 2
        new_a = np.where(parity == 0, 2.0 * c1 * d1[0], 2.0 * c2 * d2[0])
        new_b = np.where(parity == 0, 2.0 * c1 * d1[1], 2.0 * c2 * d2[1])
        out.s[mask] = new_a
        out.s_b[mask] = new_b
    out.discrete_burgers = True
    return out
