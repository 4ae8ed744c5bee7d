"""Displacement and constrained plastic fields.

Displacements are nodal (specimen-frame components); plastic distortions are
cellwise single-slip matrices stored as a label + magnitude.  In the rotated
frame the 2-d side condition allows exactly one nonzero off-diagonal entry
per cell; the 3-d relaxed condition allows one column (the slip-plane normal)
with two free in-plane Burgers components.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import ROTATION, BoundaryCondition, BCKind, Dimension, Grid

# 2-d and scalar labels
LABEL_NONE = 0
LABEL_ETA_XI = 1   # only beta_eta_xi nonzero (scalar model: only beta_xi)
LABEL_XI_ETA = 2   # only beta_xi_eta nonzero (scalar model: only beta_eta)

# 3-d labels: slip-plane normal axis in the rotated frame
LABEL_PLANE_XI = 1
LABEL_PLANE_ETA = 2
LABEL_PLANE_ZETA = 3

#: allowed Burgers rays (s_a, s_b) of the unrelaxed crystallographic side
#: condition, per 3-d label.  plane_xi carries (s_eta, s_zeta), plane_eta
#: (s_xi, s_zeta), plane_zeta (s_xi, s_eta).
BURGERS_RAYS = {
    LABEL_PLANE_XI: (np.array([-1.0, 1.0]), np.array([-1.0, -1.0])),
    LABEL_PLANE_ETA: (np.array([1.0, 1.0]), np.array([1.0, -1.0])),
    LABEL_PLANE_ZETA: (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
}


@dataclass
class DisplacementField:
    """Nodal displacement with Dirichlet rows pinned to the boundary condition.

    ``values`` has shape (ny+1, nx+1, 2) in 2-d, (ny+1, nx+1) for the scalar
    model and (nz+1, ny+1, nx+1, 3) in 3-d; components are specimen-frame.
    """

    grid: Grid
    bc: BoundaryCondition
    values: np.ndarray = None

    def __post_init__(self):
        if self.values is None:
            self.values = np.zeros(self._shape())
            self.apply_bc()
        else:
            self.values = np.asarray(self.values, dtype=float)
            if self.values.shape != self._shape():
                raise ValueError(
                    f"displacement shape {self.values.shape} does not match "
                    f"grid/bc (expected {self._shape()})"
                )

    def _shape(self):
        g = self.grid
        nc = self.bc.n_components
        if nc == 1:
            return (g.ny + 1, g.nx + 1)
        if nc == 3:
            return (g.nz + 1, g.ny + 1, g.nx + 1, 3)
        return (g.ny + 1, g.nx + 1, 2)

    def apply_bc(self):
        """Overwrite the x2 in {0, L} node rows with the exact Dirichlet data."""
        top = self.bc.top_displacement()
        if self.bc.n_components == 1:
            self.values[0, :] = 0.0
            self.values[-1, :] = top
        elif self.bc.n_components == 3:
            self.values[:, 0, :, :] = 0.0
            self.values[:, -1, :, :] = np.asarray(top)
        else:
            self.values[0, :, :] = 0.0
            self.values[-1, :, :] = np.asarray(top)
        return self

    def bc_satisfied(self) -> bool:
        """Exact (bit-for-bit) check of the Dirichlet rows."""
        top = self.bc.top_displacement()
        if self.bc.n_components == 1:
            return bool(np.all(self.values[0] == 0.0) and np.all(self.values[-1] == top))
        if self.bc.n_components == 3:
            return bool(
                np.all(self.values[:, 0] == 0.0)
                and np.all(self.values[:, -1] == np.asarray(top))
            )
        return bool(
            np.all(self.values[0] == 0.0) and np.all(self.values[-1] == np.asarray(top))
        )

    def copy(self) -> "DisplacementField":
        return DisplacementField(self.grid, self.bc, self.values.copy())


@dataclass
class PlasticField:
    """Cellwise single-slip plastic distortion.

    2-d / scalar: ``labels`` (ny, nx) in {none, eta_xi, xi_eta} and magnitude
    ``s`` (ny, nx).  3-d: ``labels`` (nz, ny, nx) in {none, plane_xi,
    plane_eta, plane_zeta} with in-plane Burgers components ``s_a``, ``s_b``;
    ``discrete_burgers`` marks fields obeying the unrelaxed (face-diagonal)
    crystallographic condition.
    """

    grid: Grid
    dimension: Dimension = Dimension.TWO_D
    labels: np.ndarray = None
    s: np.ndarray = None
    s_b: np.ndarray = None
    discrete_burgers: bool = False

    def __post_init__(self):
        g = self.grid
        shape = (g.nz, g.ny, g.nx) if self.dimension is Dimension.THREE_D else (g.ny, g.nx)
        if self.labels is None:
            self.labels = np.zeros(shape, dtype=np.uint8)
        else:
            self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.s is None:
            self.s = np.zeros(shape)
        else:
            self.s = np.asarray(self.s, dtype=float)
        if self.dimension is Dimension.THREE_D:
            if self.s_b is None:
                self.s_b = np.zeros(shape)
            else:
                self.s_b = np.asarray(self.s_b, dtype=float)
        if self.labels.shape != shape or self.s.shape != shape:
            raise ValueError("plastic field arrays do not match the grid")
        # label none forces zero magnitude
        self.s[self.labels == LABEL_NONE] = 0.0
        if self.dimension is Dimension.THREE_D:
            self.s_b[self.labels == LABEL_NONE] = 0.0

    # -- 2-d component views ---------------------------------------------

    def beta_xi_eta(self):
        """(ny, nx) field of the beta_xi_eta entries (zero off xi_eta cells)."""
        return np.where(self.labels == LABEL_XI_ETA, self.s, 0.0)

    def beta_eta_xi(self):
        """(ny, nx) field of the beta_eta_xi entries."""
        return np.where(self.labels == LABEL_ETA_XI, self.s, 0.0)

    def copy(self) -> "PlasticField":
        return PlasticField(
            self.grid,
            self.dimension,
            self.labels.copy(),
            self.s.copy(),
            self.s_b.copy() if self.s_b is not None else None,
            self.discrete_burgers,
        )

    def components_3d(self):
        """The six off-diagonal entry fields of the 3-d rotated-frame matrix.

        Returns a dict keyed by (row, col) with row/col in {0:xi, 1:eta,
        2:zeta}; only entries that can be nonzero under the side condition
        appear.
        """
        lab, sa, sb = self.labels, self.s, self.s_b
        out = {}
        out[(1, 0)] = np.where(lab == LABEL_PLANE_XI, sa, 0.0)    # beta_eta_xi
        out[(2, 0)] = np.where(lab == LABEL_PLANE_XI, sb, 0.0)    # beta_zeta_xi
        out[(0, 1)] = np.where(lab == LABEL_PLANE_ETA, sa, 0.0)   # beta_xi_eta
        out[(2, 1)] = np.where(lab == LABEL_PLANE_ETA, sb, 0.0)   # beta_zeta_eta
        out[(0, 2)] = np.where(lab == LABEL_PLANE_ZETA, sa, 0.0)  # beta_xi_zeta
        out[(1, 2)] = np.where(lab == LABEL_PLANE_ZETA, sb, 0.0)  # beta_eta_zeta
        return out


def beta_matrix(p: PlasticField, cell) -> np.ndarray:
    """Rotated-frame plastic distortion matrix of one cell.

    ``cell`` is (j, i) in 2-d and (k, j, i) in 3-d.
    """
    if p.dimension is Dimension.THREE_D:
        k, j, i = cell
        lab = int(p.labels[k, j, i])
        B = np.zeros((3, 3))
        if lab == LABEL_PLANE_XI:
            B[1, 0] = p.s[k, j, i]
            B[2, 0] = p.s_b[k, j, i]
        elif lab == LABEL_PLANE_ETA:
            B[0, 1] = p.s[k, j, i]
            B[2, 1] = p.s_b[k, j, i]
        elif lab == LABEL_PLANE_ZETA:
            B[0, 2] = p.s[k, j, i]
            B[1, 2] = p.s_b[k, j, i]
        return B
    j, i = cell
    lab = int(p.labels[j, i])
    B = np.zeros((2, 2))
    if lab == LABEL_ETA_XI:
        B[1, 0] = p.s[j, i]
    elif lab == LABEL_XI_ETA:
        B[0, 1] = p.s[j, i]
    return B


def beta_matrix_x_frame(p: PlasticField, cell) -> np.ndarray:
    """Specimen-frame matrix: conjugation of :func:`beta_matrix` by the rotation."""
    B = beta_matrix(p, cell)
    if B.shape == (2, 2):
        return ROTATION.T @ B @ ROTATION
    R3 = np.eye(3)
    R3[:2, :2] = ROTATION
    return R3.T @ B @ R3


def project_single_slip(raw: np.ndarray, grid: Grid) -> PlasticField:
    """Cellwise nearest (Frobenius) single-slip field to a raw 2x2 matrix field.

    ``raw`` has shape (ny, nx, 2, 2) in the rotated frame.  Ties break toward
    label none, then eta_xi.  Used to sanitize warm starts.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (grid.ny, grid.nx, 2, 2):
        raise ValueError(f"raw field shape {raw.shape} does not match grid")
    b_ex = raw[..., 1, 0]
    b_xe = raw[..., 0, 1]
    labels = np.zeros((grid.ny, grid.nx), dtype=np.uint8)
    # keeping component c removes c**2 from the residual: keep the larger one
    keep_ex = np.abs(b_ex) >= np.abs(b_xe)
    labels[keep_ex & (b_ex != 0.0)] = LABEL_ETA_XI
    labels[~keep_ex] = LABEL_XI_ETA
    s = np.where(labels == LABEL_ETA_XI, b_ex, np.where(labels == LABEL_XI_ETA, b_xe, 0.0))
    return PlasticField(grid, Dimension.TWO_D, labels, s)


def check_burgers_rays(p: PlasticField, tol: float = 1e-12) -> bool:
    """True if every active 3-d cell's (s_a, s_b) lies on an allowed Burgers ray."""
    if p.dimension is not Dimension.THREE_D:
        raise ValueError("Burgers ray check applies to 3-d fields")
    ok = True
    for lab, (d1, d2) in BURGERS_RAYS.items():
        mask = p.labels == lab
        if not mask.any():
            continue
        sa, sb = p.s[mask], p.s_b[mask]
        on1 = np.abs(sa * d1[1] - sb * d1[0]) <= tol * (1 + np.abs(sa) + np.abs(sb))
        on2 = np.abs(sa * d2[1] - sb * d2[0]) <= tol * (1 + np.abs(sa) + np.abs(sb))
        ok = ok and bool(np.all(on1 | on2))
    return ok
