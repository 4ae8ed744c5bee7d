"""Computational domain, slip-aligned rotated frame, grids and boundary conditions.

The specimen is the rectangle (0, 1) x (0, L) (a unit-depth box in 3-d).  The
grid is axis-aligned with the specimen; slip-frame derivatives are taken along
grid diagonals, so every diagonal band with edges on node diagonals is
represented exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

SQRT2 = math.sqrt(2.0)

#: rotation taking specimen (x1, x2) components to slip-frame (xi, eta)
#: components: xi along (1, 1)/sqrt(2), eta along (-1, 1)/sqrt(2).
ROTATION = np.array([[1.0, 1.0], [-1.0, 1.0]]) / SQRT2


class Dimension(Enum):
    TWO_D = "two_d"
    SCALAR_TWO_D = "scalar_two_d"
    THREE_D = "three_d"


class BCKind(Enum):
    BC1_DIAGONAL = "bc1_diagonal"
    BC2_HORIZONTAL = "bc2_horizontal"
    BC3_HORIZONTAL_3D = "bc3_horizontal_3d"
    SCALAR_SHEAR = "scalar_shear"


@dataclass(frozen=True)
class DomainSpec:
    """Specimen geometry: height L (width fixed to 1, depth 1 in 3-d)."""

    L: float
    dimension: Dimension = Dimension.TWO_D
    depth: float = 1.0

    def __post_init__(self):
        if not self.L > 0.0:
            raise ValueError(f"height L must be positive, got {self.L}")
        if self.dimension is Dimension.THREE_D and self.depth != 1.0:
            raise ValueError("three_d domains have depth fixed to 1")


@dataclass(frozen=True)
class RotatedFrame:
    """45-degree slip frame xi=(x1+x2)/sqrt2, eta=(x2-x1)/sqrt2 with a movable origin.

    The rotation convention is global; constructions only shift the origin.
    """

    origin_offset: tuple[float, float] = (0.0, 0.0)

    def to_rotated(self, v):
        """Map specimen-frame vector components to (xi, eta) components."""
        v = np.asarray(v, dtype=float)
        return v @ ROTATION.T

    def from_rotated(self, w):
        """Inverse of :meth:`to_rotated` (the rotation is orthonormal)."""
        w = np.asarray(w, dtype=float)
        return w @ ROTATION

    def point_to_rotated(self, p):
        """Rotated coordinates of a point, relative to the frame origin."""
        p = np.asarray(p, dtype=float) - np.asarray(self.origin_offset)
        return p @ ROTATION.T


@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet data: clamped bottom (x2=0) and sheared top (x2=L)."""

    kind: BCKind
    gamma: float

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    def top_displacement(self):
        """Displacement vector (or scalar) imposed on the x2 = L face."""
        g = self.gamma
        if self.kind is BCKind.BC1_DIAGONAL:
            return np.array([g, g])
        if self.kind is BCKind.BC2_HORIZONTAL:
            return np.array([g, 0.0])
        if self.kind is BCKind.BC3_HORIZONTAL_3D:
            return np.array([g, 0.0, 0.0])
        return float(g)  # scalar model

    @property
    def n_components(self) -> int:
        if self.kind is BCKind.SCALAR_SHEAR:
            return 1
        if self.kind is BCKind.BC3_HORIZONTAL_3D:
            return 3
        return 2


@dataclass(frozen=True)
class Grid:
    """Uniform grid with n cells per unit length; h = 1/n.

    Displacements live on nodes, plastic fields on cell centers.  Cell (j, i)
    spans [i*h, (i+1)*h] x [j*h, (j+1)*h]; in 3-d an extra leading index k
    runs over the x3 layers.  Diagonal stencils: the xi-direction neighbor of
    cell (j, i) is (j+1, i+1), the eta-direction neighbor is (j+1, i-1).
    """

    spec: DomainSpec
    n: int
    nx: int = field(init=False)
    ny: int = field(init=False)
    nz: int = field(init=False)
    h: float = field(init=False)
    rounding_note: str = field(init=False, default="")

    def __post_init__(self):
        # even n keeps diagonal stencils pairing consistently; n = 2 is allowed
        # so that enumeration-oracle grids (<= 16 cells) are constructible
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"n must be an even integer >= 2, got {self.n}")
        L = self.spec.L
        m = round(self.n * L)
        if m < 1:
            raise ValueError(f"L={L} too small for n={self.n}")
        if abs(self.n * L - m) > 1e-9 * max(1.0, self.n * L):
            raise ValueError(
                f"n*L must be integral: n={self.n}, L={L}; "
                f"nearest valid L is {m / self.n}"
            )
        object.__setattr__(self, "nx", self.n)
        object.__setattr__(self, "ny", m)
        object.__setattr__(self, "nz", self.n if self.spec.dimension is Dimension.THREE_D else 0)
        object.__setattr__(self, "h", 1.0 / self.n)
        if m != self.n * L:
            object.__setattr__(self, "rounding_note", f"L rounded from {L} to {m / self.n}")

    @property
    def L(self) -> float:
        """Snapped height (exactly ny * h)."""
        return self.ny * self.h

    @property
    def n_cells(self) -> int:
        c = self.nx * self.ny
        return c * self.nz if self.nz else c

    # -- coordinates ------------------------------------------------------

    def node_coords(self):
        """(ny+1, nx+1, 2) array of node positions (x1, x2)."""
        x1 = np.arange(self.nx + 1) * self.h
        x2 = np.arange(self.ny + 1) * self.h
        X1, X2 = np.meshgrid(x1, x2)
        return np.stack([X1, X2], axis=-1)

    def cell_centers(self):
        """(ny, nx, 2) array of cell-center positions."""
        x1 = (np.arange(self.nx) + 0.5) * self.h
        x2 = (np.arange(self.ny) + 0.5) * self.h
        X1, X2 = np.meshgrid(x1, x2)
        return np.stack([X1, X2], axis=-1)

    def cell_q_int(self):
        """(ny, nx) integers j - i: cell-center x2-x1 in units of h."""
        i = np.arange(self.nx)
        j = np.arange(self.ny)
        return j[:, None] - i[None, :]

    def cell_k_int(self):
        """(ny, nx) integers i + j + 1: cell-center x1+x2 in units of h."""
        i = np.arange(self.nx)
        j = np.arange(self.ny)
        return j[:, None] + i[None, :] + 1

    def diagonal_pair_count(self, direction: str) -> int:
        """Number of interior diagonal-neighbor cell pairs ('xi' or 'eta')."""
        if direction not in ("xi", "eta"):
            raise ValueError(f"direction must be 'xi' or 'eta', got {direction!r}")
        return (self.nx - 1) * (self.ny - 1)

    # -- boundary masks ---------------------------------------------------

    def dirichlet_node_mask(self):
        """(ny+1, nx+1) bool mask of Dirichlet rows x2 in {0, L}."""
        mask = np.zeros((self.ny + 1, self.nx + 1), dtype=bool)
        mask[0, :] = True
        mask[-1, :] = True
        return mask


def make_grid(spec: DomainSpec, n: int) -> Grid:
    """Build a grid with n cells per unit length over the given domain."""
    return Grid(spec=spec, n=n)
