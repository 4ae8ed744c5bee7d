import numpy as np
import pytest

from slipscale.fields import (
    LABEL_ETA_XI,
    LABEL_NONE,
    LABEL_PLANE_ZETA,
    LABEL_XI_ETA,
    DisplacementField,
    PlasticField,
    beta_matrix,
    beta_matrix_x_frame,
    check_burgers_rays,
    project_single_slip,
)
from slipscale.geometry import BCKind, BoundaryCondition, Dimension, DomainSpec, make_grid


@pytest.fixture
def grid():
    return make_grid(DomainSpec(1.0), 4)


class TestDisplacementField:
    def test_dirichlet_rows_bit_exact(self, grid):
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.17)
        rng = np.random.default_rng(3)
        vals = rng.standard_normal((grid.ny + 1, grid.nx + 1, 2))
        u = DisplacementField(grid, bc, vals)
        assert not u.bc_satisfied()
        u.apply_bc()
        assert u.bc_satisfied()
        assert np.all(u.values[-1, :, 0] == 0.17)
        assert np.all(u.values[-1, :, 1] == 0.0)

    def test_shape_mismatch_rejected(self, grid):
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        with pytest.raises(ValueError):
            DisplacementField(grid, bc, np.zeros((3, 3, 2)))


class TestBetaMatrix:
    def test_eta_xi_entry(self, grid):
        labels = np.zeros((4, 4), dtype=np.uint8)
        labels[1, 2] = LABEL_ETA_XI
        s = np.zeros((4, 4))
        s[1, 2] = 2.0
        p = PlasticField(grid, Dimension.TWO_D, labels, s)
        np.testing.assert_array_equal(beta_matrix(p, (1, 2)), [[0.0, 0.0], [2.0, 0.0]])

    def test_none_is_zero_matrix(self, grid):
        p = PlasticField(grid)
        np.testing.assert_array_equal(beta_matrix(p, (0, 0)), np.zeros((2, 2)))

    def test_plane_zeta_third_column(self):
        g3 = make_grid(DomainSpec(1.0, Dimension.THREE_D), 4)
        labels = np.zeros((4, 4, 4), dtype=np.uint8)
        labels[0, 1, 2] = LABEL_PLANE_ZETA
        sa = np.zeros((4, 4, 4))
        sb = np.zeros((4, 4, 4))
        sa[0, 1, 2], sb[0, 1, 2] = 1.0, -1.0
        p = PlasticField(g3, Dimension.THREE_D, labels, sa, sb)
        B = beta_matrix(p, (0, 1, 2))
        np.testing.assert_array_equal(B[:, 2], [1.0, -1.0, 0.0])
        np.testing.assert_array_equal(B[2, :], [0.0, 0.0, 0.0])

    def test_frobenius_norm_is_magnitude(self, grid):
        rng = np.random.default_rng(5)
        labels = rng.integers(1, 3, size=(4, 4)).astype(np.uint8)
        s = rng.standard_normal((4, 4))
        p = PlasticField(grid, Dimension.TWO_D, labels, s)
        for j in range(4):
            for i in range(4):
                assert np.linalg.norm(beta_matrix(p, (j, i))) == pytest.approx(abs(s[j, i]))

    def test_label_none_forces_zero_magnitude(self, grid):
        labels = np.zeros((4, 4), dtype=np.uint8)
        s = np.ones((4, 4))
        p = PlasticField(grid, Dimension.TWO_D, labels, s)
        assert np.all(p.s == 0.0)


class TestXFrame:
    def test_eta_xi_rank_one_traceless(self, grid):
        labels = np.full((4, 4), LABEL_ETA_XI, dtype=np.uint8)
        p = PlasticField(grid, Dimension.TWO_D, labels, np.ones((4, 4)))
        B = beta_matrix_x_frame(p, (0, 0))
        assert abs(np.trace(B)) < 1e-14
        assert abs(np.linalg.det(B)) < 1e-14

    def test_xi_eta_is_other_rank_one_family(self, grid):
        # x-frame form proportional to ((1,-1),(1,-1)): equal rows
        labels = np.full((4, 4), LABEL_XI_ETA, dtype=np.uint8)
        p = PlasticField(grid, Dimension.TWO_D, labels, np.ones((4, 4)))
        B = beta_matrix_x_frame(p, (0, 0))
        np.testing.assert_allclose(B[0], B[1], atol=1e-15)
        assert B[0, 0] == pytest.approx(-B[0, 1])

    def test_frame_norms_agree(self, grid):
        rng = np.random.default_rng(11)
        labels = rng.integers(0, 3, size=(4, 4)).astype(np.uint8)
        s = rng.standard_normal((4, 4))
        p = PlasticField(grid, Dimension.TWO_D, labels, s)
        for j in range(4):
            for i in range(4):
                a = np.linalg.norm(beta_matrix(p, (j, i)))
                b = np.linalg.norm(beta_matrix_x_frame(p, (j, i)))
                assert abs(a - b) < 1e-12


class TestProjectSingleSlip:
    def test_zero_matrix_gives_none(self, grid):
        raw = np.zeros((4, 4, 2, 2))
        p = project_single_slip(raw, grid)
        assert np.all(p.labels == LABEL_NONE)
        assert np.all(p.s == 0.0)

    def test_feasible_field_unchanged(self, grid):
        raw = np.zeros((4, 4, 2, 2))
        raw[2, 1, 1, 0] = 3.0
        p = project_single_slip(raw, grid)
        assert p.labels[2, 1] == LABEL_ETA_XI
        assert p.s[2, 1] == 3.0
        np.testing.assert_array_equal(beta_matrix(p, (2, 1)), raw[2, 1])

    def test_tie_prefers_eta_xi_with_unit_residual(self, grid):
        raw = np.zeros((4, 4, 2, 2))
        raw[0, 0] = [[0.0, 1.0], [1.0, 0.0]]
        p = project_single_slip(raw, grid)
        assert p.labels[0, 0] == LABEL_ETA_XI
        resid = np.linalg.norm(raw[0, 0] - beta_matrix(p, (0, 0))) ** 2
        assert resid == pytest.approx(1.0)

    def test_idempotent(self, grid):
        rng = np.random.default_rng(2)
        raw = rng.standard_normal((4, 4, 2, 2))
        p1 = project_single_slip(raw, grid)
        mats = np.array([[beta_matrix(p1, (j, i)) for i in range(4)] for j in range(4)])
        p2 = project_single_slip(mats, grid)
        np.testing.assert_array_equal(p1.labels, p2.labels)
        np.testing.assert_array_equal(p1.s, p2.s)


def test_burgers_ray_check():
    g3 = make_grid(DomainSpec(1.0, Dimension.THREE_D), 4)
    labels = np.full((4, 4, 4), 2, dtype=np.uint8)  # plane_eta: rays (1, +-1)
    sa = np.ones((4, 4, 4))
    p_on = PlasticField(g3, Dimension.THREE_D, labels, sa, sa.copy())
    assert check_burgers_rays(p_on)
    p_off = PlasticField(g3, Dimension.THREE_D, labels, sa, 0.5 * sa)
    assert not check_burgers_rays(p_off)
