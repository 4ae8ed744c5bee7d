import itertools

import numpy as np
import pytest

from slipscale import constructions as cons
from slipscale.energy import MaterialParams, cell_gradient, scalar_energy, total_energy
from slipscale.fields import LABEL_ETA_XI, LABEL_NONE, LABEL_XI_ETA, PlasticField
from slipscale.geometry import (
    SQRT2,
    BCKind,
    BoundaryCondition,
    Dimension,
    DomainSpec,
    make_grid,
)
from slipscale.minimizer import (
    SolverConfig,
    brute_force_minimize,
    minimize,
    solve_convex,
    update_labels,
    warm_starts,
)

CFG = SolverConfig(n_random_starts=2)


class TestSolveConvex:
    def test_elastic_solve_within_paper_bracket(self):
        # the free lateral sides relax the linear shear: the discrete optimum
        # sits strictly inside [gamma^2(1-L)/(2L), gamma^2/(2L)]
        g = make_grid(DomainSpec(0.5), 32)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        labels = np.zeros((g.ny, g.nx), dtype=np.uint8)
        u, p, bd, ok = solve_convex(g, bc, labels, MaterialParams(sigma=0.1), CFG)
        assert ok
        assert 0.005 - 1e-6 <= bd.total <= 0.01 + 1e-6
        assert u.bc_satisfied()

    def test_crossing_labels_reach_band_energy(self):
        g = make_grid(DomainSpec(1.5), 32)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        u0, p0 = cons.bc2_crossing_bands(g, 0.1)
        m = MaterialParams(sigma=0.2)
        u, p, bd, ok = solve_convex(g, bc, p0.labels, m, CFG, u0=u0, s0=p0.s)
        assert bd.total <= 2 * SQRT2 * 0.1 * 0.2 * 1.02

    def test_zero_gamma_zero_solution(self):
        g = make_grid(DomainSpec(0.5), 8)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.0)
        labels = np.zeros((g.ny, g.nx), dtype=np.uint8)
        u, p, bd, ok = solve_convex(g, bc, labels, MaterialParams(sigma=0.1), CFG)
        assert bd.total <= 1e-18


class TestUpdateLabels:
    def test_zero_iterate_is_fixed_point(self):
        g = make_grid(DomainSpec(0.25), 4)  # a single row of cells
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.0)
        from slipscale.fields import DisplacementField

        u = DisplacementField(g, bc)
        p = PlasticField(g)
        p2 = update_labels(u, p, g, MaterialParams(sigma=0.1))
        assert np.all(p2.labels == LABEL_NONE)
        assert np.all(p2.s == 0.0)

    def test_compatible_band_is_fixed_point_and_global(self):
        # 2 x 4 cells: a compatible diagonal band; the sweep must keep it, and
        # full enumeration of label fields (with cellwise optimal s) agrees
        g = make_grid(DomainSpec(2.0), 2)
        gamma = 0.3
        u, p = cons.bc1_shear_band(g, gamma, 0.5)
        m = MaterialParams(sigma=0.01)
        p2 = update_labels(u, p, g, m)
        np.testing.assert_array_equal(p2.labels, p.labels)
        base = total_energy(u, p2, g, m).total

        _, mxe, mex, _ = cell_gradient(u)
        msum = mxe + mex
        best = np.inf
        for combo in itertools.product((0, 1, 2), repeat=g.ny * g.nx):
            labels = np.array(combo, dtype=np.uint8).reshape(g.ny, g.nx)
            s = np.where(labels != LABEL_NONE, msum, 0.0)
            cand = total_energy(u, PlasticField(g, Dimension.TWO_D, labels, s), g, m).total
            best = min(best, cand)
        assert base == pytest.approx(best, abs=1e-12)

    def test_huge_sigma_suppresses_mixing(self):
        # with dominant TV the oracle picks a single system or none everywhere
        g = make_grid(DomainSpec(1.0), 2)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.5)
        r = brute_force_minimize(g, bc, MaterialParams(sigma=100.0), CFG)
        used = set(np.unique(r.p.labels)) - {LABEL_NONE}
        assert len(used) <= 1


class TestMinimize:
    def test_never_worse_than_any_warm_start(self):
        g = make_grid(DomainSpec(1.5), 16)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        m = MaterialParams(sigma=0.1)
        res = minimize(g, bc, m, CFG)
        for name, u0, p0 in warm_starts(g, bc, CFG):
            assert res.energy.total <= total_energy(u0, p0, g, m).total + 1e-12

    def test_monotone_in_gamma(self):
        g = make_grid(DomainSpec(0.5), 16)
        m = MaterialParams(sigma=0.1)
        js = []
        for gamma in (0.05, 0.1, 0.2):
            bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
            js.append(minimize(g, bc, m, CFG).energy.total)
        assert js[0] <= js[1] * 1.001 and js[1] <= js[2] * 1.001

    def test_lower_bound_consistency(self):
        # BC2, L < 1: discrete diagonal-strain chains reproduce the paper's
        # lower bound exactly, so j_numeric can never undershoot it much
        g = make_grid(DomainSpec(0.5), 16)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        res = minimize(g, bc, MaterialParams(sigma=0.1), CFG)
        assert res.energy.total >= 0.005 * (1 - 1e-6)

    def test_zero_regime_band_start(self):
        g = make_grid(DomainSpec(2.5), 16)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.2)
        res = minimize(g, bc, MaterialParams(sigma=0.1), CFG)
        assert res.energy.total <= 1e-4 * 0.04

    def test_scalar_model_minimize(self):
        g = make_grid(DomainSpec(0.5, Dimension.SCALAR_TWO_D), 8)
        bc = BoundaryCondition(BCKind.SCALAR_SHEAR, 0.1)
        res = minimize(g, bc, MaterialParams(sigma=0.1), CFG)
        assert res.energy.total <= 0.1**2 / 0.5 + 1e-9

    def test_relaxed_mode_zero_for_tall_domain(self):
        g = make_grid(DomainSpec(1.5), 16)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        res = minimize(g, bc, MaterialParams(sigma=0.1), CFG, single_slip=False)
        assert res.energy.total <= 1e-8
        assert res.p is None

    def test_3d_rejected(self):
        g3 = make_grid(DomainSpec(1.0, Dimension.THREE_D), 4)
        bc = BoundaryCondition(BCKind.BC3_HORIZONTAL_3D, 0.1)
        with pytest.raises(ValueError):
            minimize(g3, bc, MaterialParams(), CFG)


class TestBruteForce:
    def test_zero_gamma(self):
        g = make_grid(DomainSpec(1.0), 2)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.0)
        r = brute_force_minimize(g, bc, MaterialParams(sigma=0.1), CFG)
        assert r.energy.total <= 1e-18

    def test_cell_cap(self):
        g = make_grid(DomainSpec(2.0), 4)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.1)
        with pytest.raises(ValueError, match="16 cells"):
            brute_force_minimize(g, bc, MaterialParams(), CFG)

    def test_sigma_zero_matches_relaxed_per_cell_optimum(self):
        # 1 x 2 cells, sigma = 0: the TV decouples, so any all-active labeling
        # attains the oracle optimum
        g = make_grid(DomainSpec(0.5), 2)
        bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, 0.2)
        m = MaterialParams(sigma=0.0)
        r = brute_force_minimize(g, bc, m, CFG)
        labels = np.full((g.ny, g.nx), LABEL_XI_ETA, dtype=np.uint8)
        _, _, bd, _ = solve_convex(g, bc, labels, m, CFG)
        assert r.energy.total == pytest.approx(bd.total, abs=1e-8)

    def test_matches_icm_on_random_instances(self):
        rng = np.random.default_rng(123)
        for k in range(5):
            gamma = float(rng.uniform(0.05, 0.5))
            sigma = float(rng.uniform(0.0, 0.3))
            L = float(rng.choice([0.5, 1.0]))
            g = make_grid(DomainSpec(L), 2)
            bc = BoundaryCondition(BCKind.BC2_HORIZONTAL, gamma)
            m = MaterialParams(sigma=sigma)
            cfg = SolverConfig(rng_seed=k, n_random_starts=6)
            r = minimize(g, bc, m, cfg)
            o = brute_force_minimize(g, bc, m, cfg)
            assert r.energy.total <= o.energy.total + 1e-6 + 0.01 * o.energy.total
