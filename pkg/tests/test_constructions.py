import numpy as np
import pytest

from slipscale import constructions as cons
from slipscale.analysis import harmonic_complete
from slipscale.energy import MaterialParams, curl_energy, elastic_energy, scalar_energy, total_energy
from slipscale.fields import LABEL_NONE, check_burgers_rays
from slipscale.geometry import SQRT2, Dimension, DomainSpec, make_grid

GAMMA = 0.1
SIGMA = MaterialParams(sigma=1.0)


def single_slip_consistent(p):
    return np.all(p.s[p.labels == LABEL_NONE] == 0.0)


class TestElasticBaselines:
    @pytest.mark.parametrize("fn,value", [(cons.bc2_elastic, 0.01), (cons.bc1_elastic, 0.03)])
    def test_values(self, fn, value):
        g = make_grid(DomainSpec(0.5), 64)
        u, p = fn(g, GAMMA)
        bd = total_energy(u, p, g, MaterialParams())
        assert bd.total == pytest.approx(value, abs=1e-5)
        assert u.bc_satisfied()

    def test_zero_gamma(self):
        g = make_grid(DomainSpec(0.5), 8)
        u, p = cons.bc2_elastic(g, 0.0)
        assert total_energy(u, p, g, SIGMA).total == 0.0


class TestShearBand:
    def test_zero_total(self):
        g = make_grid(DomainSpec(1.5), 64)
        u, p = cons.bc1_shear_band(g, 0.3, 0.2)
        assert total_energy(u, p, g, SIGMA).total <= 1e-10
        assert u.bc_satisfied() and single_slip_consistent(p)

    def test_barely_tall_domain(self):
        g = make_grid(DomainSpec(1.01), 100)
        u, p = cons.bc1_shear_band(g, 0.3, 0.005)
        assert total_energy(u, p, g, SIGMA).total <= 1e-10

    def test_rejects_short_domain_and_fat_band(self):
        g = make_grid(DomainSpec(1.0), 8)
        with pytest.raises(ValueError, match="L > 1"):
            cons.bc1_shear_band(g, GAMMA, 0.1)
        g = make_grid(DomainSpec(1.5), 8)
        with pytest.raises(ValueError, match="fit"):
            cons.bc1_shear_band(g, GAMMA, 0.4)

    def test_zero_gamma(self):
        g = make_grid(DomainSpec(1.5), 16)
        u, p = cons.bc1_shear_band(g, 0.0, 0.2)
        assert np.all(u.values == 0.0) and np.all(p.s == 0.0)


class TestDoubleBand:
    def test_zero_total(self):
        g = make_grid(DomainSpec(2.5), 80)
        u, p = cons.bc2_double_band(g, 0.2)
        assert total_energy(u, p, g, SIGMA).total <= 1e-10
        assert u.bc_satisfied()

    def test_barely_tall(self):
        g = make_grid(DomainSpec(2.05), 40)
        u, p = cons.bc2_double_band(g, 0.2)
        assert total_energy(u, p, g, SIGMA).total <= 1e-10

    def test_rejects_short(self):
        g = make_grid(DomainSpec(2.0), 8)
        with pytest.raises(ValueError, match="L > 2"):
            cons.bc2_double_band(g, GAMMA)


class TestCrossingBands:
    def test_energy_parts(self):
        g = make_grid(DomainSpec(1.5), 128)
        u, p = cons.bc2_crossing_bands(g, GAMMA)
        bd = total_energy(u, p, g, MaterialParams(sigma=0.2))
        target = 2 * SQRT2 * GAMMA * 0.2
        assert bd.total == pytest.approx(target, rel=0.02)
        assert bd.elastic < 1e-3 * bd.total
        assert u.bc_satisfied()

    def test_sigma_zero_kills_total(self):
        g = make_grid(DomainSpec(1.5), 32)
        u, p = cons.bc2_crossing_bands(g, GAMMA)
        bd = total_energy(u, p, g, MaterialParams(sigma=0.0))
        assert bd.total <= 1e-20
        assert bd.curl_raw == pytest.approx(2 * SQRT2 * GAMMA, rel=0.05)

    def test_rejects_out_of_range(self):
        for L, n in ((1.0, 8), (2.0, 8)):
            g = make_grid(DomainSpec(L), n)
            with pytest.raises(ValueError, match="1 < L < 2"):
                cons.bc2_crossing_bands(g, GAMMA)


class TestTransitions:
    def test_bc1_schedule_convergence(self):
        g = make_grid(DomainSpec(0.5), 64)
        target = GAMMA**2 * (1 - 0.5) / 0.5
        elastics, curls = [], []
        for eps in (0.2, 0.1, 0.05):
            u, p = cons.bc1_transition(g, GAMMA, eps, eps**2)
            bd = total_energy(u, p, g, MaterialParams(sigma=0.1))
            elastics.append(bd.elastic)
            curls.append(bd.curl_raw)
            assert u.bc_satisfied()
        assert elastics[0] > elastics[1] > elastics[2]
        assert elastics[2] == pytest.approx(target, rel=0.15)
        assert all(c <= 6.0 * GAMMA for c in curls)

    def test_bc2_schedule_convergence(self):
        target = GAMMA**2 * (1 - 0.5) / (2 * 0.5)
        elastics = []
        for n, eps in ((64, 0.1), (128, 0.05), (256, 0.025)):
            g = make_grid(DomainSpec(0.5), n)
            u, p = cons.bc2_transition(g, GAMMA, eps, eps**2)
            bd = total_energy(u, p, g, MaterialParams(sigma=0.1))
            elastics.append(bd.elastic)
            assert u.bc_satisfied()
            assert bd.curl_raw <= 15.0 * GAMMA
        assert elastics[0] > elastics[1] > elastics[2]
        assert elastics[2] == pytest.approx(target, rel=0.25)

    def test_sigma_zero_total_tends_to_elastic_target(self):
        g = make_grid(DomainSpec(0.5), 128)
        u, p = cons.bc1_transition(g, GAMMA, 0.05, 0.05**2)
        bd = total_energy(u, p, g, MaterialParams(sigma=0.0))
        assert bd.total == pytest.approx(0.01, rel=0.15)

    def test_rejects_tall_domain(self):
        g = make_grid(DomainSpec(1.0), 8)
        with pytest.raises(ValueError, match="L < 1"):
            cons.bc1_transition(g, GAMMA, 0.1, 0.25)
        with pytest.raises(ValueError, match="L < 1"):
            cons.bc2_transition(g, GAMMA, 0.1, 0.25)

    def test_zero_gamma(self):
        g = make_grid(DomainSpec(0.5), 16)
        u, p = cons.bc2_transition(g, 0.0, 0.1, 0.01)
        assert total_energy(u, p, g, SIGMA).total == 0.0


class TestSigmoids:
    def test_bc1_curl_free_all_alpha(self):
        g = make_grid(DomainSpec(1.0), 32)
        for alpha in (1.0, 0.5, 0.05):
            p, data = cons.bc1_sigmoid(g, GAMMA, alpha)
            assert curl_energy(p, g) == 0.0

    def test_bc1_alpha_one_linear_profile(self):
        g = make_grid(DomainSpec(1.0), 16)
        p, data = cons.bc1_sigmoid(g, GAMMA, 1.0)
        bot, top = data.components["xi"]
        # f_1(x) = 1 - x: away from the clipped end cells the averaged trace
        # is the full linear shear profile
        x = np.arange(g.nx + 1) * g.h
        np.testing.assert_allclose(bot[1:-1], -(GAMMA / SQRT2) * (1 - x[1:-1]), atol=1e-12)
        # end nodes carry the half-cell average of the linear profile
        assert bot[0] == pytest.approx(-(GAMMA / SQRT2) * (1 - g.h / 4))
        assert bot[-1] == pytest.approx(-(GAMMA / SQRT2) * (g.h / 4))

    def test_bc1_completed_energy_decreases(self):
        g = make_grid(DomainSpec(1.0), 64)
        es = []
        for alpha in (0.5, 0.2, 0.05):
            _, data = cons.bc1_sigmoid(g, GAMMA, alpha)
            _, e = harmonic_complete(g, *data.components["xi"])
            es.append(e)
        assert es[0] > es[1] > es[2]

    def test_bc2_L2_curl_free_and_decaying(self):
        g = make_grid(DomainSpec(2.0), 64)
        es = []
        for alpha in (1.0, 0.5, 0.2, 0.05):
            p, data = cons.bc2_L2_sigmoid(g, GAMMA, alpha)
            assert curl_energy(p, g) == 0.0
            e = sum(harmonic_complete(g, bot, top)[1] for bot, top in data.components.values())
            es.append(e)
        assert all(a > b for a, b in zip(es, es[1:]))
        assert np.isfinite(es[0])

    def test_scalar_half_curl_free_and_decaying(self):
        g = make_grid(DomainSpec(0.5, Dimension.SCALAR_TWO_D), 64)
        es = []
        for alpha in (1.0, 0.5, 0.2, 0.05):
            p, data = cons.scalar_half_construction(g, GAMMA, alpha)
            assert curl_energy(p, g) == 0.0
            _, e = harmonic_complete(g, *data.components["scalar"])
            es.append(e)
        assert all(a > b for a, b in zip(es, es[1:]))

    def test_wrong_heights_rejected(self):
        g = make_grid(DomainSpec(1.5), 8)
        with pytest.raises(ValueError, match="L = 1"):
            cons.bc1_sigmoid(g, GAMMA, 0.5)
        with pytest.raises(ValueError, match="L = 2"):
            cons.bc2_L2_sigmoid(g, GAMMA, 0.5)

    def test_scalar_construction_elastic_matches_completion(self):
        # assembling u = u_beta + v and evaluating scalar_energy reproduces
        # the reported Dirichlet energy to discretization accuracy
        g = make_grid(DomainSpec(0.5, Dimension.SCALAR_TWO_D), 64)
        p, data = cons.scalar_half_construction(g, GAMMA, 0.2)
        v, e = harmonic_complete(g, *data.components["scalar"])
        from slipscale.fields import DisplacementField
        from slipscale.geometry import BCKind, BoundaryCondition

        u = DisplacementField(g, BoundaryCondition(BCKind.SCALAR_SHEAR, GAMMA),
                              data.u_beta + v).apply_bc()
        bd = scalar_energy(u, p, g, MaterialParams())
        assert bd.elastic <= 2.5 * e + 1e-12


class TestExtrudeLaminate:
    def test_extrusion_requires_bc2(self):
        g = make_grid(DomainSpec(1.5), 8)
        u, p = cons.bc1_shear_band(g, GAMMA, 0.2)
        with pytest.raises(ValueError, match="BC2"):
            cons.extrude_3d(u, p)

    def test_laminate_preserves_average_and_rays(self):
        g = make_grid(DomainSpec(1.5), 16)
        u2, p2 = cons.bc2_crossing_bands(g, GAMMA)
        u3, p3 = cons.extrude_3d(u2, p2)
        p_lam = cons.laminate_burgers(p3, 4 * u3.grid.h)
        assert p_lam.discrete_burgers
        assert check_burgers_rays(p_lam, tol=1e-9)
        # in-plane slips (s, 0) laminate into (s, +-s): the primary component
        # is preserved cellwise, the out-of-plane one alternates full-size
        active = p3.labels != 0
        np.testing.assert_allclose(p_lam.s[active], p3.s[active], atol=1e-14)
        np.testing.assert_allclose(np.abs(p_lam.s_b[active]), np.abs(p3.s[active]), atol=1e-14)

    def test_laminate_of_zero_is_zero(self):
        g3 = make_grid(DomainSpec(1.0, Dimension.THREE_D), 4)
        from slipscale.fields import PlasticField

        p = PlasticField(g3, Dimension.THREE_D)
        p_lam = cons.laminate_burgers(p, 4 * g3.h)
        assert np.all(p_lam.s == 0.0) and np.all(p_lam.s_b == 0.0)

    def test_period_floor(self):
        g3 = make_grid(DomainSpec(1.0, Dimension.THREE_D), 4)
        from slipscale.fields import PlasticField

        with pytest.raises(ValueError, match="period"):
            cons.laminate_burgers(PlasticField(g3, Dimension.THREE_D), g3.h)


def test_construction_params_validation():
    with pytest.raises(ValueError):
        cons.ConstructionParams(alpha=0.0)
    with pytest.raises(ValueError):
        cons.ConstructionParams(epsilon=-1.0)
    with pytest.raises(ValueError):
        cons.ConstructionParams(lamination_period=0.0)
