import numpy as np
import pytest

from src.evolution.runner import SchemeConfig
from src.evolution.upwind import (
    dt_bound, du_upwind, flux_G, one_sided_differences, stable_dt, upwind_slopes, upwind_terms,
)
from src.model import Grid2D, LayerState, Parameters

QUARTERS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])


def _random_fields(shape, seed=0):
    rng = np.random.default_rng(seed)
    return rng.random(shape), rng.random(shape)


class TestUpwindDifferences:
    def test_walls_cut_off_one_side(self):
        backward, forward = one_sided_differences(QUARTERS, 0.25)
        assert backward[0] == 0.0 and forward[-1] == 0.0
        np.testing.assert_allclose(backward[1:], 1.0)
        np.testing.assert_allclose(forward[:-1], 1.0)

    def test_valley_tie_goes_backward(self):
        """At the bottom of |x - 1/2| both differences have size 1; the backward one is used."""
        u = np.abs(QUARTERS - 0.5)
        assert du_upwind(u, 0.25, 2) == pytest.approx(-1.0)

    def test_wall_takes_the_inner_difference(self):
        assert du_upwind(QUARTERS, 0.25, 0) == pytest.approx(1.0)
        assert du_upwind(QUARTERS, 0.25, 4) == pytest.approx(1.0)

    def test_larger_difference_wins(self):
        u = np.array([0.0, 0.1, 0.5])
        assert du_upwind(u, 1.0, 1) == pytest.approx(0.4)

    def test_axis_argument(self):
        u = np.tile(QUARTERS[:, None], (1, 3))
        np.testing.assert_allclose(du_upwind(u, 0.25, axis=0), 1.0)
        np.testing.assert_allclose(du_upwind(u, 0.25, axis=1), 0.0)

    def test_slopes_in_the_plane(self):
        grid = Grid2D.square(1.0, 5)
        u = 3.0 * grid.xx + 4.0 * grid.yy
        np.testing.assert_allclose(upwind_slopes(u, grid.h), 5.0)


class TestTransport:
    def test_no_rolling_material_no_flux(self):
        u, _ = _random_fields(21)
        assert not np.any(flux_G(u, np.zeros(21), 0.05))

    def test_flat_surface_no_flux(self):
        _, v = _random_fields(21)
        assert not np.any(flux_G(np.ones(21), v, 0.05))

    def test_uniform_slope_moves_material_to_the_low_wall(self):
        x = np.linspace(0.0, 1.0, 11)
        G = flux_G(x, np.ones(11), 0.1)
        np.testing.assert_allclose(G[1:-1], 0.0, atol=1e-9)
        assert G[0] > 0 > G[-1]

    def test_peak_sheds_to_both_sides(self):
        G = flux_G(np.array([0.0, 1.0, 0.0]), np.array([0.0, 1.0, 0.0]), 1.0)
        assert G[1] < 0
        assert G[0] == pytest.approx(G[2])
        assert G[0] > 0

    def test_interface_flux_is_carried_by_the_upper_node(self):
        u = np.array([0.0, 0.2, 0.1, 0.4])
        v = np.array([1.0, 2.0, 3.0, 4.0])
        # interface fluxes: v[1]*0.2, v[1]*(-0.1), v[3]*0.3
        flux = np.array([0.4, -0.2, 1.2])
        expected = np.array([2 * flux[0], flux[1] - flux[0], flux[2] - flux[1], -2 * flux[2]])
        np.testing.assert_allclose(flux_G(u, v, 1.0), expected)

    @pytest.mark.parametrize("u", [1.0 - (1.0 - np.linspace(0, 1, 11)) ** 2, 1.0 - np.linspace(0, 1, 11) ** 2],
                             ids=["rising", "falling"])
    def test_two_case_formula_on_monotone_stretches(self, u):
        """Where the slope flattens toward the top, each node's upwind difference points downhill."""
        h = 0.1
        v = 1.0 + np.linspace(0, 1, 11) ** 2
        du = du_upwind(u, h)
        G = flux_G(u, v, h)
        for i in range(1, 10):
            if du[i] > 0:
                literal = (v[i + 1] * du[i + 1] - v[i] * du[i]) / h
            else:
                literal = (v[i] * du[i] - v[i - 1] * du[i - 1]) / h
            assert G[i] == pytest.approx(literal, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("shape", [(41,), (13, 17)])
    def test_transport_conserves_mass(self, shape):
        u, v = _random_fields(shape)
        h = 0.025
        weights = np.full(shape, h ** len(shape))
        for axis in range(len(shape)):
            edge = [slice(None)] * len(shape)
            for index in (0, -1):
                edge[axis] = index
                weights[tuple(edge)] /= 2
        G = flux_G(u, v, h)
        assert abs((weights * G).sum()) < 1e-10 * np.abs(weights * G).sum()

    def test_mirror_symmetry(self):
        u, v = _random_fields(31, seed=3)
        np.testing.assert_allclose(flux_G(u[::-1], v[::-1], 0.1), flux_G(u, v, 0.1)[::-1], atol=1e-12)

    def test_plane_terms_add_the_axes(self):
        u, v = _random_fields((9, 9), seed=5)
        terms = upwind_terms(u, v, 0.125)
        rows = np.array([upwind_terms(u[j], v[j], 0.125).G for j in range(9)])
        cols = np.array([upwind_terms(u[:, i], v[:, i], 0.125).G for i in range(9)]).T
        np.testing.assert_allclose(terms.G, rows + cols, atol=1e-12)
        np.testing.assert_allclose(terms.magnitude, np.hypot(*terms.slopes))


class TestDescent:
    def test_valley_and_walls_do_not_drain(self):
        u = np.array([0.3, 0.0, 0.2, 0.5])
        descent = upwind_terms(u, np.ones(4), 0.1).descent
        np.testing.assert_allclose(descent, [3.0, 0.0, 2.0, 3.0])

    def test_peak_drains_down_its_steeper_side(self):
        u = np.array([0.0, 0.3, 0.1])
        assert upwind_terms(u, np.ones(3), 0.1).descent[1] == pytest.approx(3.0)

    def test_steepening_flank_drains_downhill(self):
        """On u = x² the upwind difference looks uphill, the descent does not."""
        u = np.array([0.0, 0.01, 0.04, 0.09])
        terms = upwind_terms(u, np.ones(4), 0.1)
        assert terms.slopes[0][1] == pytest.approx(0.3)
        assert terms.descent[1] == pytest.approx(0.1)

    def test_descent_in_the_plane(self):
        grid = Grid2D.square(1.0, 5)
        u = 3.0 * grid.xx + 4.0 * grid.yy
        terms = upwind_terms(u, np.ones(grid.shape), grid.h)
        np.testing.assert_allclose(terms.descent[1:, 1:], 5.0)
        assert terms.descent[0, 0] == 0.0
        np.testing.assert_allclose(terms.descent[0, 1:], 3.0)


class TestTimeStep:
    def test_fresh_start(self, line):
        state = LayerState.empty(line.shape)
        assert stable_dt(state, Parameters(), SchemeConfig(), line.h) == pytest.approx(0.004)

    def test_exchange_cap_binds_on_coarse_grids(self):
        dt = dt_bound(0.0, 0.0, Parameters(gamma=10.0), 0.4, 0.5, 1.0)
        assert dt == pytest.approx(0.05)

    def test_thick_rolling_layer_shrinks_the_step(self):
        p = Parameters()
        thin = dt_bound(0.5, 1.0, p, 0.4, 0.5, 0.01)
        thick = dt_bound(0.5, 4.0, p, 0.4, 0.5, 0.01)
        assert thick == pytest.approx(thin / 4)

    def test_fast_exchange_bounds_the_step(self):
        """u moves at γv along its own slope, which limits Δt once γv outruns the transport."""
        dt = dt_bound(0.0, 2.0, Parameters(gamma=20.0), 0.4, 1.0, 0.01)
        assert dt == pytest.approx(0.4 * 0.01 / 40.0)
