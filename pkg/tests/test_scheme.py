import numpy as np
import pytest

from src.errors import InvalidInputError, NonFiniteStateError
from src.evolution.scheme import advance, step_1d, step_2d
from src.model import Grid1D, LayerState, Parameters


class TestStep1D:
    def test_first_two_steps_from_rest(self, line):
        """Sand lands in the rolling layer first and starts settling one step later."""
        f = np.ones(line.shape)
        state = LayerState.empty(line.shape)
        first = step_1d(state, f, Parameters(), 0.004, line.h)
        np.testing.assert_allclose(first.v, 0.004)
        assert not np.any(first.u)
        second = step_1d(first, f, Parameters(), 0.004, line.h)
        np.testing.assert_allclose(second.u, 1.6e-5)
        np.testing.assert_allclose(second.v, 0.004 + 0.004 * (1.0 - 0.004))
        assert second.t == pytest.approx(0.008)

    def test_rest_without_source(self, line):
        state = step_1d(LayerState.empty(line.shape), np.zeros(line.shape), Parameters(), 0.004, line.h)
        assert not np.any(state.u) and not np.any(state.v)

    def test_step_conserves_mass(self):
        grid = Grid1D.from_spacing(1.0, 0.05)
        rng = np.random.default_rng(7)
        u = 0.02 * rng.random(grid.shape)
        v = 0.5 + 0.5 * rng.random(grid.shape)
        f = rng.random(grid.shape)
        dt = 1e-3
        out = advance(u, v, f, Parameters(), dt, grid.h)
        assert not np.any(out.clipped)
        cv = grid.control_volumes
        gained = (cv * ((out.u - u) + (out.v - v))).sum()
        assert gained == pytest.approx(dt * (cv * f).sum(), abs=1e-12)

    def test_negative_rolling_layer_is_clipped(self):
        u = np.zeros(3)
        out = advance(u, np.ones(3), np.zeros(3), Parameters(), 2.0, 1.0)
        np.testing.assert_allclose(out.v, 0.0)
        np.testing.assert_allclose(out.clipped, 1.0)

    def test_non_finite_values_raise(self):
        with pytest.raises(NonFiniteStateError) as info:
            advance(np.zeros(3), np.zeros(3), np.array([0.0, np.inf, 0.0]), Parameters(), 0.1, 1.0, step=12)
        assert info.value.step == 12

    def test_rejects_bad_input(self, line):
        state = LayerState.empty(line.shape)
        with pytest.raises(InvalidInputError):
            step_1d(state, np.zeros(line.shape), Parameters(), 0.0, line.h)
        with pytest.raises(InvalidInputError):
            step_1d(state, np.zeros(5), Parameters(), 0.004, line.h)
        with pytest.raises(InvalidInputError):
            step_2d(state, np.zeros(line.shape), Parameters(), 0.004, line.h)


class TestStep2D:
    def test_transpose_symmetry_is_kept(self, square):
        rng = np.random.default_rng(11)
        a = rng.random(square.shape)
        b = rng.random(square.shape)
        state = LayerState(0.05 * (a + a.T), b + b.T)
        f = np.ones(square.shape)
        after = step_2d(state, f, Parameters(), 1e-3, square.h)
        np.testing.assert_allclose(after.u, after.u.T, atol=1e-14)
        np.testing.assert_allclose(after.v, after.v.T, atol=1e-14)

    def test_rows_without_y_variation_match_the_line_step(self, square):
        line = Grid1D(1.0, square.nx)
        rng = np.random.default_rng(13)
        u = 0.05 * rng.random(line.shape)
        v = rng.random(line.shape)
        f = rng.random(line.shape)
        p = Parameters(1.2, 0.8, 1.5)
        one = step_1d(LayerState(u, v), f, p, 1e-3, line.h)
        plane = step_2d(LayerState(np.tile(u, (square.ny, 1)), np.tile(v, (square.ny, 1))),
                        np.tile(f, (square.ny, 1)), p, 1e-3, square.h)
        np.testing.assert_allclose(plane.u, np.tile(one.u, (square.ny, 1)), atol=1e-15)
        np.testing.assert_allclose(plane.v, np.tile(one.v, (square.ny, 1)), atol=1e-15)


def _settled_layers(f, grid, p):
    """Layers the scheme holds still under f: every node grows at c = ∫f/L.

    Each interface passes Φ = ∫(c - f)/β of everything on its left, carried by
    its upper node, and a node's v follows from the steepest interface it drains.
    """
    cv = grid.control_volumes
    c = (cv * f).sum() / grid.length
    phi = np.cumsum(cv * (c - f))[:-1] / p.beta
    upper = np.where(phi > 0, np.arange(1, grid.node_count), np.arange(grid.node_count - 1))
    steepest = np.zeros(grid.node_count)
    np.maximum.at(steepest, upper, np.abs(phi))
    v = (c / p.gamma + steepest) / p.alpha
    u = np.concatenate([[0.0], np.cumsum(grid.h * phi / v[upper])])
    return u, v, c


class TestSettledProfile:
    @pytest.mark.parametrize("bumps", [{6: 20.0}, {4: 3.0, 5: 3.0, 14: 1.0, 15: 2.0}, {20: 8.0}],
                             ids=["atom", "two-bumps", "wall"])
    @pytest.mark.parametrize("p", [Parameters(), Parameters(1.5, 2.0, 0.5)], ids=["unit", "general"])
    def test_scheme_holds_the_settled_layers(self, bumps, p):
        """Rates equal c at every node and v stays put, peaks and steepening flanks included."""
        grid = Grid1D.from_spacing(1.0, 0.05)
        f = np.zeros(grid.shape)
        for node, value in bumps.items():
            f[node] = value
        u, v, c = _settled_layers(f, grid, p)
        out = advance(u, v, f, p, 1e-3, grid.h)
        np.testing.assert_allclose(out.rates, c, rtol=1e-12)
        np.testing.assert_allclose(out.v, v, rtol=1e-12, atol=1e-14)
        assert out.slopes.max() < p.alpha

