import math

import numpy as np
import pytest

from src.errors import InvalidInputError
from src.model import Grid1D, Interval, Parameters, Patch, SourceSpec
from src.similarity.exact import (
    G_function, example1_exact, example2_radial, similarity_1d_exact, slope_1d_exact,
)

# U(1/2) and V(1/2) of the unit point source with unit constants
POINT_U_MID = 0.5 - math.log(1.5)
POINT_V_MID = 1.5

SOURCES = {
    "centered": SourceSpec(patches=(Patch(Interval(0.45, 0.55), 1.0),)),
    "boundary": SourceSpec(patches=(Patch(Interval(0.9, 1.0), 1.0),)),
    "disconnected": SourceSpec(patches=(Patch(Interval(0.25, 0.35), 1.0), Patch(Interval(0.65, 0.75), 1.0))),
    "point": SourceSpec.point((0.5,)),
    "wall_atom": SourceSpec.point((1.0,), 0.5) + SourceSpec(patches=(Patch(Interval(0.2, 0.4), 3.0),)),
}


class TestGFunction:
    def test_flat_source_vanishes(self):
        f = SourceSpec.flat(3.0, (1.0,))
        np.testing.assert_allclose(G_function(f, np.linspace(0, 1, 11), 1.0), 0.0, atol=1e-15)

    def test_point_source(self, point_source):
        """G rises as x up to the atom (left limit included) and falls as x - 1 after it."""
        assert G_function(point_source, 0.25, 1.0) == pytest.approx(0.25)
        assert G_function(point_source, 0.5, 1.0) == pytest.approx(0.5)
        assert G_function(point_source, 0.75, 1.0) == pytest.approx(-0.25)
        assert G_function(point_source, 0.5, 1.0, right=True) == pytest.approx(-0.5)

    def test_boundary_patch(self):
        assert G_function(SOURCES["boundary"], 0.9, 1.0) == pytest.approx(0.09)

    @pytest.mark.parametrize("name", sorted(SOURCES))
    def test_vanishes_at_both_walls(self, name):
        f = SOURCES[name]
        assert abs(G_function(f, 0.0, 1.0)) <= 1e-14
        assert abs(G_function(f, 1.0, 1.0)) <= 1e-14

    def test_outside_interval(self, point_source):
        with pytest.raises(InvalidInputError):
            G_function(point_source, 1.5, 1.0)


class TestSimilarity1D:
    def test_flat_source(self, line):
        pair = similarity_1d_exact(SourceSpec.flat(2.0, (1.0,)), line, Parameters())
        np.testing.assert_allclose(pair.V, 2.0)
        np.testing.assert_allclose(pair.U, 0.0, atol=1e-15)
        assert pair.c == pytest.approx(2.0)

    def test_point_source_rolling_layer(self, line, point_source):
        pair = similarity_1d_exact(point_source, line, Parameters())
        assert pair.V[0] == pytest.approx(1.0)
        assert pair.V[50] == pytest.approx(POINT_V_MID)

    def test_matches_dense_evaluation(self, line, centered_patch):
        """The nodal slope equals a naive evaluation of the closed form."""
        x = line.x
        inside = np.clip(x, 0.45, 0.55) - 0.45
        G = x * 0.1 - inside
        naive = G / (0.1 + np.abs(G))
        np.testing.assert_allclose(slope_1d_exact(centered_patch, line, Parameters()), naive, atol=1e-12)

    @pytest.mark.parametrize("name", sorted(SOURCES))
    @pytest.mark.parametrize("p", [Parameters(), Parameters(2.0, 0.5, 1.5), Parameters(0.7, 3.0, 0.2)])
    def test_slope_never_exceeds_alpha(self, line, name, p):
        assert np.abs(slope_1d_exact(SOURCES[name], line, p)).max() <= p.alpha

    @pytest.mark.parametrize("name", sorted(SOURCES))
    def test_rolling_layer_positive(self, line, name):
        f = SOURCES[name]
        pair = similarity_1d_exact(f, line, Parameters())
        assert pair.V.min() >= f.total_mass - 1e-14

    def test_homogeneity_in_the_source(self, line):
        """V scales with f while the slope does not change."""
        f = SOURCES["disconnected"]
        p = Parameters(1.3, 0.8, 2.0)
        base = similarity_1d_exact(f, line, p)
        tripled = similarity_1d_exact(f * 3.0, line, p)
        np.testing.assert_allclose(tripled.V, 3.0 * base.V, rtol=1e-12)
        np.testing.assert_allclose(slope_1d_exact(f * 3.0, line, p), slope_1d_exact(f, line, p), atol=1e-12)

    def test_rolling_layer_scales_with_alpha(self, line, centered_patch):
        one = similarity_1d_exact(centered_patch, line, Parameters(1.0, 2.0, 0.5))
        two = similarity_1d_exact(centered_patch, line, Parameters(2.0, 2.0, 0.5))
        np.testing.assert_allclose(two.V, one.V / 2.0, rtol=1e-12)

    def test_zero_mass_rejected(self, line):
        with pytest.raises(InvalidInputError):
            similarity_1d_exact(SourceSpec.flat(0.0, (1.0,)), line, Parameters())


class TestPointSourceExample:
    def test_printed_values(self, line):
        pair = example1_exact(line, Parameters())
        assert pair.U[50] == pytest.approx(POINT_U_MID, abs=1e-12)
        assert pair.V[50] == pytest.approx(POINT_V_MID)
        assert pair.U[0] == 0.0 and pair.U[-1] == pytest.approx(0.0, abs=1e-15)

    def test_forms_agree_for_unit_constants(self, line):
        printed = example1_exact(line, Parameters(), "printed")
        consistent = example1_exact(line, Parameters(), "consistent")
        np.testing.assert_allclose(printed.U, consistent.U, atol=1e-15)

    @pytest.mark.parametrize("p", [Parameters(), Parameters(2.0, 0.5, 1.5)])
    def test_consistent_form_matches_general_formula(self, p):
        grid = Grid1D.from_spacing(1.0, 0.001)
        general = similarity_1d_exact(SourceSpec.point((0.5,)), grid, p)
        closed = example1_exact(grid, p, "consistent")
        np.testing.assert_allclose(general.U, closed.U, atol=1e-5)
        np.testing.assert_allclose(general.V[:500], closed.V[:500], rtol=1e-12)

    def test_unknown_form(self, line):
        with pytest.raises(InvalidInputError):
            example1_exact(line, Parameters(), "other")

    def test_shrinking_patch_approaches_point_source(self):
        """A unit-mass centered strip tends to the point-source profile as it narrows."""
        grid = Grid1D.from_spacing(1.0, 0.001)
        target = example1_exact(grid, Parameters()).U
        gaps = []
        for width in (0.2, 0.1, 0.02):
            strip = SourceSpec(patches=(Patch(Interval(0.5 - width / 2, 0.5 + width / 2), 1.0 / width),))
            gaps.append(np.abs(similarity_1d_exact(strip, grid, Parameters()).U - target).max())
        assert gaps[0] > gaps[1] > gaps[2]


class TestRadialExample:
    def test_values_at_the_wall(self):
        profile = example2_radial(1.0, Parameters(), 2.0, [0.5, 1.0])
        assert profile.V[-1] == pytest.approx(2.0)
        assert profile.U_r[-1] == 0.0
        assert profile.U[-1] == 0.0

    def test_half_radius(self):
        profile = example2_radial(1.0, Parameters(), 1.0, [0.5])
        assert profile.V[0] == pytest.approx(1.75)
        assert profile.U_r[0] == pytest.approx(-3.0 / 7.0)

    def test_rolling_layer_decreases_outward(self):
        radii = np.linspace(0.01, 1.0, 100)
        profile = example2_radial(1.0, Parameters(), 1.0, radii)
        assert np.all(np.diff(profile.V) < 0)
        assert np.all(profile.U_r <= 0)

    def test_max_slope_tends_to_alpha(self):
        profile = example2_radial(1.0, Parameters(alpha=1.5), 1.0, [1e-7, 0.5, 1.0])
        assert profile.max_slope == pytest.approx(1.5, rel=1e-5)
        assert profile.max_slope < 1.5

    def test_standing_layer_peaks_at_the_center(self):
        profile = example2_radial(1.0, Parameters(), 1.0, np.linspace(0.05, 1.0, 20))
        assert profile.U[0] == profile.U.max()
        assert profile.U[-1] == 0.0

    @pytest.mark.parametrize("radii", [[0.0, 0.5], [0.5, 1.2], []])
    def test_rejects_bad_radii(self, radii):
        with pytest.raises(InvalidInputError):
            example2_radial(1.0, Parameters(), 1.0, radii)
