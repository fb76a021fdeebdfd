import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractalis import (Affine, BivariateSpec, Constant, CurveSamples,
                       SeparableTerm, Sinusoid, SurfaceLayer, SurfaceSpec,
                       build_model, composed_surface_dimension,
                       estimate_surface_dimension, eval_surface, HeightField)

DATA = [(0.0, 20.0), (0.25, 30.0), (0.5, 10.0), (0.75, 50.0), (1.0, 10.0)]


def const_coeff(v):
    return BivariateSpec((SeparableTerm(Constant(v), Constant(1.0)),))


def dense_line(y0, y1, n=4097):
    xs = np.linspace(0.0, 1.0, n)
    return CurveSamples(xs, y0 + (y1 - y0) * xs)


def split_curve(scaling, depth=8):
    model = build_model(DATA, [(0, 2), (2, 4)], [0, 1, 0, 1], scaling)
    return CurveSamples.from_model(model, depth)


class TestCurveSamples:
    def test_from_model_keeps_dyadic_grid(self):
        c = split_curve(Constant(0.9), depth=4)
        assert c.xs[0] == 0.0 and c.xs[-1] == 1.0
        assert c.xs.size == 4 * 2 ** 4 + 1

    def test_renormalizes_other_intervals(self):
        model = build_model([(2.0, 1.0), (3.0, 5.0), (4.0, 2.0), (5.0, 0.0)],
                            [(0, 3)], [0, 0, 0], Constant(0.4))
        c = CurveSamples.from_model(model, 3)
        assert c.xs[0] == 0.0 and c.xs[-1] == 1.0
        assert c.value(0.0) == 1.0 and c.value(1.0) == 0.0

    def test_requires_unit_interval(self):
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            CurveSamples(np.array([0.0, 0.5]), np.array([1.0, 2.0]))

    def test_interpolates_nodes(self):
        c = split_curve(Constant(0.9))
        for x, y in DATA:
            assert c.value(x) == y


class TestEvalSurface:
    def test_single_x_layer_constant_along_y(self):
        f = split_curve(Constant(0.5))
        field = eval_surface(SurfaceSpec((SurfaceLayer(f, const_coeff(1.0)),)), 64)
        assert np.all(field.heights == field.heights[0, :][None, :])
        np.testing.assert_allclose(field.heights[0, :],
                                   f.value(np.linspace(0, 1, 65)))

    def test_example_corner_value(self):
        # constant coefficients 0.5 / 0.8 with both curves interpolating the
        # data: F(0,0) = 0.5*20 + 0.8*20 = 26
        f = split_curve(Sinusoid(1.0, 1.0, 0.0, "cos"))
        g = split_curve(Constant(0.5))
        spec = SurfaceSpec((SurfaceLayer(f, const_coeff(0.5)),),
                           (SurfaceLayer(g, const_coeff(0.8)),))
        field = eval_surface(spec, 128)
        assert field.heights[0, 0] == pytest.approx(26.0, abs=1e-9)

    def test_vanishing_bilinear_corner(self):
        f = split_curve(Constant(0.5))
        lam = BivariateSpec((SeparableTerm(Affine(-1.0, 1.0), Affine(1.0, 0.0)),))
        mu = BivariateSpec((SeparableTerm(Affine(1.0, 0.0), Affine(-1.0, 1.0)),))
        spec = SurfaceSpec((SurfaceLayer(f, lam),), (SurfaceLayer(f, mu),))
        field = eval_surface(spec, 64)
        assert field.heights[0, 0] == 0.0

    def test_y_layer_orientation(self):
        # coefficient (1 - x) on a y curve: heights[iy, ix] = (1 - x) * g(y)
        g = split_curve(Constant(0.5))
        coeff = BivariateSpec((SeparableTerm(Affine(-1.0, 1.0), Constant(1.0)),))
        field = eval_surface(SurfaceSpec((), (SurfaceLayer(g, coeff),)), 64)
        axis = np.linspace(0, 1, 65)
        gv = g.value(axis)
        np.testing.assert_allclose(field.heights[:, 0], gv, atol=1e-12)
        assert np.all(field.heights[:, -1] == 0.0)
        np.testing.assert_allclose(field.heights[:, 32], 0.5 * gv, atol=1e-12)

    def test_superposition_exact(self):
        f = split_curve(Constant(0.5))
        g = split_curve(Constant(0.3))
        lam1, lam2 = const_coeff(0.7), const_coeff(-0.2)
        both = eval_surface(SurfaceSpec((SurfaceLayer(f, lam1),
                                         SurfaceLayer(g, lam2))), 32)
        one = eval_surface(SurfaceSpec((SurfaceLayer(f, lam1),)), 32)
        two = eval_surface(SurfaceSpec((SurfaceLayer(g, lam2),)), 32)
        assert np.array_equal(both.heights, one.heights + two.heights)

    def test_boundary_interpolation(self):
        # coefficient (1 - y) on an x curve: the y = 0 edge reproduces the curve
        f = split_curve(Constant(0.8))
        lam = BivariateSpec((SeparableTerm(Constant(1.0), Affine(-1.0, 1.0)),))
        field = eval_surface(SurfaceSpec((SurfaceLayer(f, lam),)), 64)
        edge = field.heights[0, :]
        np.testing.assert_allclose(edge, f.value(np.linspace(0, 1, 65)), atol=1e-12)
        assert np.all(field.heights[-1, :] == 0.0)
        for x, y in DATA:
            ix = round(x * 64)
            if abs(ix / 64 - x) < 1e-12:
                assert edge[ix] == y

    def test_resolution_too_small(self):
        f = split_curve(Constant(0.5))
        with pytest.raises(ValueError, match=">= 2"):
            eval_surface(SurfaceSpec((SurfaceLayer(f, const_coeff(1.0)),)), 1)

    def test_coarse_curve_rejected(self):
        shallow = split_curve(Constant(0.5), depth=2)
        with pytest.raises(ValueError, match="too coarse"):
            eval_surface(SurfaceSpec((SurfaceLayer(shallow, const_coeff(1.0)),)), 512)

    def test_empty_spec_rejected(self):
        with pytest.raises(ValueError, match="at least one layer"):
            SurfaceSpec(())


class TestHeightField:
    def test_shape_validation(self):
        with pytest.raises(ValueError, match="heights must be"):
            HeightField(4, np.zeros((4, 4)))

    def test_finite_validation(self):
        bad = np.zeros((5, 5))
        bad[2, 2] = np.nan
        with pytest.raises(ValueError, match="finite"):
            HeightField(4, bad)

    def test_flat_accessor(self):
        H = np.arange(9.0).reshape(3, 3)
        assert HeightField(2, H).flat.tolist() == list(range(9))


class TestComposedDimension:
    def test_pair(self):
        assert composed_surface_dimension([1.5], [1.2]) == 2.5

    def test_smooth(self):
        assert composed_surface_dimension([1.0], [1.0]) == 2.0

    def test_many(self):
        assert composed_surface_dimension([1.3, 1.6], [1.4]) == pytest.approx(2.6)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            composed_surface_dimension([], [])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            composed_surface_dimension([2.5], [])

    @given(st.lists(st.floats(1.0, 2.0), min_size=1, max_size=4),
           st.floats(0.0, 0.5))
    @settings(max_examples=60)
    def test_monotone(self, dims, bump):
        base = composed_surface_dimension(dims, [])
        raised = dims.copy()
        raised[0] = min(2.0, raised[0] + bump)
        assert composed_surface_dimension(raised, []) >= base


class TestEstimateSurface:
    def test_flat_plane_dimension_two(self):
        field = HeightField(256, np.zeros((257, 257)))
        rep = estimate_surface_dimension(field, [2.0 ** -k for k in range(2, 6)])
        assert rep.estimate == pytest.approx(2.0, abs=0.05)

    def test_smooth_ramp_dimension_two(self):
        ax = np.linspace(0, 1, 257)
        H = np.add.outer(0.3 * ax, 0.5 * ax)
        rep = estimate_surface_dimension(HeightField(256, H), [2.0 ** -k for k in range(2, 6)])
        assert rep.estimate == pytest.approx(2.0, abs=0.05)

    def test_requires_three_scales(self):
        field = HeightField(64, np.zeros((65, 65)))
        with pytest.raises(ValueError, match="3 scales"):
            estimate_surface_dimension(field, [0.25, 0.125])

    def test_extrusion_counts_factor_exactly(self):
        # a field constant along y is K stacked copies of its x section, so
        # the 3D count must be exactly K times the 2D graph count of the
        # section sampled on the same grid
        from fractalis import box_count_graph, box_count_surface

        model = build_model(DATA, [(0, 4)], [0, 0, 0, 0], Constant(0.6))
        f = CurveSamples.from_model(model, 7)
        res = 1024
        field = eval_surface(SurfaceSpec((SurfaceLayer(f, const_coeff(1.0)),)), res)
        axis = np.linspace(0, 1, res + 1)
        section = field.heights[0, :]
        for delta in (2.0 ** -3, 2.0 ** -5, 2.0 ** -7):
            k = round(1 / delta)
            assert box_count_surface(field, delta) == k * box_count_graph(
                axis, section, delta)

    def test_extruded_half_dimension_curve(self):
        # constant scaling 0.5 over 4 whole-interval maps has exact curve
        # dimension 1 + log_4(2) = 1.5; extruding along y adds one
        model = build_model(DATA, [(0, 4)], [0, 0, 0, 0], Constant(0.5))
        f = CurveSamples.from_model(model, 9)
        spec = SurfaceSpec((SurfaceLayer(f, const_coeff(1.0)),))
        field = eval_surface(spec, 1024)
        rep = estimate_surface_dimension(field, [2.0 ** -r for r in range(3, 8)])
        assert rep.estimate == pytest.approx(2.5, abs=0.15)
