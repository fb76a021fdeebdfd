import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractalis import (Affine, BivariateSpec, Constant, FunctionSpecError,
                       LagrangeNodes, Polynomial, Scaled, SeparableTerm,
                       Sinusoid, Sum, abs_extrema, bivariate_from_json,
                       bivariate_to_json, eval_bivariate, eval_scalar,
                       lagrange_from_nodes, lipschitz_bound, scalar_from_json,
                       scalar_to_json)

EX2_NODES = ((0.0, 20.0), (0.25, 30.0), (0.5, 10.0), (0.75, 50.0), (1.0, 10.0))


def spec_zoo():
    return [
        Constant(0.9),
        Constant(-3.0),
        Affine(-3.0, 7.0),
        Affine(2.0, -0.5),
        Polynomial((0.25, -1.0, 1.0)),
        Polynomial((1.0, 0.0, -2.0, 0.5, 0.25)),
        Sinusoid(1.0, 8 * math.pi, 0.0, "cos"),
        Sinusoid(0.5, 12 * math.pi, 0.0, "sin"),
        Sinusoid(1.0, 1.0, 0.3, "cos"),
        LagrangeNodes(EX2_NODES),
        LagrangeNodes(((0.0, 0.5), (0.5, 0.9), (1.0, 0.2))),
        Sum((Sinusoid(1.0, 1.0, 0.0, "cos"), Sinusoid(1.0, 1.0, 0.0, "sin"))),
        Scaled(0.5, Sum((Sinusoid(1.0, 1.0, 0.0, "cos"),
                         Sinusoid(1.0, 1.0, 0.0, "sin")))),
        Scaled(-2.0, Polynomial((0.0, 1.0, -1.0))),
    ]


class TestEval:
    def test_constant(self):
        assert eval_scalar(Constant(0.9), 0.3) == 0.9

    def test_sinusoid_at_zero(self):
        assert eval_scalar(Sinusoid(1.0, 8 * math.pi, 0.0, "cos"), 0.0) == 1.0

    def test_lagrange_hits_nodes(self):
        spec = LagrangeNodes(EX2_NODES)
        assert eval_scalar(spec, 0.75) == 50.0

    def test_vectorized_matches_scalar(self):
        xs = np.linspace(-1.0, 2.0, 37)
        for spec in spec_zoo():
            vec = spec(xs)
            ref = np.array([eval_scalar(spec, float(x)) for x in xs])
            np.testing.assert_allclose(vec, ref, rtol=0, atol=0)

    def test_sum_is_sum_of_evals(self):
        parts = (Affine(1.0, 2.0), Sinusoid(0.3, 4.0, 0.1, "sin"))
        s = Sum(parts)
        for x in (-0.3, 0.0, 0.7, 1.9):
            assert eval_scalar(s, x) == sum(eval_scalar(p, x) for p in parts)

    def test_scaled_is_factor_times_eval(self):
        inner = Polynomial((1.0, -2.0, 0.5))
        for x in (-0.3, 0.0, 0.7):
            assert eval_scalar(Scaled(1.5, inner), x) == 1.5 * eval_scalar(inner, x)


class TestBivariate:
    def test_bilinear_corner(self):
        spec = BivariateSpec((SeparableTerm(Affine(-1.0, 1.0), Affine(1.0, 0.0)),))
        assert eval_bivariate(spec, 0.0, 1.0) == 1.0

    def test_offset_paraboloid_center(self):
        q = Polynomial((0.25, -1.0, 1.0))
        spec = BivariateSpec((SeparableTerm(q, Constant(1.0)),
                              SeparableTerm(Constant(1.0), q)))
        assert eval_bivariate(spec, 0.5, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_constant_fy_reduces_to_fx(self):
        fx_part = Polynomial((1.0, 2.0, -1.0))
        spec = BivariateSpec((SeparableTerm(fx_part, Constant(1.0)),))
        for x in (0.0, 0.3, 0.9):
            assert eval_bivariate(spec, x, 0.77) == eval_scalar(fx_part, x)

    def test_grid_matches_pointwise(self):
        spec = BivariateSpec((SeparableTerm(Affine(-1.0, 1.0), Affine(1.0, 0.0)),
                              SeparableTerm(Sinusoid(1.0, 2.0, 0.0, "cos"),
                                            Polynomial((0.5, 1.0)))))
        xs = np.linspace(0, 1, 7)
        ys = np.linspace(0, 1, 5)
        g = spec.grid(xs, ys)
        for iy, y in enumerate(ys):
            for ix, x in enumerate(xs):
                assert g[iy, ix] == pytest.approx(eval_bivariate(spec, float(x), float(y)), abs=1e-14)


class TestLipschitz:
    def test_constant_zero(self):
        assert lipschitz_bound(Constant(5.0), (0.0, 1.0)) == 0.0

    def test_affine_slope(self):
        assert lipschitz_bound(Affine(-3.0, 7.0), (0.0, 1.0)) == 3.0

    def test_sinusoid_full_swing(self):
        got = lipschitz_bound(Sinusoid(0.5, 12 * math.pi, 0.0, "sin"), (0.0, 1.0))
        assert got == pytest.approx(6 * math.pi, rel=1e-15)

    def test_sinusoid_partial_interval_exact(self):
        # derivative of cos is -sin; on [0, 0.25] max |sin| is sin(0.25)
        got = lipschitz_bound(Sinusoid(1.0, 1.0, 0.0, "cos"), (0.0, 0.25))
        assert got == pytest.approx(math.sin(0.25), rel=1e-15)

    def test_difference_quotients_never_exceed_bound(self):
        rng = np.random.default_rng(7)
        for spec in spec_zoo():
            lo, hi = -0.5, 1.5
            bound = lipschitz_bound(spec, (lo, hi))
            u = rng.uniform(lo, hi, 10_000)
            v = rng.uniform(lo, hi, 10_000)
            keep = u != v
            u, v = u[keep], v[keep]
            q = np.abs(spec(u) - spec(v)) / np.abs(u - v)
            assert q.max() <= bound * (1 + 1e-9) + 1e-12


class TestAbsExtrema:
    def test_constant(self):
        assert abs_extrema(Constant(0.9), (0.0, 0.25)) == (0.9, 0.9)

    def test_cos_decreasing(self):
        mn, mx = abs_extrema(Sinusoid(1.0, 1.0, 0.0, "cos"), (0.0, 0.25))
        assert mx == 1.0
        assert mn == pytest.approx(math.cos(0.25), rel=1e-15)

    def test_affine_sign_change(self):
        mn, mx = abs_extrema(Affine(2.0, -0.5), (0.0, 0.5))
        assert (mn, mx) == (0.0, 0.5)

    def test_full_period_inside_region(self):
        mn, mx = abs_extrema(Sinusoid(1.0, 8 * math.pi, 0.0, "cos"), (0.0, 0.25))
        assert (mn, mx) == (0.0, 1.0)

    def test_bounds_hold_on_samples(self):
        rng = np.random.default_rng(11)
        for spec in spec_zoo():
            lo, hi = -0.5, 1.5
            mn, mx = abs_extrema(spec, (lo, hi))
            vals = np.abs(spec(rng.uniform(lo, hi, 10_000)))
            assert vals.min() >= mn - 1e-9
            assert vals.max() <= mx + 1e-9

    def test_scaled_extrema_scale(self):
        inner = Polynomial((1.0, 0.0, -2.0))
        mn, mx = abs_extrema(inner, (0.0, 1.0))
        smn, smx = abs_extrema(Scaled(-3.0, inner), (0.0, 1.0))
        assert smn == pytest.approx(3 * mn, abs=1e-12)
        assert smx == pytest.approx(3 * mx, abs=1e-12)


class TestLagrangeFromNodes:
    def test_single_node_constant(self):
        assert lagrange_from_nodes([(0.0, 1.0)]) == Constant(1.0)

    def test_two_nodes_affine(self):
        assert lagrange_from_nodes([(0.0, 0.0), (1.0, 1.0)]) == Affine(1.0, 0.0)

    def test_degree_four_through_data(self):
        poly = lagrange_from_nodes(EX2_NODES)
        assert isinstance(poly, Polynomial)
        assert len(poly.coefficients) == 5
        assert eval_scalar(poly, 0.5) == pytest.approx(10.0, abs=1e-9)

    def test_reproduces_every_node(self):
        for nodes in (EX2_NODES, ((0.0, 0.5), (0.5, 0.9), (1.0, 0.2))):
            spec = lagrange_from_nodes(nodes)
            for x, y in nodes:
                assert eval_scalar(spec, x) == pytest.approx(y, abs=1e-9 * (1 + abs(y)))

    def test_duplicate_x_rejected(self):
        with pytest.raises(FunctionSpecError):
            lagrange_from_nodes([(0.0, 1.0), (0.0, 2.0)])
        with pytest.raises(FunctionSpecError):
            LagrangeNodes(((0.0, 1.0), (0.0, 2.0)))


class TestValidation:
    def test_empty_polynomial(self):
        with pytest.raises(FunctionSpecError):
            Polynomial(())

    def test_bad_wave(self):
        with pytest.raises(FunctionSpecError):
            Sinusoid(1.0, 1.0, 0.0, "tan")

    def test_empty_sum(self):
        with pytest.raises(FunctionSpecError):
            Sum(())

    def test_empty_bivariate(self):
        with pytest.raises(FunctionSpecError):
            BivariateSpec(())

    def test_bad_interval(self):
        with pytest.raises(FunctionSpecError):
            lipschitz_bound(Constant(1.0), (1.0, 1.0))


class TestJsonCodec:
    def test_round_trip_zoo(self):
        for spec in spec_zoo():
            again = scalar_from_json(scalar_to_json(spec))
            assert again == spec

    def test_documented_sinusoid_encoding(self):
        obj = {"kind": "sinusoid", "amplitude": 1, "omega": 25.132741,
               "phase": 0, "wave": "cos"}
        spec = scalar_from_json(obj)
        assert spec == Sinusoid(1.0, 25.132741, 0.0, "cos")

    def test_bivariate_round_trip(self):
        spec = BivariateSpec((SeparableTerm(Affine(-1.0, 1.0), Affine(1.0, 0.0)),))
        assert bivariate_from_json(bivariate_to_json(spec)) == spec

    def test_bivariate_shortcuts(self):
        of_x = bivariate_from_json({"of_x": {"kind": "constant", "value": 2.0}})
        assert eval_bivariate(of_x, 0.3, 0.9) == 2.0
        of_y = bivariate_from_json({"of_y": {"kind": "affine", "slope": 1.0, "intercept": 0.0}})
        assert eval_bivariate(of_y, 0.3, 0.9) == 0.9

    def test_unknown_kind(self):
        with pytest.raises(FunctionSpecError):
            scalar_from_json({"kind": "mystery"})


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5),
       st.floats(-2, 2), st.floats(-3, 3))
def test_sum_scaled_algebra(coeffs, factor, x):
    inner = Polynomial(tuple(coeffs))
    assert eval_scalar(Scaled(factor, inner), x) == factor * eval_scalar(inner, x)
    doubled = Sum((inner, inner))
    assert eval_scalar(doubled, x) == eval_scalar(inner, x) + eval_scalar(inner, x)


@settings(max_examples=50)
@given(st.floats(0.01, 3.0), st.floats(-20.0, 20.0), st.floats(-3.0, 3.0),
       st.sampled_from(["cos", "sin"]), st.floats(-2.0, 2.0), st.floats(0.01, 4.0))
def test_sinusoid_extrema_bracket_samples(amp, omega, phase, wave, lo, width):
    spec = Sinusoid(amp, omega, phase, wave)
    hi = lo + width
    mn, mx = abs_extrema(spec, (lo, hi))
    xs = np.linspace(lo, hi, 2001)
    vals = np.abs(spec(xs))
    assert vals.max() <= mx + 1e-9 * max(1.0, mx)
    assert vals.min() >= mn - 1e-9 * max(1.0, mx)
