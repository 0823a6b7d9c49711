import math

import numpy as np
import pytest
import scipy.special as sp

from isacthz.specfun import (QuadratureError, QuadratureSpec, erfc,
                             exp_integral_e1, integrate_oscillatory,
                             integrate_semi_infinite)


class TestExpIntegral:
    def test_reference_values(self):
        # frozen against an independent high-precision evaluation (mpmath e1)
        assert exp_integral_e1(1.0) == pytest.approx(0.2193839343955203, rel=1e-12)
        assert exp_integral_e1(10.0) == pytest.approx(4.156968929685324e-06, rel=1e-12)

    def test_against_scipy_grid(self):
        xs = np.concatenate([np.linspace(0.003, 0.999, 37),
                             np.geomspace(1.0, 600.0, 41)])
        ref = sp.exp1(xs)
        mine = exp_integral_e1(xs)
        assert np.max(np.abs(mine - ref) / ref) < 1e-10

    def test_tail_vanishes(self):
        assert exp_integral_e1(500.0) < 1e-210
        assert exp_integral_e1(500.0) > 0.0

    def test_monotone_decreasing_positive(self):
        xs = np.geomspace(1e-3, 50.0, 200)
        vals = exp_integral_e1(xs)
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) < 0.0)

    def test_envelope_bounds(self):
        # e^-x/(x+1) < E1(x) < e^-x/x
        for x in (0.1, 0.7, 1.0, 3.0, 12.0, 80.0):
            val = exp_integral_e1(x)
            assert math.exp(-x) / (x + 1.0) < val < math.exp(-x) / x

    def test_domain_error(self):
        with pytest.raises(ValueError):
            exp_integral_e1(0.0)
        with pytest.raises(ValueError):
            exp_integral_e1(-2.0)
        with pytest.raises(ValueError):
            exp_integral_e1(np.array([1.0, -1.0]))


class TestErfc:
    def test_reference_values(self):
        assert erfc(0.0) == pytest.approx(1.0, abs=0.0)
        assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-12)

    def test_symmetry(self):
        for x in np.linspace(-9.5, 9.5, 77):
            assert erfc(x) + erfc(-x) == pytest.approx(2.0, rel=1e-13)

    def test_monotone_and_range(self):
        # strict interior checks stay below |x| ~ 5.5 where float64 still
        # resolves the distance of erfc from its limits 0 and 2
        xs = np.linspace(-5.5, 5.5, 501)
        vals = erfc(xs)
        assert np.all(np.diff(vals) < 0.0)
        assert np.all((vals > 0.0) & (vals < 2.0))
        assert 0.0 < erfc(10.0) < erfc(5.0)


class TestSemiInfinite:
    def test_exponential(self):
        assert integrate_semi_infinite(lambda r: np.exp(-r), 0.0) == \
            pytest.approx(1.0, rel=1e-12)

    def test_matches_e1(self):
        val = integrate_semi_infinite(lambda r: np.exp(-r) / r, 1.0)
        assert val == pytest.approx(exp_integral_e1(1.0), rel=1e-11)

    def test_gaussian_moment(self):
        val = integrate_semi_infinite(lambda r: r * np.exp(-np.pi * r ** 2), 0.0)
        assert val == pytest.approx(1.0 / (2.0 * np.pi), rel=1e-12)

    def test_linear_scaling(self):
        f = lambda r: np.exp(-0.3 * r) * np.cos(r) ** 2
        base = integrate_semi_infinite(f, 0.0)
        for c in (3.0, 0.02, 250.0):
            scaled = integrate_semi_infinite(lambda r: c * f(r), 0.0)
            assert abs(scaled - c * base) <= 1e-9 * abs(c * base)

    def test_non_convergence_reports_partial(self):
        spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=3,
                              tail_cutoff_envelope=1e-15)
        with pytest.raises(QuadratureError) as err:
            integrate_semi_infinite(lambda r: np.sin(50.0 * r) ** 2 * np.exp(-0.01 * r),
                                    0.0, spec)
        assert err.value.partial != 0.0
        assert err.value.error_bound > 0.0


class TestOscillatory:
    def test_arctan_identity(self):
        val, err = integrate_oscillatory(lambda s: np.exp(-s),
                                         lambda s: 0.0 * np.asarray(s, float),
                                         lambda s: 2.0 * np.pi * np.asarray(s, float))
        assert val == pytest.approx(math.atan(2.0 * math.pi) / math.pi, abs=1e-6)

    def test_equal_phases_vanish(self):
        phi = lambda s: 3.0 * np.asarray(s, float) ** 2
        val, _ = integrate_oscillatory(lambda s: np.exp(-s), phi, phi)
        assert val == pytest.approx(0.0, abs=1e-10)

    def test_two_scale_dirichlet(self):
        # sign(y) / 2 + sign(p) / 2 with vastly different slopes
        one = lambda s: np.ones_like(np.asarray(s, float))
        val, _ = integrate_oscillatory(one,
                                       lambda s: -2e-10 * np.asarray(s, float),
                                       lambda s: 3e-5 * np.asarray(s, float))
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_negative_margin_dirichlet(self):
        one = lambda s: np.ones_like(np.asarray(s, float))
        val, _ = integrate_oscillatory(one,
                                       lambda s: 2e-10 * np.asarray(s, float),
                                       lambda s: -3e-5 * np.asarray(s, float))
        assert val == pytest.approx(-1.0, abs=1e-8)


class TestQuadratureSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=0)
        with pytest.raises(ValueError):
            QuadratureSpec(tail_cutoff_envelope=-1.0)
