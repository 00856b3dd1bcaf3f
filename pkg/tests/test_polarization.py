import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from polarmoments.channel import moment_step
from polarmoments.polarization import (
    SQRT3_2,
    ab_histogram,
    angle_step,
    angle_step_literal,
    b_level,
    default_grid,
    expected_v,
    fast_polarization_params,
    log_ab_level,
    r_func,
    ratio_lambda,
    ratio_R,
    ratio_scan_lambda,
    v_lambda,
)


def exact_ab(levels, b0):
    """Oracle: A*B for every path in exact rational arithmetic."""
    out = []
    for bits in product((0, 1), repeat=levels):
        b = Fraction(str(b0))
        for bit in bits:
            b = b * b if bit == 0 else 1 - (1 - b) ** 2
        out.append(b * (1 - b))
    return out


def brute_mean_v(levels, b0):
    return sum(math.sqrt(float(ab)) for ab in exact_ab(levels, b0)) / 2**levels


class TestR:
    def test_values(self):
        assert r_func(0.0) == 0.0
        assert r_func(0.5) == 0.5
        assert r_func(0.5625) == pytest.approx(0.4960784, abs=1e-7)

    def test_domain(self):
        with pytest.raises(ValueError):
            r_func(1.2)


class TestRatio:
    def test_peak(self):
        assert ratio_R(0.5) == pytest.approx(SQRT3_2, abs=1e-15)

    def test_three_quarters(self):
        assert ratio_R(0.75) == pytest.approx((0.4960784 + 0.2420615) / 0.8660254, abs=1e-6)
        assert ratio_R(0.75) == pytest.approx(0.8523300, abs=1e-6)

    def test_grid_max(self):
        grid = default_grid()
        assert grid[0] == pytest.approx(0.001) and grid[-1] == pytest.approx(0.999)
        vals = ratio_R(grid)
        assert vals.max() == pytest.approx(SQRT3_2, abs=1e-6)
        assert grid[vals.argmax()] == pytest.approx(0.5)

    @pytest.mark.parametrize("x", [0.0, 1.0])
    def test_endpoints_excluded(self, x):
        with pytest.raises(ValueError):
            ratio_R(x)

    def test_one_step_contraction(self):
        x = default_grid()
        children = (r_func(x**2) + r_func(1 - (1 - x) ** 2)) / 2
        assert np.all(children <= SQRT3_2 * r_func(x) + 1e-12)


class TestExpectedV:
    def test_one_level(self):
        s = expected_v(1, 0.75)
        assert s.mean_V == pytest.approx((0.4960784 + 0.2420615) / 2, abs=1e-7)
        assert s.mean_V == pytest.approx(0.3690700, abs=1e-7)
        assert s.holds

    @pytest.mark.parametrize("levels", [1, 5, 12])
    def test_absorbing(self, levels):
        assert expected_v(levels, 0.0).mean_V == 0.0

    @pytest.mark.parametrize("levels", [1, 3, 7, 10])
    @pytest.mark.parametrize("b0", [0.1, 0.5, 0.75])
    def test_matches_brute_force(self, levels, b0):
        assert expected_v(levels, b0).mean_V == pytest.approx(brute_mean_v(levels, b0), rel=1e-12)

    def test_fraction_above_threshold(self):
        s = expected_v(16, 0.75)
        assert s.threshold == pytest.approx(0.31640625, abs=1e-15)
        assert s.fraction_ge_threshold < 0.31640625

    def test_histogram_counts_every_path(self):
        s = expected_v(10, 0.75)
        assert sum(c for _, _, c in s.histogram) == 2**10

    def test_level_range(self):
        with pytest.raises(ValueError):
            expected_v(0, 0.5)
        with pytest.raises(ValueError):
            expected_v(25, 0.5)


class TestLevels:
    def test_b_level_exact_fractions(self):
        b = b_level(0.75, 4)
        for i, got in enumerate(b):
            exact = Fraction(3, 4)
            for ch in format(i, "04b"):
                exact = exact * exact if ch == "0" else 1 - (1 - exact) ** 2
            assert got == float(exact)

    def test_log_ab_matches_exact(self):
        # b * (1 - b) in doubles cancels badly once b is near 1; compare exactly
        exact = np.array([float(ab) for ab in exact_ab(8, 0.3)])
        np.testing.assert_allclose(np.exp(log_ab_level(0.3, 8)), exact, rtol=1e-12)


class TestLambda:
    def test_half_is_v(self):
        assert v_lambda(0.25, 0.75, 0.5) == pytest.approx(math.sqrt(0.1875))
        np.testing.assert_allclose(ratio_lambda(default_grid(), 0.5), ratio_R(default_grid()))

    def test_value(self):
        assert v_lambda(0.25, 0.75, 0.1) == pytest.approx(0.1875**0.1)
        assert v_lambda(0.25, 0.75, 0.1) == pytest.approx(0.8458, abs=1e-4)

    def test_scan_reports_a_number(self):
        sup = ratio_scan_lambda(0.1, default_grid())
        assert 0.5 < sup < 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            v_lambda(0.3, 0.3, 0.5)
        with pytest.raises(ValueError):
            v_lambda(0.5, 0.5, 0.0)


class TestAngle:
    @pytest.mark.parametrize("bit", [0, 1])
    def test_fixed_point(self, bit):
        assert angle_step(math.pi / 2, bit).theta == pytest.approx(math.pi / 2)

    def test_quarter_pi(self):
        assert angle_step(math.pi / 4, 0).theta == pytest.approx(math.pi / 6, abs=1e-15)

    @pytest.mark.parametrize("bit", [0, 1])
    def test_consistent_with_moment_step(self, bit):
        for theta in np.linspace(0, math.pi / 2, 201):
            st = angle_step(theta, bit)
            assert math.sin(st.theta) ** 2 == pytest.approx(moment_step(math.sin(theta) ** 2, bit), abs=1e-12)
            assert st.A + st.B == pytest.approx(1.0)

    def test_literal_form_differs(self):
        # the arcsin(sin^4) form does not keep B = sin^2 across a step
        lit = angle_step_literal(math.pi / 4, 0)
        assert math.sin(lit.theta) ** 2 != pytest.approx(0.25)


class TestFastPolarization:
    def test_m16(self):
        p = fast_polarization_params(16)
        assert (p.lam, p.delta, p.s, p.rho, p.ell) == (8, 4, 2, 6, 83)
        assert not p.feasible

    def test_m256(self):
        p = fast_polarization_params(256)
        assert (p.lam, p.ell) == (64, 1331)
        assert p.ell > 256 and not p.feasible

    def test_monotone(self):
        ells = [fast_polarization_params(m).ell for m in range(1, 2000)]
        assert all(a <= b for a, b in zip(ells, ells[1:]))
        assert ells[-1] > ells[0]

    def test_power_inequality(self):
        rng = np.random.default_rng(0)
        for t in rng.integers(1, 1025, 200):
            for x in rng.uniform(0, 1 / t, 20):
                assert (1 - x) ** int(t) >= 1 - x * t - 1e-15


class TestAbHistogram:
    def test_one_level(self):
        h = ab_histogram(1, 0.75)
        vals = sorted([math.log2(0.5625 * 0.4375), math.log2(0.9375 * 0.0625)])
        assert vals == pytest.approx([-4.0932, -2.0228], abs=1e-4)
        assert h.quantiles[0.5] == pytest.approx(sum(vals) / 2)

    def test_zero_b0_underflows(self):
        h = ab_histogram(6, 0.0)
        assert h.underflow == 64
        assert h.histogram == [(-math.inf, -1000.0, 64)]

    def test_median_decreases(self):
        assert ab_histogram(20, 0.75).median < ab_histogram(10, 0.75).median

    def test_fractions(self):
        h = ab_histogram(8, 0.75, thresholds=(-10.0, 0.0))
        assert h.fractions_below[0.0] == 1.0
        assert 0 < h.fractions_below[-10.0] < 1
