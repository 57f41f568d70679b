import math

import numpy as np
import pytest

from dscore.errors import DegenerateDataError
from dscore.stats import (
    anova_oneway,
    hurst,
    incomplete_beta,
    pearson,
    t_test_two_sided,
)

import oracles


class TestIncompleteBeta:
    def test_reflection_identity(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            x = rng.uniform(0.01, 0.99)
            a = rng.uniform(0.5, 20.0)
            b = rng.uniform(0.5, 20.0)
            lhs = incomplete_beta(x, a, b) + incomplete_beta(1.0 - x, b, a)
            assert lhs == pytest.approx(1.0, abs=1e-10)

    def test_against_quadrature(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            x = rng.uniform(0.05, 0.95)
            # integer a / half-integer b keep the oracle integrands
            # polynomial, i.e. exact under Gauss-Legendre
            a = float(rng.integers(1, 11))
            b = 0.5 * rng.integers(1, 12)
            assert incomplete_beta(x, a, b) == pytest.approx(
                oracles.beta_cdf(x, a, b), abs=1e-9
            )

    def test_bounds(self):
        assert incomplete_beta(0.0, 2.0, 3.0) == 0.0
        assert incomplete_beta(1.0, 2.0, 3.0) == 1.0
        with pytest.raises(ValueError):
            incomplete_beta(1.5, 2.0, 3.0)


class TestAnova:
    def test_identical_groups(self):
        res = anova_oneway([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_hand_computed_f(self):
        res = anova_oneway([[1, 2, 3], [4, 5, 6]])
        assert res.statistic == pytest.approx(13.5, abs=1e-12)
        assert res.df == (1, 4)

    def test_p_value_matches_quadrature(self):
        res = anova_oneway([[1, 2, 3], [4, 5, 6]])
        assert res.p_value == pytest.approx(oracles.f_sf(13.5, 1, 4), abs=1e-10)

    def test_group_size_error(self):
        with pytest.raises(ValueError, match="group 1"):
            anova_oneway([[1, 2], [3]])

    def test_needs_two_groups(self):
        with pytest.raises(ValueError):
            anova_oneway([[1, 2, 3]])

    def test_equals_squared_pooled_t(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            a = rng.normal(0, 1, size=rng.integers(3, 9))
            b = rng.normal(0.5, 2, size=rng.integers(3, 9))
            f_res = anova_oneway([a, b])
            t_res = t_test_two_sided(a, b, pooled=True)
            assert f_res.statistic == pytest.approx(t_res.statistic**2, rel=1e-9)
            assert f_res.p_value == pytest.approx(t_res.p_value, rel=1e-8)


class TestTTest:
    def test_identical_series(self):
        res = t_test_two_sided([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        lo, hi = res.ci_95
        assert lo <= 0.0 <= hi

    def test_shifted_series_welch(self):
        a = [1.0, 2.0, 3.0, 4.0]
        b = [11.0, 12.0, 13.0, 14.0]
        res = t_test_two_sided(a, b)
        se = math.sqrt(5.0 / 6.0)  # var 5/3 each, n = 4
        assert res.statistic == pytest.approx(-10.0 / se, abs=1e-12)
        assert res.df == pytest.approx(6.0, abs=1e-12)
        t_crit = oracles.t_quantile(0.975, 6.0)
        assert res.ci_95[0] == pytest.approx(-10.0 - t_crit * se, abs=1e-9)
        assert res.ci_95[1] == pytest.approx(-10.0 + t_crit * se, abs=1e-9)

    def test_ci_symmetric_about_difference(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a = rng.normal(0, 1, size=6)
            b = rng.normal(1, 3, size=9)
            res = t_test_two_sided(a, b)
            diff = float(np.mean(a) - np.mean(b))
            assert res.ci_95[0] + res.ci_95[1] == pytest.approx(2 * diff, abs=1e-10)

    def test_degenerate_equal_constants(self):
        res = t_test_two_sided([2.0, 2.0], [2.0, 2.0])
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert res.ci_95 == (0.0, 0.0)

    def test_degenerate_distinct_constants(self):
        res = t_test_two_sided([2.0, 2.0], [5.0, 5.0])
        assert math.isinf(res.statistic) and res.statistic < 0
        assert res.p_value == 0.0
        assert res.ci_95 == (-3.0, -3.0)

    def test_length_precondition(self):
        with pytest.raises(ValueError):
            t_test_two_sided([1.0], [1.0, 2.0])


class TestPearson:
    def test_perfect_positive(self):
        x = [1.0, 2.0, 3.0, 4.0]
        assert pearson(x, [2 * v + 1 for v in x]) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_negative(self):
        x = [1.0, 2.0, 3.0, 4.0]
        assert pearson(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-12)

    def test_affine_invariance_and_sign_flip(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        base = pearson(x, y)
        assert pearson(3.0 * x + 7.0, y) == pytest.approx(base, abs=1e-12)
        assert pearson(-x, y) == pytest.approx(-base, abs=1e-12)

    def test_published_window_size_fixture(self):
        scores = [0.429, 0.433, 0.462, 0.477]
        assert pearson(scores, [170, 170, 96, 61]) == pytest.approx(-0.997, abs=1e-3)

    def test_zero_variance(self):
        with pytest.raises(DegenerateDataError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])


class TestHurst:
    def test_gaussian_noise_near_half(self):
        rng = np.random.default_rng(42)
        est = hurst(rng.standard_normal(10_000))
        assert 0.4 <= est.h <= 0.6
        assert est.n == 10_000

    def test_trending_series_persistent(self):
        rng = np.random.default_rng(42)
        series = np.cumsum(0.5 + 0.1 * rng.standard_normal(10_000))
        est = hurst(series)
        assert est.h > 0.7
        assert est.classification == "persistent"

    def test_affine_invariance(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(5_000)
        assert hurst(3.5 * x + 100.0).h == pytest.approx(hurst(x).h, abs=1e-9)

    def test_constant_series(self):
        with pytest.raises(DegenerateDataError):
            hurst(np.ones(500))

    def test_too_short(self):
        with pytest.raises(ValueError, match="length"):
            hurst(np.arange(50))

    def test_classification_bands(self):
        rng = np.random.default_rng(0)
        noise = hurst(rng.standard_normal(10_000), band=0.2)
        assert noise.classification == "random_walk"
        anti = np.zeros(2_000)
        state = 0.0
        for i in range(2_000):  # strongly mean-reverting AR(1)
            state = -0.8 * state + rng.standard_normal()
            anti[i] = state
        assert hurst(anti).classification == "anti_persistent"

    def test_anis_lloyd_correction_reduces_bias(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(4_000)
        plain = hurst(x).h
        corrected = hurst(x, corrected=True).h
        # the simplified estimator overshoots 0.5 on i.i.d. noise; the
        # expected-R/S adjustment removes most of that bias
        assert abs(corrected - 0.5) < abs(plain - 0.5)
        trend = np.cumsum(0.5 + 0.1 * rng.standard_normal(4_000))
        assert hurst(trend, corrected=True).h > 0.7
