import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepwalk import (
    DomainError,
    EmptySample,
    MomentAccumulator,
    even_moment_check,
    kolmogorov_critical,
    ks_statistic,
    ks_test,
    normal_cdf,
    standardize,
)
from stepwalk.errors import NonpositiveScale


class TestMomentAccumulator:
    def test_matches_numpy(self):
        rng = np.random.default_rng(1)
        data = rng.normal(size=1000)
        acc = MomentAccumulator()
        acc.add_many(data)
        assert acc.count == 1000
        assert acc.mean == pytest.approx(data.mean(), rel=1e-12)
        assert acc.variance == pytest.approx(data.var(ddof=1), rel=1e-12)

    def test_merge_equals_single_pass(self):
        rng = np.random.default_rng(2)
        data = rng.normal(size=900)
        whole = MomentAccumulator()
        whole.add_many(data)
        parts = []
        for chunk in np.split(data, 3):
            acc = MomentAccumulator()
            acc.add_many(chunk)
            parts.append(acc)
        merged = parts[0].merge(parts[1]).merge(parts[2])
        assert merged.count == whole.count
        assert merged.mean == pytest.approx(whole.mean, rel=1e-12)
        assert merged.variance == pytest.approx(whole.variance, rel=1e-12)

    def test_merge_associative(self):
        rng = np.random.default_rng(3)
        chunks = [rng.normal(size=50) for _ in range(3)]

        def acc_of(arrs):
            a = MomentAccumulator()
            for arr in arrs:
                a.add_many(arr)
            return a

        left = acc_of(chunks[:1]).merge(acc_of(chunks[1:2])).merge(acc_of(chunks[2:]))
        right = acc_of(chunks[:1]).merge(acc_of(chunks[1:2]).merge(acc_of(chunks[2:])))
        assert left.mean == pytest.approx(right.mean, rel=1e-12)
        assert left.m2 == pytest.approx(right.m2, rel=1e-12)

    def test_merge_with_empty(self):
        acc = MomentAccumulator()
        acc.add(1.0)
        acc.add(3.0)
        merged = acc.merge(MomentAccumulator())
        assert merged.count == 2
        assert merged.mean == 2.0

    def test_small_counts(self):
        acc = MomentAccumulator()
        assert math.isnan(acc.variance)
        acc.add(5.0)
        assert acc.mean == 5.0
        assert math.isnan(acc.variance)


class TestNormalCdf:
    def test_oracle_values(self):
        # reference values accurate to 1e-10
        assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-12)
        assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-10)
        assert normal_cdf(-1.96) == pytest.approx(0.024997895148220435, abs=1e-10)
        assert normal_cdf(3.0) == pytest.approx(0.9986501019683699, abs=1e-10)

    def test_symmetry(self):
        for x in (0.3, 1.7, 2.5):
            assert normal_cdf(x) + normal_cdf(-x) == pytest.approx(1.0, abs=1e-14)


class TestKsStatistic:
    def test_empty_sample_rejected(self):
        with pytest.raises(EmptySample):
            ks_statistic([])

    def test_single_point_at_median(self):
        # one sample at 0: D = max(1 - 0.5, 0.5 - 0) = 0.5
        assert ks_statistic([0.0]) == pytest.approx(0.5)

    def test_uniform_quantiles_minimize_d(self):
        # the n-quantile midpoints of F give D = 1/(2n)
        n = 100
        from scipy.stats import norm
        x = norm.ppf((np.arange(n) + 0.5) / n)
        assert ks_statistic(x) == pytest.approx(1.0 / (2 * n), abs=1e-12)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=500)
        assert ks_statistic(x) == ks_statistic(x[::-1])
        assert ks_statistic(x) == ks_statistic(rng.permutation(x))

    def test_custom_cdf(self):
        # uniform sample against uniform CDF
        rng = np.random.default_rng(5)
        x = rng.uniform(size=2000)
        d = ks_statistic(x, cdf=lambda v: np.clip(v, 0.0, 1.0))
        assert d < 1.63 / math.sqrt(2000)

    def test_scalar_cdf_accepted(self):
        x = [0.1, 0.5, 0.9]
        d_vec = ks_statistic(x, cdf=lambda v: np.clip(v, 0.0, 1.0))
        d_scalar = ks_statistic(x, cdf=lambda v: min(max(float(v), 0.0), 1.0))
        assert d_vec == d_scalar

    def test_detects_wrong_distribution(self):
        rng = np.random.default_rng(6)
        x = rng.normal(loc=0.5, size=2000)
        assert ks_statistic(x) > 1.63 / math.sqrt(2000)

    @given(st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=50))
    @settings(max_examples=50, deadline=None)
    def test_bounds(self, xs):
        d = ks_statistic(xs)
        assert 0.0 <= d <= 1.0


class TestKolmogorovCritical:
    def test_one_percent_level(self):
        # classical table value c(0.01) = 1.6276
        assert kolmogorov_critical(0.01) == pytest.approx(1.6276, abs=2e-3)

    def test_five_percent_level(self):
        assert kolmogorov_critical(0.05) == pytest.approx(1.3581, abs=2e-3)

    def test_monotone_in_level(self):
        assert kolmogorov_critical(0.01) > kolmogorov_critical(0.05) > kolmogorov_critical(0.2)

    def test_rejects_bad_level(self):
        for level in (0.0, 1.0, -0.1):
            with pytest.raises(DomainError):
                kolmogorov_critical(level)


class TestKsTest:
    def test_normal_sample_passes(self):
        rng = np.random.default_rng(7)
        res = ks_test(rng.normal(size=5000))
        assert res.passed
        assert res.n == 5000
        assert res.threshold == pytest.approx(kolmogorov_critical(0.01) / math.sqrt(5000))

    def test_explicit_threshold(self):
        res = ks_test([0.0], threshold=0.6)
        assert res.passed
        res = ks_test([0.0], threshold=0.4)
        assert not res.passed


class TestStandardize:
    def test_formula(self):
        out = standardize([1.0, 3.0], center=1.0, scale=2.0)
        assert out.tolist() == [0.0, 1.0]

    def test_rejects_nonpositive_scale(self):
        for s in (0.0, -1.0):
            with pytest.raises(NonpositiveScale):
                standardize([1.0], center=0.0, scale=s)


class TestEvenMomentCheck:
    def test_exact_rademacher(self):
        # X_k^2 = 1 exactly: stderr 0, mean 1, passes against mu2 = 1
        checks = even_moment_check({1: np.array([1.0, -1.0, 1.0])}, mu2=1.0)
        assert len(checks) == 1
        assert checks[0].passed
        assert checks[0].stderr == 0.0

    def test_detects_wrong_target(self):
        rng = np.random.default_rng(8)
        x = rng.uniform(-1, 1, size=10000)
        checks = even_moment_check({1: x, 10: x}, mu2=1.0 / 3.0)
        assert all(c.passed for c in checks)
        bad = even_moment_check({1: x}, mu2=0.5)
        assert not bad[0].passed

    def test_sorted_by_k(self):
        x = np.array([0.5, -0.5, 1.0])
        checks = even_moment_check({10: x, 1: x, 5: x}, mu2=0.5)
        assert [c.k for c in checks] == [1, 5, 10]
