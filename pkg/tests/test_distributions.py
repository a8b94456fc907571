import math

import numpy as np
import pytest

from stepwalk import (
    DiscreteFinite,
    Gaussian,
    Rademacher,
    UniformInterval,
    abs_moment,
    format_distribution,
    moments,
    parse_distribution,
)
from stepwalk.distributions import atoms_and_weights, is_discrete, sample_step
from stepwalk.rng import RandomStream


class TestMoments:
    def test_rademacher(self):
        mu1, mu2 = moments(Rademacher(0.7))
        assert mu1 == pytest.approx(0.4)
        assert mu2 == 1.0
        assert abs_moment(Rademacher(0.7)) == 1.0

    def test_rademacher_symmetric(self):
        mu1, mu2 = moments(Rademacher(0.5))
        assert mu1 == 0.0
        assert mu2 == 1.0

    def test_uniform(self):
        # E[U(-1,1)] = 0, E[U^2] = 1/3, E|U| = 1/2
        mu1, mu2 = moments(UniformInterval(-1.0, 1.0))
        assert mu1 == pytest.approx(0.0)
        assert mu2 == pytest.approx(1.0 / 3.0)
        assert abs_moment(UniformInterval(-1.0, 1.0)) == pytest.approx(0.5)

    def test_uniform_shifted(self):
        # U(2,4): mean 3, second moment (4^3-2^3)/(3*2) = 56/6
        mu1, mu2 = moments(UniformInterval(2.0, 4.0))
        assert mu1 == pytest.approx(3.0)
        assert mu2 == pytest.approx(56.0 / 6.0)

    def test_gaussian(self):
        mu1, mu2 = moments(Gaussian(2.0, 3.0))
        assert mu1 == 2.0
        assert mu2 == pytest.approx(13.0)

    def test_gaussian_abs_moment_folded(self):
        # standard normal: E|Z| = sqrt(2/pi)
        assert abs_moment(Gaussian(0.0, 1.0)) == pytest.approx(math.sqrt(2.0 / math.pi))

    def test_discrete(self):
        d = DiscreteFinite((1.0, 3.0), (0.25, 0.75))
        mu1, mu2 = moments(d)
        assert mu1 == pytest.approx(2.5)
        assert mu2 == pytest.approx(0.25 + 9 * 0.75)
        assert abs_moment(d) == pytest.approx(2.5)


class TestValidation:
    def test_rademacher_probability_range(self):
        with pytest.raises(Exception):
            Rademacher(1.5)

    def test_uniform_requires_lo_below_hi(self):
        with pytest.raises(Exception):
            UniformInterval(1.0, 1.0)

    def test_gaussian_stddev_nonnegative(self):
        with pytest.raises(Exception):
            Gaussian(0.0, -1.0)

    def test_discrete_weights_sum_to_one(self):
        with pytest.raises(Exception):
            DiscreteFinite((1.0, 2.0), (0.5, 0.6))

    def test_discrete_weight_tolerance(self):
        # within 1e-12 of 1 is accepted
        DiscreteFinite((1.0, 2.0), (0.5, 0.5 + 1e-13))


class TestParsing:
    @pytest.mark.parametrize("text,expected", [
        ("rademacher:0.7", Rademacher(0.7)),
        ("uniform:-1:1", UniformInterval(-1.0, 1.0)),
        ("gaussian:0:1", Gaussian(0.0, 1.0)),
        ("discrete:1,3@0.25,0.75", DiscreteFinite((1.0, 3.0), (0.25, 0.75))),
    ])
    def test_round_trip(self, text, expected):
        parsed = parse_distribution(text)
        assert parsed == expected
        assert parse_distribution(format_distribution(parsed)) == parsed

    @pytest.mark.parametrize("text", [
        "", "rademacher", "rademacher:2", "uniform:1:1", "gaussian:0:-1",
        "discrete:1,2@0.5", "weird:1", "discrete:@",
    ])
    def test_rejects_malformed(self, text):
        with pytest.raises(Exception):
            parse_distribution(text)


class TestSampling:
    def test_rademacher_support_and_frequency(self):
        rng = RandomStream(1)
        draws = [sample_step(Rademacher(0.7), rng) for _ in range(20000)]
        assert set(draws) <= {1.0, -1.0}
        # P(+1) = 0.7 within 4 sigma of binomial noise
        frac = draws.count(1.0) / len(draws)
        assert abs(frac - 0.7) < 4 * math.sqrt(0.21 / len(draws))

    def test_uniform_in_interval_with_matching_mean(self):
        rng = RandomStream(2)
        draws = np.array([sample_step(UniformInterval(2.0, 4.0), rng) for _ in range(20000)])
        assert draws.min() >= 2.0 and draws.max() <= 4.0
        assert abs(draws.mean() - 3.0) < 4 * math.sqrt((1.0 / 3.0) / len(draws))

    def test_gaussian_moments(self):
        rng = RandomStream(3)
        draws = np.array([sample_step(Gaussian(1.0, 2.0), rng) for _ in range(40000)])
        assert abs(draws.mean() - 1.0) < 4 * 2.0 / math.sqrt(len(draws))
        assert abs(draws.std() - 2.0) < 0.05

    def test_discrete_frequencies(self):
        d = DiscreteFinite((-2.0, 0.0, 5.0), (0.2, 0.3, 0.5))
        rng = RandomStream(4)
        draws = [sample_step(d, rng) for _ in range(30000)]
        for v, w in zip(*atoms_and_weights(d)):
            frac = draws.count(v) / len(draws)
            assert abs(frac - w) < 4 * math.sqrt(w * (1 - w) / len(draws))

    def test_is_discrete(self):
        assert is_discrete(Rademacher(0.5))
        assert is_discrete(DiscreteFinite((1.0,), (1.0,)))
        assert not is_discrete(UniformInterval(0.0, 1.0))
        assert not is_discrete(Gaussian(0.0, 1.0))
