"""Stream derivation, log-domain Gamma / Dirichlet sampling and sparsity counts."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special, stats

from bounds import marginal_exceed_prob
from errors import DomainError
from samplers import (
    DirichletSpec,
    LogSimplexPoint,
    StreamSeed,
    derive_stream,
    log_moment,
    normalize_log,
    pair_index,
    sample_dirichlet_log,
    sample_dirichlet_log_batch,
    sample_gamma_log,
    sparsity_count,
    sparsity_count_log,
)

MOMENT_DRAWS = 100_000


class TestStreams:

    def test_pair_index_is_injective(self):
        indices = {pair_index(n, t) for n in (1, 2, 16, 4096) for t in (0, 1, 999, 2 ** 32 - 1)}
        assert len(indices) == 16

    def test_pair_index_range(self):
        with pytest.raises(DomainError):
            pair_index(2 ** 32, 0)
        with pytest.raises(DomainError):
            pair_index(4, -1)

    def test_same_seed_same_draws(self):
        a = derive_stream(StreamSeed(master=11, index=5)).random(8)
        b = derive_stream(StreamSeed(master=11, index=5)).random(8)
        np.testing.assert_array_equal(a, b)

    def test_neighbouring_seeds_differ(self):
        base = derive_stream(StreamSeed(master=11, index=5)).random(8)
        other_index = derive_stream(StreamSeed(master=11, index=6)).random(8)
        other_master = derive_stream(StreamSeed(master=12, index=5)).random(8)
        assert not np.array_equal(base, other_index)
        assert not np.array_equal(base, other_master)

    def test_seed_must_fit_64_bits(self):
        with pytest.raises(ValidationError):
            StreamSeed(master=2 ** 64, index=0)


class TestGammaLog:

    def test_scalar_and_array(self, stream_for):
        stream = stream_for()
        assert isinstance(sample_gamma_log(stream, 0.5), float)
        assert sample_gamma_log(stream, 0.5, size=(3, 4)).shape == (3, 4)

    @pytest.mark.parametrize("a", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_shape(self, stream_for, a):
        with pytest.raises(DomainError):
            sample_gamma_log(stream_for(), a)

    def test_tiny_shape_stays_finite(self, stream_for):
        log_y = sample_gamma_log(stream_for(), 1.0 / 4096 ** 2, size=10_000)
        assert np.all(np.isfinite(log_y))
        # a typical log variate is around log(U) / a
        assert np.median(log_y) < -1e6

    @pytest.mark.statistical
    @pytest.mark.parametrize("a", [1e-6, 1e-3, 0.5, 1.0, 10.0])
    def test_mean_within_five_standard_errors(self, stream_for, a):
        log_y = sample_gamma_log(stream_for(master=2024, index=1), a, size=MOMENT_DRAWS)
        mean = math.exp(log_moment(log_y, 1.0))
        standard_error = math.sqrt(a / MOMENT_DRAWS)
        assert abs(mean - a) <= 5.0 * standard_error

    @pytest.mark.statistical
    @pytest.mark.parametrize("a", [1e-6, 1e-3, 0.5, 1.0, 10.0])
    def test_second_moment(self, stream_for, a):
        # E[Y^2] = a (a + 1), Var[Y^2] = a(a+1)(a+2)(a+3) - (a(a+1))^2
        log_y = sample_gamma_log(stream_for(master=2024, index=2), a, size=MOMENT_DRAWS)
        second = math.exp(log_moment(log_y, 2.0))
        expected = a * (a + 1.0)
        variance = a * (a + 1.0) * (a + 2.0) * (a + 3.0) - expected ** 2
        assert abs(second - expected) <= 5.0 * math.sqrt(variance / MOMENT_DRAWS)

    @pytest.mark.statistical
    def test_unit_shape_is_exponential(self, stream_for):
        y = np.exp(sample_gamma_log(stream_for(master=2024, index=3), 1.0, size=MOMENT_DRAWS))
        result = stats.kstest(y, "expon")
        assert result.pvalue > 0.01


class TestDirichlet:

    def test_single_coordinate(self, stream_for):
        point = sample_dirichlet_log(stream_for(), DirichletSpec(n=1, alpha=0.3))
        np.testing.assert_array_equal(point.log_coords, [0.0])

    @pytest.mark.parametrize("n, alpha", [(8, 1.0), (1024, 1.0 / 1024), (4096, 1.0 / 4096 ** 2)])
    def test_points_lie_on_simplex(self, stream_for, n, alpha):
        point = sample_dirichlet_log(stream_for(index=n), DirichletSpec(n=n, alpha=alpha))
        assert point.log_coords.shape == (n,)
        assert np.max(point.log_coords) <= 1e-12
        assert abs(float(special.logsumexp(point.log_coords))) <= 1e-12

    def test_tiny_shape_keeps_every_coordinate(self, stream_for):
        # the linear coordinates underflow but the log coordinates are all finite
        point = sample_dirichlet_log(stream_for(), DirichletSpec(n=4096, alpha=1.0 / 4096 ** 2))
        assert np.all(np.isfinite(point.log_coords))
        assert np.count_nonzero(point.coords) < 4096

    def test_batch_rows_are_normalized(self, stream_for):
        batch = sample_dirichlet_log_batch(stream_for(), DirichletSpec(n=16, alpha=0.1), 500)
        assert batch.shape == (500, 16)
        np.testing.assert_allclose(special.logsumexp(batch, axis=1), 0.0, atol=1e-12)

    def test_batch_is_deterministic(self, stream_for):
        spec = DirichletSpec(n=5, alpha=0.7)
        a = sample_dirichlet_log_batch(stream_for(master=9), spec, 20)
        b = sample_dirichlet_log_batch(stream_for(master=9), spec, 20)
        np.testing.assert_array_equal(a, b)

    @pytest.mark.statistical
    def test_symmetric_column_means(self, stream_for):
        batch = sample_dirichlet_log_batch(stream_for(master=5), DirichletSpec(n=8, alpha=1.0), MOMENT_DRAWS)
        x = np.exp(batch)
        # X_i ~ Beta(1, 7): mean 1/8, variance 7 / (64 * 9)
        standard_error = math.sqrt(7.0 / (64.0 * 9.0) / MOMENT_DRAWS)
        np.testing.assert_array_less(np.abs(x.mean(axis=0) - 0.125), 5.0 * standard_error)

    @pytest.mark.statistical
    @pytest.mark.parametrize("n, alpha, epsilon", [
        (2, 1.0, 0.3),
        (64, 1.0 / 64, 1.0 / 64),
        (256, 1.0 / 256 ** 2, 1.0 / 256 ** 2),
    ])
    def test_marginal_matches_beta(self, stream_for, n, alpha, epsilon):
        stream = stream_for(master=77, index=n)
        spec = DirichletSpec(n=n, alpha=alpha)
        hits = 0
        for _ in range(10):
            batch = sample_dirichlet_log_batch(stream, spec, MOMENT_DRAWS // 10)
            hits += int(np.count_nonzero(batch[:, 0] >= math.log(epsilon)))
        interval = stats.binomtest(hits, MOMENT_DRAWS).proportion_ci(confidence_level=0.99)
        assert interval.low <= marginal_exceed_prob(n, alpha, epsilon) <= interval.high

    def test_invalid_spec(self):
        with pytest.raises(ValidationError):
            DirichletSpec(n=0, alpha=1.0)
        with pytest.raises(ValidationError):
            DirichletSpec(n=3, alpha=0.0)


class TestLogSimplexPoint:

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            LogSimplexPoint(n=2, log_coords=[0.0, 0.0])

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValidationError):
            LogSimplexPoint(n=3, log_coords=[0.0])


class TestSparsityCount:

    def uniform_point(self, n):
        return LogSimplexPoint(n=n, log_coords=np.full(n, -math.log(n)))

    def test_uniform_point(self):
        point = self.uniform_point(8)
        assert sparsity_count(point, 1.0 / 8) == 8
        assert sparsity_count(point, 0.2) == 0

    def test_vertex_counts_one(self):
        point = LogSimplexPoint(n=3, log_coords=[0.0, -2000.0, -3000.0])
        assert sparsity_count(point, 1.0) == 1
        assert sparsity_count(point, 1e-300) == 1

    def test_nonincreasing_in_epsilon(self, stream_for):
        point = sample_dirichlet_log(stream_for(), DirichletSpec(n=256, alpha=1.0 / 256))
        counts = [sparsity_count(point, eps) for eps in (1e-1, 1e-3, 1e-6, 1e-12)]
        assert counts == sorted(counts)

    @pytest.mark.parametrize("epsilon", [0.0, -0.1, 1.5, math.nan])
    def test_invalid_epsilon(self, epsilon):
        with pytest.raises(DomainError):
            sparsity_count(self.uniform_point(4), epsilon)

    def test_log_threshold_is_inclusive(self):
        assert sparsity_count_log(np.array([-1.0, -2.0]), -2.0) == 2


class TestLogHelpers:

    def test_normalize_log_rows(self):
        values = np.array([[0.0, 0.0], [-1e7, -1e7 - 1.0]])
        normalized = normalize_log(values, axis=1)
        np.testing.assert_allclose(special.logsumexp(normalized, axis=1), 0.0, atol=1e-12)
        np.testing.assert_allclose(normalized[0], [-math.log(2.0)] * 2, rtol=1e-15)

    def test_log_moment(self):
        assert log_moment(np.log([1.0, 3.0])) == pytest.approx(math.log(2.0), rel=1e-14)
        assert log_moment(np.log([1.0, 3.0]), order=2.0) == pytest.approx(math.log(5.0), rel=1e-14)
        # every linear value underflows, the log estimate does not
        assert log_moment([-1e6, -1e6]) == pytest.approx(-1e6, rel=1e-15)

    def test_log_moment_empty(self):
        with pytest.raises(DomainError):
            log_moment([])
