"""Incomplete gamma / beta evaluations checked against closed forms and scipy."""

import math

import pytest
from scipy import special

from errors import ConvergenceError, DomainError
from special_functions import (
    inverse_upper_tail,
    log_gamma_fn,
    reg_inc_beta,
    reg_lower_inc_gamma,
    reg_upper_inc_gamma,
)

SHAPES = [1e-9, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.5, 10.0, 100.0, 1e3, 1e4, 1e5]
POINTS = [1e-10, 1e-3, 0.1, 1.0, 5.0, 50.0, 200.0]


class TestLowerIncompleteGamma:

    @pytest.mark.parametrize("a", SHAPES)
    @pytest.mark.parametrize("x", POINTS)
    def test_matches_scipy(self, a, x):
        assert reg_lower_inc_gamma(a, x) == pytest.approx(float(special.gammainc(a, x)), rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("a", [50.0, 99.0, 1e3, 1e4, 1e5])
    @pytest.mark.parametrize("ratio", [0.9, 1.0, 1.1])
    def test_large_shape_near_the_mode(self, a, ratio):
        # both tails are O(1) here, so a relative miss is a real accuracy loss
        x = ratio * a
        assert reg_lower_inc_gamma(a, x) == pytest.approx(float(special.gammainc(a, x)), rel=1e-12)
        assert reg_upper_inc_gamma(a, x) == pytest.approx(float(special.gammaincc(a, x)), rel=1e-12)

    @pytest.mark.parametrize("x", [1e-10, 0.3, 1.0, 2.0, 30.0])
    def test_exponential_closed_form(self, x):
        assert reg_lower_inc_gamma(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-12)

    def test_half_shape_is_erf(self):
        # P(1/2, x) = erf(sqrt(x))
        for x in (0.01, 0.5, 2.0, 9.0):
            assert reg_lower_inc_gamma(0.5, x) == pytest.approx(math.erf(math.sqrt(x)), rel=1e-12)

    def test_endpoints(self):
        assert reg_lower_inc_gamma(0.3, 0.0) == 0.0
        assert reg_lower_inc_gamma(0.3, math.inf) == 1.0

    def test_tiny_shape_is_near_one(self):
        # P(a, x) ~ x^a for tiny a, so P(1e-9, 1) is within 1e-8 of 1
        value = reg_lower_inc_gamma(1e-9, 1.0)
        assert 1.0 - 1e-8 < value <= 1.0

    def test_monotone_in_x(self):
        values = [reg_lower_inc_gamma(2.0, x) for x in (0.1, 0.5, 1.0, 3.0, 10.0)]
        assert values == sorted(values)

    @pytest.mark.parametrize("a, x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5), (math.nan, 1.0), (1.0, math.nan), (math.inf, 1.0)])
    def test_domain_errors(self, a, x):
        with pytest.raises(DomainError):
            reg_lower_inc_gamma(a, x)


class TestUpperIncompleteGamma:

    @pytest.mark.parametrize("a", [1e-6, 0.5, 3.0, 40.0])
    @pytest.mark.parametrize("x", [0.01, 1.0, 10.0, 100.0])
    def test_complements_lower(self, a, x):
        assert reg_upper_inc_gamma(a, x) + reg_lower_inc_gamma(a, x) == pytest.approx(1.0, abs=1e-14)

    def test_small_tail_keeps_relative_precision(self):
        # far tail of the exponential, where 1 - P would cancel to 0
        assert reg_upper_inc_gamma(1.0, 100.0) == pytest.approx(math.exp(-100.0), rel=1e-12)

    def test_endpoints(self):
        assert reg_upper_inc_gamma(2.0, 0.0) == 1.0
        assert reg_upper_inc_gamma(2.0, math.inf) == 0.0


class TestInverseUpperTail:

    def test_exponential_threshold(self):
        # Pr[Exp(1) >= c] = 3/12 at c = ln 4
        assert inverse_upper_tail(1.0, 3.0 / 12.0) == pytest.approx(math.log(4.0), abs=1e-10)

    @pytest.mark.parametrize("a, p", [
        (1e-4, 1e-6),
        (1e-4, 0.02),
        (1.0 / 64.0, 13.0 / 192.0),
        (1.0 / 256 ** 2, 6.0 / 768.0),
        (0.5, 0.5),
        (0.5, 1e-6),
        (3.0, 0.99),
        (3.0, 0.1),
        (50.0, 0.5),
        (50.0, 1e-8),
    ])
    def test_round_trip(self, a, p):
        c = inverse_upper_tail(a, p)
        assert c >= 0.0
        assert abs(reg_upper_inc_gamma(a, c) - p) <= 1e-10

    def test_tiny_shape_threshold_is_tiny(self):
        # Q(1e-4, c) = 0.02 puts ln c near ln(0.98) / 1e-4
        c = inverse_upper_tail(1e-4, 0.02)
        assert -210.0 < math.log(c) < -195.0

    def test_unrepresentable_threshold_raises(self):
        # the root lies near e^-6931, below the smallest double
        with pytest.raises(ConvergenceError):
            inverse_upper_tail(1e-4, 0.5)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_probability_out_of_range(self, p):
        with pytest.raises(DomainError):
            inverse_upper_tail(1.0, p)


class TestIncompleteBeta:

    def test_symmetric_midpoint(self):
        for a in (0.01, 0.5, 3.0):
            assert reg_inc_beta(a, a, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_uniform(self):
        for x in (0.0, 0.2, 0.7, 1.0):
            assert reg_inc_beta(1.0, 1.0, x) == pytest.approx(x, abs=1e-15)

    def test_power_law(self):
        # I_x(a, 1) = x^a
        assert reg_inc_beta(2.5, 1.0, 0.3) == pytest.approx(0.3 ** 2.5, rel=1e-12)

    @pytest.mark.parametrize("a, b, x", [
        (0.5, 0.5, 0.3),
        (1.0 / 64.0, 63.0 / 64.0, 1e-3),
        (2.0, 7.0, 0.25),
        (1e-4, 0.9999, 0.5),
        (30.0, 4.0, 0.9),
    ])
    def test_reflection(self, a, b, x):
        assert reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("a, b", [(0.5, 0.5), (1.0 / 16.0, 15.0 / 16.0), (3.0, 2.0), (1e-3, 10.0)])
    def test_monotone_in_x(self, a, b):
        values = [reg_inc_beta(a, b, x) for x in (0.0, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0)]
        assert values == sorted(values)
        assert values[0] == 0.0
        assert values[-1] == 1.0

    @pytest.mark.parametrize("a, b, x", [(0.0, 1.0, 0.5), (1.0, -2.0, 0.5), (1.0, 1.0, 1.2), (1.0, 1.0, math.nan)])
    def test_domain_errors(self, a, b, x):
        with pytest.raises(DomainError):
            reg_inc_beta(a, b, x)


def test_log_gamma():
    assert log_gamma_fn(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    # ln Gamma(x) ~ -ln x as x -> 0
    assert log_gamma_fn(1e-9) == pytest.approx(-math.log(1e-9), rel=1e-8)
    with pytest.raises(DomainError):
        log_gamma_fn(0.0)
