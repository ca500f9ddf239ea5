# special_functions.py
"""
Scalar special functions used by the sampler diagnostics and the proof-step checks.

The regularized incomplete gamma pair is evaluated with the power series for
x < a + 1 and a modified Lentz continued fraction otherwise. The prefactor
x^a e^(-x) / Gamma(a) is always formed as one exp() of a sum of logs, which
keeps shapes down to 1e-9 finite (x^(a-1) alone would overflow there).
From LARGE_SHAPE upwards the log prefactor cancels between terms of size
a ln x, so those shapes go to scipy.special.gammainc / gammaincc, which switch
to uniform asymptotic expansions there.
"""

import logging
import math
import sys

from scipy import optimize, special

from config import (
    CONTINUED_FRACTION_MAX_ITERATIONS,
    ROOT_MAX_ITERATIONS,
    SERIES_MAX_ITERATIONS,
)
from errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

TOLERANCE = 1e-15
FPMIN = sys.float_info.min / sys.float_info.epsilon
INVERSE_TOLERANCE = 1e-10
ROOT_XTOL = 1e-300
ROOT_RTOL = 4 * sys.float_info.epsilon
LARGE_SHAPE = 100.0


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a finite positive real, got {value!r}")
    return value


def _nonnegative(value: float, name: str) -> float:
    value = float(value)
    if math.isnan(value) or value < 0.0:
        raise DomainError(f"{name} must be a nonnegative real, got {value!r}")
    return value


def log_gamma_fn(x: float) -> float:
    """Return ln Gamma(x) for finite x > 0."""
    x = _positive(x, "x")
    return float(special.gammaln(x))


def _lower_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^-x / Gamma(a + 1) * sum_{j>=0} x^j / ((a + 1) ... (a + j))
    term = 1.0
    total = 1.0
    denominator = a
    for _ in range(SERIES_MAX_ITERATIONS):
        denominator += 1.0
        term *= x / denominator
        total += term
        if abs(term) < abs(total) * TOLERANCE:
            log_prefix = a * math.log(x) - x - special.gammaln(a + 1.0)
            return math.exp(log_prefix + math.log(total))

    raise ConvergenceError(
        f"Incomplete gamma series did not converge for a={a!r}, x={x!r} "
        f"after {SERIES_MAX_ITERATIONS} terms"
    )


def _upper_continued_fraction(a: float, x: float) -> float:
    # Q(a, x) = x^a e^-x / Gamma(a) * 1/(x + 1 - a - 1(1 - a)/(x + 3 - a - ...))
    b = x + 1.0 - a
    c = 1.0 / FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, CONTINUED_FRACTION_MAX_ITERATIONS + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < FPMIN:
            d = FPMIN
        c = b + an / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < TOLERANCE:
            log_prefix = a * math.log(x) - x - special.gammaln(a)
            return math.exp(log_prefix + math.log(h))

    raise ConvergenceError(
        f"Incomplete gamma continued fraction did not converge for a={a!r}, x={x!r} "
        f"after {CONTINUED_FRACTION_MAX_ITERATIONS} iterations"
    )


def reg_lower_inc_gamma(a: float, x: float) -> float:
    """
    Regularized lower incomplete gamma P(a, x) = Pr[Gamma(a) <= x].

    Args:
        a: Shape, finite and > 0 (accurate down to 1e-9)
        x: Evaluation point, >= 0 (+inf gives 1.0)

    Returns:
        Probability in [0, 1]
    """
    a = _positive(a, "a")
    x = _nonnegative(x, "x")

    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if a >= LARGE_SHAPE:
        return float(special.gammainc(a, x))
    if x < a + 1.0:
        # rounding can exceed the unit interval by an ulp
        return min(1.0, _lower_series(a, x))
    return 1.0 - min(1.0, _upper_continued_fraction(a, x))


def reg_upper_inc_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Pr[Gamma(a) >= x]."""
    a = _positive(a, "a")
    x = _nonnegative(x, "x")

    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if a >= LARGE_SHAPE:
        return float(special.gammaincc(a, x))
    if x < a + 1.0:
        return 1.0 - min(1.0, _lower_series(a, x))
    return min(1.0, _upper_continued_fraction(a, x))


def inverse_upper_tail(a: float, p: float) -> float:
    """
    Return c >= 0 with Pr[Gamma(a) >= c] = p, to within 1e-10.

    The bracket starts at [0, max(1, a)] and the upper end doubles until the
    tail drops below p; Brent's method then runs inside the bracket.
    """
    a = _positive(a, "a")
    p = float(p)
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in the open interval (0, 1), got {p!r}")

    def excess(c: float) -> float:
        return reg_upper_inc_gamma(a, c) - p

    upper = max(1.0, a)
    for _ in range(2 * sys.float_info.max_exp):
        tail_gap = excess(upper)
        if tail_gap == 0.0:
            return upper
        if tail_gap < 0.0:
            break
        upper *= 2.0
    else:
        raise ConvergenceError(f"Could not bracket the upper tail p={p!r} for a={a!r}")

    try:
        root, result = optimize.brentq(
            excess,
            0.0,
            upper,
            xtol=ROOT_XTOL,
            rtol=ROOT_RTOL,
            maxiter=ROOT_MAX_ITERATIONS,
            full_output=True,
            disp=False,
        )
    except (RuntimeError, ValueError) as e:
        raise ConvergenceError(f"Root finding failed for a={a!r}, p={p!r}: {e}") from e

    if not result.converged:
        raise ConvergenceError(
            f"Root finding did not converge for a={a!r}, p={p!r} "
            f"after {result.iterations} iterations ({result.flag})"
        )

    residual = abs(excess(root))
    if residual > INVERSE_TOLERANCE:
        raise ConvergenceError(
            f"Inverse upper tail for a={a!r}, p={p!r} has residual {residual:.3e} "
            f"above {INVERSE_TOLERANCE:.0e}"
        )

    logger.debug(f"inverse_upper_tail(a={a}, p={p}) = {root} after {result.iterations} iterations")
    return float(root)


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), the cdf of Beta(a, b) at x."""
    a = _positive(a, "a")
    b = _positive(b, "b")
    x = float(x)
    if math.isnan(x) or not (0.0 <= x <= 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x!r}")

    return float(special.betainc(a, b, x))
