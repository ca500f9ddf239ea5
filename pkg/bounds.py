# bounds.py
"""
Closed-form sparsity lower bounds for symmetric Dirichlet draws.

Every evaluator returns a BoundResult. Precondition violations are flagged,
never raised; invalid arguments (epsilon outside (0, 1], nonpositive shapes)
raise DomainError. So does a threshold n^-c that underflows to 0.0 in
theorem1_bound and theorem2_bound: the event itself is not representable as a
double, which is a domain limit rather than an unmet precondition.

Theorems 1-3 carry the helper-bound instantiation they are derived from as
`parent`, together with whether the parent dominates them.
"""

import logging
import math
import numbers
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from config import IDENTITY_TOLERANCE
from errors import DomainError
from special_functions import reg_inc_beta

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(1.7976931348623157e308)
THEOREM3_CLAIM = 0.64
POWER_WEAKENING_CEILING = math.exp(2.0 / math.e)


class SparsityEvent(BaseModel):
    """The event |{i : X_i >= epsilon}| <= k for (X_1..X_n) ~ Dir(alpha)."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    epsilon: float = Field(gt=0.0, le=1.0)
    k: float = Field(ge=0.0)
    alpha: Optional[float] = Field(default=None, gt=0.0)


class BoundTerms(BaseModel):
    model_config = ConfigDict(frozen=True)

    first_term: float
    second_term: float


class BoundResult(BaseModel):
    """A probability lower bound 1 - first_term - second_term and its validity flags."""
    model_config = ConfigDict(frozen=True)

    name: str
    lower_bound: Optional[float]
    preconditions_met: bool
    terms: BoundTerms
    event: SparsityEvent
    parent: Optional["BoundResult"] = None
    implied_by_parent: Optional[bool] = None

    @property
    def vacuous(self) -> bool:
        """True when the bound holds but is below 0 and so says nothing."""
        return self.lower_bound is not None and self.lower_bound < 0.0


def _exp(log_value: float) -> float:
    if log_value > LOG_FLOAT_MAX:
        return math.inf
    return math.exp(log_value)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


def _finite_positive(value: float, name: str) -> float:
    value = float(value)
    _require(math.isfinite(value) and value > 0.0, f"{name} must be a finite positive real, got {value!r}")
    return value


def _dimension(n: int) -> int:
    _require(
        isinstance(n, numbers.Integral) and not isinstance(n, bool) and n >= 1,
        f"n must be a positive integer, got {n!r}",
    )
    return int(n)


def _assemble(
    name: str,
    first: float,
    second: float,
    preconditions_met: bool,
    event: SparsityEvent,
    parent: Optional[BoundResult] = None,
) -> BoundResult:
    lower_bound = 1.0 - first - second if preconditions_met else None
    implied = None
    if parent is not None and lower_bound is not None and parent.lower_bound is not None:
        implied = parent.lower_bound >= lower_bound - IDENTITY_TOLERANCE * max(1.0, abs(lower_bound))
    return BoundResult(
        name=name,
        lower_bound=lower_bound,
        preconditions_met=preconditions_met,
        terms=BoundTerms(first_term=first, second_term=second),
        event=event,
        parent=parent,
        implied_by_parent=implied,
    )


def helper_bound(epsilon: float, alpha: float, k: float, n: int) -> BoundResult:
    """
    Pr[|{i : X_i >= epsilon}| <= k] >= 1 - eps^(-n alpha) e^(-(k+1)/3) - e^(-4(k+1)/9).

    Args:
        epsilon: Threshold in (0, 1]
        alpha: Dirichlet shape, > 0
        k: Count ceiling, real and >= 0
        n: Dimension

    Returns:
        BoundResult; preconditions_met is k + 1 < 3n
    """
    epsilon = float(epsilon)
    _require(0.0 < epsilon <= 1.0, f"epsilon must lie in (0, 1], got {epsilon!r}")
    alpha = _finite_positive(alpha, "alpha")
    k = float(k)
    _require(math.isfinite(k) and k >= 0.0, f"k must be a finite nonnegative real, got {k!r}")
    n = _dimension(n)

    # eps^(-n alpha) is folded into the exponent so it never overflows on its own
    first = _exp(-n * alpha * math.log(epsilon) - (k + 1.0) / 3.0)
    second = math.exp(-4.0 * (k + 1.0) / 9.0)
    event = SparsityEvent(n=n, epsilon=epsilon, k=k, alpha=alpha)
    return _assemble("helper", first, second, k + 1.0 < 3.0 * n, event)


def theorem2_bound(n: int, c1: float, c2: float, c3: float) -> BoundResult:
    """Theorem 2: Dir(c1/n), threshold n^-c3, count ceiling c2 ln n."""
    n = _dimension(n)
    c1 = _finite_positive(c1, "c1")
    c2 = _finite_positive(c2, "c2")
    c3 = _finite_positive(c3, "c3")

    log_n = math.log(n)
    k = c2 * log_n
    epsilon = math.exp(-c3 * log_n)
    _require(epsilon > 0.0, f"threshold n^-c3 underflows for n={n}, c3={c3}")

    first = _exp(-1.0 / 3.0 - (c2 / 3.0 - c1 * c3) * log_n)
    second = math.exp(-4.0 / 9.0 - (4.0 * c2 / 9.0) * log_n)
    parent = helper_bound(epsilon, c1 / n, k, n)
    event = SparsityEvent(n=n, epsilon=epsilon, k=k, alpha=c1 / n)
    return _assemble("theorem2", first, second, k + 1.0 < 3.0 * n, event, parent)


def theorem1_bound(n: int, c0: float) -> BoundResult:
    """
    Theorem 1: for Dir(1/n), Pr[|{i : X_i >= n^-c0}| <= 6 c0 ln n] >= 1 - n^-c0.

    The parent is the Theorem 2 instantiation (c1 = 1, c2 = 6 c0, c3 = c0);
    implied_by_parent records the closing inequality of the derivation.
    """
    n = _dimension(n)
    c0 = _finite_positive(c0, "c0")

    log_n = math.log(n)
    k = 6.0 * c0 * log_n
    tail = math.exp(-c0 * log_n)
    preconditions_met = n >= 2 and c0 >= 1.0 and k + 1.0 < 3.0 * n

    parent = theorem2_bound(n, 1.0, 6.0 * c0, c0)
    event = SparsityEvent(n=n, epsilon=tail, k=k, alpha=1.0 / n)
    return _assemble("theorem1", tail, 0.0, preconditions_met, event, parent)


def theorem3_bound(n: int, ln_g: Optional[float] = None) -> BoundResult:
    """
    Theorem 3 for Dir(1/n^2) at threshold n^-2.

    With ln_g None the count ceiling is the constant 5 and the bound is
    1 - e^(2/e - 2) - e^(-8/3). Otherwise the ceiling is ln_g = ln g(n) and
    the bound is 1 - e^(2/e - 1/3) g^(-1/3) - e^(-4/9) g^(-4/9).
    """
    n = _dimension(n)
    shape = float(n) ** -2

    if ln_g is None:
        k = 5.0
        first = math.exp(2.0 / math.e - 2.0)
        second = math.exp(-8.0 / 3.0)
        preconditions_met = n >= 3
        name = "theorem3"
    else:
        k = float(ln_g)
        _require(math.isfinite(k), f"ln_g must be finite, got {ln_g!r}")
        first = _exp(2.0 / math.e - 1.0 / 3.0 - k / 3.0)
        second = _exp(-4.0 / 9.0 - 4.0 * k / 9.0)
        preconditions_met = n >= 3 and 1.0 <= k < 3.0 * n - 1.0
        name = "theorem3_g"

    # the derivation instantiates the helper bound with epsilon = alpha = n^-2
    parent = helper_bound(shape, shape, k, n) if k >= 0.0 else None
    event = SparsityEvent(n=n, epsilon=shape, k=max(k, 0.0), alpha=shape)
    return _assemble(name, first, second, preconditions_met, event, parent)


def power_weakening_gap(n: float) -> float:
    """e^(2/e) - n^(2/n); nonnegative for every n > 0, zero only at n = e."""
    n = _finite_positive(n, "n")
    return POWER_WEAKENING_CEILING - math.exp(2.0 * math.log(n) / n)


def chernoff_tail_bound(n: int, p: float) -> float:
    """exp(-4np/3), the multiplicative Chernoff bound on Pr[Binomial(n, p) >= 3np]."""
    n = _dimension(n)
    p = float(p)
    _require(0.0 <= p <= 1.0, f"p must lie in [0, 1], got {p!r}")
    return math.exp(-4.0 * n * p / 3.0)


def marginal_exceed_prob(n: int, alpha: float, epsilon: float) -> float:
    """
    Pr[X_1 >= epsilon] for (X_1..X_n) ~ Dir(alpha); X_1 ~ Beta(alpha, (n - 1) alpha).

    Evaluated as I_{1-eps}((n-1) alpha, alpha), the reflected form of
    1 - I_eps(alpha, (n-1) alpha), which keeps precision when the tail is small.
    """
    n = _dimension(n)
    _require(n >= 2, f"marginal needs n >= 2, got {n}")
    alpha = _finite_positive(alpha, "alpha")
    epsilon = float(epsilon)
    _require(0.0 < epsilon <= 1.0, f"epsilon must lie in (0, 1], got {epsilon!r}")
    return reg_inc_beta((n - 1) * alpha, alpha, 1.0 - epsilon)
