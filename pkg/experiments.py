# experiments.py
"""
Monte Carlo harness and numeric proof-step checks.

Part A: simulation protocol
- run_trials: one Dirichlet draw per (n, trial), sparsity counts per threshold n^-c
- quantile_curves: 25/50/75 percentiles per (n, c), optionally scaled by ln n
- verify_bound / verify_experiment: score-interval test of each theorem bound

Part B: proof-step checks
- check_gamma_blowup: Pr[Gamma(a) <= zc] <= z^a Pr[Gamma(a) <= c]
- check_threshold_construction: the chain at the constructed threshold c and its n-fold aggregation
- check_chernoff_step: exact binomial tails against exp(-4np/3)
- check_event_decomposition: the two-event argument behind the main lemma, simulated
"""

import logging
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import stats

from bounds import (
    BoundResult,
    SparsityEvent,
    chernoff_tail_bound,
    helper_bound,
    power_weakening_gap,
    theorem1_bound,
    theorem2_bound,
    theorem3_bound,
)
from config import (
    CONFIDENCE_LEVEL,
    DEFAULT_ALPHA_MODE,
    DEFAULT_MASTER_SEED,
    DEFAULT_N_GRID,
    DEFAULT_THRESHOLD_EXPONENTS,
    DEFAULT_TRIALS,
    NUMERIC_SLACK,
    RERUN_TRIAL_FACTOR,
    WORKERS,
)
from errors import (
    DirsparseError,
    DomainError,
    PreconditionError,
    RecordMismatchError,
    TrialError,
)
from samplers import (
    DirichletSpec,
    StreamSeed,
    derive_stream,
    normalize_log,
    pair_index,
    sample_dirichlet_log,
    sample_gamma_log,
    sparsity_count_log,
)
from special_functions import inverse_upper_tail, reg_lower_inc_gamma

logger = logging.getLogger(__name__)

AlphaMode = Literal["inverse_n", "inverse_n_squared", "fixed"]
ALPHA_MODES = ("inverse_n", "inverse_n_squared", "fixed")

TRIAL_CHUNK = 256
SCALING_RATIO_LIMIT = 3.0
SINGLE_COORDINATE_MIN_N = 16
CHERNOFF_ROUNDING = 1e-9
CONSISTENCY_CONFIDENCE = 0.999

# Default proof-check grids
BLOWUP_SHAPES = [1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0]
BLOWUP_Z = [1.0, 1.5, 2.0, 5.0, 10.0, 100.0]
BLOWUP_C = [0.0, 0.01, 0.1, 1.0, 5.0, 50.0]
THRESHOLD_GRID = [
    # (alpha, k, n, epsilon)
    (1.0, 2, 4, 0.5),
    (1.0, 2, 4, 1.0),
    (0.5, 10, 20, 0.1),
    (0.01, 5, 30, 0.01),
    (1e-4, 5, 100, 1e-4),
    (1.0 / 64, 12, 64, 1.0 / 64),
    (1.0 / 256 ** 2, 5, 256, 1.0 / 256 ** 2),
]
CHERNOFF_GRID = [
    # (n, p)
    (30, 0.1),
    (300, 6.0 / 900.0),
    (100, 0.05),
    (1000, 0.01),
    (50, 0.4),
]
CHERNOFF_TRIALS = 20_000
DECOMPOSITION_GRID = [
    # (alpha, k, n, epsilon)
    (0.1, 5, 50, 0.01),
    (1.0 / 64, 12, 64, 1.0 / 64),
    (1.0 / 256 ** 2, 5, 256, 1.0 / 256 ** 2),
]
DECOMPOSITION_TRIALS = 2_000
POWER_WEAKENING_N = list(range(1, 10_001))


# ==================== CONFIGURATION AND RECORDS ====================

class ExperimentConfig(BaseModel):
    """Parameters of one simulation run (one alpha regime over an n grid)."""
    model_config = ConfigDict(frozen=True)

    alpha_mode: AlphaMode = DEFAULT_ALPHA_MODE
    alpha_value: Optional[float] = Field(default=None, gt=0.0)
    n_grid: List[int] = Field(default_factory=lambda: list(DEFAULT_N_GRID))
    threshold_exponents: List[float] = Field(default_factory=lambda: list(DEFAULT_THRESHOLD_EXPONENTS))
    trials: int = Field(default=DEFAULT_TRIALS, ge=1)
    master_seed: int = Field(default=DEFAULT_MASTER_SEED, ge=0, lt=2 ** 64)
    workers: int = Field(default=WORKERS, ge=1)

    @field_validator("n_grid")
    @classmethod
    def _increasing_grid(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("n_grid must not be empty")
        if any(n < 1 for n in value):
            raise ValueError(f"n_grid entries must be >= 1, got {value}")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"n_grid must be strictly increasing, got {value}")
        return value

    @field_validator("threshold_exponents")
    @classmethod
    def _positive_exponents(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("threshold_exponents must not be empty")
        if any(not math.isfinite(c) or c <= 0.0 for c in value):
            raise ValueError(f"threshold exponents must be finite and > 0, got {value}")
        if len(set(value)) != len(value):
            raise ValueError(f"threshold exponents must be distinct, got {value}")
        return value

    @model_validator(mode="after")
    def _fixed_needs_value(self) -> "ExperimentConfig":
        if self.alpha_mode == "fixed" and self.alpha_value is None:
            raise ValueError("alpha_mode 'fixed' requires alpha_value")
        return self

    def alpha_for(self, n: int) -> float:
        """Dirichlet shape used at dimension n."""
        if self.alpha_mode == "inverse_n":
            return 1.0 / n
        if self.alpha_mode == "inverse_n_squared":
            return 1.0 / (n * n)
        return float(self.alpha_value)


class TrialRecord(BaseModel):
    """Sparsity counts of one Dirichlet draw, keyed by threshold exponent c (epsilon = n^-c)."""
    model_config = ConfigDict(frozen=True)

    alpha_mode: str
    n: int = Field(ge=1)
    alpha: float = Field(gt=0.0)
    trial_index: int = Field(ge=0)
    stream_index: int = Field(ge=0)
    counts: Dict[float, int]

    @model_validator(mode="after")
    def _counts_nondecreasing(self) -> "TrialRecord":
        # larger c means a smaller threshold, so counts can only grow
        ordered = [self.counts[c] for c in sorted(self.counts)]
        if any(b < a for a, b in zip(ordered, ordered[1:])):
            raise ValueError(f"counts must be nondecreasing in the exponent, got {self.counts}")
        return self


class QuantileCurve(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha_mode: str
    n: int
    threshold_exponent: float
    q25: float
    q50: float
    q75: float
    scaled_by_log_n: bool
    trials: int

    @model_validator(mode="after")
    def _ordered(self) -> "QuantileCurve":
        if not (self.q25 <= self.q50 <= self.q75):
            raise ValueError(f"quantiles out of order: {self.q25}, {self.q50}, {self.q75}")
        return self


class BoundVerdict(BaseModel):
    """Outcome of testing one probability lower bound against simulated trials."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    bound_name: str
    alpha_mode: str = ""
    threshold_exponent: Optional[float] = None
    event: SparsityEvent
    theoretical_lower_bound: float
    trials: int
    successes: int
    empirical_success_rate: float = Field(ge=0.0, le=1.0)
    confidence_lower: float
    passed: bool = Field(alias="pass")
    resolvable: bool = True
    rerun: bool = False


# ==================== TRIALS ====================

def _run_trial(config: ExperimentConfig, n: int, trial_index: int) -> TrialRecord:
    index = pair_index(n, trial_index)
    stream = derive_stream(StreamSeed(master=config.master_seed, index=index))
    spec = DirichletSpec(n=n, alpha=config.alpha_for(n))
    try:
        point = sample_dirichlet_log(stream, spec)
    except (DirsparseError, ValueError) as e:
        raise TrialError(f"Trial failed for n={n}, t={trial_index}: {e}") from e

    log_n = math.log(n)
    counts = {
        c: sparsity_count_log(point.log_coords, -c * log_n)
        for c in config.threshold_exponents
    }
    return TrialRecord(
        alpha_mode=config.alpha_mode,
        n=n,
        alpha=spec.alpha,
        trial_index=trial_index,
        stream_index=index,
        counts=counts,
    )


def _run_chunk(config: ExperimentConfig, jobs: Sequence[Tuple[int, int]]) -> List[TrialRecord]:
    return [_run_trial(config, n, t) for n, t in jobs]


def run_trials(
    config: ExperimentConfig,
    n_values: Optional[Iterable[int]] = None,
    trial_indices: Optional[Iterable[int]] = None,
) -> List[TrialRecord]:
    """
    Draw one Dirichlet sample per (n, t) and record its sparsity counts.

    Each trial owns the stream derive_stream({master_seed, pair_index(n, t)}),
    so the result does not depend on the worker count or scheduling order.
    Records come back sorted by (n, trial_index).
    """
    n_values = list(config.n_grid if n_values is None else n_values)
    trial_indices = list(range(config.trials) if trial_indices is None else trial_indices)
    jobs = [(n, t) for n in n_values for t in trial_indices]
    chunks = [jobs[i:i + TRIAL_CHUNK] for i in range(0, len(jobs), TRIAL_CHUNK)]

    logger.info(
        f"Running {len(jobs)} trials ({config.alpha_mode}, n in {n_values}, "
        f"seed={config.master_seed}, workers={config.workers})"
    )

    if config.workers == 1 or len(chunks) <= 1:
        results = [_run_chunk(config, chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda chunk: _run_chunk(config, chunk), chunks))

    records = [record for chunk in results for record in chunk]
    records.sort(key=lambda r: (r.n, r.trial_index))
    return records


# ==================== QUANTILES ====================

def quantile_curves(records: Sequence[TrialRecord], scale_by_log_n: bool) -> List[QuantileCurve]:
    """
    25/50/75 percentiles per (alpha_mode, n, c), linear interpolation between order statistics.

    With scale_by_log_n the counts are divided by ln n first; n = 1 is rejected there.
    """
    if not records:
        raise DomainError("quantile_curves needs at least one record")

    cells: Dict[Tuple[str, int, float], List[int]] = defaultdict(list)
    for record in records:
        for c, count in record.counts.items():
            cells[(record.alpha_mode, record.n, c)].append(count)

    curves = []
    for (alpha_mode, n, c), counts in sorted(cells.items()):
        values = np.asarray(counts, dtype=np.float64)
        if scale_by_log_n:
            if n < 2:
                raise DomainError(f"cannot scale counts by ln(n) at n={n}")
            values = values / math.log(n)
        q25, q50, q75 = np.percentile(values, [25.0, 50.0, 75.0], method="linear")
        curves.append(QuantileCurve(
            alpha_mode=alpha_mode,
            n=n,
            threshold_exponent=c,
            q25=float(q25),
            q50=float(q50),
            q75=float(q75),
            scaled_by_log_n=scale_by_log_n,
            trials=len(counts),
        ))
    return curves


# ==================== BOUND VERIFICATION ====================

def score_lower_limit(successes: int, trials: int, confidence: float = CONFIDENCE_LEVEL) -> float:
    """One-sided Wilson score lower confidence limit for a binomial proportion."""
    if trials < 1 or not (0 <= successes <= trials):
        raise DomainError(f"invalid binomial counts: {successes}/{trials}")
    z = float(stats.norm.ppf(confidence))
    rate = successes / trials
    z2n = z * z / trials
    center = rate + z2n / 2.0
    spread = z * math.sqrt(rate * (1.0 - rate) / trials + z2n / (4.0 * trials))
    return max(0.0, (center - spread) / (1.0 + z2n))


def _exponent_for(records: Sequence[TrialRecord], event: SparsityEvent) -> float:
    log_n = math.log(event.n)
    for c in records[0].counts:
        if math.isclose(math.exp(-c * log_n), event.epsilon, rel_tol=1e-9):
            return c
    raise RecordMismatchError(
        f"records carry no count at epsilon={event.epsilon!r} for n={event.n}"
    )


def verify_bound(
    records: Sequence[TrialRecord],
    event: SparsityEvent,
    theoretical: BoundResult,
    threshold_exponent: Optional[float] = None,
    slack: float = NUMERIC_SLACK,
) -> BoundVerdict:
    """
    Test Pr[count <= k] >= theoretical.lower_bound on simulated records.

    The verdict passes when the one-sided 99% score lower limit of the success
    rate is at least the bound minus the numeric slack. Bounds the trial count
    cannot resolve (above the all-success limit) are marked resolvable=False
    and judged by an exact binomial test of the failure count at level 1%.
    """
    if not theoretical.preconditions_met or theoretical.lower_bound is None:
        raise PreconditionError(f"bound '{theoretical.name}' is not applicable: preconditions not met")
    if not records:
        raise DomainError("verify_bound needs at least one record")

    for record in records:
        if record.n != event.n or (
            event.alpha is not None and not math.isclose(record.alpha, event.alpha, rel_tol=1e-12)
        ):
            raise RecordMismatchError(
                f"record (n={record.n}, alpha={record.alpha}) does not match "
                f"event (n={event.n}, alpha={event.alpha})"
            )

    if threshold_exponent is None:
        threshold_exponent = _exponent_for(records, event)

    successes = sum(1 for r in records if r.counts[threshold_exponent] <= event.k)
    trials = len(records)
    confidence_lower = score_lower_limit(successes, trials)
    target = theoretical.lower_bound - slack
    passed = confidence_lower >= target

    # with every trial a success the limit is 1 / (1 + z^2 / trials); bounds above
    # that ceiling fall back to an exact binomial test on the failure count
    resolvable = score_lower_limit(trials, trials) >= target
    if not passed and not resolvable:
        failures = trials - successes
        p_value = float(stats.binom.sf(failures - 1, trials, 1.0 - theoretical.lower_bound))
        passed = p_value >= 1.0 - CONFIDENCE_LEVEL

    return BoundVerdict(
        bound_name=theoretical.name,
        alpha_mode=records[0].alpha_mode,
        threshold_exponent=threshold_exponent,
        event=event,
        theoretical_lower_bound=theoretical.lower_bound,
        trials=trials,
        successes=successes,
        empirical_success_rate=successes / trials,
        confidence_lower=confidence_lower,
        passed=passed,
        resolvable=resolvable,
    )


def bound_events_for(config: ExperimentConfig, n: int, exponent: float) -> List[BoundResult]:
    """Applicable bounds for the cell (n, epsilon = n^-exponent) of a run."""
    if config.alpha_mode == "inverse_n":
        candidates = [
            theorem1_bound(n, exponent),
            theorem2_bound(n, 1.0, 6.0 * exponent, exponent),
        ]
    elif config.alpha_mode == "inverse_n_squared":
        candidates = [helper_bound(float(n) ** -exponent, config.alpha_for(n), 5.0, n)]
        if exponent == 2.0:
            candidates.append(theorem3_bound(n))
    else:
        k = 6.0 * exponent * math.log(n)
        candidates = [helper_bound(float(n) ** -exponent, config.alpha_for(n), k, n)]
    return [bound for bound in candidates if bound.preconditions_met]


def verify_experiment(config: ExperimentConfig, records: Sequence[TrialRecord]) -> List[BoundVerdict]:
    """
    Verdicts for every applicable bound in every (n, c) cell.

    A failing cell is rerun once with RERUN_TRIAL_FACTOR times the trials on
    fresh trial indices [trials, (1 + factor) * trials); the rerun decides.
    """
    by_n: Dict[int, List[TrialRecord]] = defaultdict(list)
    for record in records:
        by_n[record.n].append(record)

    rerun_cache: Dict[int, List[TrialRecord]] = {}
    verdicts = []
    for n in config.n_grid:
        for c in config.threshold_exponents:
            for bound in bound_events_for(config, n, c):
                verdict = verify_bound(by_n[n], bound.event, bound, threshold_exponent=c)
                if not verdict.passed:
                    logger.warning(
                        f"{bound.name} failed at n={n}, c={c} "
                        f"(lower limit {verdict.confidence_lower:.4f} < {verdict.theoretical_lower_bound:.4f}); "
                        f"rerunning with {RERUN_TRIAL_FACTOR}x trials"
                    )
                    if n not in rerun_cache:
                        fresh = range(config.trials, (1 + RERUN_TRIAL_FACTOR) * config.trials)
                        rerun_cache[n] = run_trials(config, n_values=[n], trial_indices=fresh)
                    verdict = verify_bound(rerun_cache[n], bound.event, bound, threshold_exponent=c)
                    verdict = verdict.model_copy(update={"rerun": True})
                    if not verdict.passed:
                        logger.error(f"{bound.name} failed at n={n}, c={c} after rerun")
                verdicts.append(verdict)
    return verdicts


# ==================== OBSERVATIONS ====================

class ScalingReport(BaseModel):
    """Median counts scaled by ln n: flat across n, nondecreasing in c."""
    median_ratio_by_exponent: Dict[float, float]
    nondecreasing_in_exponent: bool
    holds: bool


class SingleCoordinateReport(BaseModel):
    """Median count at epsilon = n^-2 per n in the alpha = 1/n^2 regime."""
    median_by_n: Dict[int, float]
    holds: bool


def check_log_scaling(curves: Sequence[QuantileCurve], ratio_limit: float = SCALING_RATIO_LIMIT) -> ScalingReport:
    """max / min of the scaled medians per exponent, and monotonicity of medians in c per n."""
    medians: Dict[float, Dict[int, float]] = defaultdict(dict)
    for curve in curves:
        medians[curve.threshold_exponent][curve.n] = curve.q50

    ratios = {}
    for c, by_n in sorted(medians.items()):
        low, high = min(by_n.values()), max(by_n.values())
        ratios[c] = high / low if low > 0.0 else math.inf

    exponents = sorted(medians)
    n_values = sorted({curve.n for curve in curves})
    monotone = all(
        medians[a][n] <= medians[b][n]
        for n in n_values
        for a, b in zip(exponents, exponents[1:])
        if n in medians[a] and n in medians[b]
    )
    holds = monotone and all(ratio <= ratio_limit for ratio in ratios.values())
    return ScalingReport(median_ratio_by_exponent=ratios, nondecreasing_in_exponent=monotone, holds=holds)


def observe_single_coordinate(
    records: Sequence[TrialRecord],
    exponent: float = 2.0,
    min_n: int = SINGLE_COORDINATE_MIN_N,
) -> SingleCoordinateReport:
    """Whether alpha = 1/n^2 leaves a single coordinate above n^-2 in the median trial."""
    counts: Dict[int, List[int]] = defaultdict(list)
    for record in records:
        if exponent in record.counts:
            counts[record.n].append(record.counts[exponent])

    medians = {n: float(np.median(values)) for n, values in sorted(counts.items())}
    holds = all(median == 1.0 for n, median in medians.items() if n >= min_n)
    if not holds:
        logger.warning(f"Median count at epsilon=n^-{exponent} is not 1 for every n >= {min_n}: {medians}")
    return SingleCoordinateReport(median_by_n=medians, holds=holds)


class ExperimentReport(BaseModel):
    config: ExperimentConfig
    records: List[TrialRecord]
    curves: List[QuantileCurve]
    verdicts: List[BoundVerdict]
    scaling: Optional[ScalingReport] = None
    single_coordinate: Optional[SingleCoordinateReport] = None

    @property
    def all_passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)


def reproduce_figure(config: ExperimentConfig) -> ExperimentReport:
    """
    Full simulation protocol for one alpha regime.

    Counts are scaled by ln n in the inverse_n regime (when every n >= 2);
    observations are logged, verdicts decide `all_passed`.
    """
    records = run_trials(config)
    scale = config.alpha_mode == "inverse_n" and min(config.n_grid) >= 2
    curves = quantile_curves(records, scale_by_log_n=scale)
    verdicts = verify_experiment(config, records)

    scaling = None
    single_coordinate = None
    if scale:
        scaling = check_log_scaling(curves)
        if not scaling.holds:
            logger.warning(f"ln(n) scaling observation did not hold: {scaling.median_ratio_by_exponent}")
    if config.alpha_mode == "inverse_n_squared":
        single_coordinate = observe_single_coordinate(records)

    failed = [v for v in verdicts if not v.passed]
    logger.info(f"{len(verdicts)} verdicts, {len(failed)} failed")
    return ExperimentReport(
        config=config,
        records=records,
        curves=curves,
        verdicts=verdicts,
        scaling=scaling,
        single_coordinate=single_coordinate,
    )


# ==================== PROOF-STEP CHECKS ====================

class BlowupRow(BaseModel):
    shape: float
    z: float
    c: float
    violation: float


class BlowupReport(BaseModel):
    rows: List[BlowupRow]
    max_violation: float
    holds: bool


class ThresholdReport(BaseModel):
    """Links of the threshold chain at c with Pr[Gamma(alpha) >= c] = (k + 1) / (3n)."""
    alpha: float
    k: float
    n: int
    epsilon: float
    c: float
    tail_probability: float
    blown_up_cdf: float          # Pr[Gamma <= c / eps]
    scaled_cdf: float            # eps^-alpha Pr[Gamma <= c]
    scaled_complement: float     # eps^-alpha (1 - (k + 1) / (3n))
    exponential_ceiling: float   # eps^-alpha e^(-(k + 1) / (3n))
    aggregated: float            # Pr[Gamma <= c / eps]^n
    aggregated_ceiling: float    # eps^(-n alpha) e^(-(k + 1) / 3)
    max_gap: float
    holds: bool


class ChernoffReport(BaseModel):
    n: int
    p: float
    threshold: int
    exact_tail: float
    chernoff_bound: float
    trials: int
    empirical_tail: float
    empirical_consistent: bool
    holds: bool


class DecompositionReport(BaseModel):
    alpha: float
    k: float
    n: int
    epsilon: float
    c: float
    trials: int
    not_a_rate: float
    not_a_bound: float
    not_b_rate: float
    not_b_bound: float
    a_and_b_rate: float
    sparse_rate: float
    implication_violations: int
    holds: bool


class ProofCheckReport(BaseModel):
    slack: float
    blowup: BlowupReport
    thresholds: List[ThresholdReport]
    chernoff: List[ChernoffReport]
    decompositions: List[DecompositionReport]
    min_power_weakening_gap: float

    @property
    def all_within_slack(self) -> bool:
        return (
            self.blowup.holds
            and all(r.holds for r in self.thresholds)
            and all(r.holds for r in self.chernoff)
            and all(r.holds for r in self.decompositions)
            and self.min_power_weakening_gap >= -self.slack
        )


def check_gamma_blowup(
    shape_grid: Sequence[float] = BLOWUP_SHAPES,
    z_grid: Sequence[float] = BLOWUP_Z,
    c_grid: Sequence[float] = BLOWUP_C,
    slack: float = NUMERIC_SLACK,
) -> BlowupReport:
    """Evaluate P(a, zc) - z^a P(a, c) over the grid; the maximum must stay below the slack."""
    rows = []
    for shape in shape_grid:
        for z in z_grid:
            if z < 1.0:
                raise DomainError(f"z must be >= 1, got {z}")
            for c in c_grid:
                violation = reg_lower_inc_gamma(shape, z * c) - math.exp(shape * math.log(z)) * reg_lower_inc_gamma(shape, c)
                rows.append(BlowupRow(shape=shape, z=z, c=c, violation=violation))

    max_violation = max(row.violation for row in rows)
    return BlowupReport(rows=rows, max_violation=max_violation, holds=max_violation <= slack)


def check_threshold_construction(
    alpha: float,
    k: float,
    n: int,
    epsilon: float,
    slack: float = NUMERIC_SLACK,
) -> ThresholdReport:
    """
    Construct c from the upper tail and evaluate every link of the chain

        P(c/eps) <= eps^-a P(c) = eps^-a (1 - p) <= eps^-a e^-p,   p = (k + 1) / (3n)

    plus its n-fold aggregation P(c/eps)^n <= eps^(-n a) e^(-(k + 1)/3).
    """
    if not (k + 1 < 3 * n):
        raise PreconditionError(f"threshold construction needs k + 1 < 3n, got k={k}, n={n}")
    if not (0.0 < epsilon <= 1.0):
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon!r}")

    p = (k + 1.0) / (3.0 * n)
    c = inverse_upper_tail(alpha, p)
    blow = math.exp(-alpha * math.log(epsilon))

    blown_up_cdf = reg_lower_inc_gamma(alpha, c / epsilon)
    scaled_cdf = blow * reg_lower_inc_gamma(alpha, c)
    scaled_complement = blow * (1.0 - p)
    exponential_ceiling = blow * math.exp(-p)
    aggregated = math.exp(n * math.log(blown_up_cdf)) if blown_up_cdf > 0.0 else 0.0
    aggregated_ceiling = math.exp(-n * alpha * math.log(epsilon) - (k + 1.0) / 3.0)

    gaps = [
        blown_up_cdf - scaled_cdf,
        abs(scaled_cdf - scaled_complement),
        scaled_complement - exponential_ceiling,
        aggregated - aggregated_ceiling,
    ]
    max_gap = max(gaps)
    return ThresholdReport(
        alpha=alpha,
        k=k,
        n=n,
        epsilon=epsilon,
        c=c,
        tail_probability=p,
        blown_up_cdf=blown_up_cdf,
        scaled_cdf=scaled_cdf,
        scaled_complement=scaled_complement,
        exponential_ceiling=exponential_ceiling,
        aggregated=aggregated,
        aggregated_ceiling=aggregated_ceiling,
        max_gap=max_gap,
        holds=max_gap <= slack,
    )


def binomial_upper_tail(n: int, p: float, threshold: int) -> float:
    """Pr[Binomial(n, p) >= threshold] by direct summation of the pmf."""
    if threshold > n:
        return 0.0
    if threshold <= 0:
        return 1.0
    support = np.arange(threshold, n + 1)
    return math.fsum(stats.binom.pmf(support, n, p))


def check_chernoff_step(
    n: int,
    p: float,
    trials: int = CHERNOFF_TRIALS,
    seed: int = DEFAULT_MASTER_SEED,
    slack: float = NUMERIC_SLACK,
) -> ChernoffReport:
    """Exact Pr[Bin(n, p) >= ceil(3np)] against exp(-4np/3), plus a simulated frequency."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    if trials < 10_000:
        raise DomainError(f"check_chernoff_step needs at least 10^4 trials, got {trials}")

    # 3np for p = (k + 1) / (3n) lands an ulp above k + 1
    threshold = math.ceil(3.0 * n * p - CHERNOFF_ROUNDING)
    exact_tail = binomial_upper_tail(n, p, threshold)
    bound = chernoff_tail_bound(n, p)

    stream = derive_stream(StreamSeed(master=seed, index=pair_index(n, 0)))
    hits = int(np.count_nonzero(stream.binomial(n, p, size=trials) >= threshold))
    interval = stats.binomtest(hits, trials).proportion_ci(
        confidence_level=CONSISTENCY_CONFIDENCE, method="wilson"
    )
    consistent = interval.low - slack <= exact_tail <= interval.high + slack

    return ChernoffReport(
        n=n,
        p=p,
        threshold=threshold,
        exact_tail=exact_tail,
        chernoff_bound=bound,
        trials=trials,
        empirical_tail=hits / trials,
        empirical_consistent=consistent,
        holds=exact_tail <= bound + slack and consistent,
    )


def check_event_decomposition(
    alpha: float,
    k: float,
    n: int,
    epsilon: float,
    trials: int = DECOMPOSITION_TRIALS,
    seed: int = DEFAULT_MASTER_SEED,
) -> DecompositionReport:
    """
    Simulate the two events the main lemma is built from, at the constructed c:

        A = [some Y_i >= c / eps]        B = [at least n - k of the Y_i are <= c]

    A and B together force at most k normalized coordinates >= eps on every
    trial. Pr[not A] and Pr[not B] must be compatible with their bounds
    eps^(-n a) e^(-(k+1)/3) and e^(-4(k+1)/9).
    """
    if not (k + 1 < 3 * n):
        raise PreconditionError(f"event decomposition needs k + 1 < 3n, got k={k}, n={n}")

    c = inverse_upper_tail(alpha, (k + 1.0) / (3.0 * n))
    log_c = math.log(c)
    log_epsilon = math.log(epsilon)

    stream = derive_stream(StreamSeed(master=seed, index=pair_index(n, 1)))
    log_y = sample_gamma_log(stream, alpha, size=(trials, n))

    event_a = np.any(log_y >= log_c - log_epsilon, axis=1)
    event_b = np.count_nonzero(log_y <= log_c, axis=1) >= n - k
    sparse = np.count_nonzero(normalize_log(log_y, axis=1) >= log_epsilon, axis=1) <= k
    both = event_a & event_b
    violations = int(np.count_nonzero(both & ~sparse))

    not_a = int(np.count_nonzero(~event_a))
    not_b = int(np.count_nonzero(~event_b))
    not_a_bound = min(1.0, math.exp(-n * alpha * log_epsilon - (k + 1.0) / 3.0))
    not_b_bound = math.exp(-4.0 * (k + 1.0) / 9.0)
    # a bound is contradicted only when even the lower confidence limit exceeds it
    a_ok = score_lower_limit(not_a, trials) <= not_a_bound
    b_ok = score_lower_limit(not_b, trials) <= not_b_bound

    return DecompositionReport(
        alpha=alpha,
        k=k,
        n=n,
        epsilon=epsilon,
        c=c,
        trials=trials,
        not_a_rate=not_a / trials,
        not_a_bound=not_a_bound,
        not_b_rate=not_b / trials,
        not_b_bound=not_b_bound,
        a_and_b_rate=float(np.mean(both)),
        sparse_rate=float(np.mean(sparse)),
        implication_violations=violations,
        holds=violations == 0 and a_ok and b_ok,
    )


def check_proofs(slack: float = NUMERIC_SLACK, seed: int = DEFAULT_MASTER_SEED) -> ProofCheckReport:
    """Run every proof-step check over the default grids."""
    logger.info(f"Checking proof steps (slack={slack:g}, seed={seed})")
    blowup = check_gamma_blowup(slack=slack)
    thresholds = [check_threshold_construction(a, k, n, eps, slack=slack) for a, k, n, eps in THRESHOLD_GRID]
    chernoff = [check_chernoff_step(n, p, seed=seed, slack=slack) for n, p in CHERNOFF_GRID]
    decompositions = [check_event_decomposition(a, k, n, eps, seed=seed) for a, k, n, eps in DECOMPOSITION_GRID]
    min_gap = min(power_weakening_gap(n) for n in POWER_WEAKENING_N)

    return ProofCheckReport(
        slack=slack,
        blowup=blowup,
        thresholds=thresholds,
        chernoff=chernoff,
        decompositions=decompositions,
        min_power_weakening_gap=min_gap,
    )
