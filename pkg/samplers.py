# samplers.py
"""
Reproducible random streams and log-domain Gamma / Dirichlet variates.

A Dirichlet draw is n i.i.d. Gamma(alpha) variates divided by their sum. At
alpha = 1/n^2 with n = 4096 a typical log Gamma variate is around -1.7e7, so
every value here stays in log domain; exponentiating below -700 underflows.
"""

import logging
import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import special

from errors import DomainError

logger = logging.getLogger(__name__)

UINT64_LIMIT = 2 ** 64
INDEX_BITS = 32
LOG_UNDERFLOW = -700.0
NORMALIZATION_TOLERANCE = 1e-12


class StreamSeed(BaseModel):
    """(master, index) pair identifying one independent random stream."""
    model_config = ConfigDict(frozen=True)

    master: int = Field(ge=0, lt=UINT64_LIMIT)
    index: int = Field(ge=0, lt=UINT64_LIMIT)


class DirichletSpec(BaseModel):
    """Symmetric Dirichlet Dir(alpha) over n coordinates."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    alpha: float = Field(gt=0.0)

    @field_validator("alpha")
    @classmethod
    def _finite_alpha(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"alpha must be finite, got {value!r}")
        return value


class LogSimplexPoint(BaseModel):
    """A Dirichlet draw stored as natural logs of its coordinates."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=1)
    log_coords: np.ndarray

    @field_validator("log_coords", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=np.float64)

    @model_validator(mode="after")
    def _on_simplex(self) -> "LogSimplexPoint":
        coords = self.log_coords
        if coords.shape != (self.n,):
            raise ValueError(f"log_coords must have shape ({self.n},), got {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("log_coords must be finite")
        if np.max(coords) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"log coordinate {np.max(coords)!r} is above 0")
        log_total = float(special.logsumexp(coords))
        if abs(log_total) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"log-sum-exp of coordinates is {log_total!r}, expected 0")
        return self

    @property
    def coords(self) -> np.ndarray:
        """Linear-domain coordinates; entries below e^-700 come back as 0."""
        return np.exp(self.log_coords)


def pair_index(n: int, trial_index: int) -> int:
    """Pack (n, trial_index) into one 64-bit stream index."""
    if not (0 <= n < 2 ** INDEX_BITS) or not (0 <= trial_index < 2 ** INDEX_BITS):
        raise DomainError(
            f"n and trial_index must lie in [0, 2^{INDEX_BITS}), got n={n}, t={trial_index}"
        )
    return (n << INDEX_BITS) | trial_index


def derive_stream(seed: StreamSeed) -> np.random.Generator:
    """
    Deterministic, independent generator for a (master, index) pair.

    The index goes into the SeedSequence spawn key, so neighbouring indices
    and neighbouring masters are hashed into unrelated PCG64 states.
    """
    sequence = np.random.SeedSequence(entropy=seed.master, spawn_key=(seed.index,))
    return np.random.Generator(np.random.PCG64(sequence))


def sample_gamma_log(
    stream: np.random.Generator,
    a: float,
    size: Optional[Union[int, Tuple[int, ...]]] = None,
) -> Union[float, np.ndarray]:
    """
    Log of unit-scale Gamma(a) variates.

    For a >= 1 numpy's Marsaglia-Tsang squeeze sampler is used directly. For
    a < 1 the variate is Y' * U^(1/a) with Y' ~ Gamma(a + 1), computed as
    log Y' + log(U) / a without ever leaving log domain.
    """
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise DomainError(f"Gamma shape must be a finite positive real, got {a!r}")

    if a >= 1.0:
        log_values = np.log(stream.standard_gamma(a, size=size))
    else:
        log_boosted = np.log(stream.standard_gamma(a + 1.0, size=size))
        # U = 1 - random() lies in (0, 1], so log U is finite
        log_uniform = np.log1p(-stream.random(size=size))
        log_values = log_boosted + log_uniform / a

    if size is None:
        return float(log_values)
    return log_values


def normalize_log(log_values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Subtract the log-sum-exp so each slice along `axis` sums to 1 in linear domain."""
    log_values = np.asarray(log_values, dtype=np.float64)
    # shift by the max first so the subtraction of the total is done on O(1) values
    shifted = log_values - np.max(log_values, axis=axis, keepdims=True)
    return shifted - special.logsumexp(shifted, axis=axis, keepdims=True)


def sample_dirichlet_log(stream: np.random.Generator, spec: DirichletSpec) -> LogSimplexPoint:
    """One Dir(alpha) draw as a LogSimplexPoint, via Gamma normalization."""
    log_gammas = sample_gamma_log(stream, spec.alpha, size=spec.n)
    return LogSimplexPoint(n=spec.n, log_coords=normalize_log(log_gammas))


def sample_dirichlet_log_batch(
    stream: np.random.Generator,
    spec: DirichletSpec,
    size: int,
) -> np.ndarray:
    """`size` draws at once; returns a (size, n) array whose rows are log-simplex points."""
    if size < 1:
        raise DomainError(f"size must be >= 1, got {size}")
    log_gammas = sample_gamma_log(stream, spec.alpha, size=(size, spec.n))
    return normalize_log(log_gammas, axis=1)


def sparsity_count_log(log_coords: np.ndarray, log_epsilon: float) -> int:
    """Number of coordinates with log X_i >= log_epsilon (inclusive)."""
    return int(np.count_nonzero(np.asarray(log_coords) >= log_epsilon))


def sparsity_count(point: LogSimplexPoint, epsilon: float) -> int:
    """|{i : X_i >= epsilon}|, compared in log domain."""
    epsilon = float(epsilon)
    if math.isnan(epsilon) or not (0.0 < epsilon <= 1.0):
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    return sparsity_count_log(point.log_coords, math.log(epsilon))


def log_moment(log_values: Sequence[float], order: float = 1.0) -> float:
    """
    ln of the sample mean of exp(order * log_values).

    Max-shifted and summed with math.fsum, so batches whose linear values all
    underflow still give a usable estimate.
    """
    scaled = order * np.asarray(log_values, dtype=np.float64).ravel()
    if scaled.size == 0:
        raise DomainError("log_moment needs at least one value")
    peak = float(np.max(scaled))
    total = math.fsum(np.exp(scaled - peak))
    return peak + math.log(total) - math.log(scaled.size)
