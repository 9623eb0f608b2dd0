"""
Monte-Carlo validation of the analytical estimator moments.

Trials are split into chunks of ``chunk_size``. Chunk i draws from its own PCG64 stream
seeded with ``SeedSequence(seed).spawn(chunks)[i]`` and returns a moment accumulator; the
accumulators are merged in chunk order, so results do not depend on the worker count.
The all-zero codeword is always transmitted (linear code, symmetric channels).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import List, Optional, Union

import numpy as np

from .channels import QMapVariant, SnrDb, bsc_flips, hard_decisions, rho_from_gamma
from .codes import (
    DegreeProfile,
    ParityCheckMatrix,
    build_regular_ldpc,
    degree_profile,
    syndrome_weights_by_degree,
)
from .estimators import SnrClamp, SyndromeObservation, estimate_rho_irregular, f_d, gamma_tilde, rho_hat
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 10_000
DEFAULT_CHUNK_SIZE = 1_000
# upper bound on hard decisions held in memory at once per chunk
BATCH_BITS = 1 << 22


class SyndromeSource(str, Enum):
    """Where syndrome weights come from: a real code, or i.i.d. Binomial draws."""

    CODE = "code"
    IID = "iid"


@dataclass(frozen=True)
class BscChannel:
    rho: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 0.5:
            raise ConfigurationError(f"BSC crossover probability must lie in [0, 1/2], got {self.rho}")

    @property
    def truth(self) -> float:
        return self.rho

    @property
    def crossover(self) -> float:
        return self.rho


@dataclass(frozen=True)
class AwgnChannel:
    gamma: SnrDb
    variant: QMapVariant = QMapVariant.PAPER
    clamp: SnrClamp = field(default_factory=SnrClamp)

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma):
            raise ConfigurationError(f"SNR must be finite, got {self.gamma}")
        object.__setattr__(self, "variant", QMapVariant(self.variant))

    @property
    def truth(self) -> float:
        return self.gamma

    @property
    def crossover(self) -> float:
        return float(rho_from_gamma(self.gamma, self.variant))


@dataclass(frozen=True)
class RegularCodeParams:
    """Parameters for ``build_regular_ldpc``; the matrix is built on demand."""

    n: int
    dv: int
    d: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.dv < 1 or self.d < 1 or (self.n * self.dv) % self.d:
            raise ConfigurationError(f"Invalid regular code parameters n={self.n}, dv={self.dv}, d={self.d}")

    @property
    def m(self) -> int:
        return self.n * self.dv // self.d

    def build(self) -> ParityCheckMatrix:
        return build_regular_ldpc(self.n, self.dv, self.d, self.seed)


Channel = Union[BscChannel, AwgnChannel]


@dataclass(frozen=True)
class SimConfig:
    """
    One Monte-Carlo run. ``code`` may be a bare ``DegreeProfile`` when syndrome weights
    are drawn i.i.d., since no matrix is needed then.
    """

    code: Union[ParityCheckMatrix, RegularCodeParams, DegreeProfile]
    channel: Channel
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    syndrome_source: SyndromeSource = SyndromeSource.CODE
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if self.workers < 1 or self.chunk_size < 1:
            raise ConfigurationError("workers and chunk_size must be >= 1")
        object.__setattr__(self, "syndrome_source", SyndromeSource(self.syndrome_source))
        if isinstance(self.code, DegreeProfile) and self.syndrome_source is SyndromeSource.CODE:
            raise ConfigurationError("Code-source simulation needs a matrix or regular code parameters")

    @cached_property
    def matrix(self) -> ParityCheckMatrix:
        if isinstance(self.code, ParityCheckMatrix):
            return self.code
        if isinstance(self.code, DegreeProfile):
            raise ConfigurationError("A bare degree profile has no parity-check matrix")
        return self.code.build()

    @property
    def profile(self) -> DegreeProfile:
        if isinstance(self.code, DegreeProfile):
            return self.code
        if isinstance(self.code, RegularCodeParams):
            return DegreeProfile.regular(self.code.d, self.code.m)
        return degree_profile(self.code)


@dataclass(frozen=True)
class SampleStats:
    """Sample moments of the estimates; ``mse`` is taken against the true parameter."""

    trials: int
    mean: float
    std: float
    mse: float
    min: float
    max: float
    seed: int

    @property
    def standard_error(self) -> float:
        return self.std / math.sqrt(self.trials)


@dataclass
class MomentAccumulator:
    """Count, mean, centred second moment, squared error and range, mergeable pairwise."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    sse: float = 0.0
    low: float = math.inf
    high: float = -math.inf

    @classmethod
    def from_values(cls, values: np.ndarray, truth: float) -> "MomentAccumulator":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        return cls(
            count=int(values.size),
            mean=mean,
            m2=float(np.sum((values - mean) ** 2)),
            sse=float(np.sum((values - truth) ** 2)),
            low=float(values.min()),
            high=float(values.max()),
        )

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        count = self.count + other.count
        delta = other.mean - self.mean
        return MomentAccumulator(
            count=count,
            mean=self.mean + delta * other.count / count,
            m2=self.m2 + other.m2 + delta * delta * self.count * other.count / count,
            sse=self.sse + other.sse,
            low=min(self.low, other.low),
            high=max(self.high, other.high),
        )

    def to_stats(self, seed: int) -> SampleStats:
        std = math.sqrt(self.m2 / (self.count - 1)) if self.count > 1 else 0.0
        return SampleStats(
            trials=self.count,
            mean=self.mean,
            std=std,
            mse=self.sse / self.count,
            min=self.low,
            max=self.high,
            seed=seed,
        )


def chunk_seeds(seed: int, chunks: int) -> List[np.random.SeedSequence]:
    """Independent seed sequences for ``chunks`` chunks: ``SeedSequence(seed).spawn(chunks)``."""
    return np.random.SeedSequence(seed).spawn(chunks)


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """PCG64 generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def _chunk_sizes(trials: int, chunk_size: int) -> List[int]:
    sizes = [chunk_size] * (trials // chunk_size)
    if trials % chunk_size:
        sizes.append(trials % chunk_size)
    return sizes


def _draw_weights(
    config: SimConfig, profile: DegreeProfile, h: Optional[ParityCheckMatrix], trials: int, rng: np.random.Generator
) -> np.ndarray:
    """(trials, J) per-degree syndrome weights for one chunk."""
    channel = config.channel
    if config.syndrome_source is SyndromeSource.IID:
        rho = channel.crossover
        q = np.array([f_d(rho, degree) for degree in profile.degrees])
        return rng.binomial(np.asarray(profile.counts), q, size=(trials, len(profile)))

    assert h is not None
    step = max(1, BATCH_BITS // h.n)
    parts = []
    for start in range(0, trials, step):
        shape = (min(step, trials - start), h.n)
        if isinstance(channel, BscChannel):
            patterns = bsc_flips(shape, channel.rho, rng)
        else:
            patterns = hard_decisions(np.zeros(shape, dtype=np.uint8), channel.gamma, rng, channel.variant)
        parts.append(syndrome_weights_by_degree(h, patterns))
    return np.concatenate(parts, axis=0)


def _run_chunk(
    config: SimConfig,
    profile: DegreeProfile,
    h: Optional[ParityCheckMatrix],
    trials: int,
    seed: np.random.SeedSequence,
) -> MomentAccumulator:
    rng = make_rng(seed)
    weights = _draw_weights(config, profile, h, trials, rng)
    channel = config.channel
    if isinstance(channel, AwgnChannel):
        estimates = gamma_tilde(weights.sum(axis=1), profile.m, profile.degrees[0], channel.variant, channel.clamp)
    elif profile.is_regular:
        estimates = rho_hat(weights[:, 0], profile.m, profile.degrees[0])
    else:
        estimates = np.array(
            [estimate_rho_irregular(SyndromeObservation.from_weights(profile, tuple(row))) for row in weights]
        )
    return MomentAccumulator.from_values(np.asarray(estimates, dtype=float), channel.truth)


def _run(config: SimConfig) -> SampleStats:
    profile = config.profile
    h = None
    if config.syndrome_source is SyndromeSource.CODE:
        h = config.matrix
        h.csr  # built once before any worker reads it

    sizes = _chunk_sizes(config.trials, config.chunk_size)
    seeds = chunk_seeds(config.seed, len(sizes))
    logger.debug(f"Running {config.trials} trial(s) in {len(sizes)} chunk(s) with {config.workers} worker(s)")

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(lambda args: _run_chunk(config, profile, h, *args), zip(sizes, seeds)))
    else:
        parts = [_run_chunk(config, profile, h, size, seq) for size, seq in zip(sizes, seeds)]

    total = MomentAccumulator()
    for part in parts:
        total = total.merge(part)
    stats = total.to_stats(config.seed)
    logger.info(
        f"{config.trials} trial(s), source={config.syndrome_source.value}: mean={stats.mean} std={stats.std}"
    )
    return stats


def run_bsc_trials(config: SimConfig) -> SampleStats:
    """../../docs/src/syndest/montecarlo/run_bsc_trials.md"""
    if not isinstance(config.channel, BscChannel):
        raise ConfigurationError("run_bsc_trials needs a BSC channel")
    return _run(config)


def run_awgn_trials(config: SimConfig) -> SampleStats:
    """Monte-Carlo moments of the clamped SNR estimator over a BI-AWGN channel."""
    if not isinstance(config.channel, AwgnChannel):
        raise ConfigurationError("run_awgn_trials needs a BI-AWGN channel")
    if not config.profile.is_regular:
        raise ConfigurationError("The SNR estimator needs a check-regular code")
    return _run(config)
