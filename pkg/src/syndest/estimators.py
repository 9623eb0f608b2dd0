"""
Maximum-likelihood estimators of the crossover probability and the SNR from a syndrome weight.

All functions are pure. The ``rho_hat``/``gamma_tilde`` helpers evaluate the regular
estimators for whole arrays of weights and are shared by the analysis and Monte-Carlo code.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import optimize, special

from .channels import ArrayOrFloat, CrossoverProb, QMapVariant, SnrDb, gamma_from_rho
from .codes import BitVector, DegreeProfile, ParityCheckMatrix, degree_profile, per_degree_weights
from .exceptions import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

GRID_POINTS = 1001
# rho' is kept this far away from 0 and 1/2 inside log-likelihood evaluations
BOUNDARY_GUARD = 1e-15


@dataclass(frozen=True)
class SyndromeObservation:
    """Syndrome weight ``w`` out of ``m`` checks, optionally split by check degree."""

    w: int
    m: int
    profile: Optional[DegreeProfile] = None
    per_degree_weights: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ConfigurationError(f"Syndrome length must be positive, got {self.m}")
        if not 0 <= self.w <= self.m:
            raise ConfigurationError(f"Syndrome weight {self.w} outside [0, {self.m}]")
        if self.profile is not None and self.profile.m != self.m:
            raise ConfigurationError(f"Profile covers {self.profile.m} checks, observation has {self.m}")
        if self.per_degree_weights is not None:
            if self.profile is None:
                raise ConfigurationError("Per-degree weights need a degree profile")
            weights = tuple(int(x) for x in self.per_degree_weights)
            if len(weights) != len(self.profile):
                raise ConfigurationError(f"Expected {len(self.profile)} per-degree weights, got {len(weights)}")
            for (degree, count), wj in zip(self.profile, weights):
                if not 0 <= wj <= count:
                    raise ConfigurationError(f"Weight {wj} for degree {degree} outside [0, {count}]")
            if sum(weights) != self.w:
                raise ConfigurationError(f"Per-degree weights sum to {sum(weights)}, not {self.w}")
            object.__setattr__(self, "per_degree_weights", weights)

    @classmethod
    def regular(cls, w: int, m: int, d: int) -> "SyndromeObservation":
        return cls(w=w, m=m, profile=DegreeProfile.regular(d, m), per_degree_weights=(w,))

    @classmethod
    def from_weights(cls, profile: DegreeProfile, weights: Tuple[int, ...]) -> "SyndromeObservation":
        return cls(w=sum(weights), m=profile.m, profile=profile, per_degree_weights=tuple(weights))


@dataclass(frozen=True)
class SnrClamp:
    """Interval [gamma_min, gamma_max] (dB) the SNR estimate is restricted to."""

    gamma_min: SnrDb = -10.0
    gamma_max: SnrDb = 10.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.gamma_min) and np.isfinite(self.gamma_max)):
            raise ConfigurationError("SNR clamp bounds must be finite")
        if not self.gamma_min < self.gamma_max:
            raise ConfigurationError(f"gamma_min={self.gamma_min} must be below gamma_max={self.gamma_max}")


def observe(h: ParityCheckMatrix, s: BitVector) -> SyndromeObservation:
    """Build the observation (weight, profile, per-degree weights) for syndrome ``s`` of ``h``."""
    profile = degree_profile(h)
    return SyndromeObservation.from_weights(profile, per_degree_weights(h, s))


def f_d(rho: ArrayOrFloat, d: int) -> ArrayOrFloat:
    """Probability (1 - (1-2 rho)^d) / 2 that a degree-d check is violated."""
    if d < 1:
        raise ConfigurationError(f"Check degree must be >= 1, got {d}")
    r = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        q = -np.expm1(d * np.log1p(-2.0 * r)) / 2.0
    return float(q) if np.ndim(rho) == 0 else q


def f_d_inverse(q: ArrayOrFloat, d: int) -> ArrayOrFloat:
    """Inverse of ``f_d``: (1 - (1-2q)^(1/d)) / 2 for q in [0, 1/2]."""
    if d < 1:
        raise ConfigurationError(f"Check degree must be >= 1, got {d}")
    qq = np.asarray(q, dtype=float)
    if np.any(qq > 0.5) or np.any(qq < 0.0):
        raise DomainError(f"f_d inverse is defined on [0, 1/2], got {q}")
    with np.errstate(divide="ignore"):
        rho = -np.expm1(np.log1p(-2.0 * qq) / d) / 2.0
    return float(rho) if np.ndim(q) == 0 else rho


def rho_hat(w: ArrayOrFloat, m: int, d: int) -> ArrayOrFloat:
    """Closed-form ML estimate of rho for weight(s) ``w`` of a length-m, degree-d syndrome."""
    q = np.minimum(np.asarray(w, dtype=float) / m, 0.5)
    return f_d_inverse(q if np.ndim(w) else float(q), d)


def gamma_tilde(
    w: ArrayOrFloat,
    m: int,
    d: int,
    variant: Union[QMapVariant, str] = QMapVariant.PAPER,
    clamp: SnrClamp = SnrClamp(),
) -> ArrayOrFloat:
    """Clamped SNR estimate for weight(s) ``w``: gamma_max at w = 0, gamma_min for w >= m/2."""
    rho = np.atleast_1d(np.asarray(rho_hat(w, m, d), dtype=float))
    gamma = np.empty_like(rho)
    low = rho >= 0.5
    high = rho <= 0.0
    inner = ~(low | high)
    gamma[low] = clamp.gamma_min
    gamma[high] = clamp.gamma_max
    if inner.any():
        gamma[inner] = np.clip(gamma_from_rho(rho[inner], variant), clamp.gamma_min, clamp.gamma_max)
    return float(gamma[0]) if np.ndim(w) == 0 else gamma


def estimate_q(obs: SyndromeObservation) -> float:
    """ML estimate w/m of the check-violation probability."""
    return obs.w / obs.m


def _regular_degree(obs: SyndromeObservation, d: Optional[int]) -> int:
    if obs.profile is not None:
        if not obs.profile.is_regular:
            raise ConfigurationError("Closed-form estimator needs a check-regular profile")
        profile_degree = obs.profile.degrees[0]
        if d is not None and d != profile_degree:
            raise ConfigurationError(f"Degree d={d} disagrees with the observation profile (d={profile_degree})")
        return profile_degree
    if d is None:
        raise ConfigurationError("Check degree d is required when the observation carries no profile")
    return d


def estimate_rho(obs: SyndromeObservation, d: Optional[int] = None) -> CrossoverProb:
    """../../docs/src/syndest/estimators/estimate_rho.md"""
    return float(rho_hat(obs.w, obs.m, _regular_degree(obs, d)))


def _profile_weights(obs: SyndromeObservation) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if obs.profile is None:
        raise ConfigurationError("Irregular estimator needs a degree profile")
    if obs.per_degree_weights is None:
        if not obs.profile.is_regular:
            raise ConfigurationError("Irregular estimator needs per-degree weights")
        weights: Tuple[int, ...] = (obs.w,)
    else:
        weights = obs.per_degree_weights
    return (
        np.asarray(obs.profile.degrees, dtype=float),
        np.asarray(obs.profile.counts, dtype=float),
        np.asarray(weights, dtype=float),
    )


def _log_likelihood(rho: np.ndarray, degrees: np.ndarray, counts: np.ndarray, weights: np.ndarray) -> np.ndarray:
    r = np.asarray(rho, dtype=float)[..., None]
    with np.errstate(divide="ignore"):
        q = -np.expm1(degrees * np.log1p(-2.0 * r)) / 2.0
    terms = special.xlogy(weights, q) + special.xlog1py(counts - weights, -q)
    return terms.sum(axis=-1)


def log_likelihood(obs: SyndromeObservation, rho: ArrayOrFloat) -> ArrayOrFloat:
    """Syndrome-weight log-likelihood sum_j w_j ln f_dj(rho) + (m_j - w_j) ln(1 - f_dj(rho)), constants dropped."""
    degrees, counts, weights = _profile_weights(obs)
    ll = _log_likelihood(np.asarray(rho, dtype=float), degrees, counts, weights)
    return float(ll) if np.ndim(rho) == 0 else ll


def estimate_rho_irregular(obs: SyndromeObservation) -> CrossoverProb:
    """../../docs/src/syndest/estimators/estimate_rho_irregular.md"""
    degrees, counts, weights = _profile_weights(obs)
    if not weights.any():
        return 0.0
    if np.all(weights / counts >= 0.5):
        return 0.5

    def score(r: float) -> float:
        q = -np.expm1(degrees * np.log1p(-2.0 * r)) / 2.0
        dq = degrees * np.power(1.0 - 2.0 * r, degrees - 1.0)
        return float(np.sum(dq * (weights / q - (counts - weights) / (1.0 - q))))

    grid = np.linspace(0.0, 0.5, GRID_POINTS)
    guarded = np.clip(grid, BOUNDARY_GUARD, 0.5 - BOUNDARY_GUARD)
    i = int(np.argmax(_log_likelihood(guarded, degrees, counts, weights)))
    lo = guarded[max(i - 1, 0)]
    hi = guarded[min(i + 1, GRID_POINTS - 1)]

    if score(lo) > 0.0 > score(hi):
        interior = optimize.brentq(score, lo, hi, xtol=1e-12)
        logger.debug(f"Irregular estimate from score root in [{lo}, {hi}]: {interior}")
    else:
        result = optimize.minimize_scalar(
            lambda r: -float(_log_likelihood(np.asarray(r), degrees, counts, weights)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        interior = float(result.x)
        logger.debug(f"Irregular estimate from bounded search in [{lo}, {hi}]: {interior}")

    # boundary candidates compared on the unguarded likelihood
    candidates = [interior, 0.0, 0.5]
    values = _log_likelihood(np.asarray(candidates), degrees, counts, weights)
    return float(candidates[int(np.argmax(values))])


def estimate_gamma(
    obs: SyndromeObservation,
    d: Optional[int] = None,
    variant: Union[QMapVariant, str] = QMapVariant.PAPER,
    clamp: SnrClamp = SnrClamp(),
) -> SnrDb:
    """../../docs/src/syndest/estimators/estimate_gamma.md"""
    return float(gamma_tilde(obs.w, obs.m, _regular_degree(obs, d), variant, clamp))
