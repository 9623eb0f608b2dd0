"""
Analytical characterisation of the syndrome-based estimators under the i.i.d. syndrome model.

The syndrome weight W is Binomial(m, q) with q = f_d(rho). Expectations over W are computed
by summing over the whole support 0..m, with the weight distribution evaluated exactly in
the log domain or through the Poisson/Gaussian approximations.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special, stats

from .channels import QMapVariant, SnrDb, rho_from_gamma
from .codes import DegreeProfile
from .estimators import SnrClamp, f_d, gamma_tilde, rho_hat
from .exceptions import ConfigurationError, DivergenceError, DomainError

logger = logging.getLogger(__name__)

# Largest m for which the exact log-domain pmf is supported
EXACT_MODE_LIMIT = 1_000_000

# Auto switching rule
AUTO_EXACT_MAX_M = 20_000
AUTO_POISSON_MAX_MEAN = 50.0


class PmfMode(str, Enum):
    """How the syndrome-weight distribution is evaluated."""

    EXACT = "exact"
    POISSON = "poisson"
    GAUSSIAN = "gaussian"
    AUTO = "auto"


@dataclass(frozen=True)
class MomentReport:
    """Estimator moments at one parameter point. ``fisher``/``crb_mse_bound`` are None where they diverge."""

    mean: float
    bias: float
    mse: float
    mode: PmfMode
    fisher: Optional[float] = None
    crb_mse_bound: Optional[float] = None

    @property
    def std(self) -> float:
        return math.sqrt(max(self.mse - self.bias * self.bias, 0.0))


def _check_dm(d: int, m: int) -> None:
    if d < 1:
        raise ConfigurationError(f"Check degree must be >= 1, got {d}")
    if m < 1:
        raise ConfigurationError(f"Number of checks must be >= 1, got {m}")


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 0.5:
        raise DomainError(f"Crossover probability must lie in [0, 1/2], got {rho}")


def resolve_mode(mode: Union[PmfMode, str], m: int, q: float) -> PmfMode:
    """Concrete pmf mode for ``mode``; AUTO picks exact for m <= 2e4, else Poisson when mq <= 50, else Gaussian."""
    mode = PmfMode(mode)
    if mode is not PmfMode.AUTO:
        return mode
    if m <= AUTO_EXACT_MAX_M:
        return PmfMode.EXACT
    if m * q <= AUTO_POISSON_MAX_MEAN:
        return PmfMode.POISSON
    return PmfMode.GAUSSIAN


def _gaussian_pmf(w: np.ndarray, mean: float, sd: float) -> np.ndarray:
    upper = (w + 0.5 - mean) / sd
    lower = (w - 0.5 - mean) / sd
    # use the survival function above the mean so far-tail cells keep precision
    below = stats.norm.cdf(upper) - stats.norm.cdf(lower)
    above = stats.norm.sf(lower) - stats.norm.sf(upper)
    return np.where(w <= mean, below, above)


def syndrome_weight_pmf(m: int, q: float, mode: Union[PmfMode, str] = PmfMode.EXACT) -> np.ndarray:
    """../../docs/src/syndest/analysis/syndrome_weight_pmf.md"""
    if m < 1:
        raise ConfigurationError(f"Syndrome length must be >= 1, got {m}")
    if not 0.0 <= q <= 0.5:
        raise DomainError(f"Check violation probability must lie in [0, 1/2], got {q}")
    used = resolve_mode(mode, m, q)
    w = np.arange(m + 1, dtype=float)

    if q == 0.0:
        pmf = np.zeros(m + 1)
        pmf[0] = 1.0
        return pmf

    if used is PmfMode.EXACT:
        if m > EXACT_MODE_LIMIT:
            logger.warning(f"Exact pmf requested for m={m} beyond the supported {EXACT_MODE_LIMIT}")
        log_pmf = (
            special.gammaln(m + 1.0)
            - special.gammaln(w + 1.0)
            - special.gammaln(m - w + 1.0)
            + special.xlogy(w, q)
            + special.xlog1py(m - w, -q)
        )
        pmf = np.exp(log_pmf)
    elif used is PmfMode.POISSON:
        pmf = stats.poisson.pmf(w, m * q)
    else:
        pmf = _gaussian_pmf(w, m * q, math.sqrt(m * q * (1.0 - q)))

    return pmf / pmf.sum()


@lru_cache(maxsize=64)
def _rho_hat_table(m: int, d: int) -> np.ndarray:
    table = np.asarray(rho_hat(np.arange(m + 1), m, d), dtype=float)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=64)
def _gamma_tilde_table(m: int, d: int, variant: QMapVariant, clamp: SnrClamp) -> np.ndarray:
    table = np.asarray(gamma_tilde(np.arange(m + 1), m, d, variant, clamp), dtype=float)
    table.flags.writeable = False
    return table


def _bsc_moments(d: int, rho: float, m: int, mode: Union[PmfMode, str]) -> Tuple[float, float, PmfMode]:
    """Mean and MSE of rho_hat from the expanded closed-form sums over w = 0..floor(m/2)."""
    _check_dm(d, m)
    _check_rho(rho)
    q = f_d(rho, d)
    used = resolve_mode(mode, m, q)
    if rho == 0.0:
        return 0.0, 0.0, used

    pmf = syndrome_weight_pmf(m, q, used)[: m // 2 + 1]
    root = np.power(1.0 - 2.0 * np.arange(m // 2 + 1) / m, 1.0 / d)
    mean = 0.5 - 0.5 * float(np.dot(pmf, root))
    mse = 0.25 - 2.0 * rho * mean + rho * rho + 0.25 * float(np.dot(pmf, root * root - 2.0 * root))
    return mean, max(mse, 0.0), used


def estimator_mean_bsc(d: int, rho: float, m: int, mode: Union[PmfMode, str] = PmfMode.EXACT) -> float:
    """Mean of the BSC estimator rho_hat(W)."""
    return _bsc_moments(d, rho, m, mode)[0]


def estimator_bias_bsc(d: int, rho: float, m: int, mode: Union[PmfMode, str] = PmfMode.EXACT) -> float:
    """Bias mean - rho of the BSC estimator."""
    return _bsc_moments(d, rho, m, mode)[0] - rho


def estimator_mse_bsc(d: int, rho: float, m: int, mode: Union[PmfMode, str] = PmfMode.EXACT) -> float:
    """Mean squared error of the BSC estimator."""
    return _bsc_moments(d, rho, m, mode)[1]


def fisher_information(d: int, rho: float, m: int) -> float:
    """../../docs/src/syndest/analysis/fisher_information.md"""
    _check_dm(d, m)
    _check_rho(rho)
    if rho == 0.0:
        raise DivergenceError("Fisher information is infinite at rho = 0")
    if rho == 0.5:
        return 4.0 * m if d == 1 else 0.0
    log_x = math.log1p(-2.0 * rho)
    numerator = 4.0 * m * d * d * math.exp((2 * d - 2) * log_x)
    return numerator / -math.expm1(2 * d * log_x)


def fisher_information_profile(profile: DegreeProfile, rho: float) -> float:
    """Fisher information of a syndrome whose checks follow an irregular degree profile."""
    return sum(fisher_information(degree, rho, count) for degree, count in profile)


def _check_open_rho(rho: float) -> None:
    _check_rho(rho)
    if rho == 0.0:
        raise DivergenceError("Fisher information is infinite at rho = 0")


def mean_derivative(d: int, rho: float, m: int, mode: Union[PmfMode, str] = PmfMode.EXACT) -> float:
    """
    d mu / d rho through the score identity dP(w)/dq = P(w) (w - mq) / (q (1 - q)).

    Args:
        d: Check degree
        rho: Crossover probability in (0, 1/2]
        m: Number of checks
        mode: Weight-distribution mode

    Returns:
        Derivative of the estimator mean with respect to rho
    """
    _check_dm(d, m)
    _check_open_rho(rho)
    q = f_d(rho, d)
    dq = d * (1.0 - 2.0 * rho) ** (d - 1)
    pmf = syndrome_weight_pmf(m, q, mode)
    estimates = _rho_hat_table(m, d)
    mu = float(np.dot(pmf, estimates))
    w = np.arange(m + 1, dtype=float)
    # centring on mu keeps the sum free of cancellation
    covariance = float(np.dot(pmf, (w - m * q) * (estimates - mu)))
    return dq * covariance / (q * (1.0 - q))


def mean_derivative_fd(
    d: int,
    rho: float,
    m: int,
    mode: Union[PmfMode, str] = PmfMode.EXACT,
    step: Optional[float] = None,
) -> float:
    """Finite-difference d mu / d rho (central where the step fits inside [0, 1/2])."""
    h = step if step is not None else max(1e-7, 1e-5 * rho)
    lo = max(rho - h, 0.0)
    hi = min(rho + h, 0.5)
    return (estimator_mean_bsc(d, hi, m, mode) - estimator_mean_bsc(d, lo, m, mode)) / (hi - lo)


def biased_crb_mse_bound(d: int, rho: float, m: int, mode: Union[PmfMode, str] = PmfMode.EXACT) -> float:
    """Lower bound (d mu/d rho)^2 / I(rho) + B^2 on the MSE of the biased estimator."""
    information = fisher_information(d, rho, m)
    if information == 0.0:
        raise DivergenceError(f"Biased CRB undefined at rho={rho} for d={d}: zero Fisher information")
    derivative = mean_derivative(d, rho, m, mode)
    bias = estimator_bias_bsc(d, rho, m, mode)
    return derivative * derivative / information + bias * bias


def estimator_moments_bsc(d: int, rho: float, m: int, mode: Union[PmfMode, str] = PmfMode.EXACT) -> MomentReport:
    """Mean, bias, MSE, Fisher information and biased CRB of the BSC estimator at one point."""
    mean, mse, used = _bsc_moments(d, rho, m, mode)
    try:
        information: Optional[float] = fisher_information(d, rho, m)
    except DivergenceError:
        information = None
    bound = None
    if information:
        derivative = mean_derivative(d, rho, m, used)
        bound = derivative * derivative / information + (mean - rho) ** 2
    return MomentReport(mean=mean, bias=mean - rho, mse=mse, mode=used, fisher=information, crb_mse_bound=bound)


def estimator_moments_snr(
    d: int,
    gamma: SnrDb,
    m: int,
    variant: Union[QMapVariant, str] = QMapVariant.PAPER,
    clamp: SnrClamp = SnrClamp(),
    mode: Union[PmfMode, str] = PmfMode.EXACT,
) -> MomentReport:
    """../../docs/src/syndest/analysis/estimator_moments_snr.md"""
    _check_dm(d, m)
    if not math.isfinite(gamma):
        raise ConfigurationError(f"SNR must be finite, got {gamma}")
    variant = QMapVariant(variant)
    q = f_d(float(rho_from_gamma(gamma, variant)), d)
    used = resolve_mode(mode, m, q)
    pmf = syndrome_weight_pmf(m, q, used)
    estimates = _gamma_tilde_table(m, d, variant, clamp)
    mean = float(np.dot(pmf, estimates))
    mse = float(np.dot(pmf, (estimates - gamma) ** 2))
    logger.debug(f"SNR moments d={d} m={m} gamma={gamma}: mean={mean} mse={mse} ({used.value})")
    return MomentReport(mean=mean, bias=mean - gamma, mse=mse, mode=used)


def max_check_degree(rho: float, m: int, target_mse: float, d_max: int = 1000) -> Optional[int]:
    """
    Largest check degree d <= d_max whose unbiased CRB 1/I(rho; d, m) stays within ``target_mse``.

    Returns None when no degree in 1..d_max qualifies.
    """
    if target_mse <= 0.0:
        raise ConfigurationError(f"Target MSE must be positive, got {target_mse}")
    _check_open_rho(rho)
    best = None
    for d in range(1, d_max + 1):
        information = fisher_information(d, rho, m)
        if information > 0.0 and 1.0 / information <= target_mse:
            best = d
    return best
