"""
BSC and BI-AWGN channel models, hard decisions and the SNR <-> crossover map.

SNR values are in dB, gamma = 10*log10(Es / 2 sigma^2). The map from gamma to the
hard-decision error probability exists in two variants (see ``QMapVariant``).
"""

import logging
from enum import Enum
from typing import Tuple, Union

import numpy as np
from scipy import special

from .codes import BitVector
from .exceptions import ConfigurationError, DivergenceError

logger = logging.getLogger(__name__)

SnrDb = float
CrossoverProb = float
ArrayOrFloat = Union[float, np.ndarray]

# Newton polish steps applied after the closed-form inverse
NEWTON_STEPS = 2

_LOG10_OVER_10 = np.log(10.0) / 10.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


class QMapVariant(str, Enum):
    """
    Which gamma -> rho map to use.

    PAPER integrates the Gaussian tail from the linear SNR 10^(gamma/10);
    PHYSICAL uses the BPSK hard-decision error Q(sqrt(2 * 10^(gamma/10))).
    """

    PAPER = "paper"
    PHYSICAL = "physical"


def _scalar_or_array(value: np.ndarray, like: ArrayOrFloat) -> ArrayOrFloat:
    return float(value) if np.ndim(like) == 0 else value


def std_normal_tail(x: ArrayOrFloat) -> ArrayOrFloat:
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return _scalar_or_array(0.5 * special.erfc(np.asarray(x, dtype=float) / np.sqrt(2.0)), x)


def _tail_argument(gamma: np.ndarray, variant: QMapVariant) -> Tuple[np.ndarray, np.ndarray]:
    """Lower integration limit a(gamma) of the Gaussian tail and its derivative da/dgamma."""
    with np.errstate(over="ignore"):
        linear = np.power(10.0, gamma / 10.0)
    if variant is QMapVariant.PAPER:
        a = linear
        return a, a * _LOG10_OVER_10
    a = np.sqrt(2.0 * linear)
    return a, a * _LOG10_OVER_10 / 2.0


def rho_from_gamma(gamma: ArrayOrFloat, variant: Union[QMapVariant, str] = QMapVariant.PAPER) -> ArrayOrFloat:
    """Hard-decision crossover probability of a BI-AWGN channel at SNR ``gamma`` dB."""
    variant = QMapVariant(variant)
    a, _ = _tail_argument(np.asarray(gamma, dtype=float), variant)
    rho = np.clip(0.5 * special.erfc(a / np.sqrt(2.0)), 0.0, 0.5)
    return _scalar_or_array(rho, gamma)


def gamma_from_rho(rho: ArrayOrFloat, variant: Union[QMapVariant, str] = QMapVariant.PAPER) -> ArrayOrFloat:
    """../../docs/src/syndest/channels/gamma_from_rho.md"""
    variant = QMapVariant(variant)
    target = np.asarray(rho, dtype=float)
    if np.any(~(target > 0.0)) or np.any(~(target < 0.5)):
        raise DivergenceError(f"SNR diverges for crossover probability outside (0, 1/2): {rho}")

    # Q^{-1}(rho) = -ndtri(rho) stays accurate for tiny rho
    a = -special.ndtri(target)
    if variant is QMapVariant.PAPER:
        gamma = 10.0 * np.log10(a)
    else:
        gamma = 10.0 * np.log10(a * a / 2.0)

    log_target = np.log(target)
    for _ in range(NEWTON_STEPS):
        a, da = _tail_argument(gamma, variant)
        log_tail = special.log_ndtr(-a)
        # d/dgamma ln Q(a) = -phi(a)/Q(a) * da/dgamma
        slope = -np.exp(-0.5 * a * a - _HALF_LOG_2PI - log_tail) * da
        gamma = gamma - (log_tail - log_target) / slope
    return _scalar_or_array(gamma, rho)


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 0.5:
        raise ConfigurationError(f"Crossover probability must lie in [0, 1/2], got {rho}")


def bsc_flips(shape: Union[int, Tuple[int, ...]], rho: CrossoverProb, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(rho) bits as a uint8 array of the given shape."""
    _check_rho(rho)
    return (rng.random(shape) < rho).view(np.uint8)


def sample_bsc_errors(n: int, rho: CrossoverProb, rng: np.random.Generator) -> BitVector:
    """Error pattern of ``n`` uses of a BSC with crossover probability ``rho``."""
    return BitVector.from_bits(bsc_flips(n, rho, rng))


def hard_decisions(
    bits: np.ndarray,
    gamma: SnrDb,
    rng: np.random.Generator,
    variant: Union[QMapVariant, str] = QMapVariant.PAPER,
) -> np.ndarray:
    """
    Transmit 0/1 ``bits`` (any shape) over a BI-AWGN channel and return the hard decisions.

    Under PAPER the channel is realised as BSC(rho_from_gamma(gamma, PAPER)), since that map
    has no signal-space noise model behind it. Under PHYSICAL, bit b is sent as
    A*(1 - 2b) with A = sqrt(2 * 10^(gamma/10)), unit-variance Gaussian noise is added and
    the sign is sliced.
    """
    variant = QMapVariant(variant)
    bits = np.asarray(bits, dtype=np.uint8)
    if variant is QMapVariant.PAPER:
        return bits ^ bsc_flips(bits.shape, float(rho_from_gamma(gamma, variant)), rng)
    with np.errstate(over="ignore"):
        amplitude = np.sqrt(2.0 * np.power(10.0, gamma / 10.0))
    received = amplitude * (1.0 - 2.0 * bits) + rng.standard_normal(bits.shape)
    return (received < 0.0).astype(np.uint8)


def sample_biawgn_hard(
    bits: BitVector,
    gamma: SnrDb,
    rng: np.random.Generator,
    variant: Union[QMapVariant, str] = QMapVariant.PAPER,
) -> BitVector:
    """Hard decisions for codeword ``bits`` sent over a BI-AWGN channel at ``gamma`` dB."""
    return BitVector.from_bits(hard_decisions(bits.to_bits(), gamma, rng, variant))
