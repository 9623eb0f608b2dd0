"""syndest - Syndrome-based estimation of BSC crossover probability and BI-AWGN SNR"""

from .analysis import (
    MomentReport,
    PmfMode,
    biased_crb_mse_bound,
    estimator_bias_bsc,
    estimator_mean_bsc,
    estimator_moments_bsc,
    estimator_moments_snr,
    estimator_mse_bsc,
    fisher_information,
    fisher_information_profile,
    max_check_degree,
    mean_derivative,
    syndrome_weight_pmf,
)
from .channels import QMapVariant, gamma_from_rho, rho_from_gamma, sample_biawgn_hard, sample_bsc_errors
from .codes import (
    BitVector,
    DegreeProfile,
    ParityCheckMatrix,
    build_regular_ldpc,
    degree_profile,
    dump_alist,
    load_alist,
    syndrome,
    syndrome_weight,
)
from .estimators import (
    SnrClamp,
    SyndromeObservation,
    estimate_gamma,
    estimate_q,
    estimate_rho,
    estimate_rho_irregular,
    f_d,
    f_d_inverse,
    observe,
)
from .exceptions import (
    AlistParseError,
    ConfigurationError,
    ConstructionError,
    DimensionError,
    DivergenceError,
    DomainError,
    SyndestError,
)
from .montecarlo import AwgnChannel, BscChannel, RegularCodeParams, SampleStats, SimConfig, run_awgn_trials, run_bsc_trials

__version__ = "0.1.0"
__all__ = [
    "AlistParseError",
    "AwgnChannel",
    "BitVector",
    "BscChannel",
    "ConfigurationError",
    "ConstructionError",
    "DegreeProfile",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "MomentReport",
    "ParityCheckMatrix",
    "PmfMode",
    "QMapVariant",
    "RegularCodeParams",
    "SampleStats",
    "SimConfig",
    "SnrClamp",
    "SyndestError",
    "SyndromeObservation",
    "biased_crb_mse_bound",
    "build_regular_ldpc",
    "degree_profile",
    "dump_alist",
    "estimate_gamma",
    "estimate_q",
    "estimate_rho",
    "estimate_rho_irregular",
    "estimator_bias_bsc",
    "estimator_mean_bsc",
    "estimator_moments_bsc",
    "estimator_moments_snr",
    "estimator_mse_bsc",
    "f_d",
    "f_d_inverse",
    "fisher_information",
    "fisher_information_profile",
    "gamma_from_rho",
    "load_alist",
    "max_check_degree",
    "mean_derivative",
    "observe",
    "rho_from_gamma",
    "run_awgn_trials",
    "run_bsc_trials",
    "sample_biawgn_hard",
    "sample_bsc_errors",
    "syndrome",
    "syndrome_weight",
    "syndrome_weight_pmf",
]
