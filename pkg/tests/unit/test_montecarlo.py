"""
Unit tests for the Monte-Carlo harness.
"""

import math
import tracemalloc

import numpy as np
import pytest

from syndest.analysis import estimator_mean_bsc, estimator_moments_bsc, estimator_moments_snr
from syndest.codes import DegreeProfile, ParityCheckMatrix, build_regular_ldpc
from syndest.estimators import SnrClamp
from syndest.exceptions import ConfigurationError
from syndest.montecarlo import (
    AwgnChannel,
    BscChannel,
    MomentAccumulator,
    RegularCodeParams,
    SampleStats,
    SimConfig,
    SyndromeSource,
    chunk_seeds,
    make_rng,
    run_awgn_trials,
    run_bsc_trials,
)


def _irregular_matrix():
    """20 checks over 60 variables: ten of degree 3 and ten of degree 6."""
    rows = [tuple(range(3 * k, 3 * k + 3)) for k in range(10)]
    rows += [tuple((3 * k + j) % 60 for j in range(6)) for k in range(10, 20)]
    return ParityCheckMatrix(m=20, n=60, rows=tuple(rows))


def test_zero_crossover_gives_zero_estimates():
    """Test rho = 0 yields mean 0 and std 0."""
    config = SimConfig(code=RegularCodeParams(n=120, dv=3, d=6, seed=1), channel=BscChannel(0.0), trials=100)
    stats = run_bsc_trials(config)
    assert stats.trials == 100
    assert stats.mean == 0.0
    assert stats.std == 0.0
    assert stats.mse == 0.0
    assert stats.min == stats.max == 0.0


def test_run_is_deterministic():
    """Test identical configurations give identical statistics."""
    h = build_regular_ldpc(240, 3, 6, seed=3)
    config = SimConfig(code=h, channel=BscChannel(0.05), trials=1500, seed=42, chunk_size=400)
    first = run_bsc_trials(config)
    second = run_bsc_trials(SimConfig(code=h, channel=BscChannel(0.05), trials=1500, seed=42, chunk_size=400))
    assert first == second
    assert first.seed == 42

    other = run_bsc_trials(SimConfig(code=h, channel=BscChannel(0.05), trials=1500, seed=43, chunk_size=400))
    assert other != first


def test_worker_count_does_not_change_results():
    """Test threaded chunks merge to the same statistics as a serial run."""
    h = build_regular_ldpc(240, 3, 6, seed=3)
    serial = run_bsc_trials(SimConfig(code=h, channel=BscChannel(0.08), trials=2000, seed=5, chunk_size=250))
    threaded = run_bsc_trials(
        SimConfig(code=h, channel=BscChannel(0.08), trials=2000, seed=5, chunk_size=250, workers=4)
    )
    assert serial == threaded


def test_moment_accumulator_merge():
    """Test pairwise merging reproduces the moments of the whole sample."""
    rng = np.random.default_rng(0)
    values = rng.normal(0.3, 0.1, size=1001)
    whole = MomentAccumulator.from_values(values, 0.25)
    merged = MomentAccumulator()
    for part in np.array_split(values, 7):
        merged = merged.merge(MomentAccumulator.from_values(part, 0.25))
    assert merged.count == whole.count
    assert merged.mean == pytest.approx(whole.mean, abs=1e-12)
    assert merged.m2 == pytest.approx(whole.m2, rel=1e-12)
    assert merged.sse == pytest.approx(whole.sse, rel=1e-12)
    assert (merged.low, merged.high) == (whole.low, whole.high)

    stats = merged.to_stats(seed=9)
    assert stats.std == pytest.approx(np.std(values, ddof=1), rel=1e-12)
    assert stats.mse == pytest.approx(np.mean((values - 0.25) ** 2), rel=1e-12)
    assert stats.mse >= (stats.mean - 0.25) ** 2


def test_sample_stats_standard_error():
    """Test the standard error of the mean."""
    stats = SampleStats(trials=400, mean=0.1, std=0.02, mse=0.0005, min=0.05, max=0.15, seed=0)
    assert stats.standard_error == pytest.approx(0.001)


def test_chunk_seeds_reproducible():
    """Test chunk seeds and their generators are reproducible."""
    a = chunk_seeds(7, 3)
    b = chunk_seeds(7, 3)
    assert len(a) == 3
    for x, y in zip(a, b):
        assert make_rng(x).random() == make_rng(y).random()
    assert make_rng(a[0]).random() != make_rng(a[1]).random()


def test_config_validation():
    """Test invalid simulation configurations are rejected."""
    code = RegularCodeParams(n=120, dv=3, d=6)
    with pytest.raises(ConfigurationError):
        SimConfig(code=code, channel=BscChannel(0.1), trials=0)
    with pytest.raises(ConfigurationError):
        SimConfig(code=code, channel=BscChannel(0.1), seed=-1)
    with pytest.raises(ConfigurationError):
        SimConfig(code=code, channel=BscChannel(0.1), workers=0)
    with pytest.raises(ConfigurationError):
        BscChannel(0.7)
    with pytest.raises(ConfigurationError):
        AwgnChannel(float("inf"))
    with pytest.raises(ConfigurationError):
        RegularCodeParams(n=121, dv=3, d=6)


def test_iid_run_from_degree_profile():
    """Test i.i.d. runs need only the degree profile, while code-source runs refuse one."""
    profile = DegreeProfile.regular(6, 60)
    from_profile = run_bsc_trials(SimConfig(
        code=profile, channel=BscChannel(0.05), trials=400, seed=9, syndrome_source=SyndromeSource.IID,
    ))
    from_params = run_bsc_trials(SimConfig(
        code=RegularCodeParams(n=120, dv=3, d=6), channel=BscChannel(0.05), trials=400, seed=9,
        syndrome_source=SyndromeSource.IID,
    ))
    assert from_profile == from_params
    with pytest.raises(ConfigurationError):
        SimConfig(code=profile, channel=BscChannel(0.05))


def test_channel_mismatch():
    """Test each runner insists on its channel."""
    code = RegularCodeParams(n=120, dv=3, d=6)
    with pytest.raises(ConfigurationError):
        run_bsc_trials(SimConfig(code=code, channel=AwgnChannel(3.0), trials=10))
    with pytest.raises(ConfigurationError):
        run_awgn_trials(SimConfig(code=code, channel=BscChannel(0.1), trials=10))
    with pytest.raises(ConfigurationError):
        run_awgn_trials(SimConfig(code=_irregular_matrix(), channel=AwgnChannel(3.0), trials=10))


@pytest.mark.parametrize("source", list(SyndromeSource))
def test_irregular_code_trials(source):
    """Test the irregular estimator runs inside the harness."""
    config = SimConfig(
        code=_irregular_matrix(), channel=BscChannel(0.1), trials=200, seed=11, syndrome_source=source
    )
    stats = run_bsc_trials(config)
    assert 0.0 <= stats.min <= stats.max <= 0.5
    assert abs(stats.mean - 0.1) < 0.05


@pytest.mark.parametrize("source", list(SyndromeSource))
def test_noiseless_awgn_hits_gamma_max(source):
    """Test 60 dB always yields w = 0 and hence gamma_max."""
    config = SimConfig(
        code=RegularCodeParams(n=600, dv=3, d=30, seed=2),
        channel=AwgnChannel(60.0, clamp=SnrClamp(-10.0, 10.0)),
        trials=200,
        syndrome_source=source,
    )
    stats = run_awgn_trials(config)
    assert stats.mean == 10.0
    assert stats.std == 0.0
    assert stats.min == stats.max == 10.0


def test_code_source_memory_is_bounded_per_chunk():
    """Test a 1000-trial chunk over n = 20000 never holds the whole (trials, n) sample at once."""
    h = build_regular_ldpc(20000, 3, 30, seed=1)
    h.csr
    config = SimConfig(code=h, channel=BscChannel(0.01), trials=1000, seed=3)
    tracemalloc.start()
    try:
        stats = run_bsc_trials(config)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    # one float64 draw of the full chunk alone would take 160 MB
    assert peak < 96 * 2 ** 20
    assert abs(stats.mean - 0.01) < 0.001


def test_low_snr_sticks_to_clamp():
    """Test -8 dB: many trials hit gamma_min and the mean is far from the truth."""
    config = SimConfig(
        code=RegularCodeParams(n=100000, dv=3, d=30),
        channel=AwgnChannel(-8.0),
        trials=2000,
        seed=4,
        syndrome_source=SyndromeSource.IID,
    )
    stats = run_awgn_trials(config)
    assert stats.min == -10.0
    assert abs(stats.mean + 8.0) > 1.0


@pytest.mark.slow
def test_iid_bsc_matches_analysis():
    """Test i.i.d. syndromes reproduce the exact BSC moments within 3 standard errors."""
    config = SimConfig(
        code=RegularCodeParams(n=2000, dv=3, d=6),
        channel=BscChannel(0.05),
        trials=100000,
        seed=1,
        syndrome_source=SyndromeSource.IID,
    )
    stats = run_bsc_trials(config)
    report = estimator_moments_bsc(6, 0.05, 1000)
    assert abs(stats.mean - report.mean) <= 3.0 * stats.standard_error
    # Gaussian errors with bias b and variance s2 give var(e**2) = 2*s2**2 + 4*b**2*s2 <= 2*mse**2,
    # so sd of the sample mse is at most mse * sqrt(2 / N)
    assert abs(stats.mse - report.mse) <= 3.0 * report.mse * math.sqrt(2.0 / stats.trials)
    assert stats.mse >= (stats.mean - 0.05) ** 2 - 1e-15


@pytest.mark.slow
def test_iid_awgn_matches_analysis():
    """Test i.i.d. syndromes reproduce the exact SNR moments within 3 standard errors."""
    config = SimConfig(
        code=RegularCodeParams(n=100000, dv=3, d=30),
        channel=AwgnChannel(2.5),
        trials=100000,
        seed=2,
        syndrome_source=SyndromeSource.IID,
    )
    stats = run_awgn_trials(config)
    report = estimator_moments_snr(30, 2.5, 10000)
    assert abs(stats.mean - report.mean) <= 3.0 * stats.standard_error
    # same chi-square bound as the BSC case
    assert abs(stats.mse - report.mse) <= 3.0 * report.mse * math.sqrt(2.0 / stats.trials)


@pytest.mark.slow
def test_code_syndromes_follow_analysis():
    """Test (3,6) codes with m = 1000: mean within 2% of the i.i.d. analysis, std inflated."""
    for seed in (1, 2, 3):
        h = build_regular_ldpc(2000, 3, 6, seed=seed)
        for rho in (0.02, 0.05, 0.11):
            code_stats = run_bsc_trials(SimConfig(code=h, channel=BscChannel(rho), trials=10000, seed=seed))
            iid_stats = run_bsc_trials(
                SimConfig(code=h, channel=BscChannel(rho), trials=10000, seed=seed,
                          syndrome_source=SyndromeSource.IID)
            )
            analytic = estimator_mean_bsc(6, rho, 1000)
            assert abs(code_stats.mean - analytic) <= 0.02 * analytic
            slack = 3.0 * iid_stats.std / math.sqrt(2.0 * (iid_stats.trials - 1))
            assert code_stats.std >= iid_stats.std - slack
