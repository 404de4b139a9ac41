import math

import pytest

from anytime_ville import (
    CoverageConfig,
    InvalidQuery,
    LilParams,
    explicit_bound,
    prior_scaled_envelope,
    run_coverage,
    run_martingale_check,
    sum_envelope,
)


def test_config_validation():
    with pytest.raises(InvalidQuery):
        CoverageConfig(0.7, 100, 100, 1)
    with pytest.raises(InvalidQuery):
        CoverageConfig(0.05, 100, 50, 1)
    with pytest.raises(InvalidQuery):
        CoverageConfig(0.05, 100, 100, 1, kappa=-1.0)
    assert CoverageConfig(0.05, 10, 100, 1).distribution == "StandardNormal"
    assert CoverageConfig(0.05, 10, 100, 1, kappa=2.0).distribution == "ScaledNormal(2)"


def test_zero_steps_has_no_violations():
    rep = run_coverage(CoverageConfig(0.05, 0, 100, seed=3))
    assert rep.violations == 0
    assert rep.violation_rate == 0.0
    assert rep.first_violation_times == {}


def test_report_fields_consistent():
    rep = run_coverage(CoverageConfig(0.3, 500, 2000, seed=17))
    assert rep.violation_rate == rep.violations / rep.n_reps
    assert sum(rep.first_violation_times.values()) == rep.violations
    assert all(1 <= t <= 500 for t in rep.first_violation_times)


def test_coverage_below_nominal_level_dev_scale():
    cfg = CoverageConfig(0.05, 2000, 2000, seed=42)
    rep = run_coverage(cfg)
    limit = 0.05 + 3.0 * math.sqrt(0.05 * 0.95 / cfg.n_reps)
    assert rep.violation_rate <= limit


def test_coverage_monotone_in_delta_with_common_random_numbers():
    rates = []
    for delta in (0.3, 0.1, 0.05, 0.01):
        rep = run_coverage(CoverageConfig(delta, 1000, 3000, seed=5))
        rates.append(rep.violation_rate)
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert rates[0] > 0.0  # the loosest level actually sees violations here


def test_coverage_deterministic_across_threads():
    cfg = CoverageConfig(0.1, 1500, 1200, seed=8)
    reports = [run_coverage(cfg, threads=t) for t in (1, 4, 8)]
    assert reports[0] == reports[1] == reports[2]


def test_scaled_normal_uses_rescaled_envelope():
    cfg = CoverageConfig(0.05, 1500, 1500, seed=23, kappa=2.0)
    rep = run_coverage(cfg)
    limit = 0.05 + 3.0 * math.sqrt(0.05 * 0.95 / cfg.n_reps)
    assert rep.violation_rate <= limit


def test_sum_envelope_matches_pointwise_definition():
    p = LilParams(0.05)
    env = sum_envelope(0.05, 10)
    for n in range(11):
        assert env[n] == pytest.approx(math.sqrt(n + 1.0) * explicit_bound(n, p), rel=1e-14)
    env2 = prior_scaled_envelope(0.05, 2.0, 8)
    assert env2[4] == pytest.approx(2.0 * math.sqrt(2.0) * explicit_bound(1.0, p), rel=1e-14)


def test_prior_scaled_envelope_covers_standard_draws():
    # the kappa-wide mixture weight yields kappa * F(n / kappa^2), a valid
    # alternative envelope for the *standard* walk
    cfg = CoverageConfig(0.05, 1500, 1500, seed=23)
    env = prior_scaled_envelope(0.05, 2.0, cfg.n_steps)
    rep = run_coverage(cfg, envelope=env)
    limit = 0.05 + 3.0 * math.sqrt(0.05 * 0.95 / cfg.n_reps)
    assert rep.violation_rate <= limit


def test_martingale_check_floor_and_drift():
    rep = run_martingale_check(10 ** 4, 10 ** 3, seed=31)
    assert rep.floor_violations == 0
    assert rep.max_drift_zscore <= 3.0
    assert len(rep.checked_steps) == len(rep.drift_means) == len(rep.drift_std_errors)


def test_martingale_check_rejects_small_samples():
    with pytest.raises(InvalidQuery):
        run_martingale_check(100, 10, seed=1)
