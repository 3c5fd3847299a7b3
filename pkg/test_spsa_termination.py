#!/usr/bin/env python3
"""
Test script for the SPSA optimizer and the logarithmic-fit termination rule
"""

import logging
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from optimization.spsa import CalibrationError, SpsaConfig, SpsaError, calibrate_a, spsa_step
from optimization.termination import (
    FitPoint,
    TerminationError,
    TerminationRule,
    Verdict,
    check_termination,
    fit_log,
)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)


def quadratic(theta: np.ndarray) -> float:
    return float(np.sum(theta ** 2))


def test_gain_sequences():
    cfg = SpsaConfig(a=0.5, A=9.0, c=0.2)
    assert cfg.learning_rate(0) == pytest.approx(0.5 / 10 ** 0.602)
    assert cfg.perturbation(0) == pytest.approx(0.2)
    assert cfg.perturbation(9) == pytest.approx(0.2 / 10 ** 0.101)


def test_config_validation():
    with pytest.raises(ValueError):
        SpsaConfig(max_iter=10)
    with pytest.raises(ValueError):
        SpsaConfig(c=0.0)
    cfg = SpsaConfig.from_dict({"alpha": 0.7, "unknown": 1})
    assert cfg.alpha == 0.7


def test_uncalibrated_step_rejected():
    with pytest.raises(SpsaError):
        spsa_step(np.ones(2), 0, SpsaConfig(), quadratic, np.random.default_rng(0))


def test_step_spends_two_evaluations():
    calls = []

    def counted(theta):
        calls.append(theta.copy())
        return quadratic(theta)

    theta, f_plus, f_minus = spsa_step(np.ones(3), 0, SpsaConfig(a=0.1), counted, np.random.default_rng(1))
    assert len(calls) == 2
    assert np.allclose(np.abs(calls[0] - np.ones(3)), 0.1)
    assert f_plus == quadratic(calls[0]) and f_minus == quadratic(calls[1])
    assert theta.shape == (3,)


def test_non_finite_cost_rejected():
    with pytest.raises(SpsaError):
        spsa_step(np.ones(2), 0, SpsaConfig(a=0.1), lambda theta: float("nan"), np.random.default_rng(0))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_quadratic_converges(seed):
    cfg = SpsaConfig(a=0.2, A=10.0, c=0.1, max_iter=300)
    rng = np.random.default_rng(seed)
    theta = np.ones(4)
    for k in range(cfg.max_iter):
        theta, _, _ = spsa_step(theta, k, cfg, quadratic, rng)
    print(f"🎯 seed {seed}: f = {quadratic(theta):.3e}")
    assert quadratic(theta) < 1e-2


def test_calibration_on_linear_cost():
    cfg = SpsaConfig(c=0.1, target_first_step_mev=1.0, calibration_samples=5)
    a = calibrate_a(np.array([0.3]), cfg, lambda theta: 2.0 * float(theta[0]), np.random.default_rng(0))
    assert a == pytest.approx(0.5)


def test_calibration_rejects_bad_target():
    with pytest.raises(ValueError):
        SpsaConfig(target_first_step_mev=0.0)
    cfg = SpsaConfig(target_first_step_mev=1.0)
    cfg.target_first_step_mev = 0.0
    with pytest.raises(ValueError):
        calibrate_a(np.zeros(2), cfg, quadratic, np.random.default_rng(0))


def test_calibration_on_flat_landscape():
    with pytest.raises(CalibrationError):
        calibrate_a(np.zeros(2), SpsaConfig(), lambda theta: 3.0, np.random.default_rng(0))


def test_fit_log_exact_points():
    m, c = fit_log([(1, 0.0), (math.e, 1.0)])
    assert m == pytest.approx(1.0)
    assert c == pytest.approx(0.0, abs=1e-12)


def test_fit_log_constant():
    m, c = fit_log([(k, 5.0) for k in range(1, 11)])
    assert m == pytest.approx(0.0, abs=1e-12)
    assert c == pytest.approx(5.0)


def test_fit_log_noisy_trend():
    rng = np.random.default_rng(4)
    points = [(k, -0.3 * math.log(k) - 1.0 + rng.normal(0.0, 0.005)) for k in range(1, 41)]
    m, c = fit_log(points)
    assert m == pytest.approx(-0.3, abs=0.02)
    assert c == pytest.approx(-1.0, abs=0.03)


def test_fit_log_rejects_bad_input():
    with pytest.raises(TerminationError):
        fit_log([(1, 0.0)])
    with pytest.raises(TerminationError):
        fit_log([(0, 0.0), (1, 1.0)])
    with pytest.raises(TerminationError):
        fit_log([(3, 0.0), (3, 1.0)])


def test_shallow_first_slope_aborts():
    assert check_termination([FitPoint(10, -0.05, 0.0)], 10) is Verdict.ABORT_REPEAT


def test_steep_first_slope_continues():
    assert check_termination([FitPoint(10, -0.5, 0.0)], 10) is Verdict.CONTINUE


def test_positive_slope_aborts():
    assert check_termination([FitPoint(10, 0.1, 0.0)], 10) is Verdict.ABORT_REPEAT
    fits = [FitPoint(10, -0.5, 0.0), FitPoint(20, 0.02, 0.0)]
    assert check_termination(fits, 20) is Verdict.ABORT_REPEAT


def test_stable_slope_converges():
    fits = [FitPoint(10, -0.5, 0.0), FitPoint(20, -0.48, 0.0)]
    assert check_termination(fits, 20) is Verdict.CONVERGED


def test_changing_slope_continues():
    fits = [FitPoint(10, -0.5, 0.0), FitPoint(20, -0.3, 0.0)]
    assert check_termination(fits, 20) is Verdict.CONTINUE


def test_zero_previous_slope_continues():
    fits = [FitPoint(10, -0.5, 0.0), FitPoint(20, 0.0, 0.0), FitPoint(30, -0.2, 0.0)]
    assert check_termination(fits, 30) is Verdict.CONTINUE


def test_custom_rule():
    rule = TerminationRule.from_dict({"interval": 5, "first_slope_min": 0.01})
    assert check_termination([FitPoint(5, -0.05, 0.0)], 5, rule) is Verdict.CONTINUE


def test_rule_rejects_unusable_settings():
    with pytest.raises(TerminationError):
        TerminationRule(interval=0)
    with pytest.raises(TerminationError):
        TerminationRule.from_dict({"relative_change_max": -0.1})


def test_rising_series_aborts_at_first_checkpoint():
    points = [(k, 0.01 * k) for k in range(1, 11)]
    m, c = fit_log(points)
    assert m > 0
    assert check_termination([FitPoint(10, m, c)], 10) is Verdict.ABORT_REPEAT


def test_checkpoint_errors():
    with pytest.raises(TerminationError):
        check_termination([FitPoint(10, -0.5, 0.0)], 15)
    with pytest.raises(TerminationError):
        check_termination([FitPoint(10, -0.5, 0.0)], 20)
    with pytest.raises(TerminationError):
        check_termination([FitPoint(20, -0.5, 0.0)], 20)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
