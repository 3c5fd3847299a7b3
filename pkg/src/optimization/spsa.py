"""
SPSA optimizer

Gains follow a_k = a / (A + k + 1)^alpha and c_k = c / (k + 1)^gamma with
Rademacher perturbations; each step spends exactly two cost evaluations.
The learning rate a is calibrated so that the expected first update moves
the cost by a target amount.

Author: jsecco ®
"""

import logging
import math
from dataclasses import dataclass, fields
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

CostFunction = Callable[[np.ndarray], float]

FLAT_LANDSCAPE = 1e-12


class SpsaError(RuntimeError):
    """Raised when the cost oracle returns a non-finite value."""


class CalibrationError(RuntimeError):
    """Raised when calibration sees a flat landscape; re-randomize θ0."""


@dataclass
class SpsaConfig:
    alpha: float = 0.602
    gamma: float = 0.101
    A: float = 0.0
    c: float = 0.1
    a: Optional[float] = None
    max_iter: int = 200
    target_first_step_mev: float = 1.0
    calibration_samples: int = 25
    seed: Optional[int] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.alpha <= 0 or self.gamma <= 0:
            raise ValueError(f"alpha and gamma must be positive (alpha={self.alpha}, gamma={self.gamma})")
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.max_iter < 20:
            raise ValueError(f"max_iter must be >= 20, got {self.max_iter}")
        if self.calibration_samples < 1:
            raise ValueError("calibration_samples must be >= 1")
        if self.target_first_step_mev <= 0:
            raise ValueError(f"target_first_step_mev must be > 0, got {self.target_first_step_mev}")

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "SpsaConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in config.items() if k in known})

    def learning_rate(self, k: int) -> float:
        if self.a is None:
            raise SpsaError("Learning rate a has not been calibrated")
        return self.a / (self.A + k + 1) ** self.alpha

    def perturbation(self, k: int) -> float:
        return self.c / (k + 1) ** self.gamma


def rademacher(rng: np.random.Generator, dimension: int) -> np.ndarray:
    return rng.choice(np.array([-1.0, 1.0]), size=dimension)


def _finite(value: float, where: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise SpsaError(f"Cost oracle returned {value} at {where}")
    return value


def spsa_step(theta: np.ndarray, k: int, cfg: SpsaConfig, evaluate: CostFunction,
              rng: np.random.Generator) -> Tuple[np.ndarray, float, float]:
    """
    One SPSA update.

    Args:
        theta: Current parameters
        k: Zero-based iteration index
        cfg: Configuration with a calibrated learning rate
        evaluate: Cost oracle
        rng: Source of the perturbation

    Returns:
        (theta_next, f(theta + c_k Δ), f(theta - c_k Δ))

    Raises:
        SpsaError: On a non-finite cost
    """
    theta = np.asarray(theta, dtype=float)
    delta = rademacher(rng, len(theta))
    c_k = cfg.perturbation(k)
    f_plus = _finite(evaluate(theta + c_k * delta), f"k={k} (+)")
    f_minus = _finite(evaluate(theta - c_k * delta), f"k={k} (-)")
    gradient = (f_plus - f_minus) / (2.0 * c_k * delta)
    return theta - cfg.learning_rate(k) * gradient, f_plus, f_minus


def calibrate_a(theta0: np.ndarray, cfg: SpsaConfig, evaluate: CostFunction,
                rng: np.random.Generator) -> float:
    """
    Learning rate giving an expected first cost change of target_first_step_mev.

    Averages |f(θ0 + cΔ) - f(θ0 - cΔ)| / 2 over the calibration perturbations
    and returns target · c / mean.

    Raises:
        ValueError: If the target is not positive
        CalibrationError: If the landscape is flat around θ0
    """
    if cfg.target_first_step_mev <= 0:
        raise ValueError(f"target_first_step_mev must be > 0, got {cfg.target_first_step_mev}")
    theta0 = np.asarray(theta0, dtype=float)
    magnitudes = []
    for sample in range(cfg.calibration_samples):
        delta = rademacher(rng, len(theta0))
        f_plus = _finite(evaluate(theta0 + cfg.c * delta), f"calibration {sample} (+)")
        f_minus = _finite(evaluate(theta0 - cfg.c * delta), f"calibration {sample} (-)")
        magnitudes.append(abs(f_plus - f_minus) / 2.0)
    mean_change = float(np.mean(magnitudes))
    if mean_change < FLAT_LANDSCAPE:
        raise CalibrationError(f"Flat landscape around θ0 (mean |δf/2| = {mean_change:.3e})")
    a = cfg.target_first_step_mev * cfg.c / mean_change
    logger.info(f"Calibrated SPSA learning rate a = {a:.6g} (mean |δf/2| = {mean_change:.6g})")
    return a
