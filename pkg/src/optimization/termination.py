"""
Logarithmic-fit termination rule

Every `interval` iterations the correlation energies so far are fitted as
y = m_k ln(k) + c_k. A run is aborted for repetition when m_k > 0 or when
the first slope is too shallow, and it has converged once the slope
changes by no more than a relative tolerance between checkpoints.

Author: jsecco ®
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class TerminationError(ValueError):
    """Raised for malformed fit inputs or missing checkpoints."""


class Verdict(Enum):
    CONTINUE = "Continue"
    CONVERGED = "Converged"
    ABORT_REPEAT = "AbortRepeat"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class FitPoint:
    k: int
    m: float
    c: float

    def to_dict(self) -> Dict[str, float]:
        return {"k": self.k, "m_k": self.m, "c_k": self.c}


@dataclass
class TerminationRule:
    interval: int = 10
    first_slope_min: float = 0.1
    relative_change_max: float = 0.08

    def __post_init__(self):
        if self.interval < 2:
            raise TerminationError(f"interval must be >= 2, got {self.interval}")
        if self.relative_change_max < 0:
            raise TerminationError(f"relative_change_max must be >= 0, got {self.relative_change_max}")

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "TerminationRule":
        return cls(
            interval=int(config.get("interval", 10)),
            first_slope_min=float(config.get("first_slope_min", 0.1)),
            relative_change_max=float(config.get("relative_change_max", 0.08)),
        )


def fit_log(points: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """
    Least-squares fit of y = m ln(x) + c.

    Args:
        points: (k, E_corr) pairs with k >= 1

    Returns:
        (m, c)

    Raises:
        TerminationError: For fewer than two points, k < 1 or a single distinct k
    """
    if len(points) < 2:
        raise TerminationError(f"Need at least 2 points, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.any(x < 1):
        raise TerminationError("Iteration numbers must be >= 1")
    log_x = np.log(x)
    if np.ptp(log_x) == 0.0:
        raise TerminationError("Degenerate fit: all points share the same k")
    design = np.column_stack([log_x, np.ones_like(log_x)])
    (m, c), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(m), float(c)


def check_termination(fit_history: Sequence[FitPoint], k: int,
                      rule: TerminationRule = TerminationRule()) -> Verdict:
    """
    Verdict at checkpoint k.

    Args:
        fit_history: Fits recorded at every checkpoint up to k
        k: Current checkpoint (multiple of the interval)
        rule: Thresholds

    Returns:
        CONTINUE, CONVERGED or ABORT_REPEAT (the caller reports MAX_ITER)

    Raises:
        TerminationError: If k is not a checkpoint or a needed fit is missing
    """
    if k < rule.interval or k % rule.interval:
        raise TerminationError(f"k={k} is not a checkpoint")
    by_k = {fit.k: fit for fit in fit_history}
    if k not in by_k:
        raise TerminationError(f"No fit recorded at k={k}")
    current = by_k[k].m

    if current > 0:
        return Verdict.ABORT_REPEAT
    if k == rule.interval:
        return Verdict.ABORT_REPEAT if abs(current) < rule.first_slope_min else Verdict.CONTINUE

    previous_k = k - rule.interval
    if previous_k not in by_k:
        raise TerminationError(f"No fit recorded at k={previous_k}")
    previous = by_k[previous_k].m
    if previous == 0.0:
        return Verdict.CONTINUE
    if abs((current - previous) / previous) <= rule.relative_change_max:
        return Verdict.CONVERGED
    return Verdict.CONTINUE
