"""
Optimization Module

SPSA optimizer, logarithmic-fit termination rule and the VQE driver.

Author: jsecco ®
"""

from .spsa import CalibrationError, SpsaConfig, SpsaError, calibrate_a, spsa_step
from .termination import FitPoint, TerminationError, TerminationRule, Verdict, check_termination, fit_log
from .vqe import IterationRecord, RunAborted, RunRecord, VQERunner, run_vqe

__all__ = [
    'CalibrationError', 'SpsaConfig', 'SpsaError', 'calibrate_a', 'spsa_step',
    'FitPoint', 'TerminationError', 'TerminationRule', 'Verdict', 'check_termination', 'fit_log',
    'IterationRecord', 'RunAborted', 'RunRecord', 'VQERunner', 'run_vqe',
]
