"""
VQE driver

Runs SPSA over the UpCCD parameters against an energy backend, records the
correlation energy of every iteration, fits the logarithmic trend every ten
iterations and applies the termination rule.

Author: jsecco ®
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

from physics.ansatz import AnsatzSpec, bind, initial_parameters
from physics.hamiltonian import PairingHamiltonian, correlation_energy

from .spsa import SpsaConfig, calibrate_a, spsa_step
from .termination import FitPoint, TerminationRule, Verdict, check_termination, fit_log

logger = logging.getLogger(__name__)

TAIL_WINDOW = 10


@dataclass
class IterationRecord:
    k: int
    theta: List[float]
    energy_mev: float
    e_corr_mev: float

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "theta": self.theta, "energy_mev": self.energy_mev, "e_corr_mev": self.e_corr_mev}


@dataclass
class RunRecord:
    """
    Everything one VQE run produced.

    would_terminate_at and early_verdict are filled when the run kept going
    past a terminating checkpoint (terminate_early disabled).
    """

    seed: Optional[int] = None
    backend: str = ""
    iterations: List[IterationRecord] = field(default_factory=list)
    fits: List[FitPoint] = field(default_factory=list)
    verdict: Verdict = Verdict.CONTINUE
    e_corr_bar: Optional[float] = None
    calibrated_a: Optional[float] = None
    evaluations: int = 0
    would_terminate_at: Optional[int] = None
    early_verdict: Optional[Verdict] = None
    e_corr_bar_at_termination: Optional[float] = None

    def e_corr_series(self) -> List[float]:
        return [it.e_corr_mev for it in self.iterations]

    def tail_average(self, upto: Optional[int] = None) -> float:
        series = self.e_corr_series()[:upto] if upto else self.e_corr_series()
        if not series:
            raise ValueError("No iterations recorded")
        return float(np.mean(series[-TAIL_WINDOW:]))

    def summary(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "e_corr_bar_mev": self.e_corr_bar,
            "iterations": len(self.iterations),
            "seed": self.seed,
            "backend": self.backend,
            "calibrated_a": self.calibrated_a,
            "evaluations": self.evaluations,
            "would_terminate_at": self.would_terminate_at,
            "early_verdict": self.early_verdict.value if self.early_verdict else None,
            "e_corr_bar_at_termination_mev": self.e_corr_bar_at_termination,
            "fits": [fit.to_dict() for fit in self.fits],
        }

    def write(self, jsonl_path: Union[str, Path], summary_path: Optional[Union[str, Path]] = None) -> None:
        """One JSON object per iteration, plus an optional summary file."""
        jsonl_path = Path(jsonl_path)
        jsonl_path.parent.mkdir(parents=True, exist_ok=True)
        with open(jsonl_path, "w", encoding="utf-8") as f:
            for iteration in self.iterations:
                f.write(json.dumps(iteration.to_dict()) + "\n")
        if summary_path is not None:
            with open(summary_path, "w", encoding="utf-8") as f:
                json.dump(self.summary(), f, indent=2)


class RunAborted(RuntimeError):
    """Termination rule asked for a repeat; the partial record is attached."""

    def __init__(self, record: RunRecord, message: str = ""):
        super().__init__(message or f"Run aborted at k={len(record.iterations)}")
        self.record = record


def evaluation_seed(seed: Optional[int], counter: int) -> Optional[int]:
    if seed is None:
        return None
    return int(np.random.SeedSequence(seed, spawn_key=(counter,)).generate_state(1)[0])


class VQERunner:
    """
    SPSA-driven VQE on one backend.

    Config keys (all optional): spsa {alpha, gamma, A, c, a, max_iter,
    target_first_step_mev, calibration_samples}, termination {interval,
    first_slope_min, relative_change_max}, initial_excitation [i, j],
    initial_amplitude, monitor_energy, terminate_early.
    """

    def __init__(self, hamiltonian: PairingHamiltonian, ansatz: AnsatzSpec, backend,
                 config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None):
        self.hamiltonian = hamiltonian
        self.ansatz = ansatz
        self.backend = backend
        self.config = config or {}
        self.seed = seed
        self.logger = logging.getLogger(self.__class__.__name__)

        self.spsa = SpsaConfig.from_dict(self.config.get("spsa", {}))
        self.rule = TerminationRule.from_dict(self.config.get("termination", {}))
        self.initial_excitation = tuple(self.config.get("initial_excitation", (1, 3)))
        self.initial_amplitude = float(self.config.get("initial_amplitude", 1.0))
        self.monitor_energy = bool(self.config.get("monitor_energy", False))
        self.terminate_early = bool(self.config.get("terminate_early", True))

        self._evaluations = 0
        self.iteration_callbacks: List[Callable[[IterationRecord], None]] = []

        self.logger.info(
            f"VQERunner initialized: {ansatz.n_parameters} parameters, backend={getattr(backend, 'name', backend)}, "
            f"max_iter={self.spsa.max_iter}, seed={seed}"
        )

    def add_iteration_callback(self, callback: Callable[[IterationRecord], None]):
        self.iteration_callbacks.append(callback)

    def _notify(self, iteration: IterationRecord) -> None:
        for callback in self.iteration_callbacks:
            try:
                callback(iteration)
            except Exception as e:
                self.logger.error(f"Error in iteration callback: {e}")

    def energy(self, theta: np.ndarray) -> float:
        seed = evaluation_seed(self.seed, self._evaluations)
        self._evaluations += 1
        return float(self.backend.energy(bind(self.ansatz, theta), seed))

    def run(self) -> RunRecord:
        """
        Optimize until a terminating verdict or max_iter.

        Returns:
            RunRecord with verdict CONVERGED or MAX_ITER

        Raises:
            RunAborted: When the termination rule asks for a repeat
        """
        scheme = self.hamiltonian.scheme
        rng = np.random.default_rng(self.seed)
        record = RunRecord(seed=self.seed, backend=str(getattr(self.backend, "name", self.backend)))

        self._evaluations = 0

        theta = initial_parameters(self.ansatz, self.initial_excitation, self.initial_amplitude)
        spsa = self.spsa
        if spsa.a is None:
            spsa = replace(spsa, a=calibrate_a(theta, spsa, self.energy, rng))
        record.calibrated_a = spsa.a

        for k in range(spsa.max_iter):
            theta, f_plus, f_minus = spsa_step(theta, k, spsa, self.energy, rng)
            energy = self.energy(theta) if self.monitor_energy else 0.5 * (f_plus + f_minus)
            iteration = IterationRecord(k + 1, [float(t) for t in theta], energy,
                                        correlation_energy(energy, scheme))
            record.iterations.append(iteration)
            self.logger.debug(f"k={iteration.k}: E={energy:.6f} MeV, E_corr={iteration.e_corr_mev:.6f} MeV")
            self._notify(iteration)

            if iteration.k % self.rule.interval:
                continue
            points = [(it.k, it.e_corr_mev) for it in record.iterations]
            m, c = fit_log(points)
            record.fits.append(FitPoint(iteration.k, m, c))
            verdict = check_termination(record.fits, iteration.k, self.rule)
            self.logger.info(f"k={iteration.k}: m_k={m:.5f}, c_k={c:.5f} -> {verdict.value}")

            if verdict is Verdict.CONTINUE:
                continue
            if self.terminate_early:
                record.verdict = verdict
                record.evaluations = self._evaluations
                if verdict is Verdict.ABORT_REPEAT:
                    raise RunAborted(record, f"Termination rule requested a repeat at k={iteration.k}")
                break
            if record.would_terminate_at is None:
                record.would_terminate_at = iteration.k
                record.early_verdict = verdict
                if verdict is Verdict.CONVERGED:
                    record.e_corr_bar_at_termination = record.tail_average(iteration.k)
        else:
            record.verdict = Verdict.MAX_ITER

        record.evaluations = self._evaluations
        record.e_corr_bar = record.tail_average()
        self.logger.info(
            f"Run finished: {record.verdict.value} after {len(record.iterations)} iterations, "
            f"Ē_corr = {record.e_corr_bar:.6f} MeV"
        )
        return record


def run_vqe(h: PairingHamiltonian, ansatz: AnsatzSpec, backend, cfg: Optional[Dict[str, Any]] = None,
            seed: Optional[int] = None) -> RunRecord:
    """Build a VQERunner and run it."""
    return VQERunner(h, ansatz, backend, cfg, seed).run()
