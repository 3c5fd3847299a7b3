#!/usr/bin/env python3
"""
Test script for the VQE driver and its run records
"""

import json
import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from optimization.termination import Verdict
from optimization.vqe import RunAborted, VQERunner, run_vqe
from physics.ansatz import build_ansatz_spec
from physics.hamiltonian import build_hamiltonian, exact_ground
from physics.levels import he6_scheme
from simulation.backends import StatevectorBackend

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

SHORT_RUN = {
    "spsa": {"max_iter": 20, "calibration_samples": 5},
    "terminate_early": False,
}


class RisingBackend:
    """Energy that grows with every evaluation, whatever the parameters."""

    name = "rising"

    def __init__(self, start: float):
        self.value = start

    def energy(self, spec, seed=None):
        self.value += 0.01
        return self.value


@pytest.fixture(scope="module")
def he6():
    return build_hamiltonian(he6_scheme())


@pytest.fixture(scope="module")
def ansatz():
    return build_ansatz_spec(he6_scheme())


@pytest.fixture(scope="module")
def short_record(he6, ansatz):
    return run_vqe(he6, ansatz, StatevectorBackend(he6.qubit), SHORT_RUN, seed=42)


def test_iterations_are_contiguous(short_record):
    assert [it.k for it in short_record.iterations] == list(range(1, 21))
    assert short_record.verdict in (Verdict.MAX_ITER, Verdict.CONVERGED)
    assert [fit.k for fit in short_record.fits] == [10, 20]


def test_tail_average_uses_last_ten(short_record):
    series = short_record.e_corr_series()
    assert short_record.e_corr_bar == pytest.approx(np.mean(series[-10:]))
    assert short_record.tail_average(10) == pytest.approx(np.mean(series[:10]))


def test_correlation_energy_relative_to_reference(short_record):
    hf_sum = he6_scheme().hf_energy()
    for iteration in short_record.iterations:
        assert iteration.e_corr_mev == pytest.approx(iteration.energy_mev - hf_sum)


def test_evaluation_count(short_record):
    # calibration pairs, then exactly the two SPSA evaluations per iteration
    assert short_record.evaluations == 2 * 5 + 2 * 20
    assert short_record.calibrated_a > 0


def test_recorded_energy_is_mean_of_spsa_pair(he6, ansatz):
    pairs = []

    class PairSpy(StatevectorBackend):
        def energy(self, spec, seed=None):
            value = super().energy(spec, seed)
            pairs.append(value)
            return value

    record = run_vqe(he6, ansatz, PairSpy(he6.qubit), SHORT_RUN, seed=42)
    tail = pairs[2 * 5:]
    assert record.iterations[0].energy_mev == pytest.approx(0.5 * (tail[0] + tail[1]))
    assert record.iterations[-1].energy_mev == pytest.approx(0.5 * (tail[-2] + tail[-1]))


def test_energy_monitor_is_opt_in(he6, ansatz):
    config = dict(SHORT_RUN, monitor_energy=True)
    record = run_vqe(he6, ansatz, StatevectorBackend(he6.qubit), config, seed=42)
    assert record.evaluations == 2 * 5 + 3 * 20


def test_second_run_calibrates_again(he6, ansatz):
    runner = VQERunner(he6, ansatz, StatevectorBackend(he6.qubit), SHORT_RUN, seed=4)
    first = runner.run()
    second = runner.run()
    assert runner.spsa.a is None
    assert second.calibrated_a == first.calibrated_a
    assert second.evaluations == first.evaluations == 2 * 5 + 2 * 20
    assert second.e_corr_series() == first.e_corr_series()


def test_same_seed_same_run(he6, ansatz, short_record):
    again = run_vqe(he6, ansatz, StatevectorBackend(he6.qubit), SHORT_RUN, seed=42)
    assert again.e_corr_series() == short_record.e_corr_series()
    assert again.calibrated_a == short_record.calibrated_a


def test_energies_respect_variational_bound(he6, short_record):
    exact = exact_ground(he6, 6)
    assert min(it.energy_mev for it in short_record.iterations) >= exact - 1e-9


def test_callbacks_are_isolated(he6, ansatz):
    seen = []

    def broken(iteration):
        raise RuntimeError("display went away")

    runner = VQERunner(he6, ansatz, StatevectorBackend(he6.qubit), SHORT_RUN, seed=1)
    runner.add_iteration_callback(broken)
    runner.add_iteration_callback(lambda it: seen.append(it.k))
    record = runner.run()
    assert seen == list(range(1, 21))
    assert len(record.iterations) == 20


def test_rising_energy_requests_repeat(he6, ansatz):
    backend = RisingBackend(he6_scheme().hf_energy())
    config = {"spsa": {"max_iter": 50, "calibration_samples": 3}, "terminate_early": True}
    with pytest.raises(RunAborted) as excinfo:
        VQERunner(he6, ansatz, backend, config, seed=3).run()
    record = excinfo.value.record
    assert record.verdict is Verdict.ABORT_REPEAT
    assert len(record.iterations) == 10


def test_rising_energy_recorded_without_early_exit(he6, ansatz):
    backend = RisingBackend(he6_scheme().hf_energy())
    config = {"spsa": {"max_iter": 20, "calibration_samples": 3}, "terminate_early": False}
    record = VQERunner(he6, ansatz, backend, config, seed=3).run()
    assert record.verdict is Verdict.MAX_ITER
    assert record.would_terminate_at == 10
    assert record.early_verdict is Verdict.ABORT_REPEAT


def test_record_files(short_record, tmp_path):
    jsonl = tmp_path / "records" / "run_42.jsonl"
    summary = tmp_path / "summary.json"
    short_record.write(jsonl, summary)
    lines = jsonl.read_text().splitlines()
    assert len(lines) == 20
    first = json.loads(lines[0])
    assert set(first) == {"k", "theta", "energy_mev", "e_corr_mev"}
    assert len(first["theta"]) == 5
    data = json.loads(summary.read_text())
    assert data["iterations"] == 20
    assert data["seed"] == 42
    assert data["verdict"] == short_record.verdict.value


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
