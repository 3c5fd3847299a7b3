"""
Coherence-time × error-probability sweep

For every (T, ε) cell a johor device is built and VQE is repeated until
`repeats` runs finish without an abort verdict (each slot retried at most
`retry_cap` times). The `select_best` tail averages closest to the
statevector reference give the cell's mean and std. Cells run in a process
pool; every attempt owns a seed derived from (master_seed, T index,
ε index, attempt).

Author: jsecco ®
"""

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from optimization.vqe import RunAborted, RunRecord, run_vqe
from physics.ansatz import build_ansatz_spec
from physics.hamiltonian import build_hamiltonian, exact_correlation_energy
from physics.levels import LevelScheme, scheme_from_dict
from simulation.backends import NoisyBackend, StatevectorBackend, johor_spec

from .reporting import HeatmapCell, discrepancy_pct

logger = logging.getLogger(__name__)

DESK_T_GRID_MS = [0.05, 5.0, 500.0]
DESK_EPS_GRID = [1e-8, 1e-4, 1e-2]
FULL_T_GRID_MS = [0.005, 0.05, 0.5, 1.0, 5.0, 50.0, 500.0]
FULL_EPS_GRID = [1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2]


class SweepError(RuntimeError):
    """Raised when the sweep cannot produce a reference or a grid."""


@dataclass
class SweepConfig:
    """
    Grid and repetition protocol of a sweep.

    Desk-scale defaults: 3×3 grid, 3 repeats, 3 selected, 2048 shots.
    """

    t_grid_ms: List[float] = field(default_factory=lambda: list(DESK_T_GRID_MS))
    eps_grid: List[float] = field(default_factory=lambda: list(DESK_EPS_GRID))
    repeats: int = 3
    select_best: int = 3
    shots: int = 2048
    trajectories: Optional[int] = None
    master_seed: int = 2024
    retry_cap: int = 3
    workers: int = 1
    reference: Optional[float] = None
    reference_mode: str = "statevector"

    def __post_init__(self):
        if self.select_best > self.repeats:
            raise ValueError(f"select_best ({self.select_best}) exceeds repeats ({self.repeats})")
        if self.select_best < 1 or self.retry_cap < 1:
            raise ValueError("select_best and retry_cap must be >= 1")
        if any(t <= 0 for t in self.t_grid_ms) or any(e <= 0 for e in self.eps_grid):
            raise ValueError("Grid values must be positive")
        if self.reference_mode not in ("statevector", "exact"):
            raise ValueError(f"Unknown reference_mode '{self.reference_mode}'")

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "SweepConfig":
        defaults = cls()
        return cls(
            t_grid_ms=[float(t) for t in config.get("t_grid_ms", defaults.t_grid_ms)],
            eps_grid=[float(e) for e in config.get("eps_grid", defaults.eps_grid)],
            repeats=int(config.get("repeats", defaults.repeats)),
            select_best=int(config.get("select_best", defaults.select_best)),
            shots=int(config.get("shots", defaults.shots)),
            trajectories=config.get("trajectories", defaults.trajectories),
            master_seed=int(config.get("master_seed", defaults.master_seed)),
            retry_cap=int(config.get("retry_cap", defaults.retry_cap)),
            workers=int(config.get("workers", defaults.workers)),
            reference=config.get("reference"),
            reference_mode=str(config.get("reference_mode", defaults.reference_mode)),
        )

    @classmethod
    def full_grid(cls, **overrides: Any) -> "SweepConfig":
        """7×7 grid, 10 repeats with the best 5 kept, 8192 shots."""
        settings: Dict[str, Any] = dict(
            t_grid_ms=list(FULL_T_GRID_MS), eps_grid=list(FULL_EPS_GRID),
            repeats=10, select_best=5, shots=8192,
        )
        settings.update(overrides)
        return cls(**settings)


@dataclass
class CellTask:
    t_index: int
    eps_index: int
    t_ms: float
    eps: float
    scheme: Dict[str, Any]
    vqe_config: Dict[str, Any]
    ansatz_mode: str
    repeats: int
    retry_cap: int
    shots: int
    trajectories: Optional[int]
    master_seed: int
    pair_prefactor: float = 1.0


@dataclass
class CellOutcome:
    task: CellTask
    e_corr_bars: List[float]
    verdicts: List[str]
    attempts: int
    records: List[RunRecord] = field(default_factory=list)


def attempt_seed(master_seed: int, t_index: int, eps_index: int, attempt: int) -> int:
    sequence = np.random.SeedSequence(master_seed, spawn_key=(t_index, eps_index, attempt))
    return int(sequence.generate_state(1)[0])


def select_closest(values: Sequence[float], reference: float, count: int) -> List[float]:
    """The `count` values nearest to the reference (minimizes Σ|v - ref|)."""
    return sorted(values, key=lambda v: abs(v - reference))[:count]


def summarize_cell(t_ms: float, eps: float, values: Sequence[float], reference: float,
                   select_best: int) -> HeatmapCell:
    """Mean and population std of the selected values; NaN when too few succeeded."""
    if len(values) < select_best:
        nan = float("nan")
        return HeatmapCell(t_ms, eps, nan, nan, len(values), nan)
    chosen = select_closest(values, reference, select_best)
    mean = float(np.mean(chosen))
    std = float(np.std(chosen))
    return HeatmapCell(t_ms, eps, mean, std, len(values), discrepancy_pct(mean, reference))


def run_cell(task: CellTask) -> CellOutcome:
    """Process-pool entry point: all repeats of one grid cell."""
    cell_logger = logging.getLogger("SweepCell")
    scheme = scheme_from_dict(task.scheme)
    hamiltonian = build_hamiltonian(scheme, task.pair_prefactor)
    ansatz = build_ansatz_spec(scheme, task.ansatz_mode)
    backend = NoisyBackend(hamiltonian.qubit, johor_spec(task.t_ms, task.eps), task.shots, task.trajectories)

    outcome = CellOutcome(task, [], [], 0)
    for slot in range(task.repeats):
        for _ in range(task.retry_cap):
            seed = attempt_seed(task.master_seed, task.t_index, task.eps_index, outcome.attempts)
            outcome.attempts += 1
            try:
                record = run_vqe(hamiltonian, ansatz, backend, task.vqe_config, seed)
            except RunAborted as e:
                outcome.verdicts.append(e.record.verdict.value)
                cell_logger.info(f"T={task.t_ms} ms, eps={task.eps}: attempt aborted ({e})")
                continue
            outcome.verdicts.append(record.verdict.value)
            outcome.e_corr_bars.append(record.e_corr_bar)
            outcome.records.append(record)
            break
        else:
            cell_logger.warning(f"T={task.t_ms} ms, eps={task.eps}: slot {slot} exhausted its retries")
    return outcome


def reference_cache_key(scheme: LevelScheme, mode: str, vqe_config: Dict[str, Any], seed: int) -> str:
    payload = json.dumps(
        {"scheme": scheme.fingerprint(), "mode": mode, "vqe": vqe_config, "seed": seed},
        sort_keys=True, default=str,
    ).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def compute_reference(scheme: LevelScheme, vqe_config: Dict[str, Any], ansatz_mode: str,
                      mode: str = "statevector", seed: int = 0, retry_cap: int = 3,
                      pair_prefactor: float = 1.0) -> float:
    """
    Statevector VQE tail average (or the exact correlation energy).

    Raises:
        SweepError: If every statevector attempt aborted
    """
    hamiltonian = build_hamiltonian(scheme, pair_prefactor)
    if mode == "exact":
        return exact_correlation_energy(hamiltonian)
    ansatz = build_ansatz_spec(scheme, ansatz_mode)
    for attempt in range(retry_cap):
        try:
            record = run_vqe(hamiltonian, ansatz, StatevectorBackend(hamiltonian.qubit), vqe_config,
                             attempt_seed(seed, 0, 0, attempt))
            return float(record.e_corr_bar)
        except RunAborted as e:
            logger.warning(f"Statevector reference attempt {attempt} aborted: {e}")
    raise SweepError("Statevector reference run aborted on every attempt")


def cached_reference(out_dir: Path, scheme: LevelScheme, vqe_config: Dict[str, Any], ansatz_mode: str,
                     mode: str, seed: int, pair_prefactor: float = 1.0) -> float:
    """Reference E_corr, read from or stored in out_dir/reference_<key>.json."""
    key = reference_cache_key(scheme, mode, {**vqe_config, "pair_prefactor": pair_prefactor}, seed)
    path = Path(out_dir) / f"reference_{key}.json"
    if path.exists():
        with open(path, "r", encoding="utf-8") as f:
            value = float(json.load(f)["e_corr_mev"])
        logger.info(f"Using cached reference {value:.6f} MeV from {path}")
        return value
    value = compute_reference(scheme, vqe_config, ansatz_mode, mode, seed, pair_prefactor=pair_prefactor)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"e_corr_mev": value, "mode": mode, "scheme": scheme.fingerprint()}, f, indent=2)
    return value


class SweepRunner:
    """
    Runs the (T, ε) grid and turns outcomes into heatmap cells.
    """

    def __init__(self, scheme: LevelScheme, sweep: SweepConfig, vqe_config: Optional[Dict[str, Any]] = None,
                 ansatz_mode: str = "same_charge", out_dir: Optional[Path] = None,
                 pair_prefactor: float = 1.0):
        self.scheme = scheme
        self.pair_prefactor = pair_prefactor
        self.sweep = sweep
        self.vqe_config = vqe_config or {}
        self.ansatz_mode = ansatz_mode
        self.out_dir = Path(out_dir) if out_dir else None
        self.logger = logging.getLogger(self.__class__.__name__)

        self.outcomes: List[CellOutcome] = []
        self.cell_callbacks: List[Callable[[HeatmapCell], None]] = []

        self.logger.info(
            f"SweepRunner initialized: {len(sweep.t_grid_ms)}x{len(sweep.eps_grid)} grid, "
            f"repeats={sweep.repeats}, select_best={sweep.select_best}, shots={sweep.shots}"
        )

    def add_cell_callback(self, callback: Callable[[HeatmapCell], None]):
        self.cell_callbacks.append(callback)

    def _notify(self, cell: HeatmapCell) -> None:
        for callback in self.cell_callbacks:
            try:
                callback(cell)
            except Exception as e:
                self.logger.error(f"Error in cell callback: {e}")

    def reference(self) -> float:
        if self.sweep.reference is not None:
            return float(self.sweep.reference)
        if self.out_dir is not None:
            return cached_reference(self.out_dir, self.scheme, self.vqe_config, self.ansatz_mode,
                                    self.sweep.reference_mode, self.sweep.master_seed,
                                    self.pair_prefactor)
        return compute_reference(self.scheme, self.vqe_config, self.ansatz_mode,
                                 self.sweep.reference_mode, self.sweep.master_seed,
                                 pair_prefactor=self.pair_prefactor)

    def tasks(self) -> List[CellTask]:
        scheme_data = self.scheme.to_dict()
        return [
            CellTask(ti, ei, t, eps, scheme_data, self.vqe_config, self.ansatz_mode, self.sweep.repeats,
                     self.sweep.retry_cap, self.sweep.shots, self.sweep.trajectories, self.sweep.master_seed,
                     self.pair_prefactor)
            for ti, t in enumerate(self.sweep.t_grid_ms)
            for ei, eps in enumerate(self.sweep.eps_grid)
        ]

    def run(self) -> Tuple[float, List[HeatmapCell]]:
        """
        Run every cell.

        Returns:
            (reference E_corr, cells in (T, ε) grid order)
        """
        reference = self.reference()
        self.logger.info(f"Reference E_corr = {reference:.6f} MeV")
        tasks = self.tasks()
        if self.sweep.workers > 1:
            with ProcessPoolExecutor(max_workers=self.sweep.workers) as pool:
                outcomes = list(pool.map(run_cell, tasks))
        else:
            outcomes = [run_cell(task) for task in tasks]

        self.outcomes = outcomes
        cells = []
        for outcome in outcomes:
            task = outcome.task
            cell = summarize_cell(task.t_ms, task.eps, outcome.e_corr_bars, reference, self.sweep.select_best)
            if cell.failed:
                self.logger.warning(
                    f"Cell T={task.t_ms} ms, eps={task.eps} failed: {cell.n_success} successes "
                    f"in {outcome.attempts} attempts"
                )
            else:
                self.logger.info(
                    f"Cell T={task.t_ms} ms, eps={task.eps}: {cell.mean_e_corr:.5f} ± {cell.std:.5f} MeV "
                    f"({cell.discrepancy_pct:.1f}%)"
                )
            cells.append(cell)
            self._notify(cell)
        return reference, cells


def sweep(scheme: LevelScheme, cfg: SweepConfig, vqe_config: Optional[Dict[str, Any]] = None,
          ansatz_mode: str = "same_charge", out_dir: Optional[Path] = None,
          pair_prefactor: float = 1.0) -> List[HeatmapCell]:
    _, cells = SweepRunner(scheme, cfg, vqe_config, ansatz_mode, out_dir, pair_prefactor).run()
    return cells
