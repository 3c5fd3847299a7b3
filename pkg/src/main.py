#!/usr/bin/env python3
"""
Pairing VQE Lab - Main Application
Command-line entry point: exact reference, single VQE runs, noise-grid
sweeps, the k = 0 ansatz experiment and native-circuit dumps.

Author: jsecco ®
"""

import argparse
import copy
import json
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

# Ensure src directory is in path for imports
src_dir = Path(__file__).parent
sys.path.insert(0, str(src_dir))

from compiler.transpiler import transpile  # noqa: E402
from experiments.e0 import e0_experiment  # noqa: E402
from experiments.reporting import emit_heatmap, make_run_dir, write_json  # noqa: E402
from experiments.sweep import SweepConfig, SweepError, SweepRunner  # noqa: E402
from optimization.spsa import SpsaConfig  # noqa: E402
from optimization.termination import TerminationRule  # noqa: E402
from optimization.vqe import RunAborted, VQERunner  # noqa: E402
from physics.ansatz import ALL_PAIRS, AnsatzError, bind, build_ansatz_spec, build_upccd, initial_parameters  # noqa: E402
from physics.hamiltonian import SectorError, build_hamiltonian, exact_ground  # noqa: E402
from physics.levels import LevelScheme, LevelSchemeError, he6_scheme, load_level_scheme  # noqa: E402
from simulation.backends import BackendError, make_backend, parse_backend_label  # noqa: E402
from simulation.noise import NoiseSpecError  # noqa: E402

APP_NAME = "Pairing VQE Lab"
VERSION = "1.0.1"

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_RUNTIME_ERROR = 3


class ConfigurationError(ValueError):
    """Raised for inconsistent or unreadable configuration."""


CONFIG_ERRORS = (ConfigurationError, LevelSchemeError, BackendError, NoiseSpecError,
                 AnsatzError, SectorError)


def setup_logging(config: Dict[str, Any]) -> None:
    """
    Set up application logging.

    Args:
        config: Application configuration dictionary
    """
    log_config = config.get('logging', {})
    log_level = log_config.get('level', 'INFO')
    log_format = log_config.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    date_format = log_config.get('date_format', '%Y-%m-%d %H:%M:%S')
    log_file = Path(log_config.get('file', 'logs/vqe_lab.log'))

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    try:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        rotation_config = log_config.get('rotation', {})
        handlers.append(RotatingFileHandler(
            log_file,
            maxBytes=parse_size(rotation_config.get('max_size', '10MB')),
            backupCount=int(rotation_config.get('backup_count', 5)),
        ))
    except OSError as e:
        print(f"Warning: could not open log file {log_file}: {e}", file=sys.stderr)

    logging.basicConfig(
        level=getattr(logging, str(log_level).upper(), logging.INFO),
        format=log_format,
        datefmt=date_format,
        handlers=handlers,
        force=True
    )


def parse_size(text: Any) -> int:
    """Convert a size string such as '10MB' to bytes."""
    if isinstance(text, int):
        return text
    text = str(text).strip().upper()
    size_map = {'KB': 1024, 'MB': 1024 * 1024, 'GB': 1024 * 1024 * 1024}
    for suffix, multiplier in size_map.items():
        if text.endswith(suffix):
            return int(float(text[:-2]) * multiplier)
    return int(text)


def get_default_config() -> Dict[str, Any]:
    """
    Get default configuration if config file is not available.

    Returns:
        Default configuration dictionary
    """
    return {
        'dataset': {
            'levels_file': None,
            'pair_prefactor': 1.0
        },
        'ansatz': {
            'mode': 'same_charge',
            'initial_excitation': [1, 3],
            'initial_amplitude': 1.0
        },
        'spsa': {
            'alpha': 0.602,
            'gamma': 0.101,
            'A': 0.0,
            'c': 0.1,
            'a': None,
            'max_iter': 200,
            'target_first_step_mev': 1.0,
            'calibration_samples': 25
        },
        'termination': {
            'interval': 10,
            'first_slope_min': 0.1,
            'relative_change_max': 0.08,
            'terminate_early': True
        },
        'backend': {
            'name': 'statevector',
            'shots': 8192,
            'trajectories': None,
            'monitor_energy': False,
            'seed': 7
        },
        'sweep': {
            't_grid_ms': [0.05, 5.0, 500.0],
            'eps_grid': [1e-8, 1e-4, 1e-2],
            'repeats': 3,
            'select_best': 3,
            'shots': 2048,
            'trajectories': None,
            'master_seed': 2024,
            'retry_cap': 3,
            'workers': 1,
            'reference': None,
            'reference_mode': 'statevector'
        },
        'e0': {
            'repeats': 10,
            'shots': 8192
        },
        'output': {
            'base_dir': 'runs'
        },
        'logging': {
            'level': 'INFO',
            'file': 'logs/vqe_lab.log',
            'rotation': {
                'max_size': '10MB',
                'backup_count': 5
            }
        }
    }


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_configuration(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load application configuration, deep-merged over the defaults.

    Args:
        config_path: YAML file; config/vqe_config.yaml when omitted

    Returns:
        Configuration dictionary
    """
    config_file = Path(config_path) if config_path else Path('config/vqe_config.yaml')

    if not config_file.exists():
        if config_path:
            raise ConfigurationError(f"Configuration file not found: {config_file}")
        logging.warning(f"Configuration file not found: {config_file}")
        logging.info("Using default configuration")
        return get_default_config()

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            loaded = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Error loading configuration {config_file}: {e}") from e
    if not isinstance(loaded, dict):
        raise ConfigurationError(f"Configuration {config_file} is not a mapping")
    logging.info(f"Loaded configuration from {config_file}")
    return deep_merge(get_default_config(), loaded)


def apply_overrides(config: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    """Command-line flags take precedence over the configuration file."""
    if args.debug:
        config['logging']['level'] = 'DEBUG'
    if args.levels:
        config['dataset']['levels_file'] = args.levels
    if args.backend:
        config['backend']['name'] = args.backend
    if args.shots is not None:
        config['backend']['shots'] = args.shots
        config['sweep']['shots'] = args.shots
        config['e0']['shots'] = args.shots
    if args.trajectories is not None:
        config['backend']['trajectories'] = args.trajectories
        config['sweep']['trajectories'] = args.trajectories
    if args.seed is not None:
        config['backend']['seed'] = args.seed
        config['sweep']['master_seed'] = args.seed
    if args.max_iter is not None:
        config['spsa']['max_iter'] = args.max_iter
    if args.out:
        config['output']['base_dir'] = args.out
    if args.no_terminate_early:
        config['termination']['terminate_early'] = False
    if getattr(args, 'workers', None):
        config['sweep']['workers'] = args.workers
    return config


def build_vqe_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Flatten the YAML sections into the dictionary VQERunner reads."""
    termination = dict(config['termination'])
    terminate_early = bool(termination.pop('terminate_early', True))
    return {
        'spsa': {k: v for k, v in config['spsa'].items() if v is not None},
        'termination': termination,
        'initial_excitation': list(config['ansatz']['initial_excitation']),
        'initial_amplitude': float(config['ansatz']['initial_amplitude']),
        'monitor_energy': bool(config['backend'].get('monitor_energy', False)),
        'terminate_early': terminate_early,
        'trajectories': config['backend'].get('trajectories'),
    }


def validate_configuration(config: Dict[str, Any]) -> None:
    """
    Check the numeric sections before any command runs.

    Raises:
        ConfigurationError: For values the optimizer, termination rule or sweep reject
    """
    try:
        vqe = build_vqe_config(config)
        SpsaConfig.from_dict(vqe['spsa'])
        TerminationRule.from_dict(vqe['termination'])
        SweepConfig.from_dict(config['sweep'])
        float(config['dataset']['pair_prefactor'])
        int(config['backend']['shots'])
        int(config['backend']['seed'])
        int(config['e0']['repeats'])
        int(config['e0']['shots'])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid configuration value: {e}") from e


def load_scheme(config: Dict[str, Any]) -> LevelScheme:
    levels_file = config['dataset'].get('levels_file')
    if levels_file:
        return load_level_scheme(levels_file)
    return he6_scheme()


def cmd_exact(config: Dict[str, Any], args: argparse.Namespace) -> int:
    logger = logging.getLogger('exact')
    scheme = load_scheme(config)
    h = build_hamiltonian(scheme, float(config['dataset']['pair_prefactor']))
    e_ground = exact_ground(h, scheme.n_particles)
    e_corr = e_ground - h.hf_energy
    logger.info(f"{scheme.label}: E_HF = {h.hf_energy:.6f} MeV, E_exact = {e_ground:.6f} MeV")
    print(f"E_HF    = {h.hf_energy:.6f} MeV")
    print(f"E_exact = {e_ground:.6f} MeV")
    print(f"E_corr  = {e_corr:.6f} MeV")
    summary = {
        'scheme': scheme.to_dict(),
        'hf_energy_mev': h.hf_energy,
        'exact_energy_mev': e_ground,
        'e_corr_mev': e_corr,
    }
    if config['ansatz']['mode'] == ALL_PAIRS:
        bound = exact_ground(h, scheme.n_particles, charge_conserving=False)
        summary['charge_mixing_bound_mev'] = bound
        print(f"E_bound = {bound:.6f} MeV (all_pairs ansatz, charges may mix)")
    if args.out:
        run_dir = make_run_dir(config['output']['base_dir'])
        write_json(summary, run_dir / 'summary.json')
    return EXIT_OK


def cmd_run(config: Dict[str, Any], args: argparse.Namespace) -> int:
    logger = logging.getLogger('run')
    scheme = load_scheme(config)
    h = build_hamiltonian(scheme, float(config['dataset']['pair_prefactor']))
    ansatz = build_ansatz_spec(scheme, config['ansatz']['mode'])
    backend_config = config['backend']
    backend = parse_backend_label(backend_config['name'], h.qubit, backend_config)
    seed = int(backend_config['seed'])
    run_dir = make_run_dir(config['output']['base_dir'])

    runner = VQERunner(h, ansatz, backend, build_vqe_config(config), seed)
    try:
        record = runner.run()
    except RunAborted as e:
        logger.error(f"Run aborted: {e}")
        e.record.write(run_dir / 'records' / f'run_{seed}.jsonl', run_dir / 'summary.json')
        return EXIT_NOT_CONVERGED

    record.write(run_dir / 'records' / f'run_{seed}.jsonl', run_dir / 'summary.json')
    print(f"Ē_corr = {record.e_corr_bar:.6f} MeV ({record.verdict.value}, {len(record.iterations)} iterations)")
    print(f"Results: {run_dir}")
    return EXIT_OK


def cmd_sweep(config: Dict[str, Any], args: argparse.Namespace) -> int:
    logger = logging.getLogger('sweep')
    scheme = load_scheme(config)
    sweep_config = SweepConfig.from_dict(config['sweep'])
    run_dir = make_run_dir(config['output']['base_dir'])

    runner = SweepRunner(scheme, sweep_config, build_vqe_config(config), config['ansatz']['mode'],
                         Path(config['output']['base_dir']),
                         float(config['dataset']['pair_prefactor']))
    try:
        reference, cells = runner.run()
    except SweepError as e:
        logger.error(f"Sweep failed: {e}")
        return EXIT_NOT_CONVERGED

    for outcome in runner.outcomes:
        task = outcome.task
        for index, record in enumerate(outcome.records):
            record.write(run_dir / 'records' / f'cell_{task.t_index}_{task.eps_index}_{index}.jsonl')
    paths = emit_heatmap(cells, run_dir, reference)
    failed = [cell for cell in cells if cell.failed]
    write_json({
        'reference_e_corr_mev': reference,
        'sweep': config['sweep'],
        'cells': [cell.to_row() for cell in cells],
        'failed_cells': len(failed),
        'heatmap': {k: str(v) for k, v in paths.items()},
    }, run_dir / 'summary.json')
    print(f"Reference E_corr = {reference:.6f} MeV; heatmap: {paths['svg']}")
    if failed:
        logger.warning(f"{len(failed)} of {len(cells)} cells failed")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_e0(config: Dict[str, Any], args: argparse.Namespace) -> int:
    scheme = load_scheme(config)
    h = build_hamiltonian(scheme, float(config['dataset']['pair_prefactor']))
    ansatz = build_ansatz_spec(scheme, config['ansatz']['mode'])
    label = config['backend']['name']
    noise = None if label.strip().lower() in ('statevector', 'sampled') else make_backend(label)
    vqe_config = build_vqe_config(config)
    result = e0_experiment(h, ansatz, noise, int(config['e0']['repeats']), int(config['e0']['shots']),
                           int(config['backend']['seed']), vqe_config)
    run_dir = make_run_dir(config['output']['base_dir'])
    write_json(result.to_dict(), run_dir / 'summary.json')
    print(f"E0_corr = {result.mean:.6f} ± {result.std:.6f} MeV (statevector {result.statevector:.6f} MeV)")
    return EXIT_OK


def cmd_transpile(config: Dict[str, Any], args: argparse.Namespace) -> int:
    scheme = load_scheme(config)
    ansatz = build_ansatz_spec(scheme, config['ansatz']['mode'])
    theta = initial_parameters(ansatz, tuple(config['ansatz']['initial_excitation']),
                               float(config['ansatz']['initial_amplitude']))
    native = transpile(build_upccd(bind(ansatz, theta)))
    text = native.to_text()
    ops = native.count_ops()
    print(text)
    print(f"# depth {native.depth()}, ops {json.dumps(ops, sort_keys=True)}")
    if args.out:
        run_dir = make_run_dir(config['output']['base_dir'])
        (run_dir / 'native_circuit.txt').write_text(text + "\n", encoding='utf-8')
        write_json({'depth': native.depth(), 'ops': ops, 'n_qubits': native.n_qubits}, run_dir / 'summary.json')
    return EXIT_OK


COMMANDS = {
    'exact': cmd_exact,
    'run': cmd_run,
    'sweep': cmd_sweep,
    'e0': cmd_e0,
    'transpile': cmd_transpile,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=APP_NAME)
    parser.add_argument("command", choices=sorted(COMMANDS), help="Action to perform")
    parser.add_argument("--config", "-c", type=str, help="Configuration file path")
    parser.add_argument("--debug", "-d", action="store_true", help="Enable debug logging")
    parser.add_argument("--levels", type=str, help="Level-scheme JSON/YAML file")
    parser.add_argument("--backend", type=str,
                        help="statevector | sampled | guadalupe-mean | johor:T=<ms>,eps=<p>")
    parser.add_argument("--shots", type=int, help="Shots per QWC group")
    parser.add_argument("--trajectories", type=int, help="Noise trajectories per circuit")
    parser.add_argument("--seed", type=int, help="Run seed (master seed for sweeps)")
    parser.add_argument("--out", type=str, help="Base output directory")
    parser.add_argument("--max-iter", dest="max_iter", type=int, help="SPSA iteration cap")
    parser.add_argument("--workers", type=int, help="Sweep worker processes")
    parser.add_argument("--no-terminate-early", dest="no_terminate_early", action="store_true",
                        help="Iterate to max-iter, recording where termination would fire")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG_ERROR

    try:
        config = apply_overrides(load_configuration(args.config), args)
        validate_configuration(config)
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    setup_logging(config)
    logger = logging.getLogger(__name__)

    logger.info("=" * 60)
    logger.info(f"{APP_NAME} Starting: {args.command}")
    logger.info("Author: jsecco ®")
    logger.info(f"Version: {VERSION}")
    logger.info("=" * 60)

    try:
        return COMMANDS[args.command](config, args)
    except CONFIG_ERRORS as e:
        logger.error(f"Configuration error in '{args.command}': {e}")
        return EXIT_CONFIG_ERROR
    except Exception as e:
        logger.error(f"Fatal error in '{args.command}': {e}", exc_info=True)
        return EXIT_RUNTIME_ERROR
    finally:
        logger.info(f"{APP_NAME} finished: {args.command}")
        logger.info("=" * 60)


if __name__ == "__main__":
    sys.exit(main())
