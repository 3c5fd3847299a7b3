"""
Experiments Module

Noise-grid sweep with the repeat/selection protocol, the k = 0 ansatz
experiment and CSV/SVG result emission.

Author: jsecco ®
"""

from .reporting import HeatmapCell, emit_heatmap, make_run_dir, read_heatmap_csv, write_heatmap_csv
from .sweep import SweepConfig, SweepError, SweepRunner, select_closest, summarize_cell, sweep
from .e0 import E0Result, e0_experiment

__all__ = [
    'HeatmapCell', 'emit_heatmap', 'make_run_dir', 'read_heatmap_csv', 'write_heatmap_csv',
    'SweepConfig', 'SweepError', 'SweepRunner', 'select_closest', 'summarize_cell', 'sweep',
    'E0Result', 'e0_experiment',
]
