"""
Result emission

Heatmap cells to CSV and to a standalone SVG (matplotlib, Agg backend),
JSON summaries and the timestamped run-directory layout.

Author: jsecco ®
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import Normalize  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

logger = logging.getLogger(__name__)

CSV_FIELDS = ["t_ms", "eps", "mean_e_corr_mev", "std_mev", "n_success", "discrepancy_pct"]
DISCREPANCY_COLOR_MAX_PCT = 100.0


@dataclass
class HeatmapCell:
    """Result of one (T, ε) grid point; failed cells carry NaN statistics."""

    t_ms: float
    eps: float
    mean_e_corr: float
    std: float
    n_success: int
    discrepancy_pct: float

    @property
    def failed(self) -> bool:
        return math.isnan(self.mean_e_corr)

    def to_row(self) -> Dict[str, Any]:
        return {
            "t_ms": repr(float(self.t_ms)),
            "eps": repr(float(self.eps)),
            "mean_e_corr_mev": repr(float(self.mean_e_corr)),
            "std_mev": repr(float(self.std)),
            "n_success": int(self.n_success),
            "discrepancy_pct": repr(float(self.discrepancy_pct)),
        }


def discrepancy_pct(mean: float, reference: float) -> float:
    if math.isnan(mean) or reference == 0.0:
        return float("nan")
    return abs(mean - reference) / abs(reference) * 100.0


def make_run_dir(base: Union[str, Path] = "runs", stamp: Optional[str] = None) -> Path:
    """Create runs/<timestamp>/records and return the run directory."""
    stamp = stamp or datetime.now().strftime("%Y%m%d_%H%M%S")
    run_dir = Path(base) / stamp
    (run_dir / "records").mkdir(parents=True, exist_ok=True)
    return run_dir


def write_json(data: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=str)
    return path


def write_heatmap_csv(cells: Sequence[HeatmapCell], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for cell in cells:
            writer.writerow(cell.to_row())
    return path


def read_heatmap_csv(path: Union[str, Path]) -> List[HeatmapCell]:
    with open(path, "r", newline="", encoding="utf-8") as f:
        return [
            HeatmapCell(
                t_ms=float(row["t_ms"]),
                eps=float(row["eps"]),
                mean_e_corr=float(row["mean_e_corr_mev"]),
                std=float(row["std_mev"]),
                n_success=int(row["n_success"]),
                discrepancy_pct=float(row["discrepancy_pct"]),
            )
            for row in csv.DictReader(f)
        ]


def render_heatmap_svg(cells: Sequence[HeatmapCell], path: Union[str, Path],
                       reference: Optional[float] = None) -> Path:
    """
    Grid of T (columns) by ε (rows), green to red by discrepancy.

    Each cell is a Rectangle with gid 'cell-<i>' annotated with its mean and
    std; failed cells are grey.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    t_values = sorted({c.t_ms for c in cells})
    eps_values = sorted({c.eps for c in cells})
    cmap = plt.get_cmap("RdYlGn_r")
    norm = Normalize(vmin=0.0, vmax=DISCREPANCY_COLOR_MAX_PCT)

    fig, ax = plt.subplots(figsize=(1.3 * len(t_values) + 2.5, 1.0 * len(eps_values) + 2.0))
    for index, cell in enumerate(cells):
        col = t_values.index(cell.t_ms)
        row = eps_values.index(cell.eps)
        if cell.failed:
            color = "#BDBDBD"
            text = f"failed\nn={cell.n_success}"
        else:
            color = cmap(norm(min(cell.discrepancy_pct, DISCREPANCY_COLOR_MAX_PCT)))
            text = f"{cell.mean_e_corr:.3f}\n±{cell.std:.3f}"
        rect = Rectangle((col, row), 1.0, 1.0, facecolor=color, edgecolor="white", linewidth=1.0)
        rect.set_gid(f"cell-{index}")
        ax.add_patch(rect)
        ax.text(col + 0.5, row + 0.5, text, ha="center", va="center", fontsize=7)

    ax.set_xlim(0, len(t_values))
    ax.set_ylim(0, len(eps_values))
    ax.set_xticks([i + 0.5 for i in range(len(t_values))])
    ax.set_xticklabels([f"{t:g}" for t in t_values])
    ax.set_yticks([i + 0.5 for i in range(len(eps_values))])
    ax.set_yticklabels([f"{e:.0e}" for e in eps_values])
    ax.set_xlabel("coherence time T (ms)")
    ax.set_ylabel("error probability ε")
    title = "E_corr (MeV) by device spec"
    if reference is not None:
        title += f", reference {reference:.4f} MeV"
    ax.set_title(title, fontsize=9)
    mappable = plt.cm.ScalarMappable(norm=norm, cmap=cmap)
    fig.colorbar(mappable, ax=ax, label="discrepancy (%)")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def emit_heatmap(cells: Sequence[HeatmapCell], out_dir: Union[str, Path],
                 reference: Optional[float] = None) -> Dict[str, Path]:
    """
    Write heatmap.csv and heatmap.svg into out_dir.

    Raises:
        ValueError: For an empty cell list
        OSError: If the directory is not writable
    """
    if not cells:
        raise ValueError("No heatmap cells to emit")
    out_dir = Path(out_dir)
    paths = {
        "csv": write_heatmap_csv(cells, out_dir / "heatmap.csv"),
        "svg": render_heatmap_svg(cells, out_dir / "heatmap.svg", reference),
    }
    logger.info(f"Heatmap written: {paths['csv']}, {paths['svg']}")
    return paths


def cells_to_dicts(cells: Sequence[HeatmapCell]) -> List[Dict[str, Any]]:
    return [asdict(cell) for cell in cells]
