"""
Pair-level schemes

A level scheme lists time-conjugate pair levels with their single-particle
energy, charge and Hartree-Fock occupation. Pair level p (1-based) lives on
qubits 2(p-1) and 2(p-1)+1.

Author: jsecco ®
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class LevelSchemeError(ValueError):
    """Raised for inconsistent or unreadable level schemes."""


class Charge(Enum):
    NEUTRON = "neutron"
    PROTON = "proton"


@dataclass(frozen=True)
class Level:
    index: int
    e_mev: float
    charge: Charge
    occupied: bool

    @property
    def qubits(self) -> Tuple[int, int]:
        return level_qubits(self.index)


def level_qubits(index: int) -> Tuple[int, int]:
    """Qubits of pair level `index` and of its conjugate partner."""
    return (2 * (index - 1), 2 * (index - 1) + 1)


@dataclass
class LevelScheme:
    """
    Single-particle pair levels plus the pairing strengths.

    g_mev maps each charge to G_q. Nucleon counts N_q follow from the
    occupation (two per occupied pair); an explicit value that disagrees
    with the occupation is rejected.
    """

    levels: List[Level]
    g_mev: Dict[Charge, float]
    n_nucleons: Dict[Charge, int] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        self.levels = sorted(self.levels, key=lambda level: level.index)
        derived = self.occupied_nucleons()
        if not self.n_nucleons:
            self.n_nucleons = derived
        self.validate()

    def occupied_nucleons(self) -> Dict[Charge, int]:
        counts = {charge: 0 for charge in Charge}
        for level in self.levels:
            if level.occupied:
                counts[level.charge] += 2
        return counts

    def validate(self) -> None:
        if not self.levels:
            raise LevelSchemeError("Level scheme has no levels")
        indices = [level.index for level in self.levels]
        if indices != list(range(1, len(indices) + 1)):
            raise LevelSchemeError(f"Level indices must run 1..{len(indices)}, got {indices}")
        derived = self.occupied_nucleons()
        for charge in Charge:
            declared = self.n_nucleons.get(charge, 0)
            if declared != derived[charge]:
                raise LevelSchemeError(
                    f"{charge.value}: N_q = {declared} but occupation holds {derived[charge]} nucleons"
                )
        for charge, g in self.g_mev.items():
            if g < 0:
                raise LevelSchemeError(f"Pairing strength for {charge.value} must be >= 0, got {g}")
        if sum(self.n_nucleons.values()) != 2 * len(self.occupied_levels()):
            raise LevelSchemeError("Nucleon count does not match occupied pair levels")

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def n_qubits(self) -> int:
        return 2 * len(self.levels)

    @property
    def n_particles(self) -> int:
        return sum(self.n_nucleons.values())

    def level(self, index: int) -> Level:
        for level in self.levels:
            if level.index == index:
                return level
        raise LevelSchemeError(f"No pair level {index}")

    def occupied_levels(self) -> List[Level]:
        return [level for level in self.levels if level.occupied]

    def vacant_levels(self) -> List[Level]:
        return [level for level in self.levels if not level.occupied]

    def levels_of(self, charge: Charge) -> List[Level]:
        return [level for level in self.levels if level.charge is charge]

    def charges_present(self) -> List[Charge]:
        return [charge for charge in Charge if self.levels_of(charge)]

    def hf_bitmask(self) -> int:
        mask = 0
        for level in self.occupied_levels():
            for qubit in level.qubits:
                mask |= 1 << qubit
        return mask

    def hf_energy(self) -> float:
        """Σ e over both members of every occupied pair."""
        return sum(2.0 * level.e_mev for level in self.occupied_levels())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "levels": [
                {
                    "index": level.index,
                    "e_mev": level.e_mev,
                    "charge": level.charge.value,
                    "occupied": level.occupied,
                }
                for level in self.levels
            ],
            "pairing": {"g_mev_per_charge": {c.value: g for c, g in self.g_mev.items()}},
            "n_nucleons_per_charge": {c.value: n for c, n in self.n_nucleons.items()},
        }

    def fingerprint(self) -> str:
        """Stable sha256 of the scheme content, used to key cached references."""
        payload = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


def scheme_from_dict(data: Dict[str, Any]) -> LevelScheme:
    """
    Build a LevelScheme from its file representation.

    Raises:
        LevelSchemeError: On missing fields, wrong schema version or inconsistency
    """
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise LevelSchemeError(f"Unsupported schema_version {version}")
    try:
        levels = [
            Level(
                index=int(entry["index"]),
                e_mev=float(entry["e_mev"]),
                charge=Charge(str(entry["charge"]).lower()),
                occupied=bool(entry["occupied"]),
            )
            for entry in data["levels"]
        ]
        g_raw = data["pairing"]["g_mev_per_charge"]
        g_mev = {Charge(str(k).lower()): float(v) for k, v in g_raw.items()}
        n_raw = data.get("n_nucleons_per_charge") or {}
        n_nucleons = {Charge(str(k).lower()): int(v) for k, v in n_raw.items()}
    except (KeyError, TypeError, ValueError) as e:
        raise LevelSchemeError(f"Malformed level scheme: {e}") from e
    if n_nucleons:
        for charge in Charge:
            n_nucleons.setdefault(charge, 0)
    return LevelScheme(levels, g_mev, n_nucleons, label=str(data.get("label", "")))


def load_level_scheme(path: Union[str, Path]) -> LevelScheme:
    """
    Load a level scheme from JSON (or YAML, by suffix).

    Args:
        path: File path

    Returns:
        Validated LevelScheme
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
        raise LevelSchemeError(f"Cannot read level scheme {path}: {e}") from e
    scheme = scheme_from_dict(data)
    logger.info(f"Loaded level scheme '{scheme.label}' from {path}: {scheme.n_levels} levels")
    return scheme


def save_level_scheme(scheme: LevelScheme, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(scheme.to_dict(), f, indent=2)


def he6_scheme(g_mev: Optional[Dict[Charge, float]] = None) -> LevelScheme:
    """
    Illustrative six-level ⁶He scheme bundled with the lab.

    Levels 1 and 3 are proton, 2, 4, 5 and 6 neutron; levels 1, 2 and 4
    are occupied. The energies are placeholders ordered like a typical
    light-nucleus spectrum, not fitted values.
    """
    rows = [
        (1, -22.10, Charge.PROTON, True),
        (2, -20.45, Charge.NEUTRON, True),
        (3, -3.70, Charge.PROTON, False),
        (4, -1.85, Charge.NEUTRON, True),
        (5, -0.60, Charge.NEUTRON, False),
        (6, -0.15, Charge.NEUTRON, False),
    ]
    levels = [Level(i, e, charge, occupied) for i, e, charge, occupied in rows]
    strengths = g_mev or {Charge.NEUTRON: 1.0, Charge.PROTON: 1.0}
    return LevelScheme(levels, strengths, label="he6-illustrative")
