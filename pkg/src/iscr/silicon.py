"""Compute-IC operating points: supply voltage, clock and energy per token
as a function of the coolant (radiator) temperature.

The reference table is an extrapolation of a 3 nm GPU from its 45 C liquid
cooled operating point.  It is carried as data; only the dynamic energy has a
model behind it (per-flavor effective capacitance times Vdd squared).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from iscr.errors import ConfigurationError, DomainError

DATASET_VERSION = "gpu-temperature-table/1"
E_REF_BASELINE = 0.213  # J/token, 45 C liquid-cooled baseline row

_VDD_MODEL_RANGE = (0.0, 1.0)
_COOLANT_RANGE = (25.0, 85.0)


class VthFlavor(str, Enum):
    ULVT = "ULVT"
    LVT = "LVT"
    SVT = "SVT"
    HVT = "HVT"


# Row used to fit each flavor's effective capacitance, by supply voltage.
ANCHOR_VDD = {VthFlavor.ULVT: 0.64, VthFlavor.LVT: 0.74, VthFlavor.SVT: 0.82, VthFlavor.HVT: 0.85}


@dataclass(frozen=True)
class SiliconOperatingPoint:
    coolant_temp: float  # C
    junction_temp: float  # C, upper end of the quoted range
    flavor: VthFlavor
    vdd: float  # V
    clock: float  # GHz
    e_dynamic: float  # J/token
    e_static: float  # J/token
    cooling: str = ""

    def __post_init__(self):
        if self.junction_temp <= self.coolant_temp:
            raise ConfigurationError("junction temperature must exceed coolant temperature")
        if self.e_dynamic <= 0 or self.e_static < 0:
            raise ConfigurationError("energies must be positive (static may be zero)")
        if not 0.5 < self.vdd < 1.0:
            raise ConfigurationError(f"vdd must be in (0.5, 1.0) V, got {self.vdd}")


@dataclass(frozen=True)
class OperatingPointTable:
    rows: tuple[SiliconOperatingPoint, ...]
    version: str = DATASET_VERSION

    def __post_init__(self):
        if not self.rows:
            raise ConfigurationError("operating-point table is empty")
        temps = [r.coolant_temp for r in self.rows]
        if temps != sorted(temps):
            raise ConfigurationError("rows must be ordered by coolant temperature")


REFERENCE_POINTS = OperatingPointTable((
    SiliconOperatingPoint(25, 32, VthFlavor.ULVT, 0.64, 2.78, 0.138, 0.032, "vapor chamber"),
    SiliconOperatingPoint(25, 32, VthFlavor.LVT, 0.69, 2.72, 0.149, 0.022, "vapor chamber"),
    SiliconOperatingPoint(35, 42, VthFlavor.LVT, 0.74, 2.60, 0.170, 0.034, "vapor chamber"),
    SiliconOperatingPoint(45, 90, VthFlavor.SVT, 0.82, 2.38, 0.195, 0.018, "liquid"),
    SiliconOperatingPoint(60, 105, VthFlavor.HVT, 0.85, 2.05, 0.209, 0.065, "liquid"),
    SiliconOperatingPoint(85, 105, VthFlavor.HVT, 0.88, 1.35, 0.224, 0.098, "liquid"),
))


def total_energy_per_token(p: SiliconOperatingPoint) -> float:
    return p.e_dynamic + p.e_static


def leakage_fraction(p: SiliconOperatingPoint) -> float:
    """Static energy as a fraction of dynamic energy."""
    return p.e_static / p.e_dynamic


def effective_capacitance(flavor: VthFlavor, table: OperatingPointTable = REFERENCE_POINTS) -> float:
    """E_dyn / Vdd^2 for the flavor's anchor row (J/V^2 per token)."""
    rows = [r for r in table.rows if r.flavor == flavor]
    if not rows:
        raise ConfigurationError(f"no operating point for flavor {flavor.value}")
    anchor = min(rows, key=lambda r: abs(r.vdd - ANCHOR_VDD[flavor]))
    return anchor.e_dynamic / anchor.vdd**2


def dynamic_energy(flavor: VthFlavor, vdd: float, table: OperatingPointTable = REFERENCE_POINTS) -> float:
    lo, hi = _VDD_MODEL_RANGE
    if not lo <= vdd <= hi:
        raise DomainError(f"vdd {vdd} V outside model range [{lo}, {hi}]")
    return effective_capacitance(flavor, table) * vdd**2


def select_operating_point(coolant_temp: float, table: OperatingPointTable = REFERENCE_POINTS,
                           prefer_ulvt: bool = True) -> SiliconOperatingPoint:
    """Nearest row by coolant temperature; ties resolve to the cooler row.

    Where several flavors share a temperature (25 C), ``prefer_ulvt`` picks the
    lowest-Vth row, otherwise the next one.
    """
    lo, hi = _COOLANT_RANGE
    if not lo <= coolant_temp <= hi:
        raise DomainError(f"coolant temperature {coolant_temp} C outside [{lo}, {hi}]")
    temps = sorted({r.coolant_temp for r in table.rows})
    nearest = min(temps, key=lambda t: (abs(t - coolant_temp), t))
    candidates = [r for r in table.rows if r.coolant_temp == nearest]
    if len(candidates) > 1 and not prefer_ulvt:
        return candidates[1]
    return candidates[0]


def token_normalized_power(p_compute: float, e: float, e_ref: float = E_REF_BASELINE) -> float:
    """Compute power rescaled to the useful work it would do at ``e_ref`` J/token."""
    if e <= 0:
        raise DomainError(f"energy per token must be > 0, got {e}")
    return p_compute * e_ref / e
