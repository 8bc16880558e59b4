"""Side-by-side comparison of cooling architectures: radiator size, clock,
energy per token and token-normalized compute power."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from iscr import silicon, thermal
from iscr.errors import ConfigurationError, DomainError

MAX_JUNCTION_C = 105.0
# Junction-to-coolant rise of the liquid-cooled rows of the operating-point table.
LIQUID_JUNCTION_RISE_C = 45.0


class Cooling(str, Enum):
    VAPOR_CHAMBER = "VaporChamber"
    LIQUID = "Liquid"
    HIGH_PERFORMANCE = "HighPerformance"


@dataclass(frozen=True)
class ArchitectureDesign:
    name: str
    cell_efficiency: float
    solar_absorption: float
    radiator_temp: float  # C
    junction_temp: float  # C
    sides: int
    cooling: Cooling
    emissivity: float = 0.90
    earth_ir: float = 24.0  # W/m^2
    gap_leak: float = 0.0  # W/m^2 from the solar cells into the radiator
    integrated: bool = False  # radiator is the back of the solar panel itself
    altitude_km: float | None = 1000.0
    solar_flux: float = thermal.SOLAR_CONSTANT
    silicon_temp_override: float | None = None  # C, row key for the operating point

    def __post_init__(self):
        if self.junction_temp < self.radiator_temp:
            raise ConfigurationError(f"{self.name}: junction colder than radiator")
        if self.junction_temp > MAX_JUNCTION_C:
            raise ConfigurationError(f"{self.name}: junction above {MAX_JUNCTION_C} C")
        if not 0 < self.cell_efficiency < self.solar_absorption <= 1:
            raise ConfigurationError(f"{self.name}: need 0 < efficiency < absorption <= 1")

    @property
    def surface(self) -> thermal.RadiatorSurface:
        return thermal.RadiatorSurface(self.emissivity, self.sides)

    @property
    def compute_power(self) -> float:
        return self.cell_efficiency * self.solar_flux


@dataclass(frozen=True)
class ComparisonColumn:
    name: str
    solar_absorption: float
    cell_efficiency: float
    compute_power: float
    earth_ir: float
    solar_cell_transfer: float
    solar_cell_temp: float | None
    junction_temp: float
    radiator_temp: float
    radiated_flux: float
    sides: int
    radiator_fraction: float
    cooling: Cooling
    clock: float
    energy_per_token: float
    normalized_power: float


def radiator_load(d: ArchitectureDesign) -> float:
    return d.compute_power + d.earth_ir + d.gap_leak


def radiator_area_fraction(d: ArchitectureDesign) -> float:
    """Radiator area needed per unit solar-array area."""
    if d.integrated:
        return 1.0
    flux = thermal.radiated_flux(thermal.c_to_k(d.radiator_temp), d.surface)
    if flux <= 0:
        raise DomainError(f"{d.name}: radiator emits nothing at {d.radiator_temp} C")
    return radiator_load(d) / flux


def silicon_lookup_temp(d: ArchitectureDesign) -> float:
    """Coolant temperature whose operating-point row describes this design.

    A high-performance cooler shrinks the junction-to-radiator rise, so its
    silicon behaves like the liquid-cooled row with the same junction
    temperature rather than the row at its (hotter) radiator temperature.
    """
    if d.silicon_temp_override is not None:
        return d.silicon_temp_override
    if d.cooling is Cooling.HIGH_PERFORMANCE:
        return d.junction_temp - LIQUID_JUNCTION_RISE_C
    return d.radiator_temp


def _solar_cell_temp(d: ArchitectureDesign) -> float | None:
    if not d.integrated:
        return None
    env = thermal.OrbitEnvironment(d.name, d.solar_flux, d.altitude_km,
                                   d.earth_ir if d.altitude_km is not None else 0.0)
    cfg = thermal.PanelThermalConfig(
        absorptivity=d.solar_absorption,
        cell_curve=thermal.constant_curve(d.cell_efficiency),
        front=thermal.RadiatorSurface(d.emissivity),
        back=d.surface,
        gap_leak=d.gap_leak,
    )
    t_front, _ = thermal.solve_front_face(cfg, env)
    return thermal.k_to_c(t_front)


def compare(designs, table: silicon.OperatingPointTable = silicon.REFERENCE_POINTS,
            e_ref: float = silicon.E_REF_BASELINE) -> list[ComparisonColumn]:
    columns = []
    for d in designs:
        point = silicon.select_operating_point(silicon_lookup_temp(d), table)
        energy = silicon.total_energy_per_token(point)
        columns.append(ComparisonColumn(
            name=d.name,
            solar_absorption=d.solar_absorption,
            cell_efficiency=d.cell_efficiency,
            compute_power=d.compute_power,
            earth_ir=d.earth_ir,
            solar_cell_transfer=d.gap_leak,
            solar_cell_temp=_solar_cell_temp(d),
            junction_temp=d.junction_temp,
            radiator_temp=d.radiator_temp,
            radiated_flux=thermal.radiated_flux(thermal.c_to_k(d.radiator_temp),
                                                thermal.RadiatorSurface(d.emissivity)),
            sides=d.sides,
            radiator_fraction=radiator_area_fraction(d),
            cooling=d.cooling,
            clock=point.clock,
            energy_per_token=energy,
            normalized_power=silicon.token_normalized_power(d.compute_power, energy, e_ref),
        ))
    return columns


REFERENCE_DESIGNS = (
    ArchitectureDesign("ISCR", 0.27, 0.82, 35, 41, 1, Cooling.VAPOR_CHAMBER,
                       earth_ir=12, gap_leak=80, integrated=True),
    ArchitectureDesign("Low T radiator", 0.30, 0.82, 45, 90, 2, Cooling.LIQUID),
    ArchitectureDesign("Medium T radiator", 0.30, 0.82, 60, 105, 2, Cooling.LIQUID),
    ArchitectureDesign("High T radiator", 0.30, 0.82, 80, 105, 2, Cooling.HIGH_PERFORMANCE),
)
