"""Roll-out stowage geometry and the satellite-level mass and power roll-up."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from iscr.errors import ConfigurationError, DomainError
from iscr.panel import PanelDesign, panel_mass_density


@dataclass(frozen=True)
class StowageConfig:
    inner_radius: float = 2.5  # m, minimum roll radius (bus cylinder)
    outer_radius: float = 4.0  # m
    layer_pitch: float = 0.010  # m per wound layer, panel plus spacers
    bay_diameter: float = 8.0  # m
    bay_length: float = 22.0  # m
    usable_roll_width: float = 20.4  # m
    panel_thickness: float = 0.0064  # m

    def __post_init__(self):
        if self.inner_radius <= 0 or self.layer_pitch <= 0:
            raise ConfigurationError("inner radius and layer pitch must be positive")
        if self.layer_pitch <= self.panel_thickness:
            raise ConfigurationError("layer pitch must exceed the panel thickness")
        if self.usable_roll_width > self.bay_length:
            raise ConfigurationError("roll width cannot exceed the bay length")


@dataclass(frozen=True)
class SatelliteDesign:
    panel: PanelDesign = field(default_factory=PanelDesign)
    panel_count: int = 16600
    panels_per_row: int = 12
    overhead_mass_fraction: float = 0.05
    overhead_power_fraction: float = 0.04
    mass_cap: float = 150.0  # t
    array_area_override: float | None = None  # m^2, replaces panel_count * panel.area
    area_density_override: float | None = None  # kg/m^2, replaces the materials budget

    def __post_init__(self):
        if self.panel_count < 0 or self.panels_per_row <= 0:
            raise ConfigurationError("panel_count must be >= 0 and panels_per_row > 0")
        for name in ("overhead_mass_fraction", "overhead_power_fraction"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1)")


@dataclass(frozen=True)
class SatelliteRollup:
    array_area: float  # m^2
    array_width: float  # m
    array_length: float  # m
    area_density: float  # kg/m^2
    distributed_mass: float  # t
    total_mass: float  # t
    compute_power: float  # kW
    specific_power: float  # kW/t


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    required: float
    available: float
    unit: str

    @property
    def ok(self) -> bool:
        # relative slack absorbs float noise such as 12 * 1.7 > 20.4
        return self.required <= self.available * (1.0 + 1e-9)

    @property
    def margin(self) -> float:
        """Unused fraction of the available amount (negative when violated)."""
        if self.available == 0:
            return 0.0 if self.required == 0 else -math.inf
        return (self.available - self.required) / self.available


@dataclass(frozen=True)
class FitReport:
    checks: tuple[ConstraintCheck, ...]

    @property
    def fits(self) -> bool:
        return all(c.ok for c in self.checks)


def spiral_capacity(cfg: StowageConfig) -> tuple[float, float]:
    """Wound length (m) and stowable array area (m^2) of the annulus between
    the inner and outer roll radii."""
    if cfg.inner_radius > cfg.outer_radius:
        raise DomainError("inner radius exceeds outer radius")
    length = math.pi * (cfg.outer_radius**2 - cfg.inner_radius**2) / cfg.layer_pitch
    return length, length * cfg.usable_roll_width


def stow_limited_mass(cfg: StowageConfig, area_density: float) -> float:
    """Array mass (t) if the whole stowable area were filled."""
    return spiral_capacity(cfg)[1] * area_density / 1000.0


def satellite_rollup(design: SatelliteDesign) -> SatelliteRollup:
    panel = design.panel
    width = design.panels_per_row * panel.side
    if design.array_area_override is None:
        area = design.panel_count * panel.area
        length = design.panel_count / design.panels_per_row * panel.side
    else:
        area = design.array_area_override
        length = area / width
    density = (panel_mass_density(panel) if design.area_density_override is None
               else design.area_density_override)
    distributed = area * density / 1000.0
    total = distributed * (1.0 + design.overhead_mass_fraction)
    power = design.panel_count * panel.compute_power / 1000.0
    specific = power * (1.0 - design.overhead_power_fraction) / total if total > 0 else 0.0
    return SatelliteRollup(area, width, length, density, distributed, total, power, specific)


def fit_check(cfg: StowageConfig, design: SatelliteDesign) -> FitReport:
    roll = satellite_rollup(design)
    spiral_length, _ = spiral_capacity(cfg)
    return FitReport((
        ConstraintCheck("roll length", roll.array_length, spiral_length, "m"),
        ConstraintCheck("roll width", roll.array_width if design.panel_count else 0.0,
                        cfg.usable_roll_width, "m"),
        ConstraintCheck("outer radius", cfg.outer_radius, cfg.bay_diameter / 2.0, "m"),
        ConstraintCheck("satellite mass", roll.total_mass, design.mass_cap, "t"),
    ))
