"""Per-panel material budget, geometry and specific power."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from iscr.errors import ConfigurationError, DomainError

GROUPS = ("solar", "compute", "radiator")

# Front-to-back cross-section of the panel (mm).  The pneumatic stiffener is a
# rim tube, not part of this stack.
CROSS_SECTION_MM = (
    ("solar cells", 0.2),
    ("thermal gap", 4.0),
    ("thermal reflector (Al)", 0.01),
    ("vapor chamber top (LCP)", 0.3),
    ("vapor chamber", 2.0),
    ("radiator (Al)", 0.25),
)

BASELINE_NET_FLUX = 1000.0 / 2.9  # W/m^2 delivered to compute by the 2.9 m^2 panel
CELL_LEVEL_FLUX_SSO = 363.0  # W/m^2, perovskite/Si tandem at 70 C

_FIELDS = ("group", "name", "density_g_cm3", "role", "area_cm2",
           "volume_cm3_per_m2", "thickness_mm")


@dataclass(frozen=True)
class MaterialLayer:
    group: str
    name: str
    density: float  # g/cm^3
    role: str
    volume: float  # cm^3 per m^2 of panel
    area: float | None = None  # cm^2 per m^2 of panel
    thickness: float | None = None  # mm

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ConfigurationError(f"unknown material group {self.group!r}")
        for name in ("density", "volume", "area", "thickness"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ConfigurationError(f"{self.name}: {name} must be >= 0")

    @property
    def mass(self) -> float:
        """Areal mass in kg/m^2."""
        return self.density * self.volume / 1000.0


def _default_layers() -> tuple[MaterialLayer, ...]:
    return load_materials()


@dataclass(frozen=True)
class PanelDesign:
    side: float = 1.7  # m
    area: float = 2.9  # m^2
    compute_power: float = 1000.0  # W
    layers: tuple[MaterialLayer, ...] = field(default_factory=_default_layers)
    link_bandwidth: float = 100.0  # GB/s duplex per adjacent panel

    def __post_init__(self):
        if self.side <= 0 or self.area <= 0:
            raise ConfigurationError("panel side and area must be positive")
        if abs(self.area - self.side**2) > 0.005 * self.area:
            raise ConfigurationError(
                f"panel area {self.area} m^2 differs from side^2 = {self.side**2:.3f} by more than 0.5%")

    def group(self, name: str) -> tuple[MaterialLayer, ...]:
        return tuple(layer for layer in self.layers if layer.group == name)


def group_mass_density(layers) -> float:
    return sum(layer.mass for layer in layers)


def panel_mass_density(design: PanelDesign) -> float:
    return sum(group_mass_density(design.group(g)) for g in GROUPS)


def stack_thickness(stack=CROSS_SECTION_MM) -> float:
    return sum(t for _, t in stack)


def panel_area_for_power(target: float, net_flux: float) -> float:
    if net_flux <= 0:
        raise DomainError(f"net flux must be positive, got {net_flux}")
    return target / net_flux


def array_specific_power(power_flux: float, mass_density: float) -> float:
    """W/kg from W/m^2 and kg/m^2."""
    if mass_density <= 0:
        raise DomainError(f"mass density must be positive, got {mass_density}")
    return power_flux / mass_density


def _opt_float(text: str) -> float | None:
    text = text.strip()
    return float(text) if text else None


def parse_materials(text: str) -> tuple[MaterialLayer, ...]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != _FIELDS:
        raise ConfigurationError(f"materials table header must be {','.join(_FIELDS)}")
    return tuple(
        MaterialLayer(
            group=row["group"],
            name=row["name"],
            density=float(row["density_g_cm3"]),
            role=row["role"],
            volume=float(row["volume_cm3_per_m2"]),
            area=_opt_float(row["area_cm2"]),
            thickness=_opt_float(row["thickness_mm"]),
        )
        for row in reader
    )


def load_materials(path: str | Path | None = None) -> tuple[MaterialLayer, ...]:
    if path is None:
        text = resources.files("iscr.data").joinpath("materials.csv").read_text()
    else:
        text = Path(path).read_text()
    return parse_materials(text)


def dump_materials(layers) -> str:
    def fmt(x):
        return "" if x is None else repr(x)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_FIELDS)
    for layer in layers:
        writer.writerow([layer.group, layer.name, repr(layer.density), layer.role,
                         fmt(layer.area), repr(layer.volume), fmt(layer.thickness)])
    return buf.getvalue()
