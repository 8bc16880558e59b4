"""Radiative equilibrium of the panel front (solar) and back (radiator) faces.

The front face carries the solar cells and radiates the solar waste heat; the
back face is the vapor-chamber radiator and rejects the compute power, the
absorbed Earth IR and whatever leaks across the insulating gap.  Both faces
sit edge-on to the Earth in a dawn-dusk orbit and see the same IR load.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from iscr.errors import ConfigurationError, DomainError, SolverError

STEFAN_BOLTZMANN = 5.670374419e-8  # W/(m^2 K^4)
SOLAR_CONSTANT = 1361.0  # W/m^2
KELVIN = 273.15

# Absorbed Earth-IR back-face load (W/m^2) by altitude, calibrated against the
# back-face power loads of the orbit comparison table (368/382/392/402 W).
_EARTH_IR_ANCHORS = ((600.0, 34.0), (1000.0, 24.0), (2000.0, 14.0))

_DAMPING = 0.5
_TOLERANCE_K = 0.01
_MAX_ITERATIONS = 1000


def c_to_k(t_c: float) -> float:
    return t_c + KELVIN


def k_to_c(t_k: float) -> float:
    return t_k - KELVIN


def _interp(x: float, points: tuple[tuple[float, float], ...]) -> float:
    """Piecewise-linear interpolation, clamped to the end values."""
    if x <= points[0][0]:
        return points[0][1]
    if x >= points[-1][0]:
        return points[-1][1]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise AssertionError("unreachable")


def earth_ir_back_load(altitude_km: float | None) -> float:
    """Absorbed Earth IR on a panel face; ``None`` means deep space."""
    if altitude_km is None:
        return 0.0
    if altitude_km <= 0:
        raise DomainError(f"altitude must be positive, got {altitude_km} km")
    return _interp(altitude_km, _EARTH_IR_ANCHORS)


@dataclass(frozen=True)
class OrbitEnvironment:
    label: str
    solar_flux: float = SOLAR_CONSTANT
    altitude_km: float | None = None
    earth_ir_back_load: float | None = None  # None -> calibrated from altitude

    def __post_init__(self):
        if self.solar_flux <= 0:
            raise ConfigurationError(f"solar_flux must be > 0, got {self.solar_flux}")
        if self.altitude_km is not None and self.altitude_km <= 0:
            raise ConfigurationError(f"altitude_km must be > 0, got {self.altitude_km}")
        if self.earth_ir_back_load is None:
            object.__setattr__(self, "earth_ir_back_load", earth_ir_back_load(self.altitude_km))
        if self.earth_ir_back_load < 0:
            raise ConfigurationError("earth_ir_back_load must be >= 0")
        if self.altitude_km is None and self.earth_ir_back_load != 0:
            raise ConfigurationError("deep-space environment cannot carry an Earth IR load")


@dataclass(frozen=True)
class RadiatorSurface:
    emissivity: float
    sides: int = 1

    def __post_init__(self):
        if not 0.0 < self.emissivity <= 1.0:
            raise ConfigurationError(f"emissivity must be in (0, 1], got {self.emissivity}")
        if self.sides not in (1, 2):
            raise ConfigurationError(f"sides must be 1 or 2, got {self.sides}")


class CellTechnology(str, Enum):
    PEROVSKITE_SI_TANDEM = "PerovskiteSiTandem"
    CRYSTALLINE_SI_90UM = "CrystallineSi90um"
    THIN_FILM_A_SI = "ThinFilmASi"
    TRIPLE_JUNCTION_GAAS = "TripleJunctionGaAs"


@dataclass(frozen=True)
class SolarCellCurve:
    """Cell efficiency against temperature as (deg C, fraction) reference points."""

    technology: CellTechnology
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple(sorted((float(t), float(e)) for t, e in self.points))
        if len(pts) < 2:
            raise ConfigurationError("a cell curve needs at least two reference points")
        if any(not 0.0 < e < 1.0 for _, e in pts):
            raise ConfigurationError("cell efficiencies must lie in (0, 1)")
        if any(e1 > e0 for (_, e0), (_, e1) in zip(pts, pts[1:])):
            raise ConfigurationError("cell efficiency must not increase with temperature")
        object.__setattr__(self, "points", pts)


CELL_CURVES = {
    CellTechnology.PEROVSKITE_SI_TANDEM: SolarCellCurve(
        CellTechnology.PEROVSKITE_SI_TANDEM, ((25.0, 0.30), (85.0, 0.254))),
    CellTechnology.CRYSTALLINE_SI_90UM: SolarCellCurve(
        CellTechnology.CRYSTALLINE_SI_90UM, ((25.0, 0.20), (85.0, 0.155))),
    CellTechnology.THIN_FILM_A_SI: SolarCellCurve(
        CellTechnology.THIN_FILM_A_SI, ((25.0, 0.14), (85.0, 0.119))),
    # iROSA-class cells: 30.7% at 32 C falling to 27% at 87 C
    CellTechnology.TRIPLE_JUNCTION_GAAS: SolarCellCurve(
        CellTechnology.TRIPLE_JUNCTION_GAAS, ((32.0, 0.307), (87.0, 0.27))),
}


def constant_curve(efficiency: float,
                   technology: CellTechnology = CellTechnology.TRIPLE_JUNCTION_GAAS) -> SolarCellCurve:
    return SolarCellCurve(technology, ((25.0, efficiency), (85.0, efficiency)))


def cell_efficiency(curve: SolarCellCurve, t_cell_c: float) -> float:
    if not curve.points:
        raise ConfigurationError("empty cell curve")
    return _interp(t_cell_c, curve.points)


@dataclass(frozen=True)
class PanelThermalConfig:
    absorptivity: float = 0.895
    cell_curve: SolarCellCurve = field(default_factory=lambda: constant_curve(0.27))
    front: RadiatorSurface = RadiatorSurface(0.92)
    back: RadiatorSurface = RadiatorSurface(0.92)
    gap_leak: float = 0.0  # W/m^2 moved front -> back
    front_ir_fraction: float = 1.0  # share of the Earth IR load also absorbed on the front

    def __post_init__(self):
        if not 0.0 < self.absorptivity <= 1.0:
            raise ConfigurationError(f"absorptivity must be in (0, 1], got {self.absorptivity}")
        if self.gap_leak < 0:
            raise ConfigurationError("gap_leak must be >= 0")
        if not 0.0 <= self.front_ir_fraction <= 1.0:
            raise ConfigurationError("front_ir_fraction must be in [0, 1]")


@dataclass(frozen=True)
class PanelThermalState:
    t_front: float  # K
    t_back: float  # K
    p_electric: float  # W/m^2
    p_back_radiated: float  # W/m^2
    p_front_radiated: float  # W/m^2

    @property
    def t_front_c(self) -> float:
        return k_to_c(self.t_front)

    @property
    def t_back_c(self) -> float:
        return k_to_c(self.t_back)


def radiated_flux(t: float, surface: RadiatorSurface) -> float:
    """Stefan-Boltzmann emission per unit panel area, summed over the radiating sides."""
    if t < 0:
        raise DomainError(f"temperature must be >= 0 K, got {t}")
    return surface.sides * surface.emissivity * STEFAN_BOLTZMANN * t**4


def equilibrium_temperature(load: float, surface: RadiatorSurface) -> float:
    if load < 0:
        raise DomainError(f"load must be >= 0 W/m^2, got {load}")
    return (load / (surface.sides * surface.emissivity * STEFAN_BOLTZMANN)) ** 0.25


def _front_ir(config: PanelThermalConfig, env: OrbitEnvironment) -> float:
    return config.front_ir_fraction * env.earth_ir_back_load


def solve_front_face(config: PanelThermalConfig, env: OrbitEnvironment,
                     t_start: float = 300.0) -> tuple[float, float]:
    """Front-face temperature (K) and electrical output (W/m^2).

    Damped fixed-point iteration on the cell temperature, since the
    efficiency, and hence the heat left to radiate, depends on it.
    """
    absorbed = config.absorptivity * env.solar_flux + _front_ir(config, env)

    def implied(t_k: float) -> tuple[float, float]:
        p_elec = cell_efficiency(config.cell_curve, k_to_c(t_k)) * env.solar_flux
        net = absorbed - p_elec - config.gap_leak
        if net < -1e-9:
            raise DomainError(
                f"front face has negative net load ({net:.3f} W/m^2): electrical output "
                "plus gap leak exceeds absorbed power")
        return equilibrium_temperature(max(net, 0.0), config.front), p_elec

    t = float(t_start)
    for _ in range(_MAX_ITERATIONS):
        target, _ = implied(t)
        t_next = (1.0 - _DAMPING) * t + _DAMPING * target
        if abs(t_next - t) < _TOLERANCE_K:
            t_final, _ = implied(t_next)
            return t_final, cell_efficiency(config.cell_curve, k_to_c(t_final)) * env.solar_flux
        t = t_next
    raise SolverError("front-face iteration did not converge", t)


def solve_panel_equilibrium(config: PanelThermalConfig, env: OrbitEnvironment) -> PanelThermalState:
    t_front, p_electric = solve_front_face(config, env)
    back_load = p_electric + env.earth_ir_back_load + config.gap_leak
    t_back = equilibrium_temperature(back_load, config.back)
    return PanelThermalState(
        t_front=t_front,
        t_back=t_back,
        p_electric=p_electric,
        p_back_radiated=radiated_flux(t_back, config.back),
        p_front_radiated=radiated_flux(t_front, config.front),
    )


def energy_residual(state: PanelThermalState, config: PanelThermalConfig,
                    env: OrbitEnvironment) -> float:
    """Radiated minus absorbed power (W/m^2); the electrical output is dissipated
    by the compute and so leaves through the back face."""
    absorbed = (config.absorptivity * env.solar_flux + _front_ir(config, env)
                + env.earth_ir_back_load)
    return state.p_front_radiated + state.p_back_radiated - absorbed
