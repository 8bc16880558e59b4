"""Scenario files: TOML documents whose physical keys carry a unit suffix.

Every dimensioned quantity is written ``<name>_<unit> = value`` (for example
``solar_flux_w_m2`` or ``outer_radius_m``); any unit of the same dimension is
accepted and converted on load, so ``layer_pitch_mm = 10`` and
``layer_pitch_m = 0.01`` are equivalent.  Dimensionless values (counts,
emissivities, fractions) are written without a suffix.  All domain objects are
built eagerly so that every invariant is checked at load time.
"""

from __future__ import annotations

import hashlib
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from iscr import faultsim, panel, planner, silicon, stowage, thermal, tradestudy
from iscr.errors import (ConfigurationError, DomainError, InvariantViolation, PlanningError,
                         ScenarioError, ScenarioParseError, UnitMismatchError, UnknownKeyError)

BASELINE_RESOURCE = "baseline.toml"

# unit suffix -> factor to the dimension's SI unit
_DIMENSIONS: dict[str, dict[str, float]] = {
    "flux": {"w_m2": 1.0, "kw_m2": 1e3},
    "length": {"m": 1.0, "km": 1e3, "mm": 1e-3},
    "area": {"m2": 1.0, "cm2": 1e-4},
    "volume_per_area": {"cm3_m2": 1.0},
    "density": {"g_cm3": 1.0, "kg_m3": 1e-3},
    "area_density": {"kg_m2": 1.0},
    "power": {"w": 1.0, "kw": 1e3, "mw": 1e6},
    "bytes": {"b": 1.0, "kb": 1e3, "mb": 1e6, "gb": 1e9},
    "bandwidth": {"b_s": 1.0, "gb_s": 1e9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6},
    "years": {"yr": 1.0},
    "mass": {"kg": 1.0, "t": 1e3},
    "energy": {"j": 1.0, "mj": 1e-3},
    "voltage": {"v": 1.0, "mv": 1e-3},
    "frequency": {"ghz": 1.0, "mhz": 1e-3},
    "compute": {"tflops": 1.0},
}
_TEMPERATURE_UNITS = ("c", "k")


@dataclass(frozen=True)
class Field:
    """One accepted key: ``name`` plus a unit of ``dim`` (None = dimensionless)."""
    name: str
    dim: str | None = None
    unit: str | None = None  # unit the domain object expects
    kind: type = float
    required: bool = False

    def keys(self) -> tuple[str, ...]:
        if self.dim is None:
            return (self.name,)
        units = _TEMPERATURE_UNITS if self.dim == "temperature" else _DIMENSIONS[self.dim]
        return tuple(f"{self.name}_{u}" for u in units)


def _convert(value: float, dim: str, src: str, dst: str) -> float:
    if dim == "temperature":
        c = value - thermal.KELVIN if src == "k" else value
        return c + thermal.KELVIN if dst == "k" else c
    table = _DIMENSIONS[dim]
    if src == dst:
        return value
    return value * table[src] / table[dst]


def _read_table(raw: Any, fields: tuple[Field, ...], where: str,
                extra: tuple[str, ...] = ()) -> dict[str, Any]:
    """Validate one TOML table against ``fields``; returns {field name: value}.

    Keys listed in ``extra`` are passed through untouched for the caller.
    """
    if not isinstance(raw, dict):
        raise ScenarioError(f"[{where}] must be a table")
    by_key = {key: f for f in fields for key in f.keys()}
    out: dict[str, Any] = {}
    for key, value in raw.items():
        if key in extra:
            out[key] = value
            continue
        f = by_key.get(key)
        if f is None:
            _reject_key(key, fields, where)
        if f.name in out:
            raise ScenarioError(f"[{where}] {f.name} given more than once")
        out[f.name] = _coerce(value, f, key, where)
    missing = [f.name for f in fields if f.required and f.name not in out]
    if missing:
        raise ScenarioError(f"[{where}] missing required keys: {', '.join(missing)}")
    return out


def _reject_key(key: str, fields: tuple[Field, ...], where: str):
    for f in fields:
        if key == f.name or key.startswith(f.name + "_"):
            expected = ", ".join(f.keys())
            raise UnitMismatchError(f"[{where}] key '{key}' has the wrong unit; expected one of {expected}")
    raise UnknownKeyError(f"[{where}] unknown key '{key}'")


def _coerce(value: Any, f: Field, key: str, where: str) -> Any:
    if f.kind is bool:
        if not isinstance(value, bool):
            raise ScenarioError(f"[{where}] {key} must be true or false")
        return value
    if f.kind is str:
        if not isinstance(value, str):
            raise ScenarioError(f"[{where}] {key} must be a string")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"[{where}] {key} must be a number")
    if f.kind is int:
        if not isinstance(value, int):
            raise ScenarioError(f"[{where}] {key} must be an integer")
        return value
    value = float(value)
    if f.dim is not None:
        src = key[len(f.name) + 1:]
        value = _convert(value, f.dim, src, f.unit)
    return value


# ---------------------------------------------------------------- schema

META = (Field("name", kind=str), Field("seed", kind=int))
ORBIT = (Field("solar_flux", "flux", "w_m2"), Field("altitude", "length", "km"),
         Field("earth_ir", "flux", "w_m2"))
PANEL = (
    Field("side", "length", "m"), Field("area", "area", "m2"),
    Field("compute_power", "power", "w"), Field("link_bandwidth", "bandwidth", "gb_s"),
    Field("absorptivity"), Field("cell_efficiency"), Field("cell_technology", kind=str),
    Field("front_emissivity"), Field("back_emissivity"), Field("back_sides", kind=int),
    Field("gap_leak", "flux", "w_m2"), Field("front_ir_fraction"),
)
MATERIAL = (
    Field("group", kind=str, required=True), Field("name", kind=str, required=True),
    Field("density", "density", "g_cm3", required=True), Field("role", kind=str),
    Field("volume", "volume_per_area", "cm3_m2", required=True),
    Field("area", "area", "cm2"), Field("thickness", "length", "mm"),
)
SILICON = (Field("e_ref", "energy", "j"), Field("version", kind=str))
SILICON_ROW = (
    Field("coolant", "temperature", "c", required=True),
    Field("junction", "temperature", "c", required=True),
    Field("flavor", kind=str, required=True), Field("vdd", "voltage", "v", required=True),
    Field("clock", "frequency", "ghz", required=True),
    Field("e_dynamic", "energy", "j", required=True),
    Field("e_static", "energy", "j", required=True), Field("cooling", kind=str),
)
HARDWARE = (
    Field("compute_power", "power", "w"), Field("peak_compute", "compute", "tflops"),
    Field("memory", "bytes", "b"), Field("link_bandwidth", "bandwidth", "b_s"),
)
LLM = (
    Field("context_length", kind=int, required=True), Field("num_blocks", kind=int, required=True),
    Field("weights_total", "bytes", "b", required=True),
    Field("activation", "bytes", "b", required=True),
    Field("base_block_time", "time", "s", required=True),
    Field("kv_per_block_per_session", "bytes", "b"),
)
PLAN = (
    Field("model", kind=str, required=True), Field("panels", kind=int, required=True),
    Field("tensor_width", kind=int, required=True), Field("sessions_per_stage", kind=int),
)
STOWAGE = (
    Field("inner_radius", "length", "m"), Field("outer_radius", "length", "m"),
    Field("layer_pitch", "length", "m"), Field("bay_diameter", "length", "m"),
    Field("bay_length", "length", "m"), Field("usable_roll_width", "length", "m"),
    Field("panel_thickness", "length", "m"),
)
SATELLITE = (
    Field("panel_count", kind=int), Field("panels_per_row", kind=int),
    Field("overhead_mass_fraction"), Field("overhead_power_fraction"),
    Field("mass_cap", "mass", "t"), Field("array_area", "area", "m2"),
    Field("area_density", "area_density", "kg_m2"),
)
TRADE = (
    Field("cell_efficiency", required=True), Field("solar_absorption", required=True),
    Field("radiator", "temperature", "c", required=True),
    Field("junction", "temperature", "c", required=True),
    Field("sides", kind=int, required=True), Field("cooling", kind=str, required=True),
    Field("emissivity"), Field("earth_ir", "flux", "w_m2"), Field("gap_leak", "flux", "w_m2"),
    Field("integrated", kind=bool), Field("altitude", "length", "km"),
    Field("solar_flux", "flux", "w_m2"), Field("silicon_lookup", "temperature", "c"),
)
FAULTSIM = (
    Field("plan", kind=str, required=True), Field("annual_failure_probability"),
    Field("horizon", "years", "yr"), Field("replicas", kind=int), Field("steps", kind=int),
    Field("grid_cols", kind=int), Field("spare_rows", kind=int),
    Field("max_blocks_per_panel", kind=int),
)
SECTIONS = ("meta", "orbit", "panel", "materials", "silicon", "hardware", "llm", "plan",
            "stowage", "satellite", "trade", "faultsim")


@dataclass(frozen=True)
class FaultSimSettings:
    plan: str
    annual_failure_probability: float = 0.05
    horizon: float = 5.0  # years
    replicas: int = 200
    steps: int = 10
    grid_cols: int = planner.DEFAULT_GRID_COLS
    spare_rows: int = 0
    max_blocks_per_panel: int | None = None

    def __post_init__(self):
        if self.replicas < 1 or self.steps < 1:
            raise ConfigurationError("replicas and steps must be >= 1")
        if self.spare_rows < 0 or self.grid_cols < 1:
            raise ConfigurationError("grid_cols must be >= 1 and spare_rows >= 0")
        if self.max_blocks_per_panel is not None and self.max_blocks_per_panel < 1:
            raise ConfigurationError("max_blocks_per_panel must be >= 1")


@dataclass(frozen=True)
class NamedPlan:
    label: str
    model: str
    plan: planner.ParallelPlan


@dataclass(frozen=True)
class ScenarioFile:
    name: str
    seed: int
    digest: str  # sha256 of the source bytes
    orbits: tuple[thermal.OrbitEnvironment, ...]
    thermal_config: thermal.PanelThermalConfig
    panel: panel.PanelDesign
    silicon_table: silicon.OperatingPointTable
    e_ref: float
    hardware: planner.PanelHardware
    models: dict[str, planner.LlmModelSpec] = field(hash=False)
    plans: tuple[NamedPlan, ...]
    stowage: stowage.StowageConfig
    satellite: stowage.SatelliteDesign
    trade: tuple[tradestudy.ArchitectureDesign, ...]
    faultsim: FaultSimSettings | None

    def plan(self, label: str) -> NamedPlan:
        for p in self.plans:
            if p.label == label:
                return p
        raise KeyError(label)


# ---------------------------------------------------------------- builders

def _build(where: str, factory: Callable[..., Any], *args, **kwargs):
    """Construct a domain object, turning its validation errors into InvariantViolation."""
    try:
        return factory(*args, **kwargs)
    except (ConfigurationError, DomainError, PlanningError) as exc:
        raise InvariantViolation(f"[{where}] {exc}") from exc


def _subtables(raw: Any, where: str) -> dict[str, Any]:
    if not isinstance(raw, dict) or not all(isinstance(v, dict) for v in raw.values()):
        raise ScenarioError(f"[{where}] must contain only named sub-tables, e.g. [{where}.name]")
    return raw


def _orbits(raw) -> tuple[thermal.OrbitEnvironment, ...]:
    out = []
    for label, body in _subtables(raw, "orbit").items():
        v = _read_table(body, ORBIT, f"orbit.{label}")
        out.append(_build(f"orbit.{label}", thermal.OrbitEnvironment, label,
                          solar_flux=v.get("solar_flux", thermal.SOLAR_CONSTANT),
                          altitude_km=v.get("altitude"), earth_ir_back_load=v.get("earth_ir")))
    return tuple(out)


def _materials(raw) -> tuple[panel.MaterialLayer, ...]:
    if not isinstance(raw, list):
        raise ScenarioError("materials must be an array of tables: [[materials]]")
    layers = []
    for i, body in enumerate(raw):
        v = _read_table(body, MATERIAL, f"materials[{i}]")
        layers.append(_build(f"materials[{i}]", panel.MaterialLayer, v["group"], v["name"],
                             v["density"], v.get("role", ""), v["volume"],
                             v.get("area"), v.get("thickness")))
    return tuple(layers)


def _panel(raw, materials) -> tuple[panel.PanelDesign, thermal.PanelThermalConfig]:
    v = _read_table(raw, PANEL, "panel")
    kwargs = {k: v[k] for k in ("side", "area", "compute_power", "link_bandwidth") if k in v}
    if materials is not None:
        kwargs["layers"] = materials
    design = _build("panel", panel.PanelDesign, **kwargs)

    if "cell_technology" in v and "cell_efficiency" in v:
        raise ScenarioError("[panel] give cell_efficiency or cell_technology, not both")
    defaults = thermal.PanelThermalConfig()
    curve = defaults.cell_curve
    if "cell_technology" in v:
        try:
            curve = thermal.CELL_CURVES[thermal.CellTechnology(v["cell_technology"])]
        except ValueError as exc:
            raise InvariantViolation(f"[panel] unknown cell_technology '{v['cell_technology']}'") from exc
    elif "cell_efficiency" in v:
        curve = _build("panel", thermal.constant_curve, v["cell_efficiency"])
    front = _build("panel", thermal.RadiatorSurface, v.get("front_emissivity", defaults.front.emissivity))
    back = _build("panel", thermal.RadiatorSurface, v.get("back_emissivity", defaults.back.emissivity),
                  v.get("back_sides", defaults.back.sides))
    config = _build("panel", thermal.PanelThermalConfig,
                    absorptivity=v.get("absorptivity", defaults.absorptivity), cell_curve=curve,
                    front=front, back=back, gap_leak=v.get("gap_leak", defaults.gap_leak),
                    front_ir_fraction=v.get("front_ir_fraction", defaults.front_ir_fraction))
    return design, config


def _silicon(raw) -> tuple[silicon.OperatingPointTable, float]:
    v = _read_table(raw, SILICON, "silicon", extra=("row",))
    rows = list(silicon.REFERENCE_POINTS.rows)
    overrides = v.get("row", [])
    if not isinstance(overrides, list):
        raise ScenarioError("silicon rows must be an array of tables: [[silicon.row]]")
    for i, body in enumerate(overrides):
        where = f"silicon.row[{i}]"
        r = _read_table(body, SILICON_ROW, where)
        try:
            flavor = silicon.VthFlavor(r["flavor"])
        except ValueError as exc:
            raise InvariantViolation(f"[{where}] unknown flavor '{r['flavor']}'") from exc
        point = _build(where, silicon.SiliconOperatingPoint, r["coolant"], r["junction"], flavor,
                       r["vdd"], r["clock"], r["e_dynamic"], r["e_static"], r.get("cooling", ""))
        same = [k for k, old in enumerate(rows)
                if old.coolant_temp == point.coolant_temp and old.flavor == point.flavor]
        if same:
            rows[same[0]] = point
        else:
            rows.append(point)
    rows.sort(key=lambda p: p.coolant_temp)  # stable: table order kept within a temperature
    version = v.get("version", silicon.DATASET_VERSION if not overrides
                    else silicon.DATASET_VERSION + "+override")
    table = _build("silicon", silicon.OperatingPointTable, tuple(rows), version)
    e_ref = v.get("e_ref", silicon.E_REF_BASELINE)
    if e_ref <= 0:
        raise InvariantViolation("[silicon] e_ref must be > 0")
    return table, e_ref


def _hardware(raw) -> planner.PanelHardware:
    v = _read_table(raw, HARDWARE, "hardware")
    names = {"compute_power": "compute_power", "peak_compute": "peak_compute",
             "memory": "memory_capacity", "link_bandwidth": "link_bandwidth"}
    hw = _build("hardware", planner.PanelHardware, **{names[k]: x for k, x in v.items()})
    if min(hw.compute_power, hw.peak_compute, hw.memory_capacity, hw.link_bandwidth) <= 0:
        raise InvariantViolation("[hardware] all quantities must be positive")
    return hw


def _models(raw) -> dict[str, planner.LlmModelSpec]:
    out = {}
    for name, body in _subtables(raw, "llm").items():
        v = _read_table(body, LLM, f"llm.{name}")
        out[name] = _build(f"llm.{name}", planner.LlmModelSpec, name, v["context_length"],
                           v["num_blocks"], v["weights_total"], v["activation"],
                           v["base_block_time"], v.get("kv_per_block_per_session", 0.0))
    return out


def _plans(raw, models) -> tuple[NamedPlan, ...]:
    out = []
    for label, body in _subtables(raw, "plan").items():
        v = _read_table(body, PLAN, f"plan.{label}")
        if v["model"] not in models:
            raise InvariantViolation(f"[plan.{label}] model '{v['model']}' is not defined under [llm]")
        p = _build(f"plan.{label}", planner.make_plan, models[v["model"]], v["panels"],
                   v["tensor_width"], v.get("sessions_per_stage", 2))
        out.append(NamedPlan(label, v["model"], p))
    return tuple(out)


def _stowage(raw) -> stowage.StowageConfig:
    v = _read_table(raw, STOWAGE, "stowage")
    cfg = _build("stowage", stowage.StowageConfig, **v)
    if not cfg.inner_radius < cfg.outer_radius <= cfg.bay_diameter / 2.0:
        raise InvariantViolation("[stowage] need inner_radius < outer_radius <= bay_diameter / 2")
    return cfg


def _satellite(raw, design) -> stowage.SatelliteDesign:
    v = _read_table(raw, SATELLITE, "satellite")
    names = {"array_area": "array_area_override", "area_density": "area_density_override"}
    return _build("satellite", stowage.SatelliteDesign, panel=design,
                  **{names.get(k, k): x for k, x in v.items()})


def _trade(raw) -> tuple[tradestudy.ArchitectureDesign, ...]:
    out = []
    for name, body in _subtables(raw, "trade").items():
        where = f"trade.{name}"
        v = _read_table(body, TRADE, where)
        try:
            cooling = tradestudy.Cooling(v.pop("cooling"))
        except ValueError as exc:
            raise InvariantViolation(f"[{where}] unknown cooling type") from exc
        names = {"radiator": "radiator_temp", "junction": "junction_temp",
                 "altitude": "altitude_km", "silicon_lookup": "silicon_temp_override"}
        kwargs = {names.get(k, k): x for k, x in v.items()}
        design = _build(where, tradestudy.ArchitectureDesign, name=name, cooling=cooling, **kwargs)
        _build(where, thermal.RadiatorSurface, design.emissivity, design.sides)
        out.append(design)
    return tuple(out)


def _fault_settings(raw, plans) -> FaultSimSettings:
    v = _read_table(raw, FAULTSIM, "faultsim")
    if v["plan"] not in {p.label for p in plans}:
        raise InvariantViolation(f"[faultsim] plan '{v['plan']}' is not defined under [plan]")
    settings = _build("faultsim", FaultSimSettings, **v)
    _build("faultsim", faultsim.FailureProcess,
           settings.annual_failure_probability, settings.horizon)
    return settings


# ---------------------------------------------------------------- entry points

_LOCATION = re.compile(r"\(at line (\d+), column (\d+)\)")


def parse_scenario(text: str, source: str = "<string>") -> ScenarioFile:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _LOCATION.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ScenarioParseError(f"{source}: {exc}", line, col) from exc

    for key in doc:
        if key not in SECTIONS:
            raise UnknownKeyError(f"unknown section [{key}]")
    meta = _read_table(doc.get("meta", {}), META, "meta")
    materials = _materials(doc["materials"]) if "materials" in doc else None
    design, thermal_config = _panel(doc.get("panel", {}), materials)
    table, e_ref = _silicon(doc.get("silicon", {}))
    models = _models(doc.get("llm", {}))
    plans = _plans(doc.get("plan", {}), models)
    return ScenarioFile(
        name=meta.get("name", Path(source).stem),
        seed=meta.get("seed", 0),
        digest=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        orbits=_orbits(doc.get("orbit", {})),
        thermal_config=thermal_config,
        panel=design,
        silicon_table=table,
        e_ref=e_ref,
        hardware=_hardware(doc.get("hardware", {})),
        models=models,
        plans=plans,
        stowage=_stowage(doc.get("stowage", {})),
        satellite=_satellite(doc.get("satellite", {}), design),
        trade=_trade(doc.get("trade", {})),
        faultsim=_fault_settings(doc["faultsim"], plans) if "faultsim" in doc else None,
    )


def baseline_text() -> str:
    return resources.files("iscr.data").joinpath(BASELINE_RESOURCE).read_text(encoding="utf-8")


def load_scenario(path: str | Path | None = None) -> ScenarioFile:
    """Load and validate a scenario file; ``None`` loads the shipped baseline."""
    if path is None:
        return parse_scenario(baseline_text(), BASELINE_RESOURCE)
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ScenarioParseError(f"{path}: not valid UTF-8") from exc
    return parse_scenario(text, str(path))
