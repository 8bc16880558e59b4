"""Comparisons of computed values against the baseline reference values.

Each comparison pairs a reference value with the value computed from a
scenario and a tolerance.  Cells carrying a ``note`` are known, documented
discrepancies: they are reported but never count as a breach.
"""

from __future__ import annotations

from dataclasses import dataclass

from iscr import panel, planner, silicon, stowage, thermal, tradestudy
from iscr.errors import ScenarioError
from iscr.reports import Table
from iscr.scenario import ScenarioFile

TABLES = ("1", "4", "5", "6", "7", "8a", "8b", "abstract")
MODES = ("abs", "rel", "min", "max")

SUBARRAY_POOL = 16_000  # panels available for whole inference subarrays


@dataclass(frozen=True)
class Comparison:
    table: str
    row: str
    column: str
    reference: float
    computed: float
    tolerance: float
    mode: str = "abs"  # abs/rel: |error| <= tol; min: computed >= ref; max: computed <= ref
    note: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown comparison mode {self.mode!r}")

    @property
    def abs_error(self) -> float:
        return self.computed - self.reference

    @property
    def rel_error(self) -> float:
        return self.abs_error / self.reference if self.reference else float("inf")

    @property
    def within(self) -> bool:
        if self.mode == "abs":
            return abs(self.abs_error) <= self.tolerance
        if self.mode == "rel":
            return abs(self.rel_error) <= self.tolerance
        if self.mode == "min":
            return self.computed >= self.reference
        return self.computed <= self.reference

    @property
    def status(self) -> str:
        if self.within:
            return "PASS"
        return "FLAG" if self.note else "FAIL"

    @property
    def breach(self) -> bool:
        return self.status == "FAIL"


# ---------------------------------------------------------------- references

THERMAL_REF = (  # altitude km (None = deep space), front C, back load W/m^2, back C
    ("deep space", None, 84.3, 368.0, 17.2),
    ("SSO 2000 km", 2000.0, 85.7, 382.0, 20.0),
    ("SSO 1000 km", 1000.0, 86.7, 392.0, 22.0),
    ("SSO 600 km", 600.0, 87.7, 402.0, 23.6),
)

OPERATING_POINT_REF = (  # coolant C, flavor, dynamic J, total J
    (25.0, "ULVT", 0.138, 0.170),
    (25.0, "LVT", 0.149, 0.171),
    (35.0, "LVT", 0.170, 0.204),
    (45.0, "SVT", 0.195, 0.213),
    (60.0, "HVT", 0.209, 0.274),
    (85.0, "HVT", 0.224, 0.322),
)

LAYER_REF = (  # group, name, mass kg/m^2
    ("solar", "Si", 0.13), ("solar", "ETFE", 0.23), ("solar", "Kapton", 0.09),
    ("solar", "Al", 0.06),
    ("compute", "HD polyethylene", 0.04), ("compute", "Si", 0.01), ("compute", "SiC", 0.09),
    ("compute", "Cu", 0.07), ("compute", "Ag", 0.02),
    ("radiator", "Graphite-doped LCP", 0.45), ("radiator", "Boron nitride", 0.35),
    ("radiator", "Aluminum", 0.675), ("radiator", "Diamond/Cu mesh", 0.56),
    ("radiator", "Water", 0.18), ("radiator", "Carbon-fiber reinforced polycarbonate", 0.13),
    ("radiator", "Argon (STP)", 0.02),
)
GROUP_TOTAL_REF = (("solar", 0.52), ("compute", 0.23), ("radiator", 2.40))
AREA_DENSITY_TOTAL = 3.15
STACK_THICKNESS_MM = 6.4

PLAN_REF = (  # label, model, panels, T, mem GB, bw GB/s, sessions, tok/s/session
    ("16-panel, no tensor parallelism", "light", 16, 1, 46.45, 0.55, 32, 672.0),
    ("16-panel w/tensor parallelism", "light", 16, 4, 46.45, 2.2, 8, 2688.0),
    ("384-panel light LLM", "light", 384, 4, 1.94, 52.84, None, None),
    ("512-panel heavy LLM", "heavy", 512, 4, 7.06, 14.51, 256, 553.0),
)

SATELLITE_REF = {"stow_limited_t": 197.0, "distributed_t": 141.8, "total_t": 148.8,
          "specific_kw_t": 112.5}

TRADE_DESIGNS = ("ISCR", "Low T radiator", "Medium T radiator", "High T radiator")
TRADE_THERMAL_REF = {  # row label -> per-column values (None = not modelled)
    "5 compute power, W/m^2": (367.0, 408.0, 408.0, 408.0),
    "9 solar cells, C": (66.0, None, None, None),
    "12 radiated at T, W/m^2": (460.0, 523.0, 629.0, 794.0),
}
TRADE_SILICON_REF = {
    "15 radiator size, fraction of solar array": (1.00, 0.41, 0.34, 0.27),
    "17 GPU clock rate, GHz": (2.6, 2.38, 2.05, 2.05),
    "18 energy per token, J": (0.204, 0.213, 0.274, 0.274),
    "19 token normalized compute power, W/m^2": (384.0, 408.0, 317.0, 317.0),
}


# ---------------------------------------------------------------- per table

def _orbit_for(scn: ScenarioFile, label: str, altitude: float | None) -> thermal.OrbitEnvironment:
    for env in scn.orbits:
        if env.altitude_km == altitude:
            return env
    return thermal.OrbitEnvironment(label, altitude_km=altitude)


def thermal_cells(scn: ScenarioFile) -> list[Comparison]:
    out = []
    for label, alt, front, load, back in THERMAL_REF:
        state = thermal.solve_panel_equilibrium(scn.thermal_config, _orbit_for(scn, label, alt))
        out += [
            Comparison("1", label, "front temp C", front, state.t_front_c, 1.0),
            Comparison("1", label, "back power load W/m^2", load, state.p_back_radiated, 1.0),
            Comparison("1", label, "back temp C", back, state.t_back_c, 1.5),
        ]
    return out


def operating_point_cells(scn: ScenarioFile) -> list[Comparison]:
    table = scn.silicon_table
    out = []
    for coolant, flavor, dyn, total in OPERATING_POINT_REF:
        rows = [r for r in table.rows if r.coolant_temp == coolant and r.flavor.value == flavor]
        if not rows:
            raise ScenarioError(f"operating-point table has no {coolant} C {flavor} row")
        row = rows[0]
        label = f"{coolant:g} C {flavor}"
        out += [
            Comparison("4", label, "total energy J", total, silicon.total_energy_per_token(row), 1e-9),
            Comparison("4", label, "dynamic energy CV^2 model J", dyn,
                       silicon.dynamic_energy(row.flavor, row.vdd, table), 0.003),
        ]
    warm = silicon.total_energy_per_token(silicon.select_operating_point(60.0, table))
    cool = silicon.total_energy_per_token(silicon.select_operating_point(35.0, table))
    out.append(Comparison("4", "35 C -> 60 C", "energy per token increase", 0.30,
                          warm / cool - 1.0, 0.0, "min"))
    return out


def material_cells(scn: ScenarioFile) -> list[Comparison]:
    layers = {(layer.group, layer.name): layer for layer in scn.panel.layers}
    out = []
    for group, name, mass in LAYER_REF:
        layer = layers.get((group, name))
        if layer is None:
            raise ScenarioError(f"materials have no {group}/{name} layer")
        out.append(Comparison("5", f"{group} {name}", "mass kg/m^2", mass, layer.mass, 0.01))
    for group, total in GROUP_TOTAL_REF:
        out.append(Comparison("5", f"{group} total", "mass kg/m^2", total,
                              panel.group_mass_density(scn.panel.group(group)), 0.05))
    out.append(Comparison("5", "total", "mass kg/m^2", AREA_DENSITY_TOTAL,
                          panel.panel_mass_density(scn.panel), 0.05))
    out.append(Comparison("5", "total", "stack thickness mm", STACK_THICKNESS_MM,
                          panel.stack_thickness(), 0.2, note=(
                              "listed cross-section layers sum to more than the stated total")))
    return out


def plan_cells(scn: ScenarioFile) -> list[Comparison]:
    out = []
    for label, model_name, panels, t, mem, bw, sessions, rate in PLAN_REF:
        if model_name not in scn.models:
            raise ScenarioError(f"scenario defines no [llm.{model_name}] model")
        model = scn.models[model_name]
        plan = planner.make_plan(model, panels, t)
        m = planner.plan_metrics(model, plan)
        out += [
            Comparison("6", label, "mem/GPU GB", mem, m.mem_per_gpu / planner.GB, 0.02, "rel"),
            Comparison("6", label, "bw/GPU GB/s", bw, m.bw_per_gpu / planner.GB, 0.02, "rel"),
        ]
        if sessions is not None:
            out.append(Comparison("6", label, "sessions in flight", sessions,
                                  plan.sessions_in_flight, 0.0))
        if rate is not None:
            out.append(Comparison("6", label, "tokens/s/session", rate, m.rate_per_session, 1.0))
    return out


def satellite_cells(scn: ScenarioFile) -> list[Comparison]:
    roll = stowage.satellite_rollup(scn.satellite)
    out = [Comparison("7", f"{group} array", "area density kg/m^2", total,
                      panel.group_mass_density(scn.panel.group(group)), 0.05)
           for group, total in GROUP_TOTAL_REF]
    out += [
        Comparison("7", "total area density", "kg/m^2", AREA_DENSITY_TOTAL, roll.area_density, 0.05),
        Comparison("7", "mass if limited by stow density", "t", SATELLITE_REF["stow_limited_t"],
                   stowage.stow_limited_mass(scn.stowage, roll.area_density), 0.02, "rel"),
        Comparison("7", "total distributed mass", "t", SATELLITE_REF["distributed_t"],
                   roll.distributed_mass, 0.005, "rel"),
        Comparison("7", "total satellite mass", "t", SATELLITE_REF["total_t"], roll.total_mass,
                   0.005, "rel"),
        Comparison("7", "specific compute power", "kW/t", SATELLITE_REF["specific_kw_t"],
                   roll.specific_power, 0.005, "rel", note=(
                       "reference value implies 16,740 kW; panel count x 1 kW x 0.96 over "
                       "the reference mass gives the computed value")),
    ]
    return out


def _trade_columns(scn: ScenarioFile) -> list[tradestudy.ComparisonColumn]:
    by_name = {d.name: d for d in scn.trade}
    missing = [n for n in TRADE_DESIGNS if n not in by_name]
    if missing:
        raise ScenarioError(f"scenario lacks trade columns: {', '.join(missing)}")
    return tradestudy.compare([by_name[n] for n in TRADE_DESIGNS], scn.silicon_table, scn.e_ref)


def trade_thermal_cells(scn: ScenarioFile) -> list[Comparison]:
    cols = _trade_columns(scn)
    getters = {
        "5 compute power, W/m^2": (lambda c: c.compute_power, 1.0),
        "9 solar cells, C": (lambda c: c.solar_cell_temp, 1.0),
        "12 radiated at T, W/m^2": (lambda c: c.radiated_flux, 1.0),
    }
    return _grid("8a", TRADE_THERMAL_REF, getters, cols)


def trade_silicon_cells(scn: ScenarioFile) -> list[Comparison]:
    cols = _trade_columns(scn)
    getters = {
        "15 radiator size, fraction of solar array": (lambda c: c.radiator_fraction, 0.01),
        "17 GPU clock rate, GHz": (lambda c: c.clock, 0.005),
        "18 energy per token, J": (lambda c: c.energy_per_token, 0.0005),
        "19 token normalized compute power, W/m^2": (lambda c: c.normalized_power, 1.0),
    }
    return _grid("8b", TRADE_SILICON_REF, getters, cols)


def _grid(table, refs, getters, cols) -> list[Comparison]:
    out = []
    for label, values in refs.items():
        get, tol = getters[label]
        for col, ref in zip(cols, values):
            if ref is not None:
                out.append(Comparison(table, label, col.name, ref, get(col), tol))
    return out


def headline_cells(scn: ScenarioFile) -> list[Comparison]:
    model = scn.models.get("heavy")
    if model is None:
        raise ScenarioError("scenario defines no [llm.heavy] model")
    plan = planner.make_plan(model, 512, 4)
    m = planner.plan_metrics(model, plan)
    count, sessions = planner.subarray_packing(SUBARRAY_POOL, plan.panels, plan.sessions_in_flight)
    roll = stowage.satellite_rollup(scn.satellite)
    fit = stowage.fit_check(scn.stowage, scn.satellite)
    length = next(c for c in fit.checks if c.name == "roll length")
    light = (panel.group_mass_density(scn.panel.group("solar"))
             + panel.group_mass_density(scn.panel.group("compute")))
    return [
        Comparison("abstract", "512-panel heavy LLM", "tokens/s/session", 553.0,
                   m.rate_per_session, 1.0),
        Comparison("abstract", "512-panel heavy LLM", "sessions in flight", 256,
                   plan.sessions_in_flight, 0.0),
        Comparison("abstract", "16,000-panel satellite", "subarrays", 31, count, 0.0),
        Comparison("abstract", "16,000-panel satellite", "concurrent sessions", 7900, sessions,
                   0.0, "min"),
        Comparison("abstract", "satellite", "specific compute power kW/t", 100.0,
                   roll.specific_power, 0.0, "min"),
        Comparison("abstract", "satellite", "total mass t", 150.0, roll.total_mass, 0.0, "max"),
        Comparison("abstract", "satellite", "array length m", 2200.0, roll.array_length,
                   0.01, "rel"),
        Comparison("abstract", "satellite", "roll length margin", 0.25, length.margin, 0.0, "min"),
        Comparison("abstract", "array (solar + compute mass)", "specific power W/kg", 500.0,
                   panel.array_specific_power(panel.CELL_LEVEL_FLUX_SSO, light), 0.05, "rel"),
    ]


_BUILDERS = {"1": thermal_cells, "4": operating_point_cells, "5": material_cells,
             "6": plan_cells, "7": satellite_cells,
             "8a": trade_thermal_cells, "8b": trade_silicon_cells,
             "abstract": headline_cells}


def reproduce(table: str, scn: ScenarioFile) -> list[Comparison]:
    try:
        builder = _BUILDERS[table]
    except KeyError:
        raise ValueError(f"unknown table {table!r}; choose from {', '.join(TABLES)}") from None
    return builder(scn)


def comparison_table(name: str, cells: list[Comparison]) -> Table:
    return Table(name, ("table", "row", "column", "reference", "computed", "abs_error",
                        "rel_error", "tolerance", "mode", "status", "note"),
                 tuple((c.table, c.row, c.column, c.reference, c.computed, c.abs_error,
                        c.rel_error, c.tolerance, c.mode, c.status, c.note) for c in cells))


def summary_line(c: Comparison) -> str:
    return (f"{c.status} table {c.table} | {c.row} | {c.column}: reference "
            f"{c.reference:.6g} computed {c.computed:.6g} ({c.mode} tol {c.tolerance:g})")
