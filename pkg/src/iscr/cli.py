"""Command-line entry point: ``iscr <subcommand> [--scenario F] [--out DIR]``."""

from __future__ import annotations

import argparse
import sys
import warnings

from iscr import (__version__, faultsim, panel, planner, reproduce, silicon, stowage, thermal,
                  tradestudy)
from iscr.errors import ConfigurationError, DomainError, PlanningError, ScenarioError, SolverError
from iscr.reports import FORMATS, ReportBundle, Table
from iscr.scenario import ScenarioFile, load_scenario

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_TOLERANCE = 3
EXIT_INFEASIBLE = 4
EXIT_RUNTIME = 1

U64_MAX = 2**64 - 1


class _Result:
    def __init__(self, tables, summary=(), exit_code=EXIT_OK):
        self.tables = tuple(tables)
        self.summary = tuple(summary)
        self.exit_code = exit_code


# ---------------------------------------------------------------- subcommands

def cmd_thermal(scn: ScenarioFile, args) -> _Result:
    cfg = scn.thermal_config
    rows = []
    for env in scn.orbits:
        s = thermal.solve_panel_equilibrium(cfg, env)
        rows.append((env.label, env.altitude_km, env.solar_flux, env.earth_ir_back_load,
                     s.t_front_c, s.t_back_c, s.p_electric, s.p_front_radiated,
                     s.p_back_radiated, thermal.energy_residual(s, cfg, env)))
    table = Table("thermal", ("orbit", "altitude_km", "solar_flux_w_m2", "earth_ir_w_m2",
                              "t_front_c", "t_back_c", "p_electric_w_m2",
                              "p_front_radiated_w_m2", "p_back_radiated_w_m2",
                              "energy_residual_w_m2"), tuple(rows))
    return _Result([table], [f"{len(rows)} orbit(s) solved"])


def cmd_energy(scn: ScenarioFile, args) -> _Result:
    t = scn.silicon_table
    rows = []
    for p in t.rows:
        total = silicon.total_energy_per_token(p)
        rows.append((p.coolant_temp, p.junction_temp, p.cooling, p.flavor.value, p.vdd, p.clock,
                     p.e_dynamic, silicon.dynamic_energy(p.flavor, p.vdd, t), p.e_static, total,
                     silicon.leakage_fraction(p),
                     silicon.token_normalized_power(scn.panel.compute_power, total, scn.e_ref)))
    table = Table("energy", ("coolant_c", "junction_c", "cooling", "flavor", "vdd_v", "clock_ghz",
                             "e_dynamic_j", "e_dynamic_cv2_j", "e_static_j", "e_total_j",
                             "leakage_fraction", "normalized_power_w"), tuple(rows))
    return _Result([table], [f"operating-point table {t.version}, e_ref {scn.e_ref} J/token"])


def cmd_mass(scn: ScenarioFile, args) -> _Result:
    d = scn.panel
    layers = Table("materials", ("group", "name", "role", "density_g_cm3", "volume_cm3_m2",
                                 "area_cm2", "thickness_mm", "mass_kg_m2"),
                   tuple((l.group, l.name, l.role, l.density, l.volume, l.area, l.thickness,
                          l.mass) for l in d.layers))
    groups = [(g, panel.group_mass_density(d.group(g))) for g in panel.GROUPS]
    total = panel.panel_mass_density(d)
    light = panel.group_mass_density(d.group("solar") + d.group("compute"))
    rows = [(f"{g} total kg/m^2", v) for g, v in groups] + [
        ("panel total kg/m^2", total),
        ("stack thickness mm", panel.stack_thickness()),
        ("panel area for compute power at cell flux m^2",
         panel.panel_area_for_power(d.compute_power, panel.CELL_LEVEL_FLUX_SSO)),
        ("specific power, cell flux over panel total W/kg",
         panel.array_specific_power(panel.CELL_LEVEL_FLUX_SSO, total)),
        ("specific power, cell flux over solar+compute W/kg",
         panel.array_specific_power(panel.CELL_LEVEL_FLUX_SSO, light)),
    ]
    summary = Table("mass_summary", ("quantity", "value"), tuple(rows))
    return _Result([layers, summary], [f"panel area density {total:.4f} kg/m^2"])


def cmd_stow(scn: ScenarioFile, args) -> _Result:
    length, area = stowage.spiral_capacity(scn.stowage)
    roll = stowage.satellite_rollup(scn.satellite)
    report = stowage.fit_check(scn.stowage, scn.satellite)
    fit = Table("fit_report", ("constraint", "required", "available", "unit", "ok", "margin"),
                tuple((c.name, c.required, c.available, c.unit, c.ok, c.margin)
                      for c in report.checks))
    rollup = Table("rollup", ("quantity", "value"), (
        ("spiral length m", length),
        ("stowable area m^2", area),
        ("stow-limited mass t", stowage.stow_limited_mass(scn.stowage, roll.area_density)),
        ("array area m^2", roll.array_area),
        ("array width m", roll.array_width),
        ("array length m", roll.array_length),
        ("area density kg/m^2", roll.area_density),
        ("distributed mass t", roll.distributed_mass),
        ("total mass t", roll.total_mass),
        ("compute power kW", roll.compute_power),
        ("specific power kW/t", roll.specific_power),
    ))
    verdict = "fits" if report.fits else "does not fit"
    return _Result([fit, rollup], [f"satellite {verdict}"])


def cmd_plan_llm(scn: ScenarioFile, args) -> _Result:
    entries = []
    if args.model is not None:
        if args.model not in scn.models:
            raise ScenarioError(f"scenario defines no [llm.{args.model}] model")
        if args.panels is None or args.tensor_width is None:
            raise PlanningError("--model needs --panels and --tensor-width")
        model = scn.models[args.model]
        entries.append(("cli", model, planner.make_plan(model, args.panels, args.tensor_width)))
    else:
        entries += [(p.label, scn.models[p.model], p.plan) for p in scn.plans]

    rows, packing, summary, infeasible = [], [], [], []
    for label, model, plan in entries:
        m = planner.plan_metrics(model, plan)
        report = planner.feasibility_check(model, plan, scn.hardware)
        rows.append((label, model.name, model.context_length, model.num_blocks, plan.panels,
                     plan.pipeline_stages, plan.tensor_width, m.mem_per_gpu / planner.GB,
                     m.bw_per_gpu / planner.GB, m.rate_per_session, plan.sessions_in_flight,
                     m.aggregate_rate, report.feasible))
        count, sessions = planner.subarray_packing(args.total_panels, plan.panels,
                                                   plan.sessions_in_flight)
        packing.append((label, args.total_panels, plan.panels, count, sessions))
        for c in report.checks:
            if not c.passed:
                summary.append(f"{label}: {c.severity} {c.name} {c.value:.6g} exceeds {c.limit:.6g}")
        if not report.feasible:
            infeasible.append(label)
    tables = [
        Table("plans", ("plan", "model", "context_length", "num_blocks", "panels", "p_par",
                        "t_par", "mem_per_gpu_gb", "bw_per_gpu_gb_s", "tokens_s_session",
                        "sessions_in_flight", "aggregate_tokens_s", "feasible"), tuple(rows)),
        Table("subarrays", ("plan", "total_panels", "subarray_panels", "subarrays",
                            "concurrent_sessions"), tuple(packing)),
    ]
    summary.append(f"{len(rows)} plan(s), {len(infeasible)} infeasible")
    return _Result(tables, summary, EXIT_INFEASIBLE if infeasible else EXIT_OK)


_TRADE_ROWS = (
    ("2 solar absorption", lambda c: c.solar_absorption),
    ("3 cell efficiency", lambda c: c.cell_efficiency),
    ("5 compute power W/m^2", lambda c: c.compute_power),
    ("6 Earth IR W/m^2", lambda c: c.earth_ir),
    ("7 solar cell transfer W/m^2", lambda c: c.solar_cell_transfer),
    ("9 solar cells C", lambda c: c.solar_cell_temp),
    ("10 compute junctions C", lambda c: c.junction_temp),
    ("11 radiator C", lambda c: c.radiator_temp),
    ("12 radiated at T W/m^2", lambda c: c.radiated_flux),
    ("13 radiator sides", lambda c: c.sides),
    ("15 radiator size fraction of solar array", lambda c: c.radiator_fraction),
    ("16 cooling technology", lambda c: c.cooling.value),
    ("17 GPU clock rate GHz", lambda c: c.clock),
    ("18 energy per token J", lambda c: c.energy_per_token),
    ("19 token normalized compute power W/m^2", lambda c: c.normalized_power),
)


def cmd_trade(scn: ScenarioFile, args) -> _Result:
    if not scn.trade:
        raise ScenarioError("scenario defines no [trade.*] columns")
    cols = tradestudy.compare(scn.trade, scn.silicon_table, scn.e_ref)
    table = Table("trade", ("row",) + tuple(c.name for c in cols),
                  tuple((label,) + tuple(get(c) for c in cols) for label, get in _TRADE_ROWS))
    return _Result([table], [f"{len(cols)} design(s) compared"])


def cmd_faultsim(scn: ScenarioFile, args) -> _Result:
    fs = scn.faultsim
    if fs is None:
        raise ScenarioError("scenario has no [faultsim] section")
    named = scn.plan(fs.plan)
    model = scn.models[named.model]
    replicas = args.replicas if args.replicas is not None else fs.replicas
    process = faultsim.FailureProcess(fs.annual_failure_probability, fs.horizon, args.seed)
    grid = faultsim.PanelGrid.for_plan(named.plan, fs.grid_cols, fs.spare_rows)
    curve = faultsim.resilience_curve(named.plan, process, replicas, model.num_blocks,
                                      fs.steps, grid, fs.max_blocks_per_panel)
    records = Table("faultsim_replicas", ("replica", "elapsed_yr", "failed_count",
                                          "retained_fraction"),
                    tuple((r.replica, r.elapsed, r.failed_count, r.retained_fraction)
                          for r in curve.records))
    points = Table("faultsim_summary", ("elapsed_yr", "failed_fraction", "mean_retained_rate"),
                   tuple((p.elapsed, p.failed_fraction, p.retained_rate) for p in curve.points))
    last = curve.points[-1]
    return _Result([records, points], [
        f"plan {fs.plan}, {replicas} replicas, seed {args.seed}",
        f"after {last.elapsed:g} yr: failed {last.failed_fraction:.4f}, "
        f"retained {last.retained_rate:.4f}",
    ])


def cmd_reproduce(scn: ScenarioFile, args) -> _Result:
    names = reproduce.TABLES if args.table == "all" else (args.table,)
    cells = []
    for name in names:
        cells += reproduce.reproduce(name, scn)
    label = "all" if args.table == "all" else args.table
    table = reproduce.comparison_table(f"reproduce_{label}", cells)
    breaches = sum(c.breach for c in cells)
    flags = sum(c.status == "FLAG" for c in cells)
    summary = [reproduce.summary_line(c) for c in cells]
    summary.append(f"{len(cells)} cell(s): {breaches} breach(es), {flags} flagged")
    return _Result([table], summary, EXIT_TOLERANCE if breaches else EXIT_OK)


COMMANDS = {
    "thermal": cmd_thermal,
    "energy": cmd_energy,
    "mass": cmd_mass,
    "stow": cmd_stow,
    "plan-llm": cmd_plan_llm,
    "trade": cmd_trade,
    "faultsim": cmd_faultsim,
    "reproduce": cmd_reproduce,
}


# ---------------------------------------------------------------- plumbing

def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario file (default: shipped baseline)")
    common.add_argument("--out", help="write report files to this directory")
    common.add_argument("--seed", type=_seed, help="override the scenario seed (u64)")
    common.add_argument("--format", choices=FORMATS, default="csv")

    parser = argparse.ArgumentParser(prog="iscr", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "plan-llm":
            p.add_argument("--model", help="plan this model instead of the scenario's plans")
            p.add_argument("--panels", type=int)
            p.add_argument("--tensor-width", type=int)
            p.add_argument("--total-panels", type=int, default=reproduce.SUBARRAY_POOL,
                           help="panel pool for subarray packing (default %(default)s)")
        elif name == "faultsim":
            p.add_argument("--replicas", type=int)
        elif name == "reproduce":
            p.add_argument("--table", required=True, choices=reproduce.TABLES + ("all",))
    return parser


def run(argv=None) -> tuple[int, ReportBundle | None]:
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return exc.exit_code, None
    if args.seed is None:
        args.seed = scn.seed

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", planner.PlanWarning)
            result = COMMANDS[args.command](scn, args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return exc.exit_code, None
    except PlanningError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE, None
    except (ConfigurationError, DomainError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME, None

    bundle = ReportBundle(args.command, __version__, args.seed, scn.name, scn.digest,
                          result.tables, result.summary)
    if args.out:
        bundle.write(args.out, args.format)
        sys.stdout.write(bundle.summary_text())
    else:
        for table in bundle.tables:
            sys.stdout.write(table.render(args.format))
            sys.stdout.write("\n")
        sys.stdout.write(bundle.summary_text())
    return result.exit_code, bundle


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
