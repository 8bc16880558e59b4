from __future__ import annotations

import pytest

from iscr import panel, planner, silicon, stowage, thermal, tradestudy
from iscr.errors import (InvariantViolation, ScenarioError, ScenarioParseError, UnitMismatchError,
                         UnknownKeyError)
from iscr.scenario import baseline_text, load_scenario, parse_scenario


def edit(old: str, new: str) -> str:
    text = baseline_text()
    assert old in text
    return text.replace(old, new, 1)


class TestBaseline:
    def test_matches_library_defaults(self, baseline):
        assert baseline.name == "baseline"
        assert baseline.thermal_config == thermal.PanelThermalConfig()
        assert baseline.panel == panel.PanelDesign()
        assert baseline.silicon_table == silicon.REFERENCE_POINTS
        assert baseline.e_ref == silicon.E_REF_BASELINE
        assert baseline.hardware == planner.PanelHardware()
        assert baseline.stowage == stowage.StowageConfig()
        assert baseline.trade == tradestudy.REFERENCE_DESIGNS

    def test_orbits(self, baseline):
        assert [o.label for o in baseline.orbits] == ["deep-space", "2000km", "1000km", "600km"]
        assert [o.earth_ir_back_load for o in baseline.orbits] == [0.0, 14.0, 24.0, 34.0]

    def test_satellite_overrides(self, baseline):
        assert baseline.satellite.array_area_override == 45000
        assert baseline.satellite.area_density_override == 3.15

    def test_faultsim_section(self, baseline):
        fs = baseline.faultsim
        assert (fs.plan, fs.annual_failure_probability, fs.horizon, fs.spare_rows) == ("heavy-512", 0.02, 5.0, 2)

    def test_file_round_trip(self, baseline, tmp_path):
        path = tmp_path / "copy.toml"
        path.write_text(baseline_text(), encoding="utf-8")
        assert load_scenario(path) == baseline

    def test_digest_tracks_bytes(self, baseline):
        other = parse_scenario(baseline_text() + "\n")
        assert other.digest != baseline.digest
        assert parse_scenario(baseline_text()).digest == baseline.digest

    def test_empty_document_uses_defaults(self):
        scn = parse_scenario("", "empty.toml")
        assert scn.name == "empty" and scn.plans == () and scn.faultsim is None
        assert scn.panel == panel.PanelDesign()


class TestUnits:
    def test_length_units_equivalent(self, baseline):
        scn = parse_scenario(edit("layer_pitch_mm = 10", "layer_pitch_m = 0.01"))
        assert scn.stowage.layer_pitch == pytest.approx(baseline.stowage.layer_pitch)

    def test_temperature_kelvin(self):
        scn = parse_scenario(edit("radiator_c = 45", "radiator_k = 318.15"))
        assert scn.trade[1].radiator_temp == pytest.approx(45.0)

    def test_time_units(self, baseline):
        scn = parse_scenario(edit("base_block_time_us = 7.750496", "base_block_time_s = 7.750496e-6"))
        assert scn.models["light"].base_block_time == pytest.approx(baseline.models["light"].base_block_time)

    def test_wrong_unit(self):
        with pytest.raises(UnitMismatchError) as info:
            parse_scenario(edit("layer_pitch_mm = 10", "layer_pitch_kg = 10"))
        assert info.value.exit_code == 6

    def test_missing_unit(self):
        with pytest.raises(UnitMismatchError):
            parse_scenario(edit("side_m = 1.7", "side = 1.7"))

    def test_unit_on_dimensionless(self):
        with pytest.raises(UnitMismatchError):
            parse_scenario(edit("absorptivity = 0.895", "absorptivity_m = 0.895"))


class TestRejections:
    def test_unknown_key(self):
        with pytest.raises(UnknownKeyError) as info:
            parse_scenario(edit("[panel]\n", "[panel]\ncolour = 'blue'\n"))
        assert info.value.exit_code == 5

    def test_unknown_section(self):
        with pytest.raises(UnknownKeyError):
            parse_scenario("[weather]\nrain = 1\n")

    def test_emissivity_above_one(self):
        with pytest.raises(InvariantViolation) as info:
            parse_scenario(edit("front_emissivity = 0.92", "front_emissivity = 1.3"))
        assert info.value.exit_code == 7

    def test_unresolved_model(self):
        with pytest.raises(InvariantViolation):
            parse_scenario(edit('model = "heavy"', 'model = "medium"'))

    def test_unresolved_faultsim_plan(self):
        with pytest.raises(InvariantViolation):
            parse_scenario(edit('plan = "heavy-512"', 'plan = "nope"'))

    def test_bad_plan(self):
        with pytest.raises(InvariantViolation):
            parse_scenario(edit("panels = 384", "panels = 385"))

    def test_stowage_radius_beyond_bay(self):
        with pytest.raises(InvariantViolation):
            parse_scenario(edit("outer_radius_m = 4.0", "outer_radius_m = 4.5"))

    def test_type_error(self):
        with pytest.raises(ScenarioError) as info:
            parse_scenario(edit("num_blocks = 96", 'num_blocks = "many"'))
        assert info.value.exit_code == 2

    def test_parse_error_location(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario("[meta]\nname = \"x\"\nseed = = 3\n")
        assert info.value.line == 3
        assert info.value.column is not None
        assert info.value.exit_code == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "absent.toml")


class TestOverrides:
    ROW = """
[[silicon.row]]
coolant_c = 35
junction_c = 42
flavor = "LVT"
vdd_v = 0.74
clock_ghz = 2.6
e_dynamic_j = 0.170
e_static_j = 0.060
"""

    def test_silicon_row_replaces_existing(self):
        scn = parse_scenario(edit("[hardware]", self.ROW.strip() + "\n\n[hardware]"))
        point = silicon.select_operating_point(35, scn.silicon_table)
        assert silicon.total_energy_per_token(point) == pytest.approx(0.230)
        assert len(scn.silicon_table.rows) == 6
        assert scn.silicon_table.version.endswith("+override")
        iscr = tradestudy.compare(scn.trade[:1], scn.silicon_table, scn.e_ref)[0]
        assert iscr.energy_per_token == pytest.approx(0.230)

    def test_silicon_row_appends_new_temperature(self):
        row = self.ROW.replace("coolant_c = 35", "coolant_c = 70").replace("junction_c = 42", "junction_c = 105") \
                      .replace('"LVT"', '"HVT"').replace("vdd_v = 0.74", "vdd_v = 0.86")
        scn = parse_scenario(edit("[hardware]", row.strip() + "\n\n[hardware]"))
        temps = [r.coolant_temp for r in scn.silicon_table.rows]
        assert temps == sorted(temps) and 70 in temps

    def test_materials_replace_dataset(self):
        block = '[[materials]]\ngroup = "solar"\nname = "film"\ndensity_g_cm3 = 2.0\nvolume_cm3_m2 = 100\n\n[silicon]'
        scn = parse_scenario(edit("[silicon]", block))
        assert panel.panel_mass_density(scn.panel) == pytest.approx(0.2)

    def test_cell_technology(self):
        scn = parse_scenario(edit("cell_efficiency = 0.27\n", 'cell_technology = "PerovskiteSiTandem"\n'))
        assert scn.thermal_config.cell_curve == thermal.CELL_CURVES[thermal.CellTechnology.PEROVSKITE_SI_TANDEM]
