from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iscr import thermal
from iscr.errors import ConfigurationError, DomainError
from iscr.thermal import (CellTechnology, OrbitEnvironment, PanelThermalConfig, RadiatorSurface,
                          constant_curve)

SIGMA = 5.670374419e-8


def bisect_front_temperature(absorbed, efficiency, flux, emissivity, leak=0.0):
    """Independent oracle: root of eps*sigma*T^4 = absorbed - eta(T)*S - leak by bisection."""
    def f(t):
        eta = efficiency(t - 273.15)
        return emissivity * SIGMA * t**4 - (absorbed - eta * flux - leak)
    lo, hi = 0.0, 1000.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# Frozen from the bisection oracle above (fixed eta 0.27, alpha 0.895, eps 0.92,
# Earth IR absorbed on both faces).
ORACLE_FRONT_C = {None: 84.1925, 2000.0: 85.6538, 1000.0: 86.6868, 600.0: 87.7110}
ORACLE_BACK_C = {None: 16.5547, 2000.0: 19.2755, 1000.0: 21.1734, 600.0: 23.0352}


class TestRadiation:
    def test_iscr_radiator_flux(self):
        assert thermal.radiated_flux(308.15, RadiatorSurface(0.90)) == pytest.approx(460.0, abs=0.5)

    def test_medium_radiator_flux(self):
        assert thermal.radiated_flux(333.15, RadiatorSurface(0.90)) == pytest.approx(628.6, abs=0.5)

    def test_zero_kelvin(self):
        assert thermal.radiated_flux(0.0, RadiatorSurface(0.5, 2)) == 0.0
        assert thermal.equilibrium_temperature(0.0, RadiatorSurface(0.5)) == 0.0

    def test_negative_inputs(self):
        with pytest.raises(DomainError):
            thermal.radiated_flux(-1.0, RadiatorSurface(0.9))
        with pytest.raises(DomainError):
            thermal.equilibrium_temperature(-1.0, RadiatorSurface(0.9))

    def test_equilibrium_examples(self):
        s = RadiatorSurface(0.92)
        assert thermal.k_to_c(thermal.equilibrium_temperature(368.0, s)) == pytest.approx(16.7, abs=1.0)
        assert thermal.equilibrium_temperature(392.0, s) == pytest.approx((392.0 / (SIGMA * 0.92)) ** 0.25)
        assert thermal.equilibrium_temperature(392.0, s) == pytest.approx(294.4, abs=0.1)

    @given(t=st.floats(1.0, 3000.0), eps=st.floats(0.01, 1.0), sides=st.sampled_from((1, 2)))
    def test_stefan_boltzmann_round_trip(self, t, eps, sides):
        s = RadiatorSurface(eps, sides)
        back = thermal.equilibrium_temperature(thermal.radiated_flux(t, s), s)
        assert math.isclose(back, t, rel_tol=1e-9)

    @given(t=st.floats(1.0, 1000.0), eps=st.floats(0.01, 1.0))
    def test_two_sides_double_the_flux(self, t, eps):
        one = thermal.radiated_flux(t, RadiatorSurface(eps, 1))
        assert thermal.radiated_flux(t, RadiatorSurface(eps, 2)) == pytest.approx(2 * one)

    @pytest.mark.parametrize("eps", [0.0, 1.3, -0.1])
    def test_emissivity_bounds(self, eps):
        with pytest.raises(ConfigurationError):
            RadiatorSurface(eps)

    def test_sides_bounds(self):
        with pytest.raises(ConfigurationError):
            RadiatorSurface(0.9, 3)


class TestEarthIr:
    @pytest.mark.parametrize("alt, load", [(None, 0.0), (1000.0, 24.0), (800.0, 29.0),
                                           (600.0, 34.0), (2000.0, 14.0), (1500.0, 19.0)])
    def test_calibration(self, alt, load):
        assert thermal.earth_ir_back_load(alt) == pytest.approx(load)

    def test_clamped_outside_anchors(self):
        assert thermal.earth_ir_back_load(400.0) == 34.0
        assert thermal.earth_ir_back_load(36000.0) == 14.0

    def test_bad_altitude(self):
        with pytest.raises(DomainError):
            thermal.earth_ir_back_load(0.0)

    def test_environment_defaults_to_calibration(self):
        assert OrbitEnvironment("x", altitude_km=1000.0).earth_ir_back_load == 24.0
        assert OrbitEnvironment("x", altitude_km=1000.0, earth_ir_back_load=12.0).earth_ir_back_load == 12.0

    def test_deep_space_cannot_carry_ir(self):
        with pytest.raises(ConfigurationError):
            OrbitEnvironment("deep", earth_ir_back_load=5.0)


class TestCellCurves:
    tandem = thermal.CELL_CURVES[CellTechnology.PEROVSKITE_SI_TANDEM]

    @pytest.mark.parametrize("t, eta", [(85.0, 0.254), (25.0, 0.30), (55.0, 0.277)])
    def test_tandem(self, t, eta):
        assert thermal.cell_efficiency(self.tandem, t) == pytest.approx(eta)

    def test_clamps_outside_range(self):
        assert thermal.cell_efficiency(self.tandem, -50.0) == 0.30
        assert thermal.cell_efficiency(self.tandem, 200.0) == 0.254

    @pytest.mark.parametrize("tech", list(CellTechnology))
    def test_curves_non_increasing(self, tech):
        curve = thermal.CELL_CURVES[tech]
        values = [thermal.cell_efficiency(curve, t) for t in range(0, 120, 5)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_rejects_rising_curve(self):
        with pytest.raises(ConfigurationError):
            thermal.SolarCellCurve(CellTechnology.THIN_FILM_A_SI, ((25.0, 0.1), (85.0, 0.2)))

    def test_rejects_single_point(self):
        with pytest.raises(ConfigurationError):
            thermal.SolarCellCurve(CellTechnology.THIN_FILM_A_SI, ((25.0, 0.1),))


class TestFrontFace:
    def test_deep_space_front(self):
        t, p = thermal.solve_front_face(PanelThermalConfig(), OrbitEnvironment("deep"))
        assert t == pytest.approx(357.4, abs=0.5)
        assert p == pytest.approx(0.27 * 1361)

    @pytest.mark.parametrize("alt", list(ORACLE_FRONT_C))
    def test_matches_bisection_oracle(self, alt):
        cfg = PanelThermalConfig()
        env = OrbitEnvironment("o", altitude_km=alt)
        oracle = bisect_front_temperature(0.895 * 1361 + env.earth_ir_back_load,
                                          lambda _t: 0.27, 1361.0, 0.92)
        t, _ = thermal.solve_front_face(cfg, env)
        assert t == pytest.approx(oracle, abs=0.02)
        assert thermal.k_to_c(t) == pytest.approx(ORACLE_FRONT_C[alt], abs=0.02)

    def test_temperature_dependent_curve_matches_oracle(self):
        curve = thermal.CELL_CURVES[CellTechnology.PEROVSKITE_SI_TANDEM]
        cfg = PanelThermalConfig(absorptivity=0.9, cell_curve=curve, gap_leak=20.0)
        env = OrbitEnvironment("o", altitude_km=1000.0)
        oracle = bisect_front_temperature(0.9 * 1361 + 24.0,
                                          lambda tc: thermal.cell_efficiency(curve, tc), 1361.0,
                                          0.92, 20.0)
        t, _ = thermal.solve_front_face(cfg, env)
        assert t == pytest.approx(oracle, abs=0.05)

    def test_zero_net_load(self):
        cfg = PanelThermalConfig(absorptivity=0.27, front_ir_fraction=0.0)
        t, p = thermal.solve_front_face(cfg, OrbitEnvironment("deep", solar_flux=1000.0))
        assert t == 0.0
        assert p == pytest.approx(270.0)

    def test_constant_curve_consistency(self):
        env = OrbitEnvironment("deep")
        fixed = thermal.solve_front_face(PanelThermalConfig(), env)
        gaas = PanelThermalConfig(cell_curve=thermal.SolarCellCurve(
            CellTechnology.TRIPLE_JUNCTION_GAAS, ((0.0, 0.27), (150.0, 0.27))))
        assert thermal.solve_front_face(gaas, env) == pytest.approx(fixed)

    def test_negative_net_load(self):
        cfg = PanelThermalConfig(absorptivity=0.2)
        with pytest.raises(DomainError):
            thermal.solve_front_face(cfg, OrbitEnvironment("deep"))


class TestPanelEquilibrium:
    @pytest.mark.parametrize("alt", list(ORACLE_BACK_C))
    def test_back_face_oracle(self, alt):
        s = thermal.solve_panel_equilibrium(PanelThermalConfig(), OrbitEnvironment("o", altitude_km=alt))
        assert s.t_back_c == pytest.approx(ORACLE_BACK_C[alt], abs=1e-3)

    def test_product_oracle_for_back_load(self):
        cfg = PanelThermalConfig(front_ir_fraction=0.0)
        s = thermal.solve_panel_equilibrium(cfg, OrbitEnvironment("deep"))
        assert s.p_back_radiated == pytest.approx(0.27 * 1361)

    def test_iscr_column(self):
        cfg = PanelThermalConfig(absorptivity=0.82, back=RadiatorSurface(0.90), gap_leak=80.0)
        env = OrbitEnvironment("sso", altitude_km=1000.0, earth_ir_back_load=12.0)
        s = thermal.solve_panel_equilibrium(cfg, env)
        assert s.p_back_radiated == pytest.approx(459.47, abs=0.01)
        assert s.t_back_c == pytest.approx(35.0, abs=0.5)

    def test_back_temperature_rises_with_ir(self):
        temps = [thermal.solve_panel_equilibrium(PanelThermalConfig(),
                                                 OrbitEnvironment("o", altitude_km=a)).t_back
                 for a in (2000.0, 1000.0, 600.0)]
        assert temps == sorted(temps)

    @settings(max_examples=100)
    @given(alpha=st.floats(0.5, 1.0), eta=st.floats(0.05, 0.35), flux=st.floats(500.0, 2000.0),
           eps_f=st.floats(0.3, 1.0), eps_b=st.floats(0.3, 1.0), sides=st.sampled_from((1, 2)),
           ir=st.floats(0.0, 60.0), leak=st.floats(0.0, 80.0), ir_frac=st.floats(0.0, 1.0))
    def test_energy_closure(self, alpha, eta, flux, eps_f, eps_b, sides, ir, leak, ir_frac):
        cfg = PanelThermalConfig(absorptivity=alpha, cell_curve=constant_curve(eta),
                                 front=RadiatorSurface(eps_f), back=RadiatorSurface(eps_b, sides),
                                 gap_leak=leak, front_ir_fraction=ir_frac)
        env = OrbitEnvironment("o", solar_flux=flux, altitude_km=1000.0, earth_ir_back_load=ir)
        try:
            state = thermal.solve_panel_equilibrium(cfg, env)
        except DomainError:
            assert alpha * flux + ir_frac * ir < eta * flux + leak + 1e-6
            return
        assert abs(thermal.energy_residual(state, cfg, env)) < 0.5
