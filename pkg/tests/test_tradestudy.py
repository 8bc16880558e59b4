from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iscr import tradestudy
from iscr.errors import ConfigurationError
from iscr.tradestudy import REFERENCE_DESIGNS, ArchitectureDesign, Cooling

LOW_T = REFERENCE_DESIGNS[1]

# name: (radiated flux, radiator fraction, clock, energy, normalized power)
EXPECTED = {
    "ISCR": (460.0, 1.00, 2.60, 0.204, 384.0),
    "Low T radiator": (523.0, 0.41, 2.38, 0.213, 408.0),
    "Medium T radiator": (629.0, 0.34, 2.05, 0.274, 317.0),
    "High T radiator": (794.0, 0.27, 2.05, 0.274, 317.0),
}


@pytest.fixture(scope="module")
def columns():
    return {c.name: c for c in tradestudy.compare(REFERENCE_DESIGNS)}


class TestCompare:
    @pytest.mark.parametrize("name", list(EXPECTED))
    def test_reference_columns(self, columns, name):
        flux, fraction, clock, energy, power = EXPECTED[name]
        col = columns[name]
        assert col.radiated_flux == pytest.approx(flux, abs=1.0)
        assert col.radiator_fraction == pytest.approx(fraction, abs=0.01)
        assert col.clock == pytest.approx(clock)
        assert col.energy_per_token == pytest.approx(energy)
        assert col.normalized_power == pytest.approx(power, abs=1.0)

    def test_column_order_preserved(self, columns):
        assert list(columns) == [d.name for d in REFERENCE_DESIGNS]

    def test_normalized_power_ordering(self, columns):
        p = {k: v.normalized_power for k, v in columns.items()}
        assert p["Low T radiator"] > p["ISCR"] > p["Medium T radiator"]
        assert p["Medium T radiator"] == p["High T radiator"]

    def test_integrated_column_reports_cell_temperature(self, columns):
        assert columns["ISCR"].solar_cell_temp is not None
        assert columns["Low T radiator"].solar_cell_temp is None

    def test_single_design(self):
        (col,) = tradestudy.compare([LOW_T])
        assert col.name == "Low T radiator"

    def test_high_performance_uses_liquid_row(self):
        assert tradestudy.silicon_lookup_temp(REFERENCE_DESIGNS[3]) == 60.0
        assert tradestudy.silicon_lookup_temp(replace(LOW_T, silicon_temp_override=35.0)) == 35.0


class TestRadiatorFraction:
    def test_examples(self):
        assert tradestudy.radiator_area_fraction(LOW_T) == pytest.approx(432.3 / (522.86 * 2), abs=1e-3)
        assert tradestudy.radiator_area_fraction(REFERENCE_DESIGNS[3]) == pytest.approx(0.272, abs=1e-3)

    def test_unit_load(self):
        flux = 0.9 * 5.670374419e-8 * (273.15 + 45) ** 4
        d = replace(LOW_T, sides=1, earth_ir=flux - LOW_T.compute_power)
        assert tradestudy.radiator_area_fraction(d) == pytest.approx(1.0)

    @given(temp=st.floats(30.0, 100.0))
    def test_doubling_sides_halves(self, temp):
        one = replace(LOW_T, radiator_temp=temp, junction_temp=105, sides=1)
        two = replace(one, sides=2)
        assert tradestudy.radiator_area_fraction(two) == pytest.approx(
            tradestudy.radiator_area_fraction(one) / 2, rel=1e-12)

    @given(t1=st.floats(30.0, 100.0), dt=st.floats(0.1, 5.0))
    def test_decreasing_in_temperature(self, t1, dt):
        a = replace(LOW_T, radiator_temp=t1, junction_temp=105)
        b = replace(a, radiator_temp=t1 + dt)
        assert tradestudy.radiator_area_fraction(b) < tradestudy.radiator_area_fraction(a)


class TestDesignInvariants:
    @pytest.mark.parametrize("kwargs", [dict(junction_temp=40), dict(junction_temp=110),
                                        dict(cell_efficiency=0.9)])
    def test_rejected(self, kwargs):
        base = dict(name="x", cell_efficiency=0.3, solar_absorption=0.82, radiator_temp=45,
                    junction_temp=90, sides=2, cooling=Cooling.LIQUID)
        with pytest.raises(ConfigurationError):
            ArchitectureDesign(**{**base, **kwargs})
