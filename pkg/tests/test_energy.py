import math

import pytest
from hypothesis import given, strategies as st

from fieldmule.energy import (
    CapacitorState,
    CyclePowerTable,
    HarvestProfile,
    LightCondition,
    NodeDead,
    classify_light,
    drain_cycle,
    harvest_step,
    lifetime_in_darkness,
    usable_energy,
)

FULL = CapacitorState(1.0, 5.5, 3.3, 5.5)


class TestUsableEnergy:
    def test_full_store(self):
        assert usable_energy(FULL) == pytest.approx(9.68, abs=1e-9)

    def test_at_minimum_voltage(self):
        assert usable_energy(CapacitorState(1.0, 5.5, 3.3, 3.3)) == 0.0

    def test_linear_in_capacitance(self):
        half = CapacitorState(0.5, 5.5, 3.3, 5.5)
        assert usable_energy(half) == pytest.approx(4.84, abs=1e-9)

    def test_invalid_state_rejected(self):
        with pytest.raises(ValueError):
            CapacitorState(1.0, 5.5, 3.3, 6.0)
        with pytest.raises(ValueError):
            CapacitorState(-1.0, 5.5, 3.3, 5.0)

    @given(st.floats(3.3, 5.5), st.floats(3.3, 5.5))
    def test_monotone_in_voltage(self, v0, v1):
        lo, hi = sorted((v0, v1))
        assert usable_energy(FULL.with_voltage(lo)) <= usable_energy(FULL.with_voltage(hi))


class TestClassifyLight:
    @pytest.mark.parametrize("klux,expected", [
        (4.5, LightCondition.DARK),
        (0.0, LightCondition.DARK),
        (80.0, LightCondition.SUNNY),
        (5.0, LightCondition.CLOUDY),
        (12.0, LightCondition.CLOUDY),
        (12.01, LightCondition.SUNNY),
        (30.0, LightCondition.SUNNY),
    ])
    def test_bands(self, klux, expected):
        assert classify_light(klux) is expected

    @given(st.floats(0, 200), st.floats(0, 200))
    def test_monotone(self, a, b):
        order = [LightCondition.DARK, LightCondition.CLOUDY, LightCondition.SUNNY]
        lo, hi = sorted((a, b))
        assert order.index(classify_light(lo)) <= order.index(classify_light(hi))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            classify_light(-1.0)


class TestDrainCycle:
    def test_path_e_from_full(self):
        after = drain_cycle(FULL, "E")
        assert usable_energy(after) == pytest.approx(9.673392, abs=1e-9)

    def test_path_a_from_full(self):
        after = drain_cycle(FULL, "A")
        assert usable_energy(after) == pytest.approx(9.250597, abs=1e-9)

    def test_empty_store_dies(self):
        empty = FULL.with_voltage(3.3)
        for path in "ABCDEF":
            with pytest.raises(NodeDead):
                drain_cycle(empty, path)

    def test_unknown_path(self):
        with pytest.raises(ValueError):
            drain_cycle(FULL, "Z")

    def test_inversion_round_trip(self):
        cap = FULL
        for path in "ABCDEF":
            drained = drain_cycle(cap, path)
            table = CyclePowerTable()
            restored = drained.with_usable_energy(
                usable_energy(drained) + table.joules(path)
            )
            assert restored.v_now_volts == pytest.approx(cap.v_now_volts, abs=1e-9)

    def test_table_invariants(self):
        t = CyclePowerTable()
        assert t.energy_mj["A"] == t.energy_mj["C"]
        assert t.energy_mj["E"] == t.energy_mj["F"]
        assert all(e > 0 for e in t.energy_mj.values())


class TestHarvest:
    def test_full_sun_recharge_under_15_minutes(self):
        profile = HarvestProfile()
        cap = FULL.with_voltage(3.3)
        # 9.68 J at 12 mW: about 807 s, comfortably under the 15-minute bound.
        t, dt = 0.0, 10.0
        while cap.v_now_volts < 5.5 - 1e-9:
            cap = harvest_step(cap, profile, 80.0, dt)
            t += dt
        assert t <= 15 * 60
        assert t == pytest.approx(9.68 / 0.012, abs=2 * dt)

    def test_zero_light_no_harvest(self):
        cap = FULL.with_voltage(4.0)
        after = harvest_step(cap, HarvestProfile(), 0.0, 600.0)
        assert after.v_now_volts == cap.v_now_volts

    def test_capped_at_v_max(self):
        after = harvest_step(FULL, HarvestProfile(), 80.0, 600.0)
        assert after.v_now_volts == FULL.v_max_volts

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            harvest_step(FULL, HarvestProfile(), 80.0, 0.0)

    @given(st.floats(0, 150), st.floats(0, 150))
    def test_power_monotone_in_light(self, a, b):
        profile = HarvestProfile()
        lo, hi = sorted((a, b))
        assert profile.harvest_power_mw(lo) <= profile.harvest_power_mw(hi) + 1e-12

    def test_zero_illuminance_zero_current(self):
        current, _ = HarvestProfile().panel_signature(0.0)
        assert current == 0.0

    def test_conservation_over_mixed_schedule(self):
        profile = HarvestProfile()
        table = CyclePowerTable()
        cap = FULL.with_voltage(4.5)
        harvested = drained = 0.0
        start = usable_energy(cap)
        for i, path in enumerate("EFABDC" * 3):
            before = usable_energy(cap)
            cap = harvest_step(cap, profile, 40.0, 30.0)
            harvested += usable_energy(cap) - before
            cap = drain_cycle(cap, path, table)
            drained += table.joules(path)
            assert usable_energy(cap) == pytest.approx(
                start + harvested - drained, abs=1e-9
            )


class TestLifetime:
    # Reference lifetimes from measured dark-cycle energy.
    @pytest.mark.parametrize("duty,reported", [
        (20.0, 21.81), (15.0, 16.27), (10.0, 10.75), (5.0, 5.22),
    ])
    def test_matches_reported_within_10_percent(self, duty, reported):
        days = lifetime_in_darkness(FULL, duty_cycle_minutes=duty)
        assert abs(days - reported) / reported <= 0.10

    def test_doubling_duty_doubles_lifetime(self):
        d10 = lifetime_in_darkness(FULL, duty_cycle_minutes=10.0)
        d20 = lifetime_in_darkness(FULL, duty_cycle_minutes=20.0)
        assert d20 == pytest.approx(2 * d10, abs=1e-12)

    def test_rejects_out_of_range_duty(self):
        with pytest.raises(ValueError):
            lifetime_in_darkness(FULL, duty_cycle_minutes=0.0)
        with pytest.raises(ValueError):
            lifetime_in_darkness(FULL, duty_cycle_minutes=121.0)

    def test_cycle_count(self):
        # floor(9.68 / 6.608e-3) dark cycles before the store runs out
        days = lifetime_in_darkness(FULL, duty_cycle_minutes=20.0)
        assert days == pytest.approx(1464 * 20.0 / 1440.0, abs=1e-12)


class TestIdealSunnyDay:
    def test_daily_energy_and_average_power(self):
        table = CyclePowerTable()
        decomposition = [("F", 18), ("D", 1), ("C", 34), ("A", 1), ("F", 18)]
        total_mj = sum(table.energy_mj[p] * n for p, n in decomposition)
        assert total_mj == pytest.approx(15_314.327, abs=1e-6)
        avg_uw = total_mj * 1e-3 / 86_400.0 * 1e6
        assert avg_uw == pytest.approx(177.25, abs=0.01)
        assert abs(avg_uw - 179.88) / 179.88 <= 0.03
