import io

import pytest

from fieldmule.energy import LightCondition
from fieldmule.gateway import (
    GatewayState,
    RecencyClass,
    Route,
    UPLINK_CSV_HEADER,
    handle_ping,
    ingest_records,
    position_at,
    recency_classify,
    write_uplink_csv,
)
from fieldmule.link import LinkModel
from fieldmule.node import SensorRecord


def make_record(cycle_index):
    return SensorRecord.from_reading(LightCondition.SUNNY, 21.0, 0.5, cycle_index)


class TestRoute:
    ROUTE = Route.from_points([(0, 0, 0), (100, 0, 100), (100, 50, 150)])

    def test_exact_waypoint(self):
        assert position_at(self.ROUTE, 100) == (100.0, 0.0)

    def test_midpoint_interpolation(self):
        assert position_at(self.ROUTE, 50) == (50.0, 0.0)

    def test_clamped_before_and_after(self):
        assert position_at(self.ROUTE, -10) == (0.0, 0.0)
        assert position_at(self.ROUTE, 1000) == (100.0, 50.0)

    def test_loop_wraps_time(self):
        loop = Route.from_points([(0, 0, 0), (100, 0, 100)], loop=True)
        assert position_at(loop, 100 + 25) == position_at(loop, 25)

    def test_rejects_non_monotone_times(self):
        with pytest.raises(ValueError):
            Route.from_points([(0, 0, 10), (1, 1, 5)])

    def test_rejects_single_waypoint(self):
        with pytest.raises(ValueError):
            Route.from_points([(0, 0, 0)])


class TestRecency:
    H = 3600.0

    @pytest.mark.parametrize("age_h,expected", [
        (0, RecencyClass.GREEN),
        (23, RecencyClass.GREEN),
        (25, RecencyClass.YELLOW),
        (72, RecencyClass.YELLOW),  # boundary reads as "within 3 days"
        (73, RecencyClass.RED),
    ])
    def test_boundaries(self, age_h, expected):
        assert recency_classify(0.0, age_h * self.H) is expected

    def test_just_past_three_days(self):
        assert recency_classify(0.0, 72 * self.H + 1) is RecencyClass.RED

    def test_rejects_negative_age(self):
        with pytest.raises(ValueError):
            recency_classify(100.0, 50.0)


class TestHandlePing:
    def test_in_range_acks(self):
        gw = GatewayState()
        assert handle_ping(gw, "n1", 100.0, False, LinkModel(), 0.0)

    def test_out_of_range_silent(self):
        gw = GatewayState()
        assert not handle_ping(gw, "n1", 1500.0, False, LinkModel(), 0.0)

    def test_ping_alone_does_not_touch_last_contact(self):
        gw = GatewayState()
        handle_ping(gw, "n1", 100.0, False, LinkModel(), 0.0)
        assert "n1" not in gw.last_contact

    def test_symmetric_hard_step(self):
        # Same geometry both directions: uplink success implies ack.
        m = LinkModel()
        gw = GatewayState()
        for d in (10.0, 250.0, 999.0):
            assert handle_ping(gw, "n1", d, False, m, 0.0)


class TestIngestRecords:
    def test_dedup_idempotent(self):
        gw = GatewayState()
        batch = [make_record(i) for i in range(3)]
        ingest_records(gw, "n1", batch, 100.0)
        snapshot = list(gw.uplink_log)
        ingest_records(gw, "n1", batch, 200.0)
        assert gw.uplink_log == snapshot

    def test_c_then_a_replay_adds_only_new(self):
        gw = GatewayState()
        ingest_records(gw, "n1", [make_record(0)], 100.0)
        ingest_records(gw, "n1", [make_record(0), make_record(1)], 1300.0)
        assert [e.record.cycle_index for e in gw.uplink_log] == [0, 1]

    def test_same_cycle_different_nodes_both_kept(self):
        gw = GatewayState()
        ingest_records(gw, "n1", [make_record(5)], 10.0)
        ingest_records(gw, "n2", [make_record(5)], 20.0)
        assert len(gw.uplink_log) == 2

    def test_empty_batch_still_acks_and_updates_contact(self):
        gw = GatewayState()
        assert ingest_records(gw, "n1", [], 42.0)
        assert gw.last_contact["n1"] == 42.0

    def test_last_contact_monotone(self):
        gw = GatewayState()
        ingest_records(gw, "n1", [make_record(0)], 100.0)
        ingest_records(gw, "n1", [], 50.0)  # late-arriving, earlier clock
        assert gw.last_contact["n1"] == 100.0

    def test_reconstructed_times_anchor_newest_record(self):
        gw = GatewayState()
        t = 10_000.0
        ingest_records(gw, "n1", [make_record(8), make_record(10)], t,
                       duty_cycle_minutes=20.0)
        by_index = {e.record.cycle_index: e.reconstructed_time_s for e in gw.uplink_log}
        assert by_index[10] == pytest.approx(t)
        assert by_index[8] == pytest.approx(t - 2 * 20 * 60)


class TestUplinkCsv:
    def test_header_and_rows(self):
        gw = GatewayState()
        ingest_records(gw, "n1", [make_record(3)], 500.0)
        buf = io.StringIO()
        write_uplink_csv(gw, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0].split(",") == UPLINK_CSV_HEADER
        fields = lines[1].split(",")
        assert fields[1] == "n1"
        assert fields[2] == "3"
        assert fields[3] == "sunny"
        assert float(fields[5]) == pytest.approx(0.5)

    def test_voltage_renders_decoded_value_exactly(self):
        gw = GatewayState()
        rec = SensorRecord(LightCondition.DARK, -123, 5123, 9)
        ingest_records(gw, "n1", [rec], 0.0)
        buf = io.StringIO()
        write_uplink_csv(gw, buf)
        row = buf.getvalue().strip().splitlines()[1].split(",")
        assert float(row[4]) == rec.temp_c
        assert float(row[5]) == rec.voltage_v
