"""Mobile data-mule gateway: route following, handshake responder, and the
deduplicated uplink ledger.

The gateway rides a farm vehicle along a timed route, answers node pings
when the link closes in both directions, ingests buffered records exactly
once, and tracks contact recency per node.
"""

from __future__ import annotations

import csv
import enum
import io
import random
from dataclasses import dataclass, field

from .link import LinkModel, packet_success
from .node import SensorRecord, reconstruct_timestamps

DOWNLINK_DELAY_S = 1.0  # node listens for the ack one second after its ping


@dataclass(frozen=True)
class Waypoint:
    x_m: float
    y_m: float
    wall_time_s: float


@dataclass(frozen=True)
class Route:
    waypoints: tuple[Waypoint, ...]
    loop: bool = False

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise ValueError("route needs at least 2 waypoints")
        times = [w.wall_time_s for w in self.waypoints]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")

    @property
    def start_time_s(self) -> float:
        return self.waypoints[0].wall_time_s

    @property
    def end_time_s(self) -> float:
        return self.waypoints[-1].wall_time_s

    @classmethod
    def from_points(cls, points, loop: bool = False) -> "Route":
        return cls(tuple(Waypoint(x, y, t) for x, y, t in points), loop=loop)


def position_at(route: Route, t: float) -> tuple[float, float]:
    """Piecewise-linear position along the route at wall time t.

    Before the first waypoint the gateway sits at the start; after the last
    it sits at the end unless the route loops, in which case time wraps.
    """
    wps = route.waypoints
    if route.loop:
        span = route.end_time_s - route.start_time_s
        t = route.start_time_s + (t - route.start_time_s) % span
    if t <= wps[0].wall_time_s:
        return wps[0].x_m, wps[0].y_m
    if t >= wps[-1].wall_time_s:
        return wps[-1].x_m, wps[-1].y_m
    for a, b in zip(wps, wps[1:]):
        if t <= b.wall_time_s:
            frac = (t - a.wall_time_s) / (b.wall_time_s - a.wall_time_s)
            return a.x_m + frac * (b.x_m - a.x_m), a.y_m + frac * (b.y_m - a.y_m)
    return wps[-1].x_m, wps[-1].y_m  # unreachable


class RecencyClass(enum.Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"


GREEN_MAX_AGE_S = 24 * 3600.0
YELLOW_MAX_AGE_S = 72 * 3600.0


def recency_classify(last: float, now: float) -> RecencyClass:
    """Green within a day, yellow up to and including three days, red after."""
    age = now - last
    if age < 0:
        raise ValueError("contact time is in the future")
    if age < GREEN_MAX_AGE_S:
        return RecencyClass.GREEN
    if age <= YELLOW_MAX_AGE_S:
        return RecencyClass.YELLOW
    return RecencyClass.RED


@dataclass(frozen=True)
class UplinkEntry:
    receive_time_s: float
    node_id: str
    record: SensorRecord
    reconstructed_time_s: float


@dataclass
class GatewayState:
    position: tuple[float, float] = (0.0, 0.0)
    uplink_log: list[UplinkEntry] = field(default_factory=list)
    last_contact: dict[str, float] = field(default_factory=dict)
    _seen: set[tuple[str, int]] = field(default_factory=set)


def handle_ping(
    gw: GatewayState,
    node_id: str,
    distance_m: float,
    in_canopy: bool,
    link: LinkModel,
    t: float,
    rng: random.Random | None = None,
) -> bool:
    """Answer a node ping.  The uplink already succeeded (or we would not
    be here); the ack goes out iff the downlink also closes.  The node hears
    it DOWNLINK_DELAY_S later.  last_contact moves only on a completed data
    exchange, not on the ping alone."""
    return packet_success(link, distance_m, in_canopy, rng)


def ingest_records(
    gw: GatewayState,
    node_id: str,
    records: list[SensorRecord],
    t: float,
    duty_cycle_minutes: float = 20.0,
) -> bool:
    """Ingest a transmitted batch, dedup on (node_id, cycle_index), and ack.

    The gateway clock anchors timestamp reconstruction: the newest cycle
    index in the batch is pinned to the receive time.
    """
    fresh = []
    for rec in records:
        key = (node_id, rec.cycle_index)
        if key in gw._seen:
            continue
        gw._seen.add(key)
        fresh.append(rec)
    if fresh:
        anchor_index = max(r.cycle_index for r in records)
        stamped = reconstruct_timestamps(fresh, (anchor_index, t), duty_cycle_minutes)
        for wall_time, rec in stamped:
            gw.uplink_log.append(
                UplinkEntry(
                    receive_time_s=t,
                    node_id=node_id,
                    record=rec,
                    reconstructed_time_s=wall_time,
                )
            )
    prev = gw.last_contact.get(node_id)
    gw.last_contact[node_id] = t if prev is None else max(prev, t)
    return True


UPLINK_CSV_HEADER = [
    "receive_time_s",
    "node_id",
    "cycle_index",
    "sun_state",
    "temp_c",
    "voltage_v",
    "reconstructed_time_s",
]


def uplink_csv_rows(gw: GatewayState) -> list[list[str]]:
    rows = []
    for e in gw.uplink_log:
        rows.append([
            repr(e.receive_time_s),
            e.node_id,
            str(e.record.cycle_index),
            e.record.sun_state.value,
            repr(e.record.temp_c),
            repr(e.record.voltage_v),
            repr(e.reconstructed_time_s),
        ])
    return rows


def write_uplink_csv(gw: GatewayState, stream: io.TextIOBase) -> None:
    w = csv.writer(stream)
    w.writerow(UPLINK_CSV_HEADER)
    w.writerows(uplink_csv_rows(gw))
