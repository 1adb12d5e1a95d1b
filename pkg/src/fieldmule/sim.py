"""Deterministic discrete-event world: field, weather, node wakes, gateway
motion, pickup zones, what-if route queries, metrics, and scenario config.

Identical scenarios (same seed) produce byte-identical event traces and
uplink logs.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field, replace

import yaml

from . import energy as energy_mod
from .energy import (
    CyclePowerTable,
    HarvestProfile,
    LightCondition,
    NodeDead,
    classify_light,
    usable_energy,
)
from .gateway import (
    DOWNLINK_DELAY_S,
    GatewayState,
    Route,
    handle_ping,
    ingest_records,
    position_at,
    write_uplink_csv,
)
from .link import LinkModel, packet_success
from .node import NodeFsm, PanelSignature, infer_condition
from .sensing import SOIL_TYPES, GalvanicSensorModel, SoilType

SCHEMA_VERSION = 1
DAY_S = 86_400.0
WEATHER_SLOT_S = 1200.0  # kLux is piecewise-constant per 20-minute slot

# Extended (5000-unit) pricing; the node unit price is the 20-node deployment
# figure divided out, which rounds to the single-node price.
NODE_UNIT_COST_USD = 33.678
GATEWAY_UNIT_COST_USD = 91.16


class ScenarioError(ValueError):
    """Scenario failed validation."""


@dataclass(frozen=True)
class WeatherSegment:
    start_s: float  # seconds into the day, half-open [start, end)
    end_s: float
    klux: float


DEFAULT_DAY_WEATHER = (
    WeatherSegment(0.0, 6 * 3600.0, 0.0),
    WeatherSegment(6 * 3600.0, 18 * 3600.0, 80.0),
    WeatherSegment(18 * 3600.0, DAY_S, 0.0),
)


@dataclass(frozen=True)
class FieldNode:
    node_id: str
    x_m: float
    y_m: float
    soil: str = "Osco"
    in_canopy: bool = False
    start_vwc: float | None = None


@dataclass
class Scenario:
    field_polygon: list[tuple[float, float]]
    nodes: list[FieldNode]
    roads: list[list[tuple[float, float]]] = field(default_factory=list)
    routes: list[Route] = field(default_factory=list)
    weather_default_day: tuple[WeatherSegment, ...] = DEFAULT_DAY_WEATHER
    weather_days: dict[int, tuple[WeatherSegment, ...]] = field(default_factory=dict)
    duty_cycle_minutes: float = 20.0
    link: LinkModel = field(default_factory=LinkModel)
    duration_days: float = 1.0
    rng_seed: int = 0
    harvest: HarvestProfile = field(default_factory=HarvestProfile)
    cycle_energy_mj: dict[str, float] | None = None
    sensor_noise_v: float = 0.0
    watering_events: list[tuple[float, float]] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema_version {self.schema_version}")
        if len(self.field_polygon) < 3:
            raise ScenarioError("field polygon needs at least 3 vertices")
        if not self.nodes:
            raise ScenarioError("scenario has no nodes")
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ScenarioError("duplicate node ids")
        for n in self.nodes:
            if not point_in_polygon((n.x_m, n.y_m), self.field_polygon):
                raise ScenarioError(f"node {n.node_id} lies outside the field")
            if n.soil not in SOIL_TYPES:
                raise ScenarioError(f"node {n.node_id}: unknown soil {n.soil!r}")
        for i, (a, b) in enumerate(zip(self.routes, self.routes[1:])):
            if b.start_time_s < a.end_time_s:
                raise ScenarioError(f"routes {i} and {i + 1} overlap in time")
        if self.duration_days <= 0:
            raise ScenarioError("duration must be > 0")
        if self.duty_cycle_minutes <= 0:
            raise ScenarioError("duty cycle must be > 0")

    def power_table(self) -> CyclePowerTable:
        if self.cycle_energy_mj is None:
            return CyclePowerTable()
        return CyclePowerTable(energy_mj=dict(self.cycle_energy_mj))

    def klux_at(self, t: float) -> float:
        day = int(t // DAY_S)
        tod = t - day * DAY_S
        segments = self.weather_days.get(day, self.weather_default_day)
        for seg in segments:
            if seg.start_s <= tod < seg.end_s:
                return seg.klux
        return 0.0

    def soil_for(self, node: FieldNode) -> SoilType:
        return SOIL_TYPES[node.soil]

    # -- config file round trip -------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "field_polygon": [list(p) for p in self.field_polygon],
            "nodes": [
                {
                    "id": n.node_id,
                    "x_m": n.x_m,
                    "y_m": n.y_m,
                    "soil": n.soil,
                    "in_canopy": n.in_canopy,
                    **({"start_vwc": n.start_vwc} if n.start_vwc is not None else {}),
                }
                for n in self.nodes
            ],
            "roads": [[list(p) for p in road] for road in self.roads],
            "routes": [
                {
                    "loop": r.loop,
                    "waypoints": [[w.x_m, w.y_m, w.wall_time_s] for w in r.waypoints],
                }
                for r in self.routes
            ],
            "weather": {
                "default_day": [[s.start_s, s.end_s, s.klux] for s in self.weather_default_day],
                "days": {
                    str(d): [[s.start_s, s.end_s, s.klux] for s in segs]
                    for d, segs in sorted(self.weather_days.items())
                },
            },
            "duty_cycle_minutes": self.duty_cycle_minutes,
            "link": {
                "tx_power_dbm": self.link.tx_power_dbm,
                "clear_los_range_m": self.link.clear_los_range_m,
                "canopy_range_m": self.link.canopy_range_m,
                "rolloff_width_m": self.link.rolloff_width_m,
            },
            "duration_days": self.duration_days,
            "rng_seed": self.rng_seed,
            "harvest": {
                "full_sun_power_mw": self.harvest.full_sun_power_mw,
                "leakage_mw": self.harvest.leakage_mw,
            },
            **(
                {"cycle_energy_mj": dict(self.cycle_energy_mj)}
                if self.cycle_energy_mj is not None
                else {}
            ),
            "sensor_noise_v": self.sensor_noise_v,
            "watering_events": [list(e) for e in self.watering_events],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        weather = d.get("weather", {})
        default_day = tuple(
            WeatherSegment(*seg) for seg in weather.get("default_day", [])
        ) or DEFAULT_DAY_WEATHER
        days = {
            int(k): tuple(WeatherSegment(*seg) for seg in v)
            for k, v in weather.get("days", {}).items()
        }
        link_d = d.get("link", {})
        harvest_d = d.get("harvest", {})
        scenario = cls(
            field_polygon=[tuple(p) for p in d["field_polygon"]],
            nodes=[
                FieldNode(
                    node_id=str(n["id"]),
                    x_m=float(n["x_m"]),
                    y_m=float(n["y_m"]),
                    soil=n.get("soil", "Osco"),
                    in_canopy=bool(n.get("in_canopy", False)),
                    start_vwc=n.get("start_vwc"),
                )
                for n in d["nodes"]
            ],
            roads=[[tuple(p) for p in road] for road in d.get("roads", [])],
            routes=[
                Route.from_points(r["waypoints"], loop=bool(r.get("loop", False)))
                for r in d.get("routes", [])
            ],
            weather_default_day=default_day,
            weather_days=days,
            duty_cycle_minutes=float(d.get("duty_cycle_minutes", 20.0)),
            link=LinkModel(**link_d),
            duration_days=float(d.get("duration_days", 1.0)),
            rng_seed=int(d.get("rng_seed", 0)),
            harvest=HarvestProfile(**harvest_d),
            cycle_energy_mj=d.get("cycle_energy_mj"),
            sensor_noise_v=float(d.get("sensor_noise_v", 0.0)),
            watering_events=[tuple(e) for e in d.get("watering_events", [])],
            schema_version=int(d.get("schema_version", SCHEMA_VERSION)),
        )
        scenario.validate()
        return scenario

    @classmethod
    def from_yaml(cls, text: str) -> "Scenario":
        return cls.from_dict(yaml.safe_load(text))

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def point_in_polygon(p: tuple[float, float], polygon) -> bool:
    """Ray casting; boundary points count as inside."""
    x, y = p
    n = len(polygon)
    inside = False
    for i in range(n):
        x0, y0 = polygon[i]
        x1, y1 = polygon[(i + 1) % n]
        # On-segment check.
        cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)
        if abs(cross) < 1e-9 and min(x0, x1) - 1e-9 <= x <= max(x0, x1) + 1e-9 \
                and min(y0, y1) - 1e-9 <= y <= max(y0, y1) + 1e-9:
            return True
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if x < xi:
                inside = not inside
    return inside


def wake_phase_s(seed: int, node_id: str, duty_cycle_minutes: float) -> float:
    """Deterministic per-node wake offset within the duty period."""
    digest = hashlib.sha256(f"{seed}:{node_id}".encode()).digest()
    period = duty_cycle_minutes * 60.0
    return (int.from_bytes(digest[:8], "big") % int(period * 1000)) / 1000.0


def gateway_position(scenario: Scenario, t: float) -> tuple[float, float] | None:
    """Gateway position at wall time t, or None when no route exists."""
    if not scenario.routes:
        return None
    prev_end = None
    for route in scenario.routes:
        if t < route.start_time_s:
            if prev_end is None:
                return position_at(route, route.start_time_s)
            return prev_end
        if t <= route.end_time_s or route.loop:
            return position_at(route, t)
        prev_end = position_at(route, route.end_time_s)
    return prev_end


def soil_vwc_at(
    soil: SoilType, events, start_vwc: float, t: float
) -> float:
    """Closed-form exponential drying with step watering events."""
    rate_per_s = soil.drying_rate_per_hour / 3600.0
    vwc = start_vwc
    t0 = 0.0
    for et, added in sorted(events):
        if et > t:
            break
        vwc = soil.residual_vwc + (vwc - soil.residual_vwc) * math.exp(-rate_per_s * (et - t0))
        vwc = min(vwc + added, soil.saturation_vwc)
        t0 = et
    return soil.residual_vwc + (vwc - soil.residual_vwc) * math.exp(-rate_per_s * (t - t0))


def soil_temperature_c(t: float) -> float:
    """Simple diurnal soil temperature, peaking mid-afternoon."""
    tod = (t % DAY_S) / DAY_S
    return 20.0 + 6.0 * math.sin(2.0 * math.pi * (tod - 0.375))


@dataclass
class NodeMetrics:
    generated: int = 0
    delivered: int = 0
    dropped_overflow: int = 0
    max_buffer_occupancy: int = 0
    min_cap_voltage_v: float = math.inf
    dead_wakes: int = 0
    contacts: int = 0
    path_counts: dict[str, int] = field(default_factory=dict)
    latencies_s: list[float] = field(default_factory=list)


@dataclass
class Metrics:
    per_node: dict[str, NodeMetrics] = field(default_factory=dict)
    energy_drained_j_by_path: dict[str, float] = field(default_factory=dict)
    energy_harvested_j: float = 0.0

    def node(self, node_id: str) -> NodeMetrics:
        return self.per_node.setdefault(node_id, NodeMetrics())

    @property
    def completeness(self) -> float:
        generated = sum(m.generated for m in self.per_node.values())
        delivered = sum(m.delivered for m in self.per_node.values())
        return delivered / generated if generated else 1.0

    def to_text(self) -> str:
        lines = [f"completeness: {self.completeness:.4f}",
                 f"energy_harvested_J: {self.energy_harvested_j:.6f}"]
        for path in sorted(self.energy_drained_j_by_path):
            lines.append(
                f"energy_drained_J[{path}]: {self.energy_drained_j_by_path[path]:.6f}"
            )
        for node_id in sorted(self.per_node):
            m = self.per_node[node_id]
            lat = max(m.latencies_s) if m.latencies_s else 0.0
            lines.append(
                f"node {node_id}: generated={m.generated} delivered={m.delivered} "
                f"dropped={m.dropped_overflow} max_buffer={m.max_buffer_occupancy} "
                f"min_voltage={m.min_cap_voltage_v:.4f} contacts={m.contacts} "
                f"dead_wakes={m.dead_wakes} max_latency_s={lat:.1f} "
                f"paths={dict(sorted(m.path_counts.items()))}"
            )
        return "\n".join(lines) + "\n"


class _GatewayPort:
    """Radio adapter binding one node's wake to the gateway at a moment."""

    def __init__(self, engine: "SimEngine", node: FieldNode, t: float):
        self.engine = engine
        self.node = node
        self.t = t
        self.reachable_uplink = False
        self.acked = False

    def _distance(self) -> float | None:
        pos = gateway_position(self.engine.scenario, self.t)
        if pos is None:
            return None
        return math.hypot(pos[0] - self.node.x_m, pos[1] - self.node.y_m)

    def _packet(self, distance: float) -> bool:
        return packet_success(
            self.engine.scenario.link, distance, self.node.in_canopy, self.engine.rng
        )

    def ping(self, node_id: str) -> bool:
        d = self._distance()
        if d is None or not self._packet(d):
            return False
        self.reachable_uplink = True
        ack = handle_ping(
            self.engine.gateway, node_id, d, self.node.in_canopy,
            self.engine.scenario.link, self.t, self.engine.rng,
        )
        self.acked = ack
        return ack

    def send_data(self, node_id: str, records) -> bool:
        d = self._distance()
        if d is None or not self._packet(d):
            return False
        t_rx = self.t + DOWNLINK_DELAY_S
        ingest_records(
            self.engine.gateway, node_id, records, t_rx,
            self.engine.scenario.duty_cycle_minutes,
        )
        # Data-ack downlink.
        return self._packet(d)

    def send_alive_ping(self, node_id: str) -> None:
        d = self._distance()
        if d is not None:
            self._packet(d)  # fire and forget


class SimEngine:
    """Steppable deterministic simulation of one scenario."""

    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.scenario = scenario
        self.rng = random.Random(scenario.rng_seed)
        self.gateway = GatewayState()
        self.metrics = Metrics()
        self.trace: list[str] = []
        self.now = 0.0
        self.end_time = scenario.duration_days * DAY_S
        table = scenario.power_table()
        self.nodes: dict[str, NodeFsm] = {}
        self.field_nodes: dict[str, FieldNode] = {}
        self._next_wake: dict[str, float] = {}
        self._last_harvest: dict[str, float] = {}
        self._gen_times: dict[tuple[str, int], float] = {}
        self._sensor = GalvanicSensorModel(noise_sigma_v=scenario.sensor_noise_v)
        for fn in scenario.nodes:
            self.nodes[fn.node_id] = NodeFsm(
                fn.node_id,
                duty_cycle_minutes=scenario.duty_cycle_minutes,
                power_table=table,
            )
            self.field_nodes[fn.node_id] = fn
            self._next_wake[fn.node_id] = wake_phase_s(
                scenario.rng_seed, fn.node_id, scenario.duty_cycle_minutes
            )
            self._last_harvest[fn.node_id] = 0.0

    # -- harvesting --------------------------------------------------------

    def _harvest(self, node: NodeFsm, t0: float, t1: float) -> None:
        if t1 <= t0:
            return
        profile = self.scenario.harvest
        t = t0
        while t < t1 - 1e-9:
            slot_end = (math.floor(t / WEATHER_SLOT_S) + 1) * WEATHER_SLOT_S
            step_end = min(slot_end, t1)
            klux = self.scenario.klux_at(t)
            before = usable_energy(node.cap)
            node.cap = energy_mod.harvest_step(node.cap, profile, klux, step_end - t) \
                if step_end > t else node.cap
            self.metrics.energy_harvested_j += usable_energy(node.cap) - before
            t = step_end

    # -- event loop --------------------------------------------------------

    def step_until(self, t_target: float) -> None:
        t_target = min(t_target, self.end_time)
        while True:
            pending = [
                (t, node_id)
                for node_id, t in self._next_wake.items()
                if t <= t_target
            ]
            if not pending:
                break
            t, node_id = min(pending)
            self._wake_node(node_id, t)
            self._next_wake[node_id] = t + self.scenario.duty_cycle_minutes * 60.0
        # Trailing harvest so capacitor state is current at t_target.
        for node_id, node in sorted(self.nodes.items()):
            self._harvest(node, self._last_harvest[node_id], t_target)
            self._last_harvest[node_id] = max(self._last_harvest[node_id], t_target)
        self.now = t_target

    def run(self) -> None:
        self.step_until(self.end_time)

    def _wake_node(self, node_id: str, t: float) -> None:
        node = self.nodes[node_id]
        fn = self.field_nodes[node_id]
        self._harvest(node, self._last_harvest[node_id], t)
        self._last_harvest[node_id] = t

        klux = self.scenario.klux_at(t)
        current_ma, voltage_v = self.scenario.harvest.panel_signature(klux)
        condition = infer_condition(PanelSignature(current_ma, voltage_v))

        soil = self.scenario.soil_for(fn)
        start_vwc = fn.start_vwc if fn.start_vwc is not None else 0.30
        vwc = soil_vwc_at(soil, self.scenario.watering_events, start_vwc, t)
        temp_c = soil_temperature_c(t)
        noise_seed = hashlib.sha256(
            f"{self.scenario.rng_seed}:{node_id}:{node.cycle_counter}".encode()
        ).digest()
        noise_rng = (
            random.Random(int.from_bytes(noise_seed[:8], "big"))
            if self.scenario.sensor_noise_v > 0
            else None
        )
        sensor_v = self._sensor.voltage(vwc, temp_c, noise_rng)

        nm = self.metrics.node(node_id)
        port = _GatewayPort(self, fn, t)
        try:
            result = node.wake(condition, sensor_v, temp_c, port)
        except NodeDead:
            nm.dead_wakes += 1
            nm.min_cap_voltage_v = min(nm.min_cap_voltage_v, node.cap.v_now_volts)
            self.trace.append(f"{t:.3f}|{node_id}|dead|v={node.cap.v_now_volts:.6f}")
            return

        nm.generated += 1
        nm.path_counts[result.path] = nm.path_counts.get(result.path, 0) + 1
        nm.max_buffer_occupancy = max(nm.max_buffer_occupancy, len(node.buffer))
        nm.min_cap_voltage_v = min(nm.min_cap_voltage_v, node.cap.v_now_volts)
        nm.dropped_overflow = node.buffer.overflow_count
        table = node.power_table
        self.metrics.energy_drained_j_by_path[result.path] = (
            self.metrics.energy_drained_j_by_path.get(result.path, 0.0)
            + table.joules(result.path)
        )
        self._gen_times[(node_id, result.record.cycle_index)] = t
        if result.delivered:
            nm.contacts += 1
            t_rx = t + DOWNLINK_DELAY_S
            for rec in result.transmitted:
                gen = self._gen_times.get((node_id, rec.cycle_index))
                if gen is not None:
                    nm.latencies_s.append(t_rx - gen)
            nm.delivered = sum(
                1 for e in self.gateway.uplink_log if e.node_id == node_id
            )
        self.trace.append(
            f"{t:.3f}|{node_id}|wake|path={result.path}|cond={condition.value}"
            f"|buf={len(node.buffer)}|v={node.cap.v_now_volts:.6f}"
        )

    # -- bookkeeping -------------------------------------------------------

    def record_balance(self) -> dict[str, tuple[int, int, int, int]]:
        """Per node: (generated, delivered, buffered, dropped)."""
        out = {}
        for node_id, node in self.nodes.items():
            nm = self.metrics.node(node_id)
            delivered = sum(1 for e in self.gateway.uplink_log if e.node_id == node_id)
            out[node_id] = (nm.generated, delivered, len(node.buffer), node.buffer.overflow_count)
        return out

    def trace_hash(self) -> str:
        return hashlib.sha256("\n".join(self.trace).encode()).hexdigest()


@dataclass
class SimResult:
    metrics: Metrics
    gateway: GatewayState
    trace: list[str]
    engine: SimEngine

    def trace_hash(self) -> str:
        return self.engine.trace_hash()


def run(scenario: Scenario) -> SimResult:
    engine = SimEngine(scenario)
    engine.run()
    return SimResult(engine.metrics, engine.gateway, engine.trace, engine)


# -- pickup zones ----------------------------------------------------------


@dataclass(frozen=True)
class PickupZone:
    node_id: str
    segments: tuple[tuple[tuple[float, float], tuple[float, float]], ...]
    dwell_minutes: float


def _segment_in_range(p, q, center, r):
    """Sub-segment of p->q within distance r of center, or None."""
    px, py = p
    qx, qy = q
    cx, cy = center
    dx, dy = qx - px, qy - py
    fx, fy = px - cx, py - cy
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - r * r
    if a == 0:
        return (p, q) if c <= 0 else None
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    s0 = max((-b - sq) / (2 * a), 0.0)
    s1 = min((-b + sq) / (2 * a), 1.0)
    if s0 >= s1:
        return None
    return (
        (px + s0 * dx, py + s0 * dy),
        (px + s1 * dx, py + s1 * dy),
    )


def compute_pickup_zones(scenario: Scenario) -> list[PickupZone]:
    """Road sub-segments within hard-step radio range of each node."""
    zones = []
    for fn in scenario.nodes:
        r = scenario.link.range_m(fn.in_canopy)
        segments = []
        for road in scenario.roads:
            for p, q in zip(road, road[1:]):
                seg = _segment_in_range(p, q, (fn.x_m, fn.y_m), r)
                if seg is not None:
                    segments.append(seg)
        if segments:
            zones.append(
                PickupZone(fn.node_id, tuple(segments), scenario.duty_cycle_minutes)
            )
    return zones


# -- what-if route queries -------------------------------------------------


@dataclass(frozen=True)
class ContactPrediction:
    node_id: str
    will_contact: bool
    earliest_contact_time_s: float | None
    required_dwell_minutes: float


def whatif_route(
    scenario: Scenario,
    candidate: Route,
    start_time_s: float = 0.0,
) -> list[ContactPrediction]:
    """Predict per-node contact for a candidate gateway route.

    Pure query: walks the deterministic node wake schedule over the route's
    time span, assumes transmit-capable (sunny) cycles during daylight, and
    checks hard-step reachability against the candidate's position.  Never
    mutates simulation state.
    """
    period = scenario.duty_cycle_minutes * 60.0
    hard_link = replace(scenario.link, rolloff_width_m=0.0)
    out = []
    for fn in scenario.nodes:
        phase = wake_phase_s(scenario.rng_seed, fn.node_id, scenario.duty_cycle_minutes)
        first_k = max(0, math.ceil((max(candidate.start_time_s, start_time_s) - phase) / period))
        earliest = None
        k = first_k
        while True:
            t = phase + k * period
            if t > candidate.end_time_s:
                break
            if classify_light(scenario.klux_at(t)) is LightCondition.SUNNY:
                gx, gy = position_at(candidate, t)
                d = math.hypot(gx - fn.x_m, gy - fn.y_m)
                if packet_success(hard_link, d, fn.in_canopy):
                    earliest = t
                    break
            k += 1
        out.append(
            ContactPrediction(
                node_id=fn.node_id,
                will_contact=earliest is not None,
                earliest_contact_time_s=earliest,
                required_dwell_minutes=scenario.duty_cycle_minutes,
            )
        )
    return out


# -- deployment cost -------------------------------------------------------


def estimate_deployment_cost(n_nodes: int, n_gateways: int) -> float:
    """Deployment cost in USD at extended (5000-unit) pricing."""
    if n_nodes < 0 or n_gateways < 0:
        raise ValueError("counts must be >= 0")
    nodes = round(n_nodes * NODE_UNIT_COST_USD, 2)
    gateways = round(n_gateways * GATEWAY_UNIT_COST_USD, 2)
    return round(nodes + gateways, 2)


# -- demo scenario ---------------------------------------------------------


def demo_scenario(days: float = 7.0, seed: int = 42) -> Scenario:
    """Three nodes, a daily gateway pass, and mixed weather."""
    field_polygon = [(0.0, 0.0), (1000.0, 0.0), (1000.0, 800.0), (0.0, 800.0)]
    road = [(0.0, 400.0), (1000.0, 400.0)]
    routes = []
    for d in range(int(math.ceil(days))):
        t0 = d * DAY_S + 9 * 3600.0
        routes.append(Route.from_points([
            (0.0, 400.0, t0),
            (1000.0, 400.0, t0 + 3600.0),
        ]))
    cloudy_day = (
        WeatherSegment(0.0, 6 * 3600.0, 0.0),
        WeatherSegment(6 * 3600.0, 18 * 3600.0, 8.0),
        WeatherSegment(18 * 3600.0, DAY_S, 0.0),
    )
    dark_day = (WeatherSegment(0.0, DAY_S, 0.0),)
    return Scenario(
        field_polygon=field_polygon,
        nodes=[
            FieldNode("n1", 200.0, 420.0, soil="Osco"),
            FieldNode("n2", 500.0, 300.0, soil="Catlin", in_canopy=True),
            FieldNode("n3", 800.0, 700.0, soil="Wyanet"),
        ],
        roads=[road],
        routes=routes,
        weather_days={1: cloudy_day, 3: dark_day},
        duration_days=days,
        rng_seed=seed,
        watering_events=[(2 * DAY_S, 0.12), (5 * DAY_S, 0.10)],
    )


def write_outputs(result: SimResult, out_dir) -> None:
    """Write metrics, uplink CSV, and the event trace into out_dir."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.txt").write_text(result.metrics.to_text())
    with open(out / "uplink.csv", "w", newline="") as f:
        write_uplink_csv(result.gateway, f)
    (out / "trace.log").write_text("\n".join(result.trace) + "\n")
