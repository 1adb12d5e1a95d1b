"""Local read/query HTTP interface for the dashboard.

Serves snapshots of a loaded simulation session: field layout with
per-node recency, calibrated node time series, pickup zones, and what-if
route evaluation.  All endpoints are read-only except session load and
sim stepping.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .gateway import Route, recency_classify, RecencyClass
from .sensing import CalibrationModel, rolling_mean
from .sim import (
    SCHEMA_VERSION,
    Scenario,
    SimEngine,
    compute_pickup_zones,
    whatif_route,
)


class RoutePayload(BaseModel):
    schema_version: int = SCHEMA_VERSION
    waypoints: list[list[float]] = Field(default_factory=list)
    loop: bool = False


class StepResponse(BaseModel):
    sim_time_s: float


class Session:
    def __init__(self, scenario: Scenario):
        self.engine = SimEngine(scenario)
        self.zones = compute_pickup_zones(scenario)
        self.calibration = CalibrationModel()


def _validate_route(payload: RoutePayload) -> Route:
    errors = []
    if len(payload.waypoints) < 2:
        errors.append({"field": "waypoints", "message": "need at least 2 waypoints"})
    for i, wp in enumerate(payload.waypoints):
        if len(wp) != 3:
            errors.append({"field": f"waypoints[{i}]",
                           "message": "waypoint must be [x_m, y_m, time_s]"})
    if not errors:
        times = [wp[2] for wp in payload.waypoints]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            errors.append({"field": "waypoints",
                           "message": "waypoint times must be strictly increasing"})
    if errors:
        raise HTTPException(status_code=422, detail=errors)
    return Route.from_points([tuple(wp) for wp in payload.waypoints], loop=payload.loop)


def create_app() -> FastAPI:
    app = FastAPI(title="fieldmule service")
    app.state.session = None
    lock = threading.Lock()

    def session() -> Session:
        s = app.state.session
        if s is None:
            raise HTTPException(status_code=409, detail="no session loaded")
        return s

    @app.post("/session")
    def load_session(scenario: dict):
        with lock:
            try:
                app.state.session = Session(Scenario.from_dict(scenario))
            except (KeyError, ValueError) as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            return {
                "status": "ok",
                "schema_version": SCHEMA_VERSION,
                "nodes": [n.node_id for n in app.state.session.engine.scenario.nodes],
            }

    @app.post("/step", response_model=StepResponse)
    def step(minutes: float = 20.0):
        with lock:
            s = session()
            s.engine.step_until(s.engine.now + minutes * 60.0)
            return StepResponse(sim_time_s=s.engine.now)

    @app.get("/field")
    def get_field():
        with lock:
            s = session()
            return field_snapshot(s)

    @app.get("/zones")
    def get_zones():
        with lock:
            s = session()
            return {
                "schema_version": SCHEMA_VERSION,
                "zones": [_zone_dict(z) for z in s.zones],
            }

    @app.get("/nodes/{node_id}/series")
    def get_node_series(node_id: str, from_s: float | None = None,
                        to_s: float | None = None, window: int | None = None):
        with lock:
            s = session()
            if node_id not in s.engine.nodes:
                raise HTTPException(status_code=404, detail=f"unknown node {node_id!r}")
            return {
                "schema_version": SCHEMA_VERSION,
                "node_id": node_id,
                "points": node_series(s, node_id, from_s, to_s, window),
            }

    @app.post("/whatif")
    def post_whatif(payload: RoutePayload):
        with lock:
            s = session()
            route = _validate_route(payload)
            predictions = whatif_route(
                s.engine.scenario, route, start_time_s=s.engine.now
            )
            return {
                "schema_version": payload.schema_version,
                "predictions": [
                    {
                        "node_id": p.node_id,
                        "will_contact": p.will_contact,
                        "earliest_contact_time_s": p.earliest_contact_time_s,
                        "required_dwell_minutes": p.required_dwell_minutes,
                    }
                    for p in predictions
                ],
            }

    _mount_dashboard(app)
    return app


def _mount_dashboard(app: FastAPI) -> None:
    """Serve the built dashboard at / when frontend/ sits next to the repo.

    API routes are registered first, so they take precedence over the
    static mount.  Purely a convenience; the API works without it.
    """
    frontend = Path(__file__).resolve().parents[2] / "frontend"
    if (frontend / "index.html").exists() and (frontend / "dist").is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend, html=True), name="dashboard")


def field_snapshot(s: Session) -> dict:
    engine = s.engine
    scenario = engine.scenario
    now = engine.now
    nodes = []
    for fn in scenario.nodes:
        last = engine.gateway.last_contact.get(fn.node_id)
        if last is None:
            recency = RecencyClass.RED  # never heard from: demands attention
        else:
            recency = recency_classify(last, now)
        last_vwc = _last_vwc_percent(s, fn.node_id)
        nodes.append({
            "id": fn.node_id,
            "x_m": fn.x_m,
            "y_m": fn.y_m,
            "in_canopy": fn.in_canopy,
            "soil": fn.soil,
            "recency": recency.value,
            "buffer_occupancy": len(engine.nodes[fn.node_id].buffer),
            "last_vwc_percent": last_vwc,
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "sim_time_s": now,
        "field_polygon": [list(p) for p in scenario.field_polygon],
        "roads": [[list(p) for p in road] for road in scenario.roads],
        "nodes": nodes,
        "zones": [_zone_dict(z) for z in s.zones],
    }


def node_series(
    s: Session,
    node_id: str,
    from_s: float | None = None,
    to_s: float | None = None,
    window: int | None = None,
) -> list[dict]:
    """Calibrated series from delivered records only; the farmer cannot see
    what the mule has not collected."""
    engine = s.engine
    entries = sorted(
        (e for e in engine.gateway.uplink_log if e.node_id == node_id),
        key=lambda e: e.record.cycle_index,
    )
    if from_s is not None:
        entries = [e for e in entries if e.reconstructed_time_s >= from_s]
    if to_s is not None:
        entries = [e for e in entries if e.reconstructed_time_s <= to_s]
    if not entries:
        return []
    if window is None:
        # Default smoothing window: one day's worth of wake cycles.
        window = max(1, int(1440.0 / engine.scenario.duty_cycle_minutes))
    raw = [
        (e.reconstructed_time_s, s.calibration.voltage_to_vwc_percent(e.record.voltage_v))
        for e in entries
    ]
    smoothed = rolling_mean(raw, window)
    return [
        {
            "t_s": t,
            "vwc_percent": max(vwc, 0.0),  # display clamp at the dry floor
            "temp_c": e.record.temp_c,
            "sun_state": e.record.sun_state.value,
        }
        for (t, vwc), e in zip(smoothed, entries)
    ]


def _last_vwc_percent(s: Session, node_id: str) -> float | None:
    entries = [e for e in s.engine.gateway.uplink_log if e.node_id == node_id]
    if not entries:
        return None
    latest = max(entries, key=lambda e: e.record.cycle_index)
    vwc = s.calibration.voltage_to_vwc_percent(latest.record.voltage_v)
    return max(vwc, 0.0)


def _zone_dict(zone) -> dict:
    return {
        "node_id": zone.node_id,
        "segments": [[list(a), list(b)] for a, b in zone.segments],
        "dwell_minutes": zone.dwell_minutes,
    }


app = create_app()
