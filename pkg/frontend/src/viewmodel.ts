// Pure view-model helpers: snapshot/prediction payloads in, renderable
// values out. No fetches, no DOM — everything here is unit-testable.

import type {
  ContactPrediction,
  FieldSnapshot,
  Recency,
  RouteDraft,
  SeriesPoint,
  SnapshotNode,
} from "./types.js";

export const MARKER_COLORS: Record<Recency, string> = {
  green: "#2e8b57",
  yellow: "#d4a017",
  red: "#c0392b",
};

export function markerColor(recency: Recency): string {
  return MARKER_COLORS[recency];
}

export interface MarkerVM {
  id: string;
  x: number;
  y: number;
  color: string;
  inCanopy: boolean;
  title: string;
}

export function buildMarkers(snapshot: FieldSnapshot): MarkerVM[] {
  return snapshot.nodes.map((n) => ({
    id: n.id,
    x: n.x_m,
    y: n.y_m,
    color: markerColor(n.recency),
    inCanopy: n.in_canopy,
    title: markerTitle(n),
  }));
}

export function markerTitle(n: SnapshotNode): string {
  const vwc =
    n.last_vwc_percent === null
      ? "no data yet"
      : `${n.last_vwc_percent.toFixed(1)}% VWC`;
  return `${n.id} (${n.soil}) — ${vwc}, ${n.buffer_occupancy} buffered`;
}

/** SVG viewBox covering the field polygon with a margin, in local meters. */
export function fieldViewBox(
  polygon: [number, number][],
  pad = 40,
): string {
  const xs = polygon.map((p) => p[0]);
  const ys = polygon.map((p) => p[1]);
  const minX = Math.min(...xs) - pad;
  const minY = Math.min(...ys) - pad;
  const w = Math.max(...xs) - Math.min(...xs) + 2 * pad;
  const h = Math.max(...ys) - Math.min(...ys) + 2 * pad;
  return `${minX} ${minY} ${w} ${h}`;
}

export function polylinePoints(points: [number, number][]): string {
  return points.map(([x, y]) => `${x},${y}`).join(" ");
}

/** Validation mirrors the service contract: submittable only when the
 * draft has at least two waypoints and strictly increasing times. */
export function validateRouteDraft(draft: RouteDraft): string[] {
  const errors: string[] = [];
  if (draft.waypoints.length < 2) {
    errors.push("need at least 2 waypoints");
  }
  for (let i = 1; i < draft.waypoints.length; i++) {
    if (draft.waypoints[i].time_s <= draft.waypoints[i - 1].time_s) {
      errors.push(`waypoint ${i + 1} time must be after waypoint ${i}`);
    }
  }
  return errors;
}

export function canSubmit(draft: RouteDraft): boolean {
  return validateRouteDraft(draft).length === 0;
}

/** Append a clicked map point to the draft, deriving its arrival time
 * from the departure time of the previous waypoint and a speed. */
export function appendWaypoint(
  draft: RouteDraft,
  x_m: number,
  y_m: number,
  speed_m_s: number,
): RouteDraft {
  const prev = draft.waypoints[draft.waypoints.length - 1];
  let time_s = 0;
  if (prev !== undefined) {
    const dist = Math.hypot(x_m - prev.x_m, y_m - prev.y_m);
    time_s = prev.time_s + Math.max(dist / Math.max(speed_m_s, 0.1), 1);
  }
  return {
    ...draft,
    waypoints: [...draft.waypoints, { x_m, y_m, time_s }],
  };
}

export function routeToPayload(draft: RouteDraft): {
  schema_version: number;
  waypoints: [number, number, number][];
  loop: boolean;
} {
  return {
    schema_version: 1,
    waypoints: draft.waypoints.map(
      (w) => [w.x_m, w.y_m, w.time_s] as [number, number, number],
    ),
    loop: draft.loop,
  };
}

export function badgeLabel(p: ContactPrediction): string {
  if (!p.will_contact) {
    return "no contact";
  }
  const dwell =
    p.required_dwell_minutes === null
      ? ""
      : ` (dwell ${p.required_dwell_minutes.toFixed(0)} min)`;
  return `will contact${dwell}`;
}

export function badgeClass(p: ContactPrediction): string {
  return p.will_contact ? "badge-contact" : "badge-miss";
}

export interface ChartVM {
  times: number[];
  vwc: number[];
  temps: number[];
  sun: string[];
}

/** Chart values are the service payload verbatim — no client-side
 * recalibration, scaling, or smoothing. */
export function chartSeries(points: SeriesPoint[]): ChartVM {
  return {
    times: points.map((p) => p.t_s),
    vwc: points.map((p) => p.vwc_percent),
    temps: points.map((p) => p.temp_c),
    sun: points.map((p) => p.sun_state),
  };
}

/** Map series samples into SVG path coordinates within a fixed plot box. */
export function chartPath(
  times: number[],
  values: number[],
  width: number,
  height: number,
): string {
  if (times.length === 0) {
    return "";
  }
  const t0 = times[0];
  const t1 = times[times.length - 1];
  const vMin = Math.min(...values);
  const vMax = Math.max(...values);
  const tSpan = Math.max(t1 - t0, 1);
  const vSpan = Math.max(vMax - vMin, 1e-9);
  return times
    .map((t, i) => {
      const x = ((t - t0) / tSpan) * width;
      const y = height - ((values[i] - vMin) / vSpan) * height;
      return `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}

export function formatSimClock(sim_time_s: number): string {
  const day = Math.floor(sim_time_s / 86400);
  const rest = sim_time_s - day * 86400;
  const h = Math.floor(rest / 3600);
  const m = Math.floor((rest % 3600) / 60);
  const pad = (n: number) => String(n).padStart(2, "0");
  return `day ${day + 1}, ${pad(h)}:${pad(m)}`;
}
