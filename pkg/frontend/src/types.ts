// Payload shapes mirrored from the HTTP service. Every displayed number
// comes from one of these fields; the client never recomputes calibration.

export type Recency = "green" | "yellow" | "red";

export interface SnapshotNode {
  id: string;
  x_m: number;
  y_m: number;
  in_canopy: boolean;
  soil: string;
  recency: Recency;
  buffer_occupancy: number;
  last_vwc_percent: number | null;
}

export interface ZonePayload {
  node_id: string;
  segments: [number, number][][];
  dwell_minutes: number;
}

export interface FieldSnapshot {
  schema_version: number;
  sim_time_s: number;
  field_polygon: [number, number][];
  roads: [number, number][][];
  nodes: SnapshotNode[];
  zones: ZonePayload[];
}

export interface SeriesPoint {
  t_s: number;
  vwc_percent: number;
  temp_c: number;
  sun_state: string;
}

export interface SeriesResponse {
  schema_version: number;
  node_id: string;
  points: SeriesPoint[];
}

export interface ContactPrediction {
  node_id: string;
  will_contact: boolean;
  earliest_contact_time_s: number | null;
  required_dwell_minutes: number | null;
}

export interface WhatifResponse {
  schema_version: number;
  predictions: ContactPrediction[];
}

export interface RouteDraftPoint {
  x_m: number;
  y_m: number;
  time_s: number;
}

export interface RouteDraft {
  waypoints: RouteDraftPoint[];
  loop: boolean;
}
