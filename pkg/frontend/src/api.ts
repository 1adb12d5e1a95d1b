// Thin fetch wrappers around the simulation service. The dashboard holds
// no authoritative state: everything shown is re-fetchable from here.

import type { FieldSnapshot, SeriesResponse, WhatifResponse } from "./types.js";

const BASE = "";

async function getJson<T>(path: string): Promise<T> {
  const resp = await fetch(BASE + path);
  if (!resp.ok) {
    throw new Error(`${path}: HTTP ${resp.status}`);
  }
  return (await resp.json()) as T;
}

export function getField(): Promise<FieldSnapshot> {
  return getJson<FieldSnapshot>("/field");
}

export function getSeries(nodeId: string): Promise<SeriesResponse> {
  return getJson<SeriesResponse>(`/nodes/${encodeURIComponent(nodeId)}/series`);
}

export async function postStep(minutes: number): Promise<void> {
  const resp = await fetch(`${BASE}/step?minutes=${minutes}`, { method: "POST" });
  if (!resp.ok) {
    throw new Error(`/step: HTTP ${resp.status}`);
  }
}

let whatifController: AbortController | null = null;

/** In-flight what-if requests cancel-and-replace on resubmit. */
export async function postWhatif(payload: unknown): Promise<WhatifResponse> {
  whatifController?.abort();
  whatifController = new AbortController();
  const resp = await fetch(`${BASE}/whatif`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
    signal: whatifController.signal,
  });
  if (!resp.ok) {
    const detail = await resp.json().catch(() => null);
    throw new Error(formatWhatifError(resp.status, detail));
  }
  return (await resp.json()) as WhatifResponse;
}

export function formatWhatifError(status: number, detail: unknown): string {
  const body = detail as { detail?: { field: string; message: string }[] } | null;
  if (body && Array.isArray(body.detail)) {
    return body.detail.map((e) => `${e.field}: ${e.message}`).join("; ");
  }
  return `/whatif: HTTP ${status}`;
}
