// Dashboard entry point: polls the field snapshot, renders the SVG map,
// and wires the node-chart and route what-if panels.

import { getField, getSeries, postStep, postWhatif } from "./api.js";
import type {
  ContactPrediction,
  FieldSnapshot,
  RouteDraft,
} from "./types.js";
import {
  appendWaypoint,
  badgeClass,
  badgeLabel,
  buildMarkers,
  canSubmit,
  chartPath,
  chartSeries,
  fieldViewBox,
  formatSimClock,
  polylinePoints,
  routeToPayload,
  validateRouteDraft,
} from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const POLL_INTERVAL_MS = Number(
  new URLSearchParams(location.search).get("poll") ?? "2000",
);
const DRIVE_SPEED_M_S = 5.0;

let snapshot: FieldSnapshot | null = null;
let draft: RouteDraft = { waypoints: [], loop: false };
let drawing = false;
let selectedNode: string | null = null;
let predictions: ContactPrediction[] = [];

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  return node;
}

async function poll(): Promise<void> {
  try {
    snapshot = await getField();
    el("banner").hidden = true;
    render();
  } catch {
    el("banner").hidden = false; // connection lost: keep last view, warn
  }
}

function render(): void {
  if (snapshot === null) {
    return;
  }
  el("clock").textContent = formatSimClock(snapshot.sim_time_s);
  renderMap(snapshot);
  renderWhatifPanel();
}

function renderMap(snap: FieldSnapshot): void {
  const svg = el<HTMLElement>("map") as unknown as SVGSVGElement;
  svg.setAttribute("viewBox", fieldViewBox(snap.field_polygon));
  svg.replaceChildren();

  svg.appendChild(
    svgEl("polygon", {
      points: polylinePoints(snap.field_polygon),
      class: "field",
    }),
  );
  for (const road of snap.roads) {
    svg.appendChild(
      svgEl("polyline", { points: polylinePoints(road), class: "road" }),
    );
  }
  for (const zone of snap.zones) {
    for (const seg of zone.segments) {
      svg.appendChild(
        svgEl("polyline", { points: polylinePoints(seg), class: "zone" }),
      );
    }
  }
  if (draft.waypoints.length > 0) {
    svg.appendChild(
      svgEl("polyline", {
        points: polylinePoints(draft.waypoints.map((w) => [w.x_m, w.y_m])),
        class: "draft-route",
      }),
    );
    for (const w of draft.waypoints) {
      svg.appendChild(
        svgEl("circle", {
          cx: String(w.x_m),
          cy: String(w.y_m),
          r: "6",
          class: "draft-point",
        }),
      );
    }
  }
  for (const marker of buildMarkers(snap)) {
    const dot = svgEl("circle", {
      cx: String(marker.x),
      cy: String(marker.y),
      r: "12",
      fill: marker.color,
      stroke: marker.inCanopy ? "#1b4d2e" : "#333",
      "stroke-width": marker.inCanopy ? "4" : "1.5",
      class: "node-marker",
      "data-node": marker.id,
    });
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = marker.title;
    dot.appendChild(title);
    dot.addEventListener("click", (ev) => {
      ev.stopPropagation();
      void openChart(marker.id);
    });
    svg.appendChild(dot);
  }

  svg.onclick = (ev) => {
    if (!drawing) {
      return;
    }
    const pt = svg.createSVGPoint();
    pt.x = ev.clientX;
    pt.y = ev.clientY;
    const local = pt.matrixTransform(svg.getScreenCTM()!.inverse());
    draft = appendWaypoint(draft, local.x, local.y, DRIVE_SPEED_M_S);
    render();
  };
}

async function openChart(nodeId: string): Promise<void> {
  selectedNode = nodeId;
  const panel = el("chart-panel");
  panel.hidden = false;
  el("chart-title").textContent = `Node ${nodeId}`;
  try {
    const series = await getSeries(nodeId);
    const vm = chartSeries(series.points);
    const svg = el<HTMLElement>("chart") as unknown as SVGSVGElement;
    svg.replaceChildren();
    if (vm.times.length === 0) {
      el("chart-empty").hidden = false;
      return;
    }
    el("chart-empty").hidden = true;
    svg.appendChild(
      svgEl("path", {
        d: chartPath(vm.times, vm.vwc, 600, 160),
        class: "vwc-line",
      }),
    );
    svg.appendChild(
      svgEl("path", {
        d: chartPath(vm.times, vm.temps, 600, 160),
        class: "temp-line",
      }),
    );
    const last = series.points[series.points.length - 1];
    el("chart-latest").textContent =
      `latest: ${last.vwc_percent.toFixed(2)}% VWC, ` +
      `${last.temp_c.toFixed(1)} °C, ${last.sun_state}`;
  } catch {
    el("banner").hidden = false;
  }
}

function renderWhatifPanel(): void {
  const errors = validateRouteDraft(draft);
  el("route-status").textContent =
    draft.waypoints.length === 0
      ? "click the map to add waypoints"
      : errors.join("; ") || `${draft.waypoints.length} waypoints`;
  (el("whatif-submit") as HTMLButtonElement).disabled = !canSubmit(draft);

  const list = el("predictions");
  list.replaceChildren();
  for (const p of predictions) {
    const li = document.createElement("li");
    const badge = document.createElement("span");
    badge.className = `badge ${badgeClass(p)}`;
    badge.textContent = badgeLabel(p);
    li.textContent = `${p.node_id} `;
    li.appendChild(badge);
    list.appendChild(li);
  }
}

function wireControls(): void {
  el("draw-toggle").addEventListener("click", () => {
    drawing = !drawing;
    el("draw-toggle").textContent = drawing ? "Stop drawing" : "Draw route";
  });
  el("route-clear").addEventListener("click", () => {
    draft = { waypoints: [], loop: false };
    predictions = [];
    render();
  });
  el("whatif-submit").addEventListener("click", () => {
    void (async () => {
      try {
        const resp = await postWhatif(routeToPayload(draft));
        predictions = resp.predictions;
        el("whatif-error").textContent = "";
      } catch (err) {
        predictions = [];
        el("whatif-error").textContent = String(
          err instanceof Error ? err.message : err,
        );
      }
      renderWhatifPanel();
    })();
  });
  el("step-hour").addEventListener("click", () => {
    void postStep(60).then(poll);
  });
  el("chart-close").addEventListener("click", () => {
    selectedNode = null;
    el("chart-panel").hidden = true;
  });
}

function main(): void {
  wireControls();
  void poll();
  setInterval(() => {
    void poll();
    if (selectedNode !== null) {
      void openChart(selectedNode);
    }
  }, POLL_INTERVAL_MS);
}

document.addEventListener("DOMContentLoaded", main);
