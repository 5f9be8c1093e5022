// SVG process-map rendering. Layout is presentation-only: a layered
// left-to-right arrangement computed client-side. Every displayed number is
// copied verbatim from the server's model payload.

import type { DfgModel, DfgResponse, EdgeMetrics, NodeMetrics } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// light -> dark, same five buckets as the DOT export
const COLOR_SCALE = ["#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#3182bd"];

const NODE_WIDTH = 190;
const NODE_HEIGHT = 46;
const LAYER_GAP = 120;
const COLUMN_GAP = 215;
const MARGIN = 30;

export interface NodePosition {
  x: number;
  y: number;
  layer: number;
}

/** Read an indicator off a metric bundle; null when it does not apply. */
export function metricValue(
  metrics: NodeMetrics | EdgeMetrics,
  indicator: string,
): number | null {
  if (indicator === "max_duration") {
    return "durations" in metrics ? metrics.durations.max : null;
  }
  const value = (metrics as unknown as Record<string, unknown>)[indicator];
  return typeof value === "number" ? value : null;
}

function formatValue(value: number | null): string {
  if (value === null) return "–";
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}

/** Second label line of a node or edge: "primary (secondary)". */
export function metricLabel(
  metrics: NodeMetrics | EdgeMetrics,
  primary: string,
  secondary: string,
): string {
  return `${formatValue(metricValue(metrics, primary))} (${formatValue(
    metricValue(metrics, secondary),
  )})`;
}

/** 0-based color bucket for a primary value relative to the model maximum. */
export function colorBucket(value: number, max: number): number {
  if (max <= 0 || value <= 0) return 0;
  return Math.min(COLOR_SCALE.length - 1, Math.floor((value / max) * COLOR_SCALE.length));
}

/**
 * Assign each activity a layer: BFS depth from the start activities, with
 * unreachable activities (possible after aggressive path abstraction)
 * dropped into the layer after the deepest reachable one.
 */
export function computeLayers(model: DfgModel): Map<string, number> {
  const layers = new Map<string, number>();
  const outgoing = new Map<string, string[]>();
  for (const edge of model.edges) {
    const targets = outgoing.get(edge.source) ?? [];
    targets.push(edge.target);
    outgoing.set(edge.source, targets);
  }
  const queue: string[] = [];
  for (const start of Object.keys(model.start_activities).sort()) {
    if (start in model.nodes && !layers.has(start)) {
      layers.set(start, 0);
      queue.push(start);
    }
  }
  while (queue.length > 0) {
    const current = queue.shift()!;
    const depth = layers.get(current)!;
    for (const next of outgoing.get(current) ?? []) {
      if (!layers.has(next)) {
        layers.set(next, depth + 1);
        queue.push(next);
      }
    }
  }
  let deepest = 0;
  for (const depth of layers.values()) deepest = Math.max(deepest, depth);
  for (const activity of Object.keys(model.nodes).sort()) {
    if (!layers.has(activity)) layers.set(activity, deepest + 1);
  }
  return layers;
}

/** Grid positions per activity: layer -> row, alphabetical -> column. */
export function computeLayout(model: DfgModel): Map<string, NodePosition> {
  const layers = computeLayers(model);
  const byLayer = new Map<number, string[]>();
  for (const [activity, layer] of layers) {
    const row = byLayer.get(layer) ?? [];
    row.push(activity);
    byLayer.set(layer, row);
  }
  const positions = new Map<string, NodePosition>();
  for (const [layer, row] of byLayer) {
    row.sort();
    row.forEach((activity, column) => {
      positions.set(activity, {
        x: MARGIN + column * COLUMN_GAP,
        y: MARGIN + layer * LAYER_GAP,
        layer,
      });
    });
  }
  return positions;
}

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

function textLine(x: number, y: number, content: string, cls: string): SVGTextElement {
  const text = svgElement("text", {
    x: String(x),
    y: String(y),
    "text-anchor": "middle",
    class: cls,
  });
  text.textContent = content;
  return text;
}

export type SelectHandler = (kind: "node" | "edge", key: string) => void;

function renderErrorPanel(container: Element, message: string): void {
  container.innerHTML = "";
  const panel = document.createElement("div");
  panel.className = "error-panel";
  panel.textContent = message;
  container.appendChild(panel);
}

function renderPlaceholder(container: Element): void {
  container.innerHTML = "";
  const panel = document.createElement("div");
  panel.className = "placeholder";
  panel.textContent = "no cases match filters";
  container.appendChild(panel);
}

function validModel(model: unknown): model is DfgModel {
  if (!model || typeof model !== "object") return false;
  const m = model as DfgModel;
  return (
    typeof m.nodes === "object" &&
    m.nodes !== null &&
    Array.isArray(m.edges) &&
    typeof m.total_cases === "number"
  );
}

/**
 * Render the model into `container` as an SVG graph. Node fill encodes the
 * primary metric bucket, edge thickness the primary edge value; labels show
 * the activity name over "primary (secondary)".
 */
export function renderModel(
  container: Element,
  payload: DfgResponse,
  onSelect?: SelectHandler,
): void {
  if (!payload || !validModel(payload.model)) {
    renderErrorPanel(container, "malformed model payload from server");
    return;
  }
  const { model, metric, secondary } = payload;
  const activities = Object.keys(model.nodes);
  if (activities.length === 0 || model.total_cases === 0) {
    renderPlaceholder(container);
    return;
  }

  const positions = computeLayout(model);
  let width = 0;
  let height = 0;
  for (const pos of positions.values()) {
    width = Math.max(width, pos.x + NODE_WIDTH + MARGIN);
    height = Math.max(height, pos.y + NODE_HEIGHT + MARGIN);
  }

  let maxNodeValue = 0;
  for (const metrics of Object.values(model.nodes)) {
    maxNodeValue = Math.max(maxNodeValue, metricValue(metrics, metric) ?? 0);
  }
  let maxEdgeValue = 0;
  for (const edge of model.edges) {
    maxEdgeValue = Math.max(maxEdgeValue, metricValue(edge, metric) ?? 0);
  }

  const svg = svgElement("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    class: "process-map",
  });

  const defs = svgElement("defs", {});
  const marker = svgElement("marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: "9",
    refY: "5",
    markerWidth: "7",
    markerHeight: "7",
    orient: "auto-start-reverse",
  });
  marker.appendChild(svgElement("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#555" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const edge of model.edges) {
    const from = positions.get(edge.source);
    const to = positions.get(edge.target);
    if (!from || !to) continue;
    const key = `${edge.source}|${edge.target}`;
    const value = metricValue(edge, metric) ?? 0;
    const widthPx = maxEdgeValue > 0 ? 1 + 4 * (value / maxEdgeValue) : 1;
    const group = svgElement("g", { class: "edge", "data-edge": key });
    const selfLoop = edge.source === edge.target;
    const x1 = from.x + NODE_WIDTH / 2;
    const y1 = from.y + NODE_HEIGHT;
    const x2 = to.x + NODE_WIDTH / 2;
    const y2 = to.y;
    const d = selfLoop
      ? `M ${from.x + NODE_WIDTH} ${from.y + NODE_HEIGHT / 2} ` +
        `c 55 -18, 55 ${NODE_HEIGHT - 10}, 0 ${NODE_HEIGHT / 2 - 8}`
      : `M ${x1} ${y1} C ${x1} ${(y1 + y2) / 2}, ${x2} ${(y1 + y2) / 2}, ${x2} ${y2}`;
    group.appendChild(
      svgElement("path", {
        d,
        fill: "none",
        stroke: "#555",
        "stroke-width": widthPx.toFixed(2),
        "marker-end": "url(#arrow)",
      }),
    );
    const label = textLine(
      selfLoop ? from.x + NODE_WIDTH + 62 : (x1 + x2) / 2,
      selfLoop ? from.y + NODE_HEIGHT / 2 + 4 : (y1 + y2) / 2 - 4,
      metricLabel(edge, metric, secondary),
      "edge-label",
    );
    group.appendChild(label);
    if (onSelect) group.addEventListener("click", () => onSelect("edge", key));
    svg.appendChild(group);
  }

  for (const [activity, metrics] of Object.entries(model.nodes)) {
    const pos = positions.get(activity);
    if (!pos) continue;
    const value = metricValue(metrics, metric) ?? 0;
    const fill = COLOR_SCALE[colorBucket(value, maxNodeValue)];
    const group = svgElement("g", { class: "node", "data-node": activity });
    group.appendChild(
      svgElement("rect", {
        x: String(pos.x),
        y: String(pos.y),
        width: String(NODE_WIDTH),
        height: String(NODE_HEIGHT),
        rx: "6",
        fill,
        stroke: "#2b5f8a",
      }),
    );
    group.appendChild(textLine(pos.x + NODE_WIDTH / 2, pos.y + 19, activity, "node-name"));
    group.appendChild(
      textLine(
        pos.x + NODE_WIDTH / 2,
        pos.y + 37,
        metricLabel(metrics, metric, secondary),
        "node-metrics",
      ),
    );
    if (onSelect) group.addEventListener("click", () => onSelect("node", activity));
    svg.appendChild(group);
  }

  container.innerHTML = "";
  container.appendChild(svg);
}

/** Full metric bundle of the selected element, for the detail panel. */
export function describeSelection(
  model: DfgModel,
  kind: "node" | "edge",
  key: string,
): Array<[string, string]> {
  if (kind === "node") {
    const metrics = model.nodes[key];
    if (!metrics) return [];
    return [
      ["activity", key],
      ["absolute frequency", String(metrics.absolute_frequency)],
      ["case frequency", String(metrics.case_frequency)],
      ["max repetitions", String(metrics.max_repetitions)],
      ["case coverage", `${Math.round(metrics.case_coverage * 100)}%`],
    ];
  }
  const [source, target] = key.split("|");
  const edge = model.edges.find((e) => e.source === source && e.target === target);
  if (!edge) return [];
  return [
    ["path", `${source} → ${target}`],
    ["absolute frequency", String(edge.absolute_frequency)],
    ["case frequency", String(edge.case_frequency)],
    ["max repetitions", String(edge.max_repetitions)],
    ["case coverage", `${Math.round(edge.case_coverage * 100)}%`],
    ["duration min/mean/max (days)",
      `${edge.durations.min} / ${edge.durations.mean.toFixed(2)} / ${edge.durations.max}`],
  ];
}
