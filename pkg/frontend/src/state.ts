// ViewState: everything that determines what the explorer shows. Any state
// is fully encodable in the URL, so reloading reproduces the identical view.

import type { FilterSpecPayload } from "./types.js";

export type AbstractionMode = "frequency_rank" | "fuzzy";

export interface ViewState {
  activityRatio: number; // [0, 1]
  pathRatio: number; // [0, 1]
  metric: string;
  secondary: string;
  mode: AbstractionMode;
  utilityWeight: number; // [0, 1], fuzzy mode only
  cutoff: number; // [0, 1], fuzzy mode only
  filter: FilterSpecPayload | null;
  selected: string | null; // "node:<activity>" or "edge:<source>|<target>"
}

export const KNOWN_METRICS = [
  "absolute_frequency",
  "case_frequency",
  "max_repetitions",
  "case_coverage",
  "max_duration",
] as const;

export function defaultViewState(): ViewState {
  return {
    activityRatio: 1,
    pathRatio: 1,
    metric: "case_frequency",
    secondary: "max_repetitions",
    mode: "frequency_rank",
    utilityWeight: 0.5,
    cutoff: 0,
    filter: null,
    selected: null,
  };
}

export function clampRatio(value: number): number {
  if (!Number.isFinite(value)) return 1;
  return Math.min(1, Math.max(0, value));
}

function parseRatio(raw: string | null, fallback: number): number {
  if (raw === null || raw === "") return fallback;
  const value = Number(raw);
  return Number.isFinite(value) ? clampRatio(value) : fallback;
}

function validMetric(raw: string | null, fallback: string): string {
  return raw && (KNOWN_METRICS as readonly string[]).includes(raw) ? raw : fallback;
}

/** Serialize a ViewState into a URL query string (no leading "?"). */
export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("a", String(state.activityRatio));
  params.set("p", String(state.pathRatio));
  params.set("metric", state.metric);
  params.set("secondary", state.secondary);
  if (state.mode !== "frequency_rank") {
    params.set("mode", state.mode);
    params.set("w", String(state.utilityWeight));
    params.set("cutoff", String(state.cutoff));
  }
  if (state.filter) params.set("filter", JSON.stringify(state.filter));
  if (state.selected) params.set("sel", state.selected);
  return params.toString();
}

/** Inverse of encodeViewState; tolerant of missing or malformed params. */
export function decodeViewState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const base = defaultViewState();
  const state: ViewState = {
    ...base,
    activityRatio: parseRatio(params.get("a"), base.activityRatio),
    pathRatio: parseRatio(params.get("p"), base.pathRatio),
    metric: validMetric(params.get("metric"), base.metric),
    secondary: validMetric(params.get("secondary"), base.secondary),
    mode: params.get("mode") === "fuzzy" ? "fuzzy" : "frequency_rank",
    utilityWeight: parseRatio(params.get("w"), base.utilityWeight),
    cutoff: parseRatio(params.get("cutoff"), base.cutoff),
    selected: params.get("sel"),
  };
  const rawFilter = params.get("filter");
  if (rawFilter) {
    try {
      const parsed = JSON.parse(rawFilter);
      if (parsed && typeof parsed === "object") state.filter = parsed;
    } catch {
      state.filter = null;
    }
  }
  return state;
}

/** The paper-style outlier preset relative to the log's first day. */
export function outlierPreset(firstTimestamp: string): FilterSpecPayload {
  const from = new Date(firstTimestamp);
  from.setUTCDate(from.getUTCDate() + 7);
  return {
    timeframe_from: from.toISOString().replace(".000Z", "+00:00"),
    max_case_duration_days: 90,
    max_events_per_case: 25,
  };
}
