// Payload shapes of the abspm JSON API. The UI never computes metrics
// itself; every number shown on screen comes from one of these payloads.

export interface DurationStats {
  min: number;
  max: number;
  mean: number;
  median: number;
  total: number;
}

export interface NodeMetrics {
  absolute_frequency: number;
  case_frequency: number;
  max_repetitions: number;
  case_coverage: number;
}

export interface EdgeMetrics extends NodeMetrics {
  source: string;
  target: string;
  durations: DurationStats;
}

export interface DfgModel {
  nodes: Record<string, NodeMetrics>;
  edges: EdgeMetrics[];
  start_activities: Record<string, number>;
  end_activities: Record<string, number>;
  total_cases: number;
}

export interface DfgResponse {
  model: DfgModel;
  metric: string;
  secondary: string;
  indicators: string[];
}

export interface EventsPerCase {
  min: number;
  median: number;
  max: number;
}

export interface LogStats {
  events: number;
  cases: number;
  activities: number;
  events_per_case: EventsPerCase;
  first_timestamp: string | null;
  last_timestamp: string | null;
  activity_frequencies: Record<string, number>;
  quality_flags: string[];
}

export interface StatsResponse {
  log: LogStats;
  active: LogStats;
  filter: FilterSpecPayload | null;
}

export interface FilterSpecPayload {
  timeframe_from?: string | null;
  timeframe_to?: string | null;
  max_case_duration_days?: number | null;
  max_events_per_case?: number | null;
}

export type Verdict = "plausible" | "not_plausible" | "further_investigation";

export type Question = "Q1" | "Q2";

export interface ObservationRow {
  obs_id: number;
  element: string | [string, string];
  element_kind: "activity" | "path";
  indicator: string;
  value: number;
  value_display: string;
  q1_text: string;
  q2_text: string;
  q1_verdict: Verdict | null;
  q2_verdict: Verdict | null;
}

export interface ObservationsResponse {
  observations: ObservationRow[];
  population: number;
  verdicts: Verdict[];
}

export interface ReportRow {
  observation: Omit<ObservationRow, "q1_text" | "q2_text" | "q1_verdict" | "q2_verdict">;
  q1: Verdict | null;
  q2: Verdict | null;
}

export interface ReportResponse {
  rows: ReportRow[];
  counts: Record<Question, Record<Verdict, number>>;
  discrepancies: number[];
  pending: number[];
  most_frequent: Record<Question, Verdict | null>;
  markdown?: string;
}

export interface ApiErrorPayload {
  code: string;
  message: string;
  detail?: unknown;
}

/** Human-readable label for an activity or path element. */
export function elementLabel(element: string | [string, string]): string {
  return typeof element === "string" ? element : `${element[0]} → ${element[1]}`;
}
