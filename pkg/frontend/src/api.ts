import type {
  ApiErrorPayload,
  DfgResponse,
  FilterSpecPayload,
  ObservationsResponse,
  Question,
  ReportResponse,
  StatsResponse,
  Verdict,
} from "./types.js";
import type { ViewState } from "./state.js";

/** Error raised for non-2xx API responses, carrying the server's error code. */
export class ApiRequestError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, payload: ApiErrorPayload) {
    super(payload.message || `request failed with status ${status}`);
    this.name = "ApiRequestError";
    this.code = payload.code || "internal";
    this.status = status;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    throw new ApiRequestError(
      response.status,
      (body as ApiErrorPayload) ?? { code: "internal", message: "malformed error response" },
    );
  }
  return body as T;
}

/** Thin typed client for the abspm JSON API; one instance per page. */
export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  fetchStats(): Promise<StatsResponse> {
    return request(`${this.baseUrl}/api/stats`);
  }

  fetchDfg(state: ViewState): Promise<DfgResponse> {
    const params = new URLSearchParams({
      activities: String(state.activityRatio),
      paths: String(state.pathRatio),
      metric: state.metric,
      secondary: state.secondary,
      mode: state.mode,
    });
    if (state.mode === "fuzzy") {
      params.set("utility_weight", String(state.utilityWeight));
      params.set("cutoff", String(state.cutoff));
    }
    return request(`${this.baseUrl}/api/dfg?${params}`);
  }

  setFilter(spec: FilterSpecPayload | null): Promise<{ stats: StatsResponse["active"] }> {
    return request(`${this.baseUrl}/api/filter`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(spec ?? {}),
    });
  }

  fetchObservations(): Promise<ObservationsResponse> {
    return request(`${this.baseUrl}/api/observations`);
  }

  submitJudgment(
    obsId: number,
    question: Question,
    verdict: Verdict,
    note?: string,
  ): Promise<{ recorded: unknown }> {
    return request(`${this.baseUrl}/api/judgments`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ obs_id: obsId, question, verdict, note: note || null }),
    });
  }

  fetchReport(): Promise<ReportResponse> {
    return request(`${this.baseUrl}/api/report`);
  }
}

/**
 * Latest-wins guard: at most one in-flight model request is honored.
 * `run` returns null for responses that were superseded while in flight,
 * so stale payloads are never applied to the view.
 */
export class LatestWins {
  private ticket = 0;

  async run<T>(task: () => Promise<T>): Promise<T | null> {
    const mine = ++this.ticket;
    const result = await task();
    return mine === this.ticket ? result : null;
  }
}
