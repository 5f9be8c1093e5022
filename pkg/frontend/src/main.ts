// Explorer entry point: wires the slider/metric controls, the process-map
// view, the judgment panel, and the report tab to the JSON API. The full
// view state lives in the URL; back/forward navigation replays it.

import { ApiClient, ApiRequestError, LatestWins } from "./api.js";
import { renderModel, describeSelection } from "./graph.js";
import { renderJudgmentPanel } from "./judgments.js";
import {
  decodeViewState,
  encodeViewState,
  outlierPreset,
  type ViewState,
} from "./state.js";
import type { DfgResponse, ReportResponse, StatsResponse } from "./types.js";

const DEBOUNCE_MS = 150;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function renderStats(target: HTMLElement, stats: StatsResponse): void {
  const fmt = (s: StatsResponse["log"]) =>
    `${s.cases} cases · ${s.events} events · ${s.activities} activities`;
  target.innerHTML = "";
  const full = document.createElement("p");
  full.textContent = `full log: ${fmt(stats.log)}`;
  const active = document.createElement("p");
  active.className = "active-stats";
  active.textContent = stats.filter
    ? `filtered: ${fmt(stats.active)}`
    : "no filter active";
  target.append(full, active);
}

function renderReport(target: HTMLElement, report: ReportResponse): void {
  target.innerHTML = "";
  const pre = document.createElement("pre");
  pre.className = "report";
  pre.textContent = report.markdown ?? JSON.stringify(report, null, 2);
  if (report.pending.length > 0) {
    const pending = document.createElement("p");
    pending.className = "pending";
    pending.textContent = `pending observations: ${report.pending.join(", ")}`;
    target.appendChild(pending);
  }
  target.appendChild(pre);
}

export function startApp(baseUrl = ""): void {
  const client = new ApiClient(baseUrl);
  const inflight = new LatestWins();
  let state: ViewState = decodeViewState(window.location.search.slice(1));
  let lastModel: DfgResponse | null = null;
  let debounceTimer: ReturnType<typeof setTimeout> | undefined;

  const mapView = el<HTMLDivElement>("map");
  const detailView = el<HTMLDivElement>("detail");
  const statsView = el<HTMLDivElement>("stats");
  const judgmentsView = el<HTMLDivElement>("judgments");
  const reportView = el<HTMLDivElement>("report");
  const activitySlider = el<HTMLInputElement>("activities");
  const pathSlider = el<HTMLInputElement>("paths");
  const metricSelect = el<HTMLSelectElement>("metric");
  const secondarySelect = el<HTMLSelectElement>("secondary");
  const modeSelect = el<HTMLSelectElement>("mode");
  const presetButton = el<HTMLButtonElement>("preset");
  const clearButton = el<HTMLButtonElement>("clear-filter");

  function syncControls(): void {
    activitySlider.value = String(Math.round(state.activityRatio * 100));
    pathSlider.value = String(Math.round(state.pathRatio * 100));
    metricSelect.value = state.metric;
    secondarySelect.value = state.secondary;
    modeSelect.value = state.mode;
  }

  function pushHistory(): void {
    window.history.pushState(null, "", `?${encodeViewState(state)}`);
  }

  function showSelection(): void {
    detailView.innerHTML = "";
    if (!state.selected || !lastModel) return;
    const [kind, key] = state.selected.split(":", 2) as ["node" | "edge", string];
    const rows = describeSelection(lastModel.model, kind, key);
    const list = document.createElement("dl");
    for (const [term, value] of rows) {
      const dt = document.createElement("dt");
      dt.textContent = term;
      const dd = document.createElement("dd");
      dd.textContent = value;
      list.append(dt, dd);
    }
    detailView.appendChild(list);
  }

  async function refreshModel(): Promise<void> {
    const result = await inflight.run(() => client.fetchDfg(state));
    if (result === null) return; // superseded by a newer request
    lastModel = result;
    renderModel(mapView, result, (kind, key) => {
      state = { ...state, selected: `${kind}:${key}` };
      pushHistory();
      showSelection();
    });
    showSelection();
  }

  async function refreshStats(): Promise<void> {
    renderStats(statsView, await client.fetchStats());
  }

  async function refreshAssessment(): Promise<void> {
    const observations = await client.fetchObservations();
    renderJudgmentPanel(judgmentsView, observations, client, {
      onRecorded: () => void refreshReport(),
    });
    await refreshReport();
  }

  async function refreshReport(): Promise<void> {
    renderReport(reportView, await client.fetchReport());
  }

  function applyStateChange(change: Partial<ViewState>): void {
    state = { ...state, ...change };
    pushHistory();
    clearTimeout(debounceTimer);
    debounceTimer = setTimeout(() => void refreshModel().catch(showError), DEBOUNCE_MS);
  }

  function showError(error: unknown): void {
    const message =
      error instanceof ApiRequestError
        ? `${error.code}: ${error.message}`
        : "server unreachable";
    mapView.innerHTML = "";
    const panel = document.createElement("div");
    panel.className = "error-panel";
    panel.textContent = message;
    mapView.appendChild(panel);
  }

  activitySlider.addEventListener("input", () =>
    applyStateChange({ activityRatio: Number(activitySlider.value) / 100 }),
  );
  pathSlider.addEventListener("input", () =>
    applyStateChange({ pathRatio: Number(pathSlider.value) / 100 }),
  );
  metricSelect.addEventListener("change", () =>
    applyStateChange({ metric: metricSelect.value }),
  );
  secondarySelect.addEventListener("change", () =>
    applyStateChange({ secondary: secondarySelect.value }),
  );
  modeSelect.addEventListener("change", () =>
    applyStateChange({ mode: modeSelect.value as ViewState["mode"] }),
  );

  presetButton.addEventListener("click", async () => {
    const stats = await client.fetchStats();
    if (!stats.log.first_timestamp) return;
    const filter = outlierPreset(stats.log.first_timestamp);
    await client.setFilter(filter);
    state = { ...state, filter };
    pushHistory();
    await Promise.all([refreshStats(), refreshModel()]).catch(showError);
  });

  clearButton.addEventListener("click", async () => {
    await client.setFilter(null);
    state = { ...state, filter: null };
    pushHistory();
    await Promise.all([refreshStats(), refreshModel()]).catch(showError);
  });

  window.addEventListener("popstate", () => {
    state = decodeViewState(window.location.search.slice(1));
    syncControls();
    void refreshModel().catch(showError);
  });

  syncControls();
  const restore = state.filter ? client.setFilter(state.filter) : Promise.resolve(null);
  restore
    .then(() => Promise.all([refreshStats(), refreshModel(), refreshAssessment()]))
    .catch(showError);
}

// auto-start in the browser; tests import startApp and call it explicitly
if (typeof document !== "undefined" && document.getElementById("map")) {
  startApp();
}
