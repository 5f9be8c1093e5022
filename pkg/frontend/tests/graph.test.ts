import { describe, expect, it } from "vitest";

import {
  colorBucket,
  computeLayers,
  computeLayout,
  describeSelection,
  metricLabel,
  renderModel,
} from "../src/graph.js";
import type { DfgModel, DfgResponse, EdgeMetrics, NodeMetrics } from "../src/types.js";

function node(overrides: Partial<NodeMetrics> = {}): NodeMetrics {
  return {
    absolute_frequency: 1,
    case_frequency: 1,
    max_repetitions: 1,
    case_coverage: 0.5,
    ...overrides,
  };
}

function edge(source: string, target: string, overrides: Partial<EdgeMetrics> = {}): EdgeMetrics {
  return {
    source,
    target,
    absolute_frequency: 1,
    case_frequency: 1,
    max_repetitions: 1,
    case_coverage: 0.5,
    durations: { min: 0, max: 2, mean: 1, median: 1, total: 2 },
    ...overrides,
  };
}

function sampleModel(): DfgModel {
  return {
    nodes: {
      move_location: node({ case_frequency: 12, max_repetitions: 22, case_coverage: 1 }),
      change_happy_3_2: node({ case_frequency: 5 }),
      change_unhappy_4_2: node({ case_frequency: 3 }),
    },
    edges: [
      edge("move_location", "move_location", { case_frequency: 12 }),
      edge("move_location", "change_happy_3_2", { case_frequency: 5 }),
      edge("change_happy_3_2", "change_unhappy_4_2", { case_frequency: 2 }),
    ],
    start_activities: { move_location: 12 },
    end_activities: { change_unhappy_4_2: 3 },
    total_cases: 12,
  };
}

function response(model: DfgModel): DfgResponse {
  return {
    model,
    metric: "case_frequency",
    secondary: "max_repetitions",
    indicators: ["case_frequency", "max_repetitions"],
  };
}

describe("metric labels", () => {
  it("formats primary (secondary)", () => {
    const metrics = node({ case_frequency: 12, max_repetitions: 22 });
    expect(metricLabel(metrics, "case_frequency", "max_repetitions")).toBe("12 (22)");
  });

  it("shows a dash for indicators that do not apply", () => {
    expect(metricLabel(node(), "max_duration", "case_frequency")).toBe("– (1)");
  });

  it("reads max_duration from edge duration stats", () => {
    const e = edge("a", "b", { durations: { min: 0, max: 7, mean: 3, median: 3, total: 7 } });
    expect(metricLabel(e, "max_duration", "case_frequency")).toBe("7 (1)");
  });
});

describe("layered layout", () => {
  it("puts start activities on layer zero and successors below", () => {
    const layers = computeLayers(sampleModel());
    expect(layers.get("move_location")).toBe(0);
    expect(layers.get("change_happy_3_2")).toBe(1);
    expect(layers.get("change_unhappy_4_2")).toBe(2);
  });

  it("positions every node exactly once", () => {
    const model = sampleModel();
    const layout = computeLayout(model);
    expect(new Set(layout.keys())).toEqual(new Set(Object.keys(model.nodes)));
  });

  it("places unreachable nodes after the deepest layer", () => {
    const model = sampleModel();
    model.nodes.change_happy_0_0 = node();
    const layers = computeLayers(model);
    expect(layers.get("change_happy_0_0")).toBe(3);
  });
});

describe("color buckets", () => {
  it("maps the maximum into the darkest bucket", () => {
    expect(colorBucket(10, 10)).toBe(4);
  });

  it("maps zero into the lightest bucket", () => {
    expect(colorBucket(0, 10)).toBe(0);
  });
});

describe("renderModel", () => {
  it("renders one node per activity and one edge group per path", () => {
    const container = document.createElement("div");
    renderModel(container, response(sampleModel()));
    expect(container.querySelectorAll("g.node")).toHaveLength(3);
    expect(container.querySelectorAll("g.edge")).toHaveLength(3);
  });

  it("labels nodes with the activity and primary (secondary)", () => {
    const container = document.createElement("div");
    renderModel(container, response(sampleModel()));
    const names = [...container.querySelectorAll(".node-name")].map((n) => n.textContent);
    expect(names).toContain("move_location");
    const labels = [...container.querySelectorAll(".node-metrics")].map((n) => n.textContent);
    expect(labels).toContain("12 (22)");
  });

  it("shows the placeholder for an empty filtered model", () => {
    const container = document.createElement("div");
    const model = sampleModel();
    model.nodes = {};
    model.edges = [];
    model.total_cases = 0;
    renderModel(container, response(model));
    expect(container.querySelector(".placeholder")?.textContent).toBe(
      "no cases match filters",
    );
  });

  it("renders an error panel on malformed payloads", () => {
    const container = document.createElement("div");
    renderModel(container, { model: { bogus: true } } as unknown as DfgResponse);
    expect(container.querySelector(".error-panel")).not.toBeNull();
  });

  it("renders fewer edges for an abstracted subset payload", () => {
    const full = response(sampleModel());
    const subsetModel = sampleModel();
    subsetModel.edges = subsetModel.edges.slice(0, 1);
    const subset = response(subsetModel);
    const a = document.createElement("div");
    const b = document.createElement("div");
    renderModel(a, full);
    renderModel(b, subset);
    expect(b.querySelectorAll("g.edge").length).toBeLessThan(
      a.querySelectorAll("g.edge").length,
    );
  });

  it("notifies the selection handler with the clicked element", () => {
    const container = document.createElement("div");
    const seen: string[] = [];
    renderModel(container, response(sampleModel()), (kind, key) =>
      seen.push(`${kind}:${key}`),
    );
    (container.querySelector('g[data-node="move_location"]') as SVGGElement).dispatchEvent(
      new MouseEvent("click", { bubbles: true }),
    );
    expect(seen).toEqual(["node:move_location"]);
  });
});

describe("describeSelection", () => {
  it("lists the full metric bundle for a node", () => {
    const rows = describeSelection(sampleModel(), "node", "move_location");
    expect(rows).toContainEqual(["case frequency", "12"]);
    expect(rows).toContainEqual(["case coverage", "100%"]);
  });

  it("lists duration stats for an edge", () => {
    const rows = describeSelection(sampleModel(), "edge", "move_location|change_happy_3_2");
    expect(rows.map(([k]) => k)).toContain("duration min/mean/max (days)");
  });

  it("returns nothing for unknown elements", () => {
    expect(describeSelection(sampleModel(), "node", "nope")).toEqual([]);
  });
});
