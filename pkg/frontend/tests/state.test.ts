import { describe, expect, it } from "vitest";

import {
  clampRatio,
  decodeViewState,
  defaultViewState,
  encodeViewState,
  outlierPreset,
  type ViewState,
} from "../src/state.js";

describe("view state URL encoding", () => {
  it("round-trips the default state", () => {
    const state = defaultViewState();
    expect(decodeViewState(encodeViewState(state))).toEqual(state);
  });

  it("round-trips a fully customized state", () => {
    const state: ViewState = {
      activityRatio: 0.8,
      pathRatio: 0.15,
      metric: "max_repetitions",
      secondary: "case_coverage",
      mode: "fuzzy",
      utilityWeight: 0.7,
      cutoff: 0.2,
      filter: { max_events_per_case: 25, max_case_duration_days: 90 },
      selected: "node:move_location",
    };
    expect(decodeViewState(encodeViewState(state))).toEqual(state);
  });

  it("yields the default view for an empty query", () => {
    expect(decodeViewState("")).toEqual(defaultViewState());
  });

  it("clamps out-of-range slider values", () => {
    expect(clampRatio(1.7)).toBe(1);
    expect(clampRatio(-0.3)).toBe(0);
    expect(decodeViewState("a=7&p=-2").activityRatio).toBe(1);
    expect(decodeViewState("a=7&p=-2").pathRatio).toBe(0);
  });

  it("falls back to default metrics for unknown names", () => {
    const state = decodeViewState("metric=bogus&secondary=nonsense");
    expect(state.metric).toBe("case_frequency");
    expect(state.secondary).toBe("max_repetitions");
  });

  it("ignores malformed filter JSON", () => {
    expect(decodeViewState("filter=%7Bnot-json").filter).toBeNull();
  });
});

describe("outlier preset", () => {
  it("starts one week after the first event", () => {
    const preset = outlierPreset("2023-10-17T00:00:00+00:00");
    expect(preset.timeframe_from).toBe("2023-10-24T00:00:00+00:00");
    expect(preset.max_case_duration_days).toBe(90);
    expect(preset.max_events_per_case).toBe(25);
  });
});
