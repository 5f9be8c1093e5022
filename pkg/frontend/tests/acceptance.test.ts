// End-to-end explorer loop against a real server on a seed-42 project:
// the path slider re-renders with an edge subset, and submitting the
// 18-verdict reference set through the panel drives the report counts.
//
// Prints one "ACCEPTANCE PASS: ..." line per criterion, mirroring the
// backend acceptance suite. Requires the `abspm` CLI on PATH.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderModel } from "../src/graph.js";
import { renderJudgmentPanel } from "../src/judgments.js";
import { defaultViewState } from "../src/state.js";
import type { Question, Verdict } from "../src/types.js";

const PORT = 8741;
const BASE = `http://127.0.0.1:${PORT}`;

// the published 18-verdict reference set, by observation id
const REFERENCE_VERDICTS: Record<number, [Verdict, Verdict]> = {
  1: ["not_plausible", "plausible"],
  2: ["not_plausible", "further_investigation"],
  3: ["not_plausible", "not_plausible"],
  4: ["further_investigation", "plausible"],
  5: ["plausible", "plausible"],
  6: ["plausible", "plausible"],
  7: ["plausible", "plausible"],
  8: ["further_investigation", "plausible"],
  9: ["further_investigation", "plausible"],
};

let projectDir: string;
let server: ChildProcess | undefined;
const client = new ApiClient(BASE);

function cli(...args: string[]): void {
  execFileSync("abspm", ["--project", projectDir, ...args], { stdio: "pipe" });
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 120; attempt++) {
    try {
      const response = await fetch(`${BASE}/api/stats`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await sleep(500);
  }
  throw new Error("server did not become ready");
}

beforeAll(async () => {
  projectDir = mkdtempSync(join(tmpdir(), "abspm-ui-"));
  cli("init");
  cli("simulate", "--seed", "42");
  cli("convert");
  cli("filter", "--preset", "paper-outlier");
  cli("discover", "--activities", "100", "--paths", "100");

  // widen the observation list so ids 1..9 exist for the reference verdicts
  const projectFile = join(projectDir, "project.json");
  const project = JSON.parse(readFileSync(projectFile, "utf-8"));
  project.assessment.top_k = 8;
  writeFileSync(projectFile, JSON.stringify(project, null, 2));

  server = spawn("abspm", ["--project", projectDir, "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  if (projectDir) rmSync(projectDir, { recursive: true, force: true });
});

describe("explorer loop on a live seed-42 project", () => {
  it("re-renders with an edge subset when the path slider drops to 15%", async () => {
    const full = await client.fetchDfg({ ...defaultViewState(), pathRatio: 1.0 });
    const reduced = await client.fetchDfg({ ...defaultViewState(), pathRatio: 0.15 });

    const edgeKey = (e: { source: string; target: string }) => `${e.source}|${e.target}`;
    const fullEdges = new Set(full.model.edges.map(edgeKey));
    const reducedEdges = new Set(reduced.model.edges.map(edgeKey));
    expect(reducedEdges.size).toBeLessThanOrEqual(fullEdges.size);
    for (const key of reducedEdges) expect(fullEdges.has(key)).toBe(true);

    const fullView = document.createElement("div");
    const reducedView = document.createElement("div");
    renderModel(fullView, full);
    renderModel(reducedView, reduced);
    expect(fullView.querySelectorAll("g.edge")).toHaveLength(fullEdges.size);
    expect(reducedView.querySelectorAll("g.edge")).toHaveLength(reducedEdges.size);
    console.log(
      `ACCEPTANCE PASS: path slider 100% -> 15% re-renders an edge subset ` +
        `(${fullEdges.size} -> ${reducedEdges.size} paths)`,
    );
  });

  it("reports the reference counts after submitting the 18 verdicts", async () => {
    const observations = await client.fetchObservations();
    expect(observations.population).toBe(280);
    expect(observations.observations.length).toBeGreaterThanOrEqual(9);

    const container = document.createElement("div");
    let recorded = 0;
    renderJudgmentPanel(container, observations, client, {
      onRecorded: () => recorded++,
    });

    for (const [obsId, verdicts] of Object.entries(REFERENCE_VERDICTS)) {
      for (const [index, question] of (["Q1", "Q2"] as Question[]).entries()) {
        const button = container.querySelector(
          `[data-obs-id="${obsId}"] [data-question="${question}"] ` +
            `button[data-verdict="${verdicts[index]}"]`,
        );
        expect(button, `button for obs ${obsId} ${question}`).not.toBeNull();
        button!.dispatchEvent(new MouseEvent("click", { bubbles: true }));
        // judgments are serialized server-side; submit one at a time
        const row = container.querySelector(
          `[data-obs-id="${obsId}"] [data-question="${question}"]`,
        )!;
        for (let waited = 0; waited < 250; waited++) {
          if (row.classList.contains("answered") || row.classList.contains("retry")) break;
          await sleep(20);
        }
      }
    }
    expect(recorded).toBe(18);
    expect(container.querySelectorAll(".retry")).toHaveLength(0);

    const report = await client.fetchReport();
    expect(report.counts.Q1).toEqual({
      plausible: 3,
      not_plausible: 3,
      further_investigation: 3,
    });
    expect(report.counts.Q2).toEqual({
      plausible: 7,
      not_plausible: 1,
      further_investigation: 1,
    });
    expect([...report.discrepancies].sort((a, b) => a - b)).toEqual([1, 2, 4, 8, 9]);
    console.log(
      "ACCEPTANCE PASS: 18 panel verdicts -> report shows Q1 {3,3,3}, Q2 {7,1,1}, " +
        "discrepancies {1,2,4,8,9}",
    );
  });
});
