// Judgment panel: per observation, the two face-validity questions with
// three-way verdict buttons and a note field. Submissions POST straight to
// the server; the current verdicts shown always reflect the last accepted
// upsert.

import { elementLabel } from "./types.js";
import type { ObservationsResponse, Question, Verdict } from "./types.js";

// the published three labels, verbatim
const VERDICT_LABELS: Record<Verdict, string> = {
  plausible: "plausible",
  not_plausible: "not plausible",
  further_investigation: "further investigation",
};

export interface JudgmentSubmitter {
  submitJudgment(
    obsId: number,
    question: Question,
    verdict: Verdict,
    note?: string,
  ): Promise<unknown>;
}

export interface JudgmentPanelOptions {
  onRecorded?: (obsId: number, question: Question, verdict: Verdict) => void;
}

function questionRow(
  obsId: number,
  question: Question,
  text: string,
  current: Verdict | null,
  submitter: JudgmentSubmitter,
  noteFor: () => string,
  options: JudgmentPanelOptions,
): HTMLElement {
  const row = document.createElement("div");
  row.className = "question-row";
  row.dataset.question = question;
  if (current) row.classList.add("answered");

  const label = document.createElement("p");
  label.className = "question-text";
  label.textContent = `${question}: ${text}`;
  row.appendChild(label);

  const status = document.createElement("span");
  status.className = "status";

  const buttons: Array<[Verdict, HTMLButtonElement]> = [];
  const markSelected = (verdict: Verdict | null) => {
    for (const [value, button] of buttons) {
      button.classList.toggle("selected", value === verdict);
    }
  };

  for (const verdict of Object.keys(VERDICT_LABELS) as Verdict[]) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "verdict";
    button.dataset.verdict = verdict;
    button.textContent = VERDICT_LABELS[verdict];
    button.addEventListener("click", async () => {
      try {
        await submitter.submitJudgment(obsId, question, verdict, noteFor());
      } catch {
        // keep the row editable and flag the failure for retry
        row.classList.add("retry");
        status.textContent = "submission failed — retry";
        return;
      }
      row.classList.remove("retry");
      row.classList.add("answered");
      status.textContent = "recorded";
      markSelected(verdict);
      options.onRecorded?.(obsId, question, verdict);
    });
    buttons.push([verdict, button]);
    row.appendChild(button);
  }
  markSelected(current);
  row.appendChild(status);
  return row;
}

/** Build the panel for all observations into `container`. */
export function renderJudgmentPanel(
  container: Element,
  data: ObservationsResponse,
  submitter: JudgmentSubmitter,
  options: JudgmentPanelOptions = {},
): void {
  container.innerHTML = "";
  if (data.observations.length === 0) {
    const empty = document.createElement("p");
    empty.className = "placeholder";
    empty.textContent = "no observations yet — run discover first";
    container.appendChild(empty);
    return;
  }
  for (const obs of data.observations) {
    const card = document.createElement("section");
    card.className = "observation";
    card.dataset.obsId = String(obs.obs_id);

    const heading = document.createElement("h3");
    heading.textContent = `#${obs.obs_id} ${elementLabel(obs.element)} — ${obs.value_display}`;
    card.appendChild(heading);

    const note = document.createElement("input");
    note.type = "text";
    note.className = "note";
    note.placeholder = "optional note";

    card.appendChild(
      questionRow(obs.obs_id, "Q1", obs.q1_text, obs.q1_verdict, submitter,
        () => note.value, options),
    );
    card.appendChild(
      questionRow(obs.obs_id, "Q2", obs.q2_text, obs.q2_verdict, submitter,
        () => note.value, options),
    );
    card.appendChild(note);
    container.appendChild(card);
  }
}
