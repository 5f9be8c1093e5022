"""Face-validity assessment: observations, questions, verdicts, and reports.

Observations are (element, indicator, value) facts drawn from a discovered
model. An expert answers two fixed questions per observation with one of
three verdicts; the summarizer compiles per-question verdict counts and the
rows where the two questions disagree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional, Sequence, Union

from abspm.dfg import Dfg, EDGE_INDICATORS, NODE_INDICATORS, DiscoveryError

VERDICTS = ("plausible", "not_plausible", "further_investigation")
QUESTIONS = ("Q1", "Q2")

Q1_TEXT = ("Does the obtained performance indicator value accurately reflect "
           "the real-world system being modeled?")
Q2_TEMPLATE = ("Given an overall population size of {population}, can the "
               "obtained performance indicator value be considered a plausible "
               "representation?")

_ABBREV = {
    "case_frequency": "CF",
    "max_repetitions": "MNR",
    "absolute_frequency": "AF",
    "max_duration": "MD",
    "case_coverage": "CC",
}

Element = Union[str, tuple]


class AssessmentError(ValueError):
    pass


def element_label(element: Element) -> str:
    if isinstance(element, tuple):
        return f"{element[0]} -> {element[1]}"
    return element


@dataclass(frozen=True)
class Observation:
    obs_id: int
    element: Element
    indicator: str
    value: float
    value_display: str

    def to_dict(self) -> dict:
        return {
            "obs_id": self.obs_id,
            "element": list(self.element) if isinstance(self.element, tuple) else self.element,
            "element_kind": "path" if isinstance(self.element, tuple) else "activity",
            "indicator": self.indicator,
            "value": self.value,
            "value_display": self.value_display,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Observation":
        element = data["element"]
        if isinstance(element, list):
            element = tuple(element)
        return cls(data["obs_id"], element, data["indicator"],
                   data["value"], data["value_display"])


def _display(indicator: str, value: float, total_cases: int) -> str:
    abbrev = _ABBREV[indicator]
    if indicator == "case_frequency":
        pct = round(value / total_cases * 100) if total_cases else 0
        return f"{abbrev}={int(value)} ({pct}%)"
    if indicator == "case_coverage":
        return f"{abbrev}={round(value * 100)}%"
    if indicator == "max_duration":
        return f"{abbrev}={value:g}d"
    return f"{abbrev}={int(value)}"


def generate_observations(dfg: Dfg, indicators: Sequence[str] = ("case_frequency", "max_repetitions"),
                          top_k: int = 3) -> list[Observation]:
    """Top-k activities and paths per indicator, deduplicated, stably numbered."""
    for name in indicators:
        if name not in EDGE_INDICATORS:
            raise DiscoveryError(
                f"unknown indicator {name!r}; valid indicators: {', '.join(EDGE_INDICATORS)}")
    observations: list[Observation] = []
    seen: set[tuple] = set()
    for indicator in indicators:
        candidates: list[tuple[Element, float]] = []
        if indicator in NODE_INDICATORS:
            candidates.extend((act, m.value(indicator)) for act, m in dfg.nodes.items())
        candidates.extend(
            (pair, m.value(indicator)) for pair, m in dfg.edges.items()
            if m.value(indicator) is not None)
        candidates.sort(key=lambda ev: (-ev[1], element_label(ev[0])))
        for element, value in candidates[:top_k]:
            key = (element, indicator)
            if key in seen:
                continue
            seen.add(key)
            observations.append(Observation(
                obs_id=len(observations) + 1,
                element=element,
                indicator=indicator,
                value=float(value),
                value_display=_display(indicator, value, dfg.total_cases),
            ))
    return observations


def render_questions(observation: Observation, population: int) -> tuple[str, str]:
    """The two fixed question texts, with the population substituted into Q2."""
    if population <= 0:
        raise AssessmentError("population must be positive")
    noun = "1 agent" if population == 1 else f"{population} agents"
    return Q1_TEXT, Q2_TEMPLATE.format(population=noun)


def normalize_verdict(token: str) -> str:
    v = token.strip().lower().replace(" ", "_")
    if v not in VERDICTS:
        raise AssessmentError(f"invalid verdict {token!r}; expected one of {VERDICTS}")
    return v


@dataclass(frozen=True)
class Judgment:
    obs_id: int
    question: str
    verdict: str
    assessor: str = "expert"
    note: Optional[str] = None
    recorded_at: Optional[datetime] = None

    def __post_init__(self):
        if self.question not in QUESTIONS:
            raise AssessmentError(f"question must be one of {QUESTIONS}")
        if self.verdict not in VERDICTS:
            raise AssessmentError(f"invalid verdict {self.verdict!r}")

    def to_dict(self) -> dict:
        return {
            "obs_id": self.obs_id,
            "question": self.question,
            "verdict": self.verdict,
            "assessor": self.assessor,
            "note": self.note,
            "recorded_at": self.recorded_at.isoformat() if self.recorded_at else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Judgment":
        ts = data.get("recorded_at")
        return cls(data["obs_id"], data["question"], data["verdict"],
                   data.get("assessor", "expert"), data.get("note"),
                   datetime.fromisoformat(ts) if ts else None)


class JudgmentStore:
    """Upsert store keyed by (obs_id, question, assessor) with an audit trail."""

    def __init__(self, valid_obs_ids: Iterable[int]):
        self.valid_obs_ids = set(valid_obs_ids)
        self.current: dict[tuple[int, str, str], Judgment] = {}
        self.audit: list[Judgment] = []

    def record(self, judgment: Judgment) -> None:
        if judgment.obs_id not in self.valid_obs_ids:
            raise AssessmentError(f"unknown observation id {judgment.obs_id}")
        self.audit.append(judgment)
        self.current[(judgment.obs_id, judgment.question, judgment.assessor)] = judgment

    def __len__(self) -> int:
        return len(self.current)

    def verdict_for(self, obs_id: int, question: str,
                    assessor: Optional[str] = None) -> Optional[str]:
        for (oid, q, a), j in self.current.items():
            if oid == obs_id and q == question and (assessor is None or a == assessor):
                return j.verdict
        return None

    # persistence: append-only NDJSON audit + compacted current-state JSON

    def save(self, audit_path, current_path) -> None:
        with open(audit_path, "w", encoding="utf-8") as fh:
            for j in self.audit:
                fh.write(json.dumps(j.to_dict(), sort_keys=True) + "\n")
        current = [self.current[k].to_dict() for k in sorted(self.current)]
        with open(current_path, "w", encoding="utf-8") as fh:
            json.dump({"valid_obs_ids": sorted(self.valid_obs_ids),
                       "judgments": current}, fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, audit_path, current_path) -> "JudgmentStore":
        with open(current_path, encoding="utf-8") as fh:
            data = json.load(fh)
        store = cls(data["valid_obs_ids"])
        try:
            with open(audit_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        store.audit.append(Judgment.from_dict(json.loads(line)))
        except FileNotFoundError:
            pass
        for jd in data["judgments"]:
            j = Judgment.from_dict(jd)
            store.current[(j.obs_id, j.question, j.assessor)] = j
        return store


@dataclass(frozen=True)
class ReportRow:
    observation: Observation
    q1: Optional[str]
    q2: Optional[str]


@dataclass(frozen=True)
class AssessmentReport:
    rows: tuple[ReportRow, ...]
    counts: dict  # question -> verdict -> count
    discrepancies: tuple[int, ...]  # obs ids with Q1 != Q2
    pending: tuple[int, ...]
    most_frequent: dict  # question -> verdict or None

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"observation": r.observation.to_dict(), "q1": r.q1, "q2": r.q2}
                for r in self.rows
            ],
            "counts": self.counts,
            "discrepancies": list(self.discrepancies),
            "pending": list(self.pending),
            "most_frequent": self.most_frequent,
        }

    def to_markdown(self) -> str:
        lines = ["# Face-validity assessment", "",
                 "| # | Activity/path | Observation | Question 1 | Question 2 |",
                 "|---|---------------|-------------|------------|------------|"]
        for r in self.rows:
            q1 = (r.q1 or "pending").replace("_", " ")
            q2 = (r.q2 or "pending").replace("_", " ")
            lines.append(
                f"| {r.observation.obs_id} | {element_label(r.observation.element)} "
                f"| {r.observation.value_display} | {q1} | {q2} |")
        lines.append("")
        for q in QUESTIONS:
            parts = ", ".join(f"{v.replace('_', ' ')}: {self.counts[q].get(v, 0)}"
                              for v in VERDICTS)
            lines.append(f"- {q} verdicts — {parts}")
        disc = ", ".join(str(i) for i in self.discrepancies) or "none"
        lines.append(f"- Observations with diverging Q1/Q2 verdicts: {disc}")
        if self.pending:
            lines.append(f"- Pending observations: {', '.join(str(i) for i in self.pending)}")
        lines.append("")
        return "\n".join(lines)

    def to_csv(self) -> str:
        import csv
        import io
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["#", "Activity/path", "Observation", "Question 1", "Question 2"])
        for r in self.rows:
            writer.writerow([r.observation.obs_id, element_label(r.observation.element),
                             r.observation.value_display, r.q1 or "pending", r.q2 or "pending"])
        return buf.getvalue()


def summarize(observations: Sequence[Observation], store: JudgmentStore,
              assessor: Optional[str] = None) -> AssessmentReport:
    """Compile verdict counts, discrepancy rows, and renderable tables."""
    rows = []
    counts = {q: {} for q in QUESTIONS}
    discrepancies = []
    pending = []
    for obs in sorted(observations, key=lambda o: o.obs_id):
        q1 = store.verdict_for(obs.obs_id, "Q1", assessor)
        q2 = store.verdict_for(obs.obs_id, "Q2", assessor)
        rows.append(ReportRow(obs, q1, q2))
        for q, verdict in (("Q1", q1), ("Q2", q2)):
            if verdict is not None:
                counts[q][verdict] = counts[q].get(verdict, 0) + 1
        if q1 is None or q2 is None:
            pending.append(obs.obs_id)
        elif q1 != q2:
            discrepancies.append(obs.obs_id)
    most_frequent = {}
    for q in QUESTIONS:
        if counts[q]:
            most_frequent[q] = min(counts[q], key=lambda v: (-counts[q][v], v))
        else:
            most_frequent[q] = None
    return AssessmentReport(
        rows=tuple(rows),
        counts=counts,
        discrepancies=tuple(discrepancies),
        pending=tuple(pending),
        most_frequent=most_frequent,
    )
