"""Directly-follows model discovery with abstraction and fuzzy simplification.

A Dfg annotates every activity and every directly-follows pair with a metric
bundle: absolute frequency, case frequency, maximum repetitions within one
case, case coverage, and (for edges) duration statistics in days. Abstraction
offers Disco-style activity/path percentage sliders plus a simplified fuzzy
significance/correlation edge filter.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Optional

from abspm.eventlog import EventLog, Trace

NODE_INDICATORS = ("absolute_frequency", "case_frequency", "max_repetitions", "case_coverage")
EDGE_INDICATORS = NODE_INDICATORS + ("max_duration",)


class DiscoveryError(ValueError):
    pass


@dataclass(frozen=True)
class DurationStats:
    min: float
    max: float
    mean: float
    median: float
    total: float

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "mean": self.mean,
                "median": self.median, "total": self.total}


@dataclass(frozen=True)
class NodeMetrics:
    absolute_frequency: int
    case_frequency: int
    max_repetitions: int
    case_coverage: float

    def value(self, indicator: str) -> Optional[float]:
        if indicator in NODE_INDICATORS:
            return getattr(self, indicator)
        return None


@dataclass(frozen=True)
class EdgeMetrics:
    absolute_frequency: int
    case_frequency: int
    max_repetitions: int
    durations: DurationStats
    case_coverage: float

    def value(self, indicator: str) -> Optional[float]:
        if indicator == "max_duration":
            return self.durations.max
        if indicator in NODE_INDICATORS:
            return getattr(self, indicator)
        return None


@dataclass(frozen=True)
class Dfg:
    nodes: dict  # activity -> NodeMetrics
    edges: dict  # (activity, activity) -> EdgeMetrics
    start_activities: dict  # activity -> case count
    end_activities: dict
    total_cases: int


@dataclass(frozen=True)
class AbstractionSpec:
    """Slider settings: fraction of activities/paths kept, and fuzzy knobs."""

    activity_ratio: float = 1.0
    path_ratio: float = 1.0
    mode: str = "frequency_rank"  # or "fuzzy"
    utility_weight: float = 0.5   # weight of significance vs correlation
    cutoff: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.activity_ratio <= 1.0 and 0.0 <= self.path_ratio <= 1.0):
            raise ValueError("slider ratios must lie in [0, 1]")
        if self.mode not in ("frequency_rank", "fuzzy"):
            raise ValueError(f"unknown abstraction mode {self.mode!r}")
        if not (0.0 <= self.utility_weight <= 1.0 and 0.0 <= self.cutoff <= 1.0):
            raise ValueError("fuzzy parameters must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {"activity_ratio": self.activity_ratio, "path_ratio": self.path_ratio,
                "mode": self.mode, "utility_weight": self.utility_weight,
                "cutoff": self.cutoff}

    @classmethod
    def from_dict(cls, data: dict) -> "AbstractionSpec":
        return cls(**data)


def build_dfg(log: EventLog) -> Dfg:
    """Count nodes, directly-follows edges, and their metric bundles."""
    if not log.traces:
        raise DiscoveryError("cannot discover a model from an empty log")
    node_abs: dict[str, int] = {}
    node_cases: dict[str, set] = {}
    node_maxrep: dict[str, int] = {}
    edge_abs: dict[tuple[str, str], int] = {}
    edge_cases: dict[tuple[str, str], set] = {}
    edge_maxrep: dict[tuple[str, str], int] = {}
    edge_durations: dict[tuple[str, str], list[float]] = {}
    starts: dict[str, int] = {}
    ends: dict[str, int] = {}

    for trace in log.traces:
        local_nodes: dict[str, int] = {}
        local_edges: dict[tuple[str, str], int] = {}
        for event in trace.events:
            local_nodes[event.activity] = local_nodes.get(event.activity, 0) + 1
        for a, b in zip(trace.events, trace.events[1:]):
            pair = (a.activity, b.activity)
            local_edges[pair] = local_edges.get(pair, 0) + 1
            edge_durations.setdefault(pair, []).append(
                (b.timestamp - a.timestamp).total_seconds() / 86400.0)
        first = trace.events[0].activity
        last = trace.events[-1].activity
        starts[first] = starts.get(first, 0) + 1
        ends[last] = ends.get(last, 0) + 1
        for act, count in local_nodes.items():
            node_abs[act] = node_abs.get(act, 0) + count
            node_cases.setdefault(act, set()).add(trace.case_id)
            node_maxrep[act] = max(node_maxrep.get(act, 0), count)
        for pair, count in local_edges.items():
            edge_abs[pair] = edge_abs.get(pair, 0) + count
            edge_cases.setdefault(pair, set()).add(trace.case_id)
            edge_maxrep[pair] = max(edge_maxrep.get(pair, 0), count)

    total = len(log.traces)
    nodes = {
        act: NodeMetrics(
            absolute_frequency=node_abs[act],
            case_frequency=len(node_cases[act]),
            max_repetitions=node_maxrep[act],
            case_coverage=len(node_cases[act]) / total,
        )
        for act in node_abs
    }
    edges = {}
    for pair in edge_abs:
        durations = edge_durations[pair]
        edges[pair] = EdgeMetrics(
            absolute_frequency=edge_abs[pair],
            case_frequency=len(edge_cases[pair]),
            max_repetitions=edge_maxrep[pair],
            case_coverage=len(edge_cases[pair]) / total,
            durations=DurationStats(
                min=min(durations),
                max=max(durations),
                mean=sum(durations) / len(durations),
                median=float(statistics.median(durations)),
                total=sum(durations),
            ),
        )
    return Dfg(nodes=nodes, edges=edges, start_activities=starts,
               end_activities=ends, total_cases=total)


def project_log(log: EventLog, keep: set[str]) -> EventLog:
    """Drop events of removed activities; cases left empty disappear."""
    traces = []
    for t in log.traces:
        events = tuple(e for e in t.events if e.activity in keep)
        if events:
            traces.append(Trace(t.case_id, events))
    return EventLog(traces=tuple(traces), metadata=dict(log.metadata))


def _skeleton_edges(dfg: Dfg) -> set[tuple[str, str]]:
    """Each node's most frequent incoming and outgoing edge."""
    skeleton: set[tuple[str, str]] = set()
    for node in dfg.nodes:
        outgoing = [(p, m) for p, m in dfg.edges.items() if p[0] == node]
        incoming = [(p, m) for p, m in dfg.edges.items() if p[1] == node]
        if outgoing:
            skeleton.add(min(outgoing, key=lambda pm: (-pm[1].absolute_frequency, pm[0]))[0])
        if incoming:
            skeleton.add(min(incoming, key=lambda pm: (-pm[1].absolute_frequency, pm[0]))[0])
    return skeleton


def _with_edges(dfg: Dfg, kept: set[tuple[str, str]]) -> Dfg:
    return Dfg(
        nodes=dict(dfg.nodes),
        edges={p: m for p, m in dfg.edges.items() if p in kept},
        start_activities=dict(dfg.start_activities),
        end_activities=dict(dfg.end_activities),
        total_cases=dfg.total_cases,
    )


def abstract(dfg: Dfg, log: EventLog, spec: AbstractionSpec) -> Dfg:
    """Apply the activity and path sliders (or the fuzzy filter) to a model.

    Activity slider: keep the ceil(a*N) most frequent activities (ties by
    label), project the log onto them, and rebuild. Path slider: keep the
    connectivity skeleton plus the most frequent edges until ceil(p*E) are
    retained. (1, 1) reproduces the full model exactly.
    """
    if spec.activity_ratio == 0:
        raise DiscoveryError("activity ratio 0 would produce an empty model")
    ranked = sorted(dfg.nodes, key=lambda a: (-dfg.nodes[a].absolute_frequency, a))
    keep_n = math.ceil(spec.activity_ratio * len(ranked))
    kept_activities = set(ranked[:keep_n])
    if len(kept_activities) < len(ranked):
        sub = build_dfg(project_log(log, kept_activities))
    else:
        sub = dfg

    if spec.mode == "fuzzy":
        metrics = fuzzy_metrics(sub, spec.utility_weight)
        return fuzzy_filter(sub, metrics, spec.cutoff)

    if spec.path_ratio >= 1.0:
        return sub
    skeleton = _skeleton_edges(sub)
    target = max(len(skeleton), math.ceil(spec.path_ratio * len(sub.edges)))
    ordered = sorted(sub.edges,
                     key=lambda p: (p not in skeleton, -sub.edges[p].absolute_frequency, p))
    return _with_edges(sub, set(ordered[:target]))


@dataclass(frozen=True)
class FuzzyMetrics:
    node_significance: dict
    edge_significance: dict
    edge_correlation: dict
    edge_utility: dict


def fuzzy_metrics(dfg: Dfg, alpha: float) -> FuzzyMetrics:
    """Frequency-normalized significance, proximity correlation, and utility.

    Edge correlation is 1 / (1 + mean duration in days): temporally close
    activity pairs correlate more strongly. Utility blends significance and
    correlation with weight alpha. All values lie in [0, 1].
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must lie in [0, 1]")
    max_node = max((m.absolute_frequency for m in dfg.nodes.values()), default=0)
    max_edge = max((m.absolute_frequency for m in dfg.edges.values()), default=0)
    node_sig = {a: m.absolute_frequency / max_node for a, m in dfg.nodes.items()}
    edge_sig = {p: m.absolute_frequency / max_edge for p, m in dfg.edges.items()}
    edge_cor = {p: 1.0 / (1.0 + max(m.durations.mean, 0.0)) for p, m in dfg.edges.items()}
    edge_util = {p: alpha * edge_sig[p] + (1 - alpha) * edge_cor[p] for p in dfg.edges}
    return FuzzyMetrics(node_sig, edge_sig, edge_cor, edge_util)


def fuzzy_filter(dfg: Dfg, metrics: FuzzyMetrics, cutoff: float) -> Dfg:
    """Drop edges below the utility cutoff, then repair stranded nodes.

    A node that originally had outgoing (incoming) edges gets its highest-
    utility outgoing (incoming) edge restored if the cut removed them all.
    """
    kept = {p for p, u in metrics.edge_utility.items() if u >= cutoff}
    for node in dfg.nodes:
        outgoing = [p for p in dfg.edges if p[0] == node]
        incoming = [p for p in dfg.edges if p[1] == node]
        if outgoing and not any(p in kept for p in outgoing):
            kept.add(min(outgoing, key=lambda p: (-metrics.edge_utility[p], p)))
        if incoming and not any(p in kept for p in incoming):
            kept.add(min(incoming, key=lambda p: (-metrics.edge_utility[p], p)))
    return _with_edges(dfg, kept)


# -- exports --

_COLOR_SCALE = ("#deebf7", "#b3cde3", "#8c96c6", "#8856a7", "#810f7c")


def _check_indicator(name: str) -> None:
    if name not in EDGE_INDICATORS:
        raise DiscoveryError(
            f"unknown indicator {name!r}; valid indicators: {', '.join(EDGE_INDICATORS)}")


def _fmt_value(indicator: str, value: Optional[float]) -> str:
    if value is None:
        return "-"
    if indicator == "case_coverage":
        return f"{round(value * 100)}%"
    if indicator == "max_duration":
        return f"{value:g}d"
    return str(int(value))


def export_dot(dfg: Dfg, primary: str = "case_frequency",
               secondary: str = "max_repetitions") -> str:
    """Render the model as Graphviz DOT with primary/secondary annotations.

    Nodes are labeled `activity\\nprimary (secondary)` and filled on a
    5-bucket linear scale over the primary metric; edge pen width scales
    with the primary edge metric. Output ordering is deterministic.
    """
    _check_indicator(primary)
    _check_indicator(secondary)
    lines = ["digraph dfg {", "  rankdir=TB;",
             '  node [shape=box, style="rounded,filled", fontname="Helvetica"];']
    node_values = {a: m.value(primary) for a, m in dfg.nodes.items()}
    present = [v for v in node_values.values() if v is not None]
    lo, hi = (min(present), max(present)) if present else (0.0, 0.0)
    for act in sorted(dfg.nodes):
        m = dfg.nodes[act]
        v = node_values[act]
        if v is None or hi == lo:
            color = _COLOR_SCALE[2]
        else:
            color = _COLOR_SCALE[min(4, int((v - lo) / (hi - lo) * 5))]
        label = f"{act}\\n{_fmt_value(primary, v)} ({_fmt_value(secondary, m.value(secondary))})"
        lines.append(f'  "{act}" [label="{label}", fillcolor="{color}"];')
    lines.append('  "__start" [shape=circle, label="", fillcolor="#2ca02c"];')
    lines.append('  "__end" [shape=doublecircle, label="", fillcolor="#d62728"];')

    edge_values = {p: m.value(primary) for p, m in dfg.edges.items()}
    max_edge = max((v for v in edge_values.values() if v is not None), default=0.0)
    for src, dst in sorted(dfg.edges):
        m = dfg.edges[(src, dst)]
        v = edge_values[(src, dst)]
        width = 1.0 if not max_edge or v is None else 1.0 + 4.0 * (v / max_edge)
        label = f"{_fmt_value(primary, v)} ({_fmt_value(secondary, m.value(secondary))})"
        lines.append(f'  "{src}" -> "{dst}" [label="{label}", penwidth={width:.2f}];')
    for act in sorted(dfg.start_activities):
        lines.append(f'  "__start" -> "{act}" [label="{dfg.start_activities[act]}", style=dashed];')
    for act in sorted(dfg.end_activities):
        lines.append(f'  "{act}" -> "__end" [label="{dfg.end_activities[act]}", style=dashed];')
    lines.append("}")
    lines.append("")
    return "\n".join(lines)


def export_json(dfg: Dfg) -> str:
    """Lossless JSON serialization with stable key order."""
    payload = {
        "total_cases": dfg.total_cases,
        "nodes": {
            act: {
                "absolute_frequency": m.absolute_frequency,
                "case_frequency": m.case_frequency,
                "max_repetitions": m.max_repetitions,
                "case_coverage": m.case_coverage,
            }
            for act, m in dfg.nodes.items()
        },
        "edges": [
            {
                "source": src,
                "target": dst,
                "absolute_frequency": m.absolute_frequency,
                "case_frequency": m.case_frequency,
                "max_repetitions": m.max_repetitions,
                "case_coverage": m.case_coverage,
                "durations": m.durations.to_dict(),
            }
            for (src, dst), m in sorted(dfg.edges.items())
        ],
        "start_activities": dfg.start_activities,
        "end_activities": dfg.end_activities,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def dfg_from_json(text: str) -> Dfg:
    data = json.loads(text)
    nodes = {act: NodeMetrics(**m) for act, m in data["nodes"].items()}
    edges = {}
    for e in data["edges"]:
        edges[(e["source"], e["target"])] = EdgeMetrics(
            absolute_frequency=e["absolute_frequency"],
            case_frequency=e["case_frequency"],
            max_repetitions=e["max_repetitions"],
            case_coverage=e["case_coverage"],
            durations=DurationStats(**e["durations"]),
        )
    return Dfg(nodes=nodes, edges=edges,
               start_activities=data["start_activities"],
               end_activities=data["end_activities"],
               total_cases=data["total_cases"])
