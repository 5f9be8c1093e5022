"""Event-log data model, raw-record conversion, statistics, and case filters.

A log is a list of traces (one per agent/case), each an ordered list of
timestamped activities. Activities follow the grammar `move_location` or
`change_(happy|unhappy)_X_Y` where X is the occupied-neighbor count and Y
the same-group count, 0 <= Y <= X <= 8.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone
from typing import Iterable, Optional

from abspm.simulation import RawEventRecord

ACTIVITY_RE = re.compile(r"^(move_location|change_(?:happy|unhappy)_(\d)_(\d))$")


def valid_activity(label: str) -> bool:
    m = ACTIVITY_RE.match(label)
    if not m:
        return False
    if m.group(2) is None:
        return True
    x, y = int(m.group(2)), int(m.group(3))
    return 0 <= y <= x <= 8


def activity_universe() -> list[str]:
    """All 91 admissible labels."""
    labels = ["move_location"]
    for x in range(9):
        for y in range(x + 1):
            labels.append(f"change_happy_{x}_{y}")
            labels.append(f"change_unhappy_{x}_{y}")
    return labels


class ConversionError(ValueError):
    """A raw record violates the conversion contract."""


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: datetime
    attributes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def event_count(self) -> int:
        return sum(len(t.events) for t in self.traces)

    @property
    def case_count(self) -> int:
        return len(self.traces)

    def activities(self) -> set[str]:
        return {e.activity for t in self.traces for e in t.events}


@dataclass(frozen=True)
class FilterSpec:
    """Whole-case outlier filters: timeframe intersection, duration, size."""

    timeframe_from: Optional[datetime] = None
    timeframe_to: Optional[datetime] = None
    max_case_duration_days: Optional[float] = None  # strict upper bound
    max_events_per_case: Optional[int] = None       # inclusive upper bound

    def __post_init__(self):
        if (self.timeframe_from is not None and self.timeframe_to is not None
                and self.timeframe_from > self.timeframe_to):
            raise ValueError("timeframe_from must not exceed timeframe_to")
        if self.max_case_duration_days is not None and self.max_case_duration_days <= 0:
            raise ValueError("max_case_duration_days must be positive")
        if self.max_events_per_case is not None and self.max_events_per_case <= 0:
            raise ValueError("max_events_per_case must be positive")

    def to_dict(self) -> dict:
        return {
            "timeframe_from": self.timeframe_from.isoformat() if self.timeframe_from else None,
            "timeframe_to": self.timeframe_to.isoformat() if self.timeframe_to else None,
            "max_case_duration_days": self.max_case_duration_days,
            "max_events_per_case": self.max_events_per_case,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FilterSpec":
        def parse_dt(v):
            if v is None:
                return None
            dt = datetime.fromisoformat(v)
            return dt if dt.tzinfo else dt.replace(tzinfo=timezone.utc)
        return cls(
            timeframe_from=parse_dt(data.get("timeframe_from")),
            timeframe_to=parse_dt(data.get("timeframe_to")),
            max_case_duration_days=data.get("max_case_duration_days"),
            max_events_per_case=data.get("max_events_per_case"),
        )


def paper_outlier_preset(base_date: date) -> FilterSpec:
    """Timeframe starting one week in, <90-day cases, at most 25 events."""
    start = datetime(base_date.year, base_date.month, base_date.day, tzinfo=timezone.utc)
    return FilterSpec(
        timeframe_from=start + timedelta(days=7),
        max_case_duration_days=90,
        max_events_per_case=25,
    )


def convert(records: Iterable[RawEventRecord], base_date: date,
            metadata: Optional[dict] = None) -> EventLog:
    """Derive a case-per-agent event log from raw simulator records.

    Moves become `move_location`; status flips become `change_happy_X_Y` /
    `change_unhappy_X_Y`. The step index is interpreted as a daily offset
    from `base_date`; step and step_counter are retained as attributes.
    """
    base = datetime(base_date.year, base_date.month, base_date.day, tzinfo=timezone.utc)
    by_case: dict[int, list[Event]] = {}
    for r in records:
        if r.step < 0 or r.similar_count > len(r.neighbor_ids):
            raise ConversionError(f"malformed raw record event_no={r.event_no}")
        if r.kind == "move":
            activity = "move_location"
        elif r.kind == "status":
            word = "happy" if r.happy else "unhappy"
            activity = f"change_{word}_{len(r.neighbor_ids)}_{r.similar_count}"
        else:
            raise ConversionError(f"unknown kind {r.kind!r} at event_no={r.event_no}")
        event = Event(
            activity=activity,
            timestamp=base + timedelta(days=r.step),
            attributes={"step": r.step, "step_counter": r.step_counter},
        )
        by_case.setdefault(r.agent_id, []).append(event)

    traces = []
    for case_id in sorted(by_case):
        events = sorted(by_case[case_id],
                        key=lambda e: (e.timestamp, e.attributes["step_counter"]))
        traces.append(Trace(case_id=str(case_id), events=tuple(events)))
    meta = {"base_date": base_date.isoformat()}
    if metadata:
        meta.update(metadata)
    return EventLog(traces=tuple(traces), metadata=meta)


@dataclass(frozen=True)
class LogStats:
    events: int
    cases: int
    activities: int
    events_per_case_min: int
    events_per_case_median: float
    events_per_case_max: int
    first_timestamp: Optional[datetime]
    last_timestamp: Optional[datetime]
    activity_frequencies: dict
    quality_flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "events": self.events,
            "cases": self.cases,
            "activities": self.activities,
            "events_per_case": {
                "min": self.events_per_case_min,
                "median": self.events_per_case_median,
                "max": self.events_per_case_max,
            },
            "first_timestamp": self.first_timestamp.isoformat() if self.first_timestamp else None,
            "last_timestamp": self.last_timestamp.isoformat() if self.last_timestamp else None,
            "activity_frequencies": dict(sorted(self.activity_frequencies.items())),
            "quality_flags": list(self.quality_flags),
        }


def log_stats(log: EventLog) -> LogStats:
    """Counts, per-case sizes, time span, activity table, quality flags."""
    if not log.traces:
        return LogStats(0, 0, 0, 0, 0.0, 0, None, None, {})
    sizes = [len(t.events) for t in log.traces]
    freqs: dict[str, int] = {}
    flags: set[str] = set()
    first = last = None
    for t in log.traces:
        seen_stamps = set()
        for e in t.events:
            freqs[e.activity] = freqs.get(e.activity, 0) + 1
            if not valid_activity(e.activity):
                flags.add("label_pattern_violation")
            if e.timestamp in seen_stamps:
                flags.add("duplicate_timestamps_within_case")
            seen_stamps.add(e.timestamp)
            if first is None or e.timestamp < first:
                first = e.timestamp
            if last is None or e.timestamp > last:
                last = e.timestamp
    return LogStats(
        events=sum(sizes),
        cases=len(sizes),
        activities=len(freqs),
        events_per_case_min=min(sizes),
        events_per_case_median=float(statistics.median(sizes)),
        events_per_case_max=max(sizes),
        first_timestamp=first,
        last_timestamp=last,
        activity_frequencies=freqs,
        quality_flags=tuple(sorted(flags)),
    )


def _case_kept(trace: Trace, spec: FilterSpec) -> bool:
    first = trace.events[0].timestamp
    last = trace.events[-1].timestamp
    if spec.timeframe_from is not None and last < spec.timeframe_from:
        return False
    if spec.timeframe_to is not None and first > spec.timeframe_to:
        return False
    if spec.max_case_duration_days is not None:
        duration = (last - first).total_seconds() / 86400.0
        if duration >= spec.max_case_duration_days:
            return False
    if spec.max_events_per_case is not None and len(trace.events) > spec.max_events_per_case:
        return False
    return True


def apply_filters(log: EventLog, spec: FilterSpec) -> EventLog:
    """Keep exactly the cases passing every predicate; never drop single events."""
    kept = tuple(t for t in log.traces if _case_kept(t, spec))
    meta = dict(log.metadata)
    meta["filtered"] = "true"
    if not kept:
        meta["empty_result"] = "true"
    return EventLog(traces=kept, metadata=meta)


# -- Table-2 style CSV (Date,Activity,CaseID) --

def write_log_csv(log: EventLog, path) -> None:
    import csv as _csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["Date", "Activity", "CaseID"])
        for t in log.traces:
            for e in t.events:
                writer.writerow([e.timestamp.strftime("%d.%m.%Y"), e.activity, t.case_id])


def read_log_csv(path) -> EventLog:
    import csv as _csv
    by_case: dict[str, list[Event]] = {}
    order: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        next(reader, None)
        for i, row in enumerate(reader):
            raw_date, activity, case_id = row[0], row[1], row[2]
            try:
                ts = datetime.strptime(raw_date, "%d.%m.%Y").replace(tzinfo=timezone.utc)
            except ValueError:
                ts = datetime.fromisoformat(raw_date)
                if ts.tzinfo is None:
                    ts = ts.replace(tzinfo=timezone.utc)
            if case_id not in by_case:
                by_case[case_id] = []
                order.append(case_id)
            by_case[case_id].append(Event(activity, ts, {"step_counter": i + 1}))
    traces = tuple(Trace(cid, tuple(by_case[cid])) for cid in order)
    return EventLog(traces=traces, metadata={})
