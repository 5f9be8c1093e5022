"""Independent oracles used by the unit and acceptance suites.

These are deliberately naive, straight-line re-implementations kept separate
from the library code they check: a one-function Schelling stepper, a
per-trace brute-force directly-follows counter, and a one-predicate-at-a-time
case filter.
"""

from __future__ import annotations

import random
import statistics
from datetime import datetime, timedelta, timezone

import numpy as np

from abspm.eventlog import Event, EventLog, Trace


def oracle_schelling(width, height, density, tolerance, group_count, max_steps,
                     seed, emit_initial_status=True):
    """Straight-line Schelling run returning plain record tuples.

    Tuple layout: (event_no, step, step_counter, agent_id, kind, prev_loc,
    new_loc, neighbor_ids, similar, happy). Shares only the documented RNG
    draw protocol with the library (cell permutation, group shuffle, one
    integer draw per mover over the empty list with swap-remove order).
    """
    rng = np.random.default_rng(seed)
    n = int(density * width * height)  # floor for positive values
    cells = [(x, y) for y in range(height) for x in range(width)]
    order = rng.permutation(len(cells))
    groups = []
    for g in range(group_count):
        groups += [g] * (n // group_count + (1 if g < n % group_count else 0))
    rng.shuffle(groups)

    loc_of = {}
    group_of = {}
    occupied = {}
    for i in range(n):
        loc_of[i + 1] = cells[order[i]]
        group_of[i + 1] = groups[i]
        occupied[cells[order[i]]] = i + 1
    empty = [cells[order[j]] for j in range(n, len(cells))]

    def census(loc, group):
        x, y = loc
        ids = []
        sim = 0
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                p = (x + dx, y + dy)
                if 0 <= p[0] < width and 0 <= p[1] < height and p in occupied:
                    ids.append(occupied[p])
                    if group_of[occupied[p]] == group:
                        sim += 1
        return sorted(ids), sim

    def is_happy(x, ysim):
        return x == 0 or (x - ysim) / x <= tolerance

    records = []
    event_no = 0
    happy = {}
    counter = 0
    for aid in sorted(loc_of):
        ids, sim = census(loc_of[aid], group_of[aid])
        happy[aid] = is_happy(len(ids), sim)
        if emit_initial_status:
            event_no += 1
            counter += 1
            records.append((event_no, 0, counter, aid, "status", None,
                            loc_of[aid], tuple(ids), sim, happy[aid]))

    step = 0
    while step < max_steps:
        movers = sorted(a for a in loc_of if not happy[a])
        if not movers:
            break
        step += 1
        counter = 0
        for aid in movers:
            prev = loc_of[aid]
            k = int(rng.integers(len(empty)))
            target = empty[k]
            # swap-remove target, then append the vacated cell
            empty[k] = empty[-1]
            empty.pop()
            del occupied[prev]
            empty.append(prev)
            loc_of[aid] = target
            occupied[target] = aid
            ids, sim = census(target, group_of[aid])
            event_no += 1
            counter += 1
            records.append((event_no, step, counter, aid, "move", prev,
                            target, tuple(ids), sim, None))
        for aid in sorted(loc_of):
            ids, sim = census(loc_of[aid], group_of[aid])
            h = is_happy(len(ids), sim)
            if h != happy[aid]:
                happy[aid] = h
                event_no += 1
                counter += 1
                records.append((event_no, step, counter, aid, "status", None,
                                loc_of[aid], tuple(ids), sim, h))
    return records


def brute_force_dfg(log: EventLog):
    """Count all DFG metrics trace by trace with no shared machinery."""
    nodes = {}
    edges = {}
    starts = {}
    ends = {}
    for trace in log.traces:
        acts = [e.activity for e in trace.events]
        starts[acts[0]] = starts.get(acts[0], 0) + 1
        ends[acts[-1]] = ends.get(acts[-1], 0) + 1
        for a in set(acts):
            entry = nodes.setdefault(a, {"abs": 0, "cases": 0, "maxrep": 0})
            entry["abs"] += acts.count(a)
            entry["cases"] += 1
            entry["maxrep"] = max(entry["maxrep"], acts.count(a))
        pairs = list(zip(acts, acts[1:]))
        for p in set(pairs):
            entry = edges.setdefault(p, {"abs": 0, "cases": 0, "maxrep": 0, "durations": []})
            entry["abs"] += pairs.count(p)
            entry["cases"] += 1
            entry["maxrep"] = max(entry["maxrep"], pairs.count(p))
        for i, p in enumerate(pairs):
            delta = trace.events[i + 1].timestamp - trace.events[i].timestamp
            edges[p]["durations"].append(delta.total_seconds() / 86400.0)
    total = len(log.traces)
    for entry in nodes.values():
        entry["coverage"] = entry["cases"] / total
    for entry in edges.values():
        entry["coverage"] = entry["cases"] / total
        d = entry.pop("durations")
        entry["dur"] = {"min": min(d), "max": max(d), "mean": sum(d) / len(d),
                        "median": float(statistics.median(d)), "total": sum(d)}
    return {"nodes": nodes, "edges": edges, "starts": starts, "ends": ends, "total": total}


def naive_filter(log: EventLog, spec) -> EventLog:
    """Apply each predicate in its own full pass over the log."""
    traces = list(log.traces)
    if spec.timeframe_from is not None or spec.timeframe_to is not None:
        lo = spec.timeframe_from
        hi = spec.timeframe_to
        kept = []
        for t in traces:
            first, last = t.events[0].timestamp, t.events[-1].timestamp
            overlap = (lo is None or last >= lo) and (hi is None or first <= hi)
            if overlap:
                kept.append(t)
        traces = kept
    if spec.max_case_duration_days is not None:
        traces = [t for t in traces
                  if (t.events[-1].timestamp - t.events[0].timestamp).total_seconds() / 86400.0
                  < spec.max_case_duration_days]
    if spec.max_events_per_case is not None:
        traces = [t for t in traces if len(t.events) <= spec.max_events_per_case]
    return EventLog(traces=tuple(traces), metadata=dict(log.metadata))


ACTIVITIES = ["move_location", "change_happy_3_2", "change_unhappy_4_2",
              "change_happy_5_3", "change_happy_7_4", "change_unhappy_7_3"]


def random_log(rng: random.Random, max_cases=10, max_events=20,
               activities=None) -> EventLog:
    """Small random but well-formed log for oracle comparisons."""
    activities = activities or ACTIVITIES
    base = datetime(2023, 10, 17, tzinfo=timezone.utc)
    traces = []
    for c in range(rng.randint(1, max_cases)):
        events = []
        day = rng.randint(0, 10)
        for i in range(rng.randint(1, max_events)):
            day += rng.randint(0, 5)
            events.append(Event(
                activity=rng.choice(activities),
                timestamp=base + timedelta(days=day),
                attributes={"step": day, "step_counter": i + 1},
            ))
        traces.append(Trace(case_id=str(c + 1), events=tuple(events)))
    return EventLog(traces=tuple(traces), metadata={"name": "random"})
