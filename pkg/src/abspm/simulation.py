"""Seeded Schelling segregation simulator emitting raw event records.

Agents of two or more groups occupy a rectangular grid. Each step, every
agent that tolerates too many dissimilar neighbors relocates to a random
empty cell; afterwards the happiness status of every agent is recomputed.
Every move and every status flip is emitted as a :class:`RawEventRecord`,
the substrate for all downstream event-log analysis.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import date
from typing import Optional, Sequence

import numpy as np

MOORE_OFFSETS = ((-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1))

RAW_CSV_HEADER = [
    "EventNo", "Step", "StepCounter", "AgentID", "Kind",
    "PrevLoc", "NewLoc", "Neighbors", "Similar", "Happy",
]


class SimulationError(RuntimeError):
    """Raised when a run cannot proceed (e.g. no empty cell for a mover)."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters. Defaults reproduce the classic 20x20 setup."""

    grid_width: int = 20
    grid_height: int = 20
    density: float = 0.70
    tolerance: float = 0.55
    group_count: int = 2
    max_steps: int = 100
    seed: int = 0
    emit_initial_status: bool = True
    base_date: date = date(2023, 10, 17)

    def __post_init__(self):
        if self.grid_width < 1 or self.grid_height < 1:
            raise ValueError("grid dimensions must be positive")
        if not (0.0 < self.density <= 1.0):
            raise ValueError("density must be in (0, 1]")
        if not (0.0 <= self.tolerance <= 1.0):
            raise ValueError("tolerance must be in [0, 1]")
        if self.group_count < 2:
            raise ValueError("group_count must be >= 2")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.agent_count < self.group_count:
            raise ValueError(
                f"floor(density * cells) = {self.agent_count} agents cannot "
                f"cover {self.group_count} groups"
            )

    @property
    def cell_count(self) -> int:
        return self.grid_width * self.grid_height

    @property
    def agent_count(self) -> int:
        # density is occupied/total: 0.70 * 400 cells -> 280 agents
        return math.floor(self.density * self.cell_count)


@dataclass
class Agent:
    agent_id: int
    group: int
    location: tuple[int, int]
    happy: bool = True


@dataclass(frozen=True)
class RawEventRecord:
    """One simulator occurrence: a relocation or a status flip."""

    event_no: int
    step: int
    step_counter: int
    agent_id: int
    kind: str  # "move" | "status"
    prev_loc: Optional[tuple[int, int]]
    new_loc: tuple[int, int]
    neighbor_ids: tuple[int, ...]
    similar_count: int
    happy: Optional[bool] = None  # meaningful for kind="status"


@dataclass(frozen=True)
class SimResult:
    records: tuple[RawEventRecord, ...]
    final_grid: dict[int, Agent]
    steps_executed: int
    converged: bool


def classify(occupied: int, similar: int, tolerance: float) -> bool:
    """Return True (happy) unless the dissimilar-neighbor ratio exceeds tolerance.

    An agent with no occupied neighbors is happy by definition.
    """
    if not (0 <= similar <= occupied <= 8):
        raise ValueError(f"invalid census: occupied={occupied} similar={similar}")
    if occupied == 0:
        return True
    return (occupied - similar) / occupied <= tolerance


class SimState:
    """Mutable state of one running simulation."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.agents: dict[int, Agent] = {}
        self.grid: dict[tuple[int, int], int] = {}  # location -> agent_id
        self.empty: list[tuple[int, int]] = []
        self._empty_index: dict[tuple[int, int], int] = {}
        self.records: list[RawEventRecord] = []
        self.steps_executed = 0
        self._event_no = 0

    # -- empty-cell bookkeeping (swap-remove keeps draws O(1)) --

    def _remove_empty(self, loc: tuple[int, int]) -> None:
        i = self._empty_index.pop(loc)
        last = self.empty.pop()
        if last != loc:
            self.empty[i] = last
            self._empty_index[last] = i

    def _add_empty(self, loc: tuple[int, int]) -> None:
        self._empty_index[loc] = len(self.empty)
        self.empty.append(loc)

    # -- census --

    def census(self, loc: tuple[int, int], group: int) -> tuple[list[int], int]:
        """Occupied Moore neighbors of `loc` (non-wrapping) and same-group count."""
        x, y = loc
        w, h = self.config.grid_width, self.config.grid_height
        neighbors: list[int] = []
        similar = 0
        for dx, dy in MOORE_OFFSETS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h:
                aid = self.grid.get((nx, ny))
                if aid is not None:
                    neighbors.append(aid)
                    if self.agents[aid].group == group:
                        similar += 1
        neighbors.sort()
        return neighbors, similar

    def _emit(self, step: int, counter: int, agent: Agent, kind: str,
              prev_loc: Optional[tuple[int, int]], neighbors: Sequence[int],
              similar: int, happy: Optional[bool]) -> None:
        self._event_no += 1
        self.records.append(RawEventRecord(
            event_no=self._event_no,
            step=step,
            step_counter=counter,
            agent_id=agent.agent_id,
            kind=kind,
            prev_loc=prev_loc,
            new_loc=agent.location,
            neighbor_ids=tuple(neighbors),
            similar_count=similar,
            happy=happy,
        ))

    @property
    def unhappy_ids(self) -> list[int]:
        return sorted(a.agent_id for a in self.agents.values() if not a.happy)


def init_simulation(config: SimConfig) -> SimState:
    """Place agents on random distinct cells and compute initial statuses.

    Placement and balanced group assignment both draw from the config seed,
    so identical configs reproduce identical initial states.
    """
    state = SimState(config)
    n = config.agent_count
    if n == 0 or n > config.cell_count:
        raise SimulationError(f"agent count {n} not placeable on {config.cell_count} cells")

    cells = [(x, y) for y in range(config.grid_height) for x in range(config.grid_width)]
    order = state.rng.permutation(len(cells))

    groups: list[int] = []
    for g in range(config.group_count):
        groups.extend([g] * (n // config.group_count + (1 if g < n % config.group_count else 0)))
    state.rng.shuffle(groups)

    for i in range(n):
        loc = cells[order[i]]
        agent = Agent(agent_id=i + 1, group=groups[i], location=loc)
        state.agents[agent.agent_id] = agent
        state.grid[loc] = agent.agent_id
    for j in range(n, len(cells)):
        state._add_empty(cells[order[j]])

    counter = 0
    for aid in sorted(state.agents):
        agent = state.agents[aid]
        neighbors, similar = state.census(agent.location, agent.group)
        agent.happy = classify(len(neighbors), similar, config.tolerance)
        if config.emit_initial_status:
            counter += 1
            state._emit(0, counter, agent, "status", None, neighbors, similar, agent.happy)
    return state


def run_step(state: SimState) -> list[RawEventRecord]:
    """Execute one movement step and return the records it emitted.

    Unhappy agents move in ascending id order to a uniformly drawn empty
    cell (cells vacated earlier in the step are eligible); statuses are then
    recomputed and every flip is recorded within the same step.
    """
    config = state.config
    step = state.steps_executed + 1
    start = len(state.records)
    counter = 0

    for aid in state.unhappy_ids:
        if not state.empty:
            raise SimulationError(
                f"step {step}: no empty cell available for agent {aid}"
            )
        agent = state.agents[aid]
        prev = agent.location
        k = int(state.rng.integers(len(state.empty)))
        target = state.empty[k]
        self_prev = prev
        state._remove_empty(target)
        del state.grid[self_prev]
        state._add_empty(self_prev)
        agent.location = target
        state.grid[target] = aid
        neighbors, similar = state.census(target, agent.group)
        counter += 1
        state._emit(step, counter, agent, "move", prev, neighbors, similar, None)

    # status recomputation on the settled grid; flips stamped with this step
    flips: list[tuple[Agent, list[int], int, bool]] = []
    for aid in sorted(state.agents):
        agent = state.agents[aid]
        neighbors, similar = state.census(agent.location, agent.group)
        happy = classify(len(neighbors), similar, config.tolerance)
        if happy != agent.happy:
            flips.append((agent, neighbors, similar, happy))
    for agent, neighbors, similar, happy in flips:
        agent.happy = happy
        counter += 1
        state._emit(step, counter, agent, "status", None, neighbors, similar, happy)

    state.steps_executed = step
    return state.records[start:]


def run(config: SimConfig) -> SimResult:
    """Run until every agent is happy or `max_steps` is exhausted."""
    state = init_simulation(config)
    converged = False
    while state.steps_executed < config.max_steps:
        if not state.unhappy_ids:
            converged = True
            break
        run_step(state)
    else:
        converged = not state.unhappy_ids
    return SimResult(
        records=tuple(state.records),
        final_grid={aid: Agent(a.agent_id, a.group, a.location, a.happy)
                    for aid, a in state.agents.items()},
        steps_executed=state.steps_executed,
        converged=converged,
    )


# -- raw CSV serialization (Table-style layout) --

def _fmt_loc(loc: Optional[tuple[int, int]]) -> str:
    return "" if loc is None else f"({loc[0]}, {loc[1]})"


def _parse_loc(text: str) -> Optional[tuple[int, int]]:
    text = text.strip()
    if not text:
        return None
    x, y = text.strip("()").split(",")
    return (int(x), int(y))


def write_raw_csv(result: SimResult, path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(RAW_CSV_HEADER)
            for r in result.records:
                writer.writerow([
                    r.event_no, r.step, r.step_counter, r.agent_id, r.kind,
                    _fmt_loc(r.prev_loc), _fmt_loc(r.new_loc),
                    "[" + ", ".join(str(i) for i in r.neighbor_ids) + "]",
                    r.similar_count,
                    "" if r.happy is None else str(r.happy),
                ])
    except OSError as exc:
        raise SimulationError(f"cannot write raw log {path}: {exc}") from exc


def read_raw_csv(path) -> list[RawEventRecord]:
    records: list[RawEventRecord] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != RAW_CSV_HEADER:
                raise SimulationError(f"{path}: unexpected raw log header {header}")
            for row in reader:
                neigh = row[7].strip("[]")
                records.append(RawEventRecord(
                    event_no=int(row[0]),
                    step=int(row[1]),
                    step_counter=int(row[2]),
                    agent_id=int(row[3]),
                    kind=row[4],
                    prev_loc=_parse_loc(row[5]),
                    new_loc=_parse_loc(row[6]),
                    neighbor_ids=tuple(int(t) for t in neigh.split(",")) if neigh else (),
                    similar_count=int(row[8]),
                    happy=None if row[9] == "" else row[9] == "True",
                ))
    except OSError as exc:
        raise SimulationError(f"cannot read raw log {path}: {exc}") from exc
    return records
