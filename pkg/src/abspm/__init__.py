"""Workbench for assessing agent-based segregation runs with process mining.

The package is organized as a numpy-style library: a seeded grid simulator
(:mod:`abspm.simulation`), an event-log layer with XES serialization and
case filters (:mod:`abspm.eventlog`, :mod:`abspm.xes`), directly-follows
model discovery with abstraction controls (:mod:`abspm.dfg`), a face-validity
assessment workflow (:mod:`abspm.assessment`), and a project/pipeline surface
(:mod:`abspm.project`, :mod:`abspm.cli`, :mod:`abspm.server`).
"""

from abspm.simulation import SimConfig, SimResult, run, classify
from abspm.eventlog import Event, Trace, EventLog, FilterSpec, convert, apply_filters, log_stats
from abspm.xes import write_xes, read_xes
from abspm.dfg import Dfg, AbstractionSpec, build_dfg, abstract, fuzzy_metrics, fuzzy_filter, export_dot, export_json
from abspm.assessment import (
    Observation,
    Judgment,
    JudgmentStore,
    generate_observations,
    render_questions,
    summarize,
)

__version__ = "0.1.0"
