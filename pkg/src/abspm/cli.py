"""Command-line pipeline: init, simulate, convert, stats, filter, discover,
assess, report, serve.

Each command reads its prerequisite artifacts, invokes the corresponding
library operation, writes its output artifacts, and updates the project's
phase notes and artifact registry. Exit codes: 0 success, 2 precondition
failure, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from datetime import date, datetime, timezone
from pathlib import Path

from abspm import assessment as assess_mod
from abspm import dfg as dfg_mod
from abspm import eventlog as log_mod
from abspm import simulation as sim_mod
from abspm import xes as xes_mod
from abspm.project import ProjectError, ProjectState, init_project

ART_RAW = "raw_log"
ART_LOG = "event_log"
ART_LOG_CSV = "event_log_csv"
ART_STATS = "stats"
ART_FILTERED = "filtered_log"
ART_MODEL_DOT = "model_dot"
ART_MODEL_JSON = "model_json"
ART_OBSERVATIONS = "observations"
ART_JUDGMENTS = "judgments"
ART_JUDGMENT_AUDIT = "judgment_audit"
ART_ASSESSMENT_MD = "assessment_report_md"
ART_ASSESSMENT_CSV = "assessment_report_csv"
ART_REPORT = "final_report"

ARTIFACT_FILES = {
    ART_RAW: "raw_log.csv",
    ART_LOG: "event_log.xes",
    ART_LOG_CSV: "event_log.csv",
    ART_STATS: "stats.json",
    ART_FILTERED: "filtered_log.xes",
    ART_MODEL_DOT: "model.dot",
    ART_MODEL_JSON: "model.json",
    ART_OBSERVATIONS: "observations.json",
    ART_JUDGMENTS: "judgments.json",
    ART_JUDGMENT_AUDIT: "judgments.ndjson",
    ART_ASSESSMENT_MD: "assessment.md",
    ART_ASSESSMENT_CSV: "assessment.csv",
    ART_REPORT: "report.md",
}


def _project_root(args) -> Path:
    if getattr(args, "project", None):
        return Path(args.project)
    env = os.environ.get("ABSPM_PROJECT")
    return Path(env) if env else Path.cwd()


def _write_artifact(state: ProjectState, name: str, content: str) -> Path:
    path = state.root / ARTIFACT_FILES[name]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
    state.register_artifact(name, path)
    return path


def _ratio(value: float) -> float:
    # sliders accept both 0..1 ratios and 0..100 percentages
    return value / 100.0 if value > 1.0 else value


def _parse_grid(text: str) -> tuple[int, int]:
    if "x" in text.lower():
        w, h = text.lower().split("x")
        return int(w), int(h)
    n = int(text)
    return n, n


def _parse_date(text: str) -> datetime:
    dt = datetime.fromisoformat(text)
    return dt if dt.tzinfo else dt.replace(tzinfo=timezone.utc)


def _sim_overrides(state: ProjectState, args) -> None:
    config = state.sim
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "tolerance", None) is not None:
        config = replace(config, tolerance=args.tolerance)
    if getattr(args, "density", None) is not None:
        config = replace(config, density=args.density)
    if getattr(args, "max_steps", None) is not None:
        config = replace(config, max_steps=args.max_steps)
    if getattr(args, "grid", None) is not None:
        w, h = _parse_grid(args.grid)
        config = replace(config, grid_width=w, grid_height=h)
    state.sim = config


# -- commands --

def cmd_init(args) -> int:
    root = _project_root(args)
    sim = None
    if any(getattr(args, k, None) is not None
           for k in ("seed", "tolerance", "density", "max_steps", "grid")):
        probe = ProjectState(root=root)
        _sim_overrides(probe, args)
        sim = probe.sim
    state = init_project(root, force=args.force, sim=sim)
    print(f"initialized project at {state.path}")
    return 0


def cmd_simulate(args) -> int:
    state = ProjectState.load(_project_root(args))
    _sim_overrides(state, args)
    result = sim_mod.run(state.sim)
    path = state.root / ARTIFACT_FILES[ART_RAW]
    sim_mod.write_raw_csv(result, path)
    state.register_artifact(ART_RAW, path)
    state.mark_phase("data_understanding", "done",
                     f"Simulated {len(result.records)} raw events over "
                     f"{result.steps_executed} steps (converged={result.converged}).")
    state.save()
    print(f"wrote {path} ({len(result.records)} records, "
          f"steps={result.steps_executed}, converged={result.converged})")
    return 0


def cmd_convert(args) -> int:
    state = ProjectState.load(_project_root(args))
    records = sim_mod.read_raw_csv(state.artifact_path(ART_RAW))
    log = log_mod.convert(records, state.sim.base_date,
                          metadata={"name": "schelling-run", "source": "raw_log.csv"})
    _write_artifact(state, ART_LOG, xes_mod.xes_to_string(log))
    csv_path = state.root / ARTIFACT_FILES[ART_LOG_CSV]
    log_mod.write_log_csv(log, csv_path)
    state.register_artifact(ART_LOG_CSV, csv_path)
    state.mark_phase("data_preparation", "in_progress",
                     f"Converted raw records into {log.case_count} cases / "
                     f"{log.event_count} events.")
    state.save()
    print(f"wrote {state.artifact_path(ART_LOG)} "
          f"({log.case_count} cases, {log.event_count} events)")
    return 0


def _active_log(state: ProjectState) -> log_mod.EventLog:
    name = ART_FILTERED if state.has_artifact(ART_FILTERED) else ART_LOG
    return xes_mod.read_xes(state.artifact_path(name))


def cmd_stats(args) -> int:
    state = ProjectState.load(_project_root(args))
    log = _active_log(state) if args.filtered else xes_mod.read_xes(state.artifact_path(ART_LOG))
    stats = log_mod.log_stats(log)
    _write_artifact(state, ART_STATS, json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n")
    state.save()
    print(f"events={stats.events} cases={stats.cases} activities={stats.activities}")
    return 0


def _filter_spec_from_args(state: ProjectState, args) -> log_mod.FilterSpec:
    if args.preset:
        if args.preset not in state.filter_presets:
            raise ProjectError(
                f"unknown preset {args.preset!r}; available: {sorted(state.filter_presets)}")
        return state.filter_presets[args.preset]
    kwargs = {}
    if getattr(args, "from_date", None):
        kwargs["timeframe_from"] = _parse_date(args.from_date)
    if getattr(args, "to_date", None):
        kwargs["timeframe_to"] = _parse_date(args.to_date)
    if getattr(args, "max_duration_days", None) is not None:
        kwargs["max_case_duration_days"] = args.max_duration_days
    if getattr(args, "max_events", None) is not None:
        kwargs["max_events_per_case"] = args.max_events
    if not kwargs:
        raise ProjectError("no filter criteria given; use --preset or explicit bounds")
    return log_mod.FilterSpec(**kwargs)


def cmd_filter(args) -> int:
    state = ProjectState.load(_project_root(args))
    log = xes_mod.read_xes(state.artifact_path(ART_LOG))
    spec = _filter_spec_from_args(state, args)
    filtered = log_mod.apply_filters(log, spec)
    _write_artifact(state, ART_FILTERED, xes_mod.xes_to_string(filtered))
    state.filters = spec
    state.mark_phase("data_preparation", "done",
                     f"Filtered to {filtered.case_count} cases / {filtered.event_count} events.")
    state.save()
    print(f"kept {filtered.case_count}/{log.case_count} cases "
          f"({filtered.event_count}/{log.event_count} events)")
    return 0


def cmd_discover(args) -> int:
    state = ProjectState.load(_project_root(args))
    log = _active_log(state)
    if not log.traces:
        raise ProjectError("active event log has no cases; relax the filters first")
    spec = dfg_mod.AbstractionSpec(
        activity_ratio=_ratio(args.activities),
        path_ratio=_ratio(args.paths),
        mode=args.mode,
        utility_weight=args.utility_weight,
        cutoff=args.cutoff,
    )
    full = dfg_mod.build_dfg(log)
    model = dfg_mod.abstract(full, log, spec)
    _write_artifact(state, ART_MODEL_DOT,
                    dfg_mod.export_dot(model, args.metric, args.secondary))
    _write_artifact(state, ART_MODEL_JSON, dfg_mod.export_json(model))
    state.abstraction = spec
    state.mark_phase("modeling", "done",
                     f"Discovered model with {len(model.nodes)} activities / "
                     f"{len(model.edges)} paths.")
    state.save()
    print(f"wrote model.dot and model.json "
          f"({len(model.nodes)} activities, {len(model.edges)} paths)")
    return 0


def _population(state: ProjectState, args) -> int:
    if getattr(args, "population", None):
        return args.population
    return state.sim.agent_count


def _load_judgments_csv(path: Path, store: assess_mod.JudgmentStore, assessor: str) -> None:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        for i, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                judgment = assess_mod.Judgment(
                    obs_id=int(row[0]),
                    question=row[1].strip(),
                    verdict=assess_mod.normalize_verdict(row[2]),
                    assessor=row[3].strip() if len(row) > 3 and row[3].strip() else assessor,
                    note=row[4].strip() if len(row) > 4 and row[4].strip() else None,
                )
                store.record(judgment)
            except (ValueError, assess_mod.AssessmentError) as exc:
                raise ProjectError(f"{path} row {i}: {exc}") from exc


def _prompt_verdict(prompt: str) -> str:
    while True:
        token = input(prompt)
        try:
            return assess_mod.normalize_verdict(token)
        except assess_mod.AssessmentError:
            print(f"  invalid verdict; choose one of: {', '.join(assess_mod.VERDICTS)}")


def cmd_assess(args) -> int:
    state = ProjectState.load(_project_root(args))
    model = dfg_mod.dfg_from_json(
        state.artifact_path(ART_MODEL_JSON).read_text(encoding="utf-8"))
    settings = state.assessment
    observations = assess_mod.generate_observations(
        model, tuple(settings.get("indicators", ("case_frequency", "max_repetitions"))),
        settings.get("top_k", 3))
    _write_artifact(state, ART_OBSERVATIONS,
                    json.dumps([o.to_dict() for o in observations], indent=2, sort_keys=True) + "\n")
    assessor = settings.get("assessor", "expert")
    store = assess_mod.JudgmentStore(o.obs_id for o in observations)
    population = _population(state, args)

    if args.from_file:
        _load_judgments_csv(Path(args.from_file), store, assessor)
    else:
        for obs in observations:
            q1, q2 = assess_mod.render_questions(obs, population)
            print(f"\nObservation {obs.obs_id}: "
                  f"{assess_mod.element_label(obs.element)} — {obs.value_display}")
            print(f"  Q1: {q1}")
            store.record(assess_mod.Judgment(
                obs.obs_id, "Q1", _prompt_verdict("  verdict> "), assessor,
                recorded_at=datetime.now(timezone.utc)))
            print(f"  Q2: {q2}")
            store.record(assess_mod.Judgment(
                obs.obs_id, "Q2", _prompt_verdict("  verdict> "), assessor,
                recorded_at=datetime.now(timezone.utc)))

    audit_path = state.root / ARTIFACT_FILES[ART_JUDGMENT_AUDIT]
    current_path = state.root / ARTIFACT_FILES[ART_JUDGMENTS]
    store.save(audit_path, current_path)
    state.register_artifact(ART_JUDGMENT_AUDIT, audit_path)
    state.register_artifact(ART_JUDGMENTS, current_path)

    report = assess_mod.summarize(observations, store)
    _write_artifact(state, ART_ASSESSMENT_MD, report.to_markdown())
    _write_artifact(state, ART_ASSESSMENT_CSV, report.to_csv())
    state.mark_phase("evaluation", "done",
                     f"Assessed {len(observations)} observations "
                     f"({len(report.pending)} pending).")
    state.save()
    if not observations:
        print("warning: no observations generated (empty model); report has zero rows")
    print(f"wrote assessment report ({len(observations)} observations)")
    return 0


def cmd_report(args) -> int:
    state = ProjectState.load(_project_root(args))
    lines = ["# Assessment project report", ""]
    lines.append("## Configuration")
    lines.append("```json")
    lines.append(json.dumps(
        {"sim": state.to_dict()["sim"],
         "filters": state.filters.to_dict() if state.filters else None,
         "abstraction": state.abstraction.to_dict()},
        indent=2, sort_keys=True))
    lines.append("```")
    lines.append("")
    missing = []

    lines.append("## Log statistics")
    if state.has_artifact(ART_STATS):
        lines.append("```json")
        lines.append(state.artifact_path(ART_STATS).read_text(encoding="utf-8").rstrip())
        lines.append("```")
    else:
        lines.append("_pending_")
        missing.append(ART_STATS)
    lines.append("")

    lines.append("## Process model")
    if state.has_artifact(ART_MODEL_DOT):
        lines.append(f"- DOT rendering: `{state.artifacts[ART_MODEL_DOT]['path']}`")
        lines.append(f"- JSON model: `{state.artifacts[ART_MODEL_JSON]['path']}`")
    else:
        lines.append("_pending_")
        missing.append(ART_MODEL_DOT)
    lines.append("")

    lines.append("## Face-validity assessment")
    if state.has_artifact(ART_ASSESSMENT_MD):
        body = state.artifact_path(ART_ASSESSMENT_MD).read_text(encoding="utf-8")
        lines.append(body.split("\n", 1)[1].strip() if "\n" in body else body)
    else:
        lines.append("_pending_")
        missing.append(ART_ASSESSMENT_MD)
    lines.append("")

    lines.append("## Phase notes")
    for name in state.phases:
        entry = state.phases[name]
        lines.append(f"### {name.replace('_', ' ').title()} — {entry['status']}")
        for note in entry["notes"]:
            lines.append(f"- {note}")
        if not entry["notes"]:
            lines.append("- (no notes)")
        lines.append("")

    _write_artifact(state, ART_REPORT, "\n".join(lines))
    state.mark_phase("deployment", "in_progress", "Final report generated.")
    state.save()
    if missing:
        print(f"report written with gaps: {', '.join(missing)}")
    else:
        print(f"wrote {state.artifact_path(ART_REPORT)}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from abspm.server import create_app
    app = create_app(_project_root(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abspm",
        description="Process-mining assessment pipeline for Schelling segregation runs")
    parser.add_argument("--project", help="project directory (default: $ABSPM_PROJECT or cwd)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_sim_flags(p):
        p.add_argument("--seed", type=int)
        p.add_argument("--tolerance", type=float)
        p.add_argument("--grid", help="grid size, e.g. 20 or 20x20")
        p.add_argument("--density", type=float)
        p.add_argument("--max-steps", dest="max_steps", type=int)

    p = sub.add_parser("init", help="scaffold a project with paper-default configuration")
    p.add_argument("--force", action="store_true")
    add_sim_flags(p)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("simulate", help="run the simulation and write the raw log")
    add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("convert", help="derive the XES event log from the raw log")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="compute event-log statistics")
    p.add_argument("--filtered", action="store_true",
                   help="use the filtered log when available")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("filter", help="apply whole-case outlier filters")
    p.add_argument("--preset", help="named preset, e.g. paper-outlier")
    p.add_argument("--from", dest="from_date", help="timeframe start (ISO date)")
    p.add_argument("--to", dest="to_date", help="timeframe end (ISO date)")
    p.add_argument("--max-duration-days", dest="max_duration_days", type=float)
    p.add_argument("--max-events", dest="max_events", type=int)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("discover", help="discover an annotated process model")
    p.add_argument("--activities", type=float, default=100.0,
                   help="activity slider (ratio or percent)")
    p.add_argument("--paths", type=float, default=100.0,
                   help="path slider (ratio or percent)")
    p.add_argument("--metric", default="case_frequency")
    p.add_argument("--secondary", default="max_repetitions")
    p.add_argument("--mode", choices=("frequency_rank", "fuzzy"), default="frequency_rank")
    p.add_argument("--utility-weight", dest="utility_weight", type=float, default=0.5)
    p.add_argument("--cutoff", type=float, default=0.0)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("assess", help="run the face-validity questionnaire")
    p.add_argument("--from-file", dest="from_file",
                   help="verdict CSV: obs_id,question,verdict[,assessor[,note]]")
    p.add_argument("--population", type=int,
                   help="population size shown in question 2 (default: agent count)")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("report", help="assemble the final project report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the JSON API and explorer UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProjectError, sim_mod.SimulationError, log_mod.ConversionError,
            dfg_mod.DiscoveryError, assess_mod.AssessmentError,
            xes_mod.XesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
