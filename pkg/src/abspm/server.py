"""JSON API serving the explorer UI.

Read endpoints are pure functions of the project artifacts plus the
in-memory filter set via POST /api/filter; judgment submissions are the
only persisted mutation and are serialized through a single lock.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from abspm import assessment as assess_mod
from abspm import dfg as dfg_mod
from abspm import eventlog as log_mod
from abspm import xes as xes_mod
from abspm.cli import (
    ART_JUDGMENT_AUDIT,
    ART_JUDGMENTS,
    ART_LOG,
    ART_MODEL_JSON,
    ARTIFACT_FILES,
)
from abspm.project import ProjectError, ProjectState

API_ERROR_CODES = (
    "invalid_spec",
    "invalid_indicator",
    "invalid_verdict",
    "unknown_observation",
    "missing_artifact",
    "internal",
)


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int = 400, detail=None):
        assert code in API_ERROR_CODES
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status
        self.detail = detail


class ExplorerService:
    """Request-facing state: project artifacts plus the active filter."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.state = ProjectState.load(self.root)
        self._base_log: Optional[log_mod.EventLog] = None
        self._filter: Optional[log_mod.FilterSpec] = None
        self._judgment_lock = threading.Lock()
        self._store: Optional[assess_mod.JudgmentStore] = None

    # -- logs and models --

    def base_log(self) -> log_mod.EventLog:
        if self._base_log is None:
            if not self.state.has_artifact(ART_LOG):
                raise ApiError("missing_artifact",
                               "no event log artifact; run `abspm convert` first", 404)
            self._base_log = xes_mod.read_xes(self.state.artifact_path(ART_LOG))
        return self._base_log

    def active_log(self) -> log_mod.EventLog:
        log = self.base_log()
        if self._filter is not None:
            log = log_mod.apply_filters(log, self._filter)
        return log

    def set_filter(self, spec: Optional[log_mod.FilterSpec]) -> None:
        self._filter = spec

    def model(self, activities: float, paths: float, mode: str,
              utility_weight: float, cutoff: float) -> dfg_mod.Dfg:
        log = self.active_log()
        if not log.traces:
            raise ApiError("invalid_spec", "no cases match the active filters", 400)
        try:
            spec = dfg_mod.AbstractionSpec(
                activity_ratio=activities, path_ratio=paths, mode=mode,
                utility_weight=utility_weight, cutoff=cutoff)
            full = dfg_mod.build_dfg(log)
            return dfg_mod.abstract(full, log, spec)
        except (ValueError, dfg_mod.DiscoveryError) as exc:
            raise ApiError("invalid_spec", str(exc), 400) from exc

    # -- assessment --

    def observations(self) -> list[assess_mod.Observation]:
        if not self.state.has_artifact(ART_MODEL_JSON):
            raise ApiError("missing_artifact",
                           "no discovered model artifact; run `abspm discover` first", 404)
        model = dfg_mod.dfg_from_json(
            self.state.artifact_path(ART_MODEL_JSON).read_text(encoding="utf-8"))
        settings = self.state.assessment
        return assess_mod.generate_observations(
            model,
            tuple(settings.get("indicators", ("case_frequency", "max_repetitions"))),
            settings.get("top_k", 3))

    def population(self) -> int:
        return self.state.sim.agent_count

    def store(self) -> assess_mod.JudgmentStore:
        if self._store is None:
            audit = self.root / ARTIFACT_FILES[ART_JUDGMENT_AUDIT]
            current = self.root / ARTIFACT_FILES[ART_JUDGMENTS]
            if current.exists():
                self._store = assess_mod.JudgmentStore.load(audit, current)
            else:
                self._store = assess_mod.JudgmentStore(
                    o.obs_id for o in self.observations())
        return self._store

    def record_judgment(self, payload: dict) -> assess_mod.Judgment:
        with self._judgment_lock:
            store = self.store()
            try:
                judgment = assess_mod.Judgment(
                    obs_id=int(payload["obs_id"]),
                    question=payload["question"],
                    verdict=assess_mod.normalize_verdict(payload["verdict"]),
                    assessor=payload.get("assessor") or "expert",
                    note=payload.get("note"),
                    recorded_at=datetime.now(timezone.utc),
                )
            except KeyError as exc:
                raise ApiError("invalid_verdict", f"missing field {exc}", 400) from exc
            except assess_mod.AssessmentError as exc:
                raise ApiError("invalid_verdict", str(exc), 400) from exc
            try:
                store.record(judgment)
            except assess_mod.AssessmentError as exc:
                raise ApiError("unknown_observation", str(exc), 404) from exc
            store.save(self.root / ARTIFACT_FILES[ART_JUDGMENT_AUDIT],
                       self.root / ARTIFACT_FILES[ART_JUDGMENTS])
            return judgment


def _dfg_payload(model: dfg_mod.Dfg) -> dict:
    return json.loads(dfg_mod.export_json(model))


def create_app(root, static_dir: Optional[Path] = None) -> FastAPI:
    service = ExplorerService(Path(root))
    app = FastAPI(title="abspm explorer API")

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail})

    @app.get("/api/stats")
    def api_stats():
        base = log_mod.log_stats(service.base_log()).to_dict()
        active = log_mod.log_stats(service.active_log()).to_dict()
        return {"log": base, "active": active,
                "filter": service._filter.to_dict() if service._filter else None}

    @app.get("/api/dfg")
    def api_dfg(activities: float = Query(1.0), paths: float = Query(1.0),
                metric: str = Query("case_frequency"),
                secondary: str = Query("max_repetitions"),
                mode: str = Query("frequency_rank"),
                utility_weight: float = Query(0.5),
                cutoff: float = Query(0.0)):
        if metric not in dfg_mod.EDGE_INDICATORS or secondary not in dfg_mod.EDGE_INDICATORS:
            raise ApiError("invalid_indicator",
                           f"valid indicators: {', '.join(dfg_mod.EDGE_INDICATORS)}", 400)
        if activities > 1.0:
            activities /= 100.0
        if paths > 1.0:
            paths /= 100.0
        model = service.model(activities, paths, mode, utility_weight, cutoff)
        return {"model": _dfg_payload(model), "metric": metric, "secondary": secondary,
                "indicators": list(dfg_mod.EDGE_INDICATORS)}

    @app.post("/api/filter")
    async def api_filter(request: Request):
        payload = await request.json()
        try:
            spec = log_mod.FilterSpec.from_dict(payload) if payload else None
        except (ValueError, TypeError) as exc:
            raise ApiError("invalid_spec", str(exc), 400) from exc
        service.set_filter(spec)
        log = service.active_log()
        stats = log_mod.log_stats(log).to_dict()
        model = _dfg_payload(dfg_mod.build_dfg(log)) if log.traces else None
        return {"stats": stats, "model": model}

    @app.get("/api/observations")
    def api_observations():
        observations = service.observations()
        population = service.population()
        store = service.store()
        rows = []
        for obs in observations:
            q1, q2 = assess_mod.render_questions(obs, population)
            rows.append({
                **obs.to_dict(),
                "q1_text": q1,
                "q2_text": q2,
                "q1_verdict": store.verdict_for(obs.obs_id, "Q1"),
                "q2_verdict": store.verdict_for(obs.obs_id, "Q2"),
            })
        return {"observations": rows, "population": population,
                "verdicts": list(assess_mod.VERDICTS)}

    @app.post("/api/judgments")
    async def api_judgments(request: Request):
        payload = await request.json()
        judgment = service.record_judgment(payload)
        return {"recorded": judgment.to_dict()}

    @app.get("/api/report")
    def api_report():
        observations = service.observations()
        report = assess_mod.summarize(observations, service.store())
        payload = report.to_dict()
        payload["markdown"] = report.to_markdown()
        return payload

    assets = static_dir or _default_static_dir()
    if assets and assets.is_dir():
        app.mount("/", StaticFiles(directory=str(assets), html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return {"service": "abspm explorer API",
                    "endpoints": ["/api/stats", "/api/dfg", "/api/filter",
                                  "/api/observations", "/api/judgments", "/api/report"]}

    return app


def _default_static_dir() -> Optional[Path]:
    # explorer assets built by the frontend package, if present
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None
