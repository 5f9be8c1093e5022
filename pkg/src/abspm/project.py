"""Project persistence: configuration, phase progress, and artifact registry.

A project is a single human-diffable JSON document next to its artifacts.
Registered artifacts carry content digests so stale files are detected on
load; phase order is advisory only, since the methodology is iterative.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional

from abspm.dfg import AbstractionSpec
from abspm.eventlog import FilterSpec, paper_outlier_preset
from abspm.simulation import SimConfig

PHASES = (
    "contextual_understanding",
    "data_understanding",
    "data_preparation",
    "modeling",
    "evaluation",
    "deployment",
)

PHASE_STATUSES = ("pending", "in_progress", "done")

PROJECT_FILENAME = "project.json"


class ProjectError(RuntimeError):
    """Precondition failures: missing artifacts, existing project, bad specs."""


def file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _sim_config_to_dict(config: SimConfig) -> dict:
    return {
        "grid_width": config.grid_width,
        "grid_height": config.grid_height,
        "density": config.density,
        "tolerance": config.tolerance,
        "group_count": config.group_count,
        "max_steps": config.max_steps,
        "seed": config.seed,
        "emit_initial_status": config.emit_initial_status,
        "base_date": config.base_date.isoformat(),
    }


def _sim_config_from_dict(data: dict) -> SimConfig:
    data = dict(data)
    data["base_date"] = date.fromisoformat(data["base_date"])
    return SimConfig(**data)


@dataclass
class ProjectState:
    root: Path
    sim: SimConfig = field(default_factory=SimConfig)
    filters: Optional[FilterSpec] = None
    filter_presets: dict = field(default_factory=dict)
    abstraction: AbstractionSpec = field(default_factory=AbstractionSpec)
    assessment: dict = field(default_factory=lambda: {
        "indicators": ["case_frequency", "max_repetitions"],
        "top_k": 3,
        "assessor": "expert",
    })
    phases: dict = field(default_factory=lambda: {
        name: {"status": "pending", "notes": []} for name in PHASES})
    artifacts: dict = field(default_factory=dict)  # name -> {"path", "sha256"}

    @property
    def path(self) -> Path:
        return self.root / PROJECT_FILENAME

    # -- phases --

    def mark_phase(self, name: str, status: str, note: Optional[str] = None) -> None:
        if name not in PHASES:
            raise ProjectError(f"unknown phase {name!r}")
        if status not in PHASE_STATUSES:
            raise ProjectError(f"unknown phase status {status!r}")
        entry = self.phases.setdefault(name, {"status": "pending", "notes": []})
        entry["status"] = status
        if note and note not in entry["notes"]:
            entry["notes"].append(note)

    # -- artifacts --

    def register_artifact(self, name: str, path: Path) -> None:
        rel = path.name if path.parent == self.root else str(path)
        self.artifacts[name] = {"path": rel, "sha256": file_digest(path)}

    def artifact_path(self, name: str) -> Path:
        if name not in self.artifacts:
            raise ProjectError(
                f"missing prerequisite artifact {name!r}; run the producing command first")
        return self.root / self.artifacts[name]["path"]

    def has_artifact(self, name: str) -> bool:
        return name in self.artifacts and (self.root / self.artifacts[name]["path"]).exists()

    def stale_artifacts(self) -> list[str]:
        stale = []
        for name, entry in self.artifacts.items():
            p = self.root / entry["path"]
            if not p.exists() or file_digest(p) != entry["sha256"]:
                stale.append(name)
        return sorted(stale)

    # -- persistence --

    def to_dict(self) -> dict:
        return {
            "sim": _sim_config_to_dict(self.sim),
            "filters": self.filters.to_dict() if self.filters else None,
            "filter_presets": {k: v.to_dict() for k, v in self.filter_presets.items()},
            "abstraction": self.abstraction.to_dict(),
            "assessment": self.assessment,
            "phases": self.phases,
            "artifacts": self.artifacts,
        }

    def save(self) -> None:
        with open(self.path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, root: Path) -> "ProjectState":
        path = Path(root) / PROJECT_FILENAME
        if not path.exists():
            raise ProjectError(f"no project file at {path}; run `abspm init` first")
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        state = cls(
            root=Path(root),
            sim=_sim_config_from_dict(data["sim"]),
            filters=FilterSpec.from_dict(data["filters"]) if data.get("filters") else None,
            filter_presets={k: FilterSpec.from_dict(v)
                            for k, v in data.get("filter_presets", {}).items()},
            abstraction=AbstractionSpec.from_dict(data["abstraction"]),
            assessment=data.get("assessment", {}),
            phases=data.get("phases", {}),
            artifacts=data.get("artifacts", {}),
        )
        return state


def init_project(root: Path, force: bool = False, sim: Optional[SimConfig] = None) -> ProjectState:
    """Scaffold a project with default configuration and the outlier preset."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    path = root / PROJECT_FILENAME
    if path.exists() and not force:
        raise ProjectError(f"project already exists at {path}; use --force to overwrite")
    config = sim or SimConfig()
    state = ProjectState(root=root, sim=config)
    state.filter_presets["paper-outlier"] = paper_outlier_preset(config.base_date)
    state.mark_phase("contextual_understanding", "done",
                     "Project scaffolded; goals and stakeholders recorded in notes.")
    state.save()
    return state
