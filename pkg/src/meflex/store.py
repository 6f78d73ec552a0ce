"""Persistence: project files, autosave, topic catalog, Markdown export.

One project is one self-contained UTF-8 JSON document named
"{project_id}.meflex.json". Writes are atomic (temp file in the same
directory, then rename) so a crash mid-save never corrupts the primary
file. Loading re-validates every structural invariant; files that fail
validation are rejected as corrupt rather than partially loaded.
"""
from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from .errors import (
    CorruptFileError,
    StoreIoError,
    UnknownProjectError,
    UnsupportedSchemaVersionError,
)
from .graph import create_project, get_node, validate_project
from .model import SCHEMA_VERSION, SECTION_ORDER, Project, utc_now_iso

FILE_SUFFIX = ".meflex.json"


@dataclass
class ProjectFileInfo:
    """Metadata returned by save_project."""

    path: str
    schema_version: int
    saved_at: str


def project_filename(project_id: str) -> str:
    return f"{project_id}{FILE_SUFFIX}"


def _resolve_destination(project: Project, destination: str | Path) -> Path:
    dest = Path(destination)
    if dest.is_dir():
        return dest / project_filename(project.id)
    return dest


def save_project(project: Project, destination: str | Path) -> ProjectFileInfo:
    """Serialize the project to disk atomically."""
    path = _resolve_destination(project, destination)
    saved_at = utc_now_iso()
    document = {
        "schema_version": SCHEMA_VERSION,
        "saved_at": saved_at,
        "project": project.to_dict(),
    }
    payload = json.dumps(document, ensure_ascii=False, indent=2)
    tmp_path: Optional[str] = None
    try:
        fd, tmp_path = tempfile.mkstemp(
            dir=str(path.parent), prefix=path.name, suffix=".tmp"
        )
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_path, path)
        tmp_path = None
    except OSError as exc:
        raise StoreIoError(f"cannot save project file: {exc.strerror or exc}") from None
    finally:
        if tmp_path is not None:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
    return ProjectFileInfo(
        path=str(path), schema_version=SCHEMA_VERSION, saved_at=saved_at
    )


def load_project(source: str | Path) -> Project:
    """Read and re-validate a project file."""
    try:
        raw = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise StoreIoError(f"cannot read project file: {exc.strerror or exc}") from None
    try:
        document = json.loads(raw)
    except ValueError as exc:
        raise CorruptFileError(f"project file is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise CorruptFileError("project file must hold a JSON object")
    version = document.get("schema_version")
    if not isinstance(version, int):
        raise CorruptFileError("project file lacks an integer schema_version")
    if version > SCHEMA_VERSION:
        raise UnsupportedSchemaVersionError(found=version, current=SCHEMA_VERSION)
    try:
        project = Project.from_dict(document["project"])
        validate_project(project)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"project file failed validation: {exc}") from None
    return project


def load_topics(path: Optional[str] = None) -> list[str]:
    """Topic catalog: an ordered list of unique, non-empty labels."""
    if path is None:
        raw = (
            resources.files("meflex.config")
            .joinpath("topics.json")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    data = json.loads(raw)
    topics = data["topics"]
    if not isinstance(topics, list) or not all(
        isinstance(t, str) and t for t in topics
    ):
        raise ValueError("topic catalog must be a list of non-empty labels")
    if len(set(topics)) != len(topics):
        raise ValueError("topic labels must be unique")
    return list(topics)


def export_markdown(project: Project, node_id: str) -> str:
    """Render one node's business plan as a Markdown document: title and
    topic up top, the seven sections in canonical order, and the
    meta-reflection last when present."""
    node = get_node(project, node_id)
    lines = [f"# {project.title}", ""]
    lines.append(f"Topic: {project.topic if project.topic else '(not specified)'}")
    lines.append("")
    for section in SECTION_ORDER:
        lines.append(f"## {section.title}")
        lines.append("")
        content = node.sections[section].content
        lines.append(content if content else "(not yet written)")
        lines.append("")
    if node.meta_reflection is not None:
        lines.append("## Meta-Reflection")
        lines.append("")
        lines.append(node.meta_reflection)
        lines.append("")
    return "\n".join(lines)


class ProjectRegistry:
    """In-memory project registry backed by a directory of project files.

    Mutations to one project are serialized by its registry lock; saves are
    debounced so a burst of edits costs one disk write. A ``debounce`` of 0
    saves synchronously, which tests rely on.
    """

    def __init__(self, data_dir: Optional[str | Path] = None, debounce: float = 2.0):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.debounce = debounce
        self._projects: dict[str, Project] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._chat_locks: dict[tuple[str, str], threading.Lock] = {}
        self._timers: dict[str, threading.Timer] = {}
        self._registry_lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def _load_existing(self) -> None:
        assert self.data_dir is not None
        for path in sorted(self.data_dir.glob(f"*{FILE_SUFFIX}")):
            project = load_project(path)
            self._projects[project.id] = project

    # -- lookup ------------------------------------------------------------

    def get(self, project_id: str) -> Project:
        try:
            return self._projects[project_id]
        except KeyError:
            raise UnknownProjectError(project_id) from None

    def list_projects(self) -> list[Project]:
        return sorted(self._projects.values(), key=lambda p: p.created_at)

    def lock(self, project_id: str) -> threading.RLock:
        with self._registry_lock:
            if project_id not in self._locks:
                self._locks[project_id] = threading.RLock()
            return self._locks[project_id]

    def chat_lock(self, project_id: str, node_id: str) -> threading.Lock:
        """Serializes the two-call chat sequence per node."""
        key = (project_id, node_id)
        with self._registry_lock:
            if key not in self._chat_locks:
                self._chat_locks[key] = threading.Lock()
            return self._chat_locks[key]

    # -- lifecycle ----------------------------------------------------------

    def create(self, title: str, topic: str) -> Project:
        project = create_project(title, topic)
        self._projects[project.id] = project
        self.save_now(project.id)
        return project

    def mark_dirty(self, project_id: str) -> None:
        """Schedule a save; bursts within the debounce window coalesce."""
        if self.data_dir is None:
            return
        if self.debounce <= 0:
            self.save_now(project_id)
            return
        with self._registry_lock:
            if project_id in self._timers:
                return
            timer = threading.Timer(self.debounce, self._flush, args=(project_id,))
            timer.daemon = True
            self._timers[project_id] = timer
            timer.start()

    def _flush(self, project_id: str) -> None:
        with self._registry_lock:
            self._timers.pop(project_id, None)
        try:
            self.save_now(project_id)
        except (StoreIoError, UnknownProjectError):
            pass  # background save; next mutation retries

    def save_now(self, project_id: str) -> Optional[ProjectFileInfo]:
        if self.data_dir is None:
            return None
        project = self.get(project_id)
        with self.lock(project_id):
            return save_project(project, self.data_dir)

    def flush_all(self) -> None:
        with self._registry_lock:
            timers = list(self._timers.values())
            self._timers.clear()
        for timer in timers:
            timer.cancel()
        for project_id in list(self._projects):
            try:
                self.save_now(project_id)
            except StoreIoError:
                pass

    def project_summary(self, project: Project) -> dict[str, Any]:
        return {
            "id": project.id,
            "title": project.title,
            "topic": project.topic,
            "node_count": len(project.nodes),
            "created_at": project.created_at,
        }
