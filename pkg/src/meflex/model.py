"""Core data model: sections, drafts, chat messages, idea nodes, projects.

A project is a forest of idea nodes. Every node carries the full set of
seven business-plan sections plus per-section chat threads, a meta-reflection
thread, and canvas position. Serialization is plain dicts so the persistence
layer stays schema-driven.
"""
from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional

from .errors import InvalidKindError, InvalidSectionError

SCHEMA_VERSION = 1


def utc_now_iso() -> str:
    """Current UTC time, second precision, ISO-8601 with offset."""
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def new_id() -> str:
    return uuid.uuid4().hex


class Section(Enum):
    """The seven business-plan sections, in canonical display order."""

    USER_PAIN_POINTS = "user_pain_points"
    MARKET_ANALYSIS = "market_analysis"
    PRODUCT_OVERVIEW = "product_overview"
    COMPETITIVE_ANALYSIS = "competitive_analysis"
    FEASIBILITY_ANALYSIS = "feasibility_analysis"
    FUNDING_PLAN = "funding_plan"
    TEAM = "team"

    @property
    def tag(self) -> str:
        return self.value

    @property
    def title(self) -> str:
        return _SECTION_TITLES[self]

    @classmethod
    def from_tag(cls, tag: str) -> "Section":
        try:
            return cls(tag)
        except ValueError:
            raise InvalidSectionError(tag) from None


_SECTION_TITLES = {
    Section.USER_PAIN_POINTS: "User Pain Points",
    Section.MARKET_ANALYSIS: "Market Analysis",
    Section.PRODUCT_OVERVIEW: "Product Overview",
    Section.COMPETITIVE_ANALYSIS: "Competitive Analysis",
    Section.FEASIBILITY_ANALYSIS: "Feasibility Analysis",
    Section.FUNDING_PLAN: "Funding Plan",
    Section.TEAM: "Team",
}

SECTION_ORDER: tuple[Section, ...] = tuple(Section)


class SectionStatus(Enum):
    EMPTY = "empty"
    IN_PROGRESS = "in_progress"
    DONE = "done"


class ExtensionKind(Enum):
    ROOT = "root"
    REFINEMENT = "refinement"
    BRANCH = "branch"

    @classmethod
    def from_tag(cls, tag: str) -> "ExtensionKind":
        try:
            return cls(tag)
        except ValueError:
            raise InvalidKindError(f"unknown extension kind: {tag}") from None


class ChangeKind(Enum):
    ADDED = "added"
    REMOVED = "removed"
    MODIFIED = "modified"


class MessageRole(Enum):
    USER = "user"
    ASSISTANT = "assistant"
    REFLECTION_QUESTION = "reflection_question"


@dataclass
class SectionDraft:
    """One section's text plus workflow status.

    Reachable states are exactly (Empty, empty content),
    (InProgress, non-empty), (Done, non-empty). ``apply_edit`` keeps Done
    across non-empty edits so finishing a section survives later tweaks;
    un-marking is an explicit user action.
    """

    content: str = ""
    status: SectionStatus = SectionStatus.EMPTY
    last_modified: str = field(default_factory=utc_now_iso)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        empty = self.content == ""
        if empty and self.status is not SectionStatus.EMPTY:
            raise ValueError("empty content requires status 'empty'")
        if not empty and self.status is SectionStatus.EMPTY:
            raise ValueError("non-empty content cannot have status 'empty'")

    def apply_edit(self, content: str) -> None:
        self.content = content
        if content == "":
            self.status = SectionStatus.EMPTY
        elif self.status is SectionStatus.EMPTY:
            self.status = SectionStatus.IN_PROGRESS
        # Done and InProgress stay put on non-empty edits
        self.last_modified = utc_now_iso()

    def copy_for_extension(self) -> "SectionDraft":
        # content and status carry over; last_modified is the child's birth time
        return SectionDraft(content=self.content, status=self.status)

    def to_dict(self) -> dict[str, Any]:
        return {
            "content": self.content,
            "status": self.status.value,
            "last_modified": self.last_modified,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SectionDraft":
        return cls(
            content=data["content"],
            status=SectionStatus(data["status"]),
            last_modified=data["last_modified"],
        )


@dataclass
class ChatMessage:
    role: MessageRole
    content: str
    timestamp: str = field(default_factory=utc_now_iso)

    def __post_init__(self) -> None:
        if self.content == "":
            raise ValueError("chat message content must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "role": self.role.value,
            "content": self.content,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChatMessage":
        return cls(
            role=MessageRole(data["role"]),
            content=data["content"],
            timestamp=data["timestamp"],
        )


@dataclass
class SectionChange:
    """One changed section inside a ChangeSet. Carries whole-section text."""

    section: Section
    kind: ChangeKind
    before: str
    after: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "section": self.section.tag,
            "kind": self.kind.value,
            "before": self.before,
            "after": self.after,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SectionChange":
        return cls(
            section=Section.from_tag(data["section"]),
            kind=ChangeKind(data["kind"]),
            before=data["before"],
            after=data["after"],
        )


@dataclass
class ChangeSet:
    """Section-level diff between two nodes on the same lineage."""

    from_node: str
    to_node: str
    changes: list[SectionChange] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not self.changes

    def changed_sections(self) -> list[Section]:
        return [c.section for c in self.changes]

    def to_dict(self) -> dict[str, Any]:
        return {
            "from_node": self.from_node,
            "to_node": self.to_node,
            "changes": [c.to_dict() for c in self.changes],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChangeSet":
        return cls(
            from_node=data["from_node"],
            to_node=data["to_node"],
            changes=[SectionChange.from_dict(c) for c in data["changes"]],
        )


def fresh_sections() -> dict[Section, SectionDraft]:
    return {s: SectionDraft() for s in SECTION_ORDER}


@dataclass
class IdeaNode:
    """One versioned card on the canvas."""

    id: str
    extension_kind: ExtensionKind
    parent_id: Optional[str] = None
    position: tuple[float, float] = (0.0, 0.0)
    sections: dict[Section, SectionDraft] = field(default_factory=fresh_sections)
    chat_threads: dict[Section, list[ChatMessage]] = field(default_factory=dict)
    meta_reflection: Optional[str] = None
    meta_thread: list[ChatMessage] = field(default_factory=list)
    created_at: str = field(default_factory=utc_now_iso)

    def __post_init__(self) -> None:
        if self.extension_kind is ExtensionKind.ROOT and self.parent_id is not None:
            raise ValueError("a root node cannot have a parent")
        if self.extension_kind is not ExtensionKind.ROOT and self.parent_id is None:
            raise ValueError(f"a {self.extension_kind.value} node requires a parent")
        missing = [s for s in SECTION_ORDER if s not in self.sections]
        if missing:
            raise ValueError(f"node is missing sections: {[s.tag for s in missing]}")

    def thread_for(self, section: Section) -> list[ChatMessage]:
        return self.chat_threads.setdefault(section, [])

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "extension_kind": self.extension_kind.value,
            "parent_id": self.parent_id,
            "position": {"x": self.position[0], "y": self.position[1]},
            "sections": {s.tag: d.to_dict() for s, d in self.sections.items()},
            "chat_threads": {
                s.tag: [m.to_dict() for m in msgs]
                for s, msgs in self.chat_threads.items()
                if msgs
            },
            "meta_reflection": self.meta_reflection,
            "meta_thread": [m.to_dict() for m in self.meta_thread],
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IdeaNode":
        pos = data.get("position") or {"x": 0.0, "y": 0.0}
        return cls(
            id=data["id"],
            extension_kind=ExtensionKind.from_tag(data["extension_kind"]),
            parent_id=data.get("parent_id"),
            position=(float(pos["x"]), float(pos["y"])),
            sections={
                Section.from_tag(tag): SectionDraft.from_dict(d)
                for tag, d in data["sections"].items()
            },
            chat_threads={
                Section.from_tag(tag): [ChatMessage.from_dict(m) for m in msgs]
                for tag, msgs in data.get("chat_threads", {}).items()
            },
            meta_reflection=data.get("meta_reflection"),
            meta_thread=[ChatMessage.from_dict(m) for m in data.get("meta_thread", [])],
            created_at=data["created_at"],
        )


@dataclass
class CompletionSummary:
    """Per-section status map plus the number of Done sections."""

    statuses: dict[Section, SectionStatus]
    done_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "statuses": {s.tag: st.value for s, st in self.statuses.items()},
            "done_count": self.done_count,
            "total": len(self.statuses),
        }


@dataclass
class Project:
    """A titled ideation workspace: topic plus a forest of idea nodes."""

    id: str
    title: str
    topic: str
    nodes: dict[str, IdeaNode] = field(default_factory=dict)
    created_at: str = field(default_factory=utc_now_iso)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "topic": self.topic,
            "nodes": {nid: n.to_dict() for nid, n in self.nodes.items()},
            "created_at": self.created_at,
            "schema_version": self.schema_version,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Project":
        return cls(
            id=data["id"],
            title=data["title"],
            topic=data["topic"],
            nodes={nid: IdeaNode.from_dict(n) for nid, n in data["nodes"].items()},
            created_at=data["created_at"],
            schema_version=data.get("schema_version", SCHEMA_VERSION),
        )
