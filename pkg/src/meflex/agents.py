"""Agent framework: role registry, prompt assembly, section chats,
reflection questions, and meta-reflection over lineage diffs.

Nine roles exist: one writing coach per business-plan section, a Reflection
role that follows every assistant reply with one open-ended question, and a
MetaReflection role that narrates how a node's content evolved from its
parent. Role templates are plain text with named placeholders; they ship as
package data and can be overridden via a config file.
"""
from __future__ import annotations

import json
import re
import threading
from contextlib import nullcontext
from dataclasses import dataclass
from importlib import resources
from typing import ContextManager, Optional, Union

from .errors import (
    EmptyMessageError,
    NoMetaReflectionYetError,
    RootHasNoEvolutionError,
)
from .graph import diff_nodes, get_lineage, get_node
from .model import (
    SECTION_ORDER,
    ChangeSet,
    ChatMessage,
    IdeaNode,
    MessageRole,
    Project,
    Section,
    SectionStatus,
)
from .provider import CompletionResult, PromptBundle, Provider, SamplingParams

# Prompt-budget knobs. Section digests keep whole drafts readable to the
# model without letting one section flood the context; diff excerpts are
# shorter because before/after appear in pairs.
SECTION_DIGEST_BUDGET = 1200
EXCERPT_BUDGET = 400
LINEAGE_DEPTH_CAP = 3
TRUNCATION_MARKER = "[truncated]"
EMPTY_SECTION_MARKER = "(not yet written)"

ROLE_REFLECTION = "Reflection"
ROLE_META_REFLECTION = "MetaReflection"

SECTION_ROLE_NAMES: dict[Section, str] = {
    s: s.title.replace(" ", "") for s in SECTION_ORDER
}
ROLE_NAMES: tuple[str, ...] = tuple(SECTION_ROLE_NAMES.values()) + (
    ROLE_REFLECTION,
    ROLE_META_REFLECTION,
)

_PLACEHOLDER_RE = re.compile(
    r"\{(topic|section_content|all_sections_digest|changeset_digest)\}"
)
_ANY_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")


@dataclass(frozen=True)
class AgentRole:
    name: str
    system_template: str


class AgentRoles:
    """Registry of the nine roles, keyed by name."""

    def __init__(self, roles: dict[str, AgentRole]):
        missing = [n for n in ROLE_NAMES if n not in roles]
        extra = [n for n in roles if n not in ROLE_NAMES]
        if missing or extra:
            raise ValueError(
                f"role registry must define exactly {list(ROLE_NAMES)}; "
                f"missing={missing} unexpected={extra}"
            )
        for role in roles.values():
            _validate_template(role)
        self._roles = dict(roles)

    def __getitem__(self, name: str) -> AgentRole:
        return self._roles[name]

    def resolve(self, section: Section) -> AgentRole:
        return self._roles[SECTION_ROLE_NAMES[section]]

    @property
    def reflection(self) -> AgentRole:
        return self._roles[ROLE_REFLECTION]

    @property
    def meta_reflection(self) -> AgentRole:
        return self._roles[ROLE_META_REFLECTION]


def _validate_template(role: AgentRole) -> None:
    if not role.system_template.strip():
        raise ValueError(f"role {role.name}: template must be non-empty")
    known = set(_PLACEHOLDER_RE.findall(role.system_template))
    every = set(_ANY_PLACEHOLDER_RE.findall(role.system_template))
    stray = every - known
    if stray:
        raise ValueError(
            f"role {role.name}: unknown placeholders {sorted(stray)}; "
            "allowed: topic, section_content, all_sections_digest, changeset_digest"
        )


def load_agent_roles(path: Optional[str] = None) -> AgentRoles:
    """Load the role registry from a JSON config file, or the packaged
    defaults when no path is given."""
    if path is None:
        raw = (
            resources.files("meflex.config")
            .joinpath("agent_roles.json")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    data = json.loads(raw)
    roles = {
        entry["name"]: AgentRole(name=entry["name"], system_template=entry["template"])
        for entry in data["roles"]
    }
    return AgentRoles(roles)


def resolve_agent(roles: AgentRoles, section: Section) -> AgentRole:
    """Deterministic section-to-agent routing."""
    return roles.resolve(section)


# ---------------------------------------------------------------------------
# Prompt assembly
# ---------------------------------------------------------------------------

def render_template(template: str, values: dict[str, str]) -> str:
    """Substitute the known placeholders in one pass.

    Single-pass substitution means placeholder-looking text inside the
    substituted values is never itself expanded.
    """

    def repl(match: re.Match[str]) -> str:
        return values[match.group(1)]

    return _PLACEHOLDER_RE.sub(repl, template)


def _truncate(text: str, budget: int) -> str:
    if len(text) <= budget:
        return text
    return text[:budget] + TRUNCATION_MARKER


def _topic_text(project: Project) -> str:
    return project.topic if project.topic else "(not specified)"


def _section_content_text(node: IdeaNode, section: Section) -> str:
    content = node.sections[section].content
    return content if content else EMPTY_SECTION_MARKER


def all_sections_digest(node: IdeaNode) -> str:
    """Fixed-order digest of the non-empty sections, each capped at the
    per-section character budget."""
    lines = []
    for section in SECTION_ORDER:
        content = node.sections[section].content
        if not content:
            continue
        lines.append(f"{section.title}: {_truncate(content, SECTION_DIGEST_BUDGET)}")
    if not lines:
        return "(no sections drafted yet)"
    return "\n".join(lines)


def changeset_digest(project: Project, node: IdeaNode, changeset: ChangeSet) -> str:
    """Render a diff for the MetaReflection prompt.

    Changed sections use a fixed machine-checkable line shape
    ("- section: <tag> | change: <kind>") so the digest's section set can be
    compared against the diff itself. The trailing lineage context
    deliberately avoids section names for the same reason; it only sketches
    how far the idea has come.
    """
    lines: list[str] = []
    if changeset.is_empty:
        lines.append("No section content changed between the two versions.")
    else:
        lines.append("Changed sections (previous version -> this version):")
        for change in changeset.changes:
            lines.append(f"- section: {change.section.tag} | change: {change.kind.value}")
            lines.append(f"  before: {_excerpt(change.before)}")
            lines.append(f"  after: {_excerpt(change.after)}")
    lines.append("")
    lines.append(_lineage_context(project, node))
    return "\n".join(lines)


def _excerpt(text: str) -> str:
    if text == "":
        return "(empty)"
    return _truncate(text.replace("\n", " "), EXCERPT_BUDGET)


def _lineage_context(project: Project, node: IdeaNode) -> str:
    """Counts-only sketch of the nearest ancestors, newest first."""
    chain = get_lineage(project, node.id)
    ancestors = chain[:-1][-LINEAGE_DEPTH_CAP:]
    if not ancestors:
        return "Lineage context: this version extends the original idea directly."
    lines = ["Lineage context (nearest ancestor first):"]
    for nid in reversed(ancestors):
        ancestor = project.nodes[nid]
        drafted = sum(
            1
            for s in SECTION_ORDER
            if ancestor.sections[s].status is not SectionStatus.EMPTY
        )
        done = sum(
            1
            for s in SECTION_ORDER
            if ancestor.sections[s].status is SectionStatus.DONE
        )
        lines.append(
            f"- {ancestor.extension_kind.value} version with {drafted} of 7 "
            f"sections drafted ({done} done)"
        )
    return "\n".join(lines)


def _thread_history(messages: list[ChatMessage]) -> list[tuple[str, str]]:
    """Flatten a chat thread to alternating user/assistant turns.

    Reflection questions are spoken by the system too, so each one is folded
    into the assistant turn it follows; the wire protocol only knows two
    conversational roles.
    """
    history: list[tuple[str, str]] = []
    for msg in messages:
        if msg.role is MessageRole.USER:
            history.append(("user", msg.content))
        elif msg.role is MessageRole.ASSISTANT:
            history.append(("assistant", msg.content))
        else:  # reflection question
            if history and history[-1][0] == "assistant":
                merged = history[-1][1] + "\n\n" + msg.content
                history[-1] = ("assistant", merged)
            else:
                history.append(("assistant", msg.content))
    return history


def build_section_prompt(
    role: AgentRole,
    project: Project,
    node: IdeaNode,
    section: Section,
    user_msg: str,
    sampling: Optional[SamplingParams] = None,
) -> PromptBundle:
    if not user_msg:
        raise EmptyMessageError()
    system = render_template(
        role.system_template,
        {
            "topic": _topic_text(project),
            "section_content": _section_content_text(node, section),
            "all_sections_digest": all_sections_digest(node),
        },
    )
    return PromptBundle(
        system=system,
        history=_thread_history(node.chat_threads.get(section, [])),
        user=user_msg,
        sampling=sampling or SamplingParams(),
    )


def build_reflection_prompt(
    roles: AgentRoles,
    project: Project,
    node: IdeaNode,
    section: Section,
    user_msg: str,
    assistant_reply: str,
    sampling: Optional[SamplingParams] = None,
) -> PromptBundle:
    system = render_template(
        roles.reflection.system_template,
        {
            "topic": _topic_text(project),
            "section_content": _section_content_text(node, section),
            "all_sections_digest": all_sections_digest(node),
        },
    )
    user = (
        f"The user said:\n{user_msg}\n\n"
        f"The assistant replied:\n{assistant_reply}\n\n"
        "Ask your one open-ended question now."
    )
    return PromptBundle(
        system=system, history=[], user=user, sampling=sampling or SamplingParams()
    )


def build_meta_reflection_prompt(
    roles: AgentRoles,
    project: Project,
    node: IdeaNode,
    changeset: ChangeSet,
    sampling: Optional[SamplingParams] = None,
    current_text: Optional[str] = None,
    history: Optional[list[tuple[str, str]]] = None,
    user_msg: Optional[str] = None,
) -> PromptBundle:
    system = render_template(
        roles.meta_reflection.system_template,
        {
            "topic": _topic_text(project),
            "changeset_digest": changeset_digest(project, node, changeset),
        },
    )
    if current_text is not None:
        system += f"\n\nCurrent meta-reflection for this version:\n{current_text}"
    return PromptBundle(
        system=system,
        history=history or [],
        user=user_msg or "Summarize how the thinking evolved in this version.",
        sampling=sampling or SamplingParams(),
    )


# ---------------------------------------------------------------------------
# Chat operations
# ---------------------------------------------------------------------------

_NULL_LOCK: ContextManager[None] = nullcontext()

LockLike = Union[threading.Lock, threading.RLock, ContextManager[None]]


def section_chat(
    project: Project,
    node_id: str,
    section: Section,
    user_msg: str,
    provider: Provider,
    roles: AgentRoles,
    *,
    sampling: Optional[SamplingParams] = None,
    state_lock: Optional[LockLike] = None,
) -> tuple[ChatMessage, ChatMessage]:
    """One chat turn against a section's agent, followed by a reflection
    question from the Reflection agent.

    Two provider calls run in order; the three resulting messages (user,
    assistant, reflection question) are appended to the node's thread only
    after both calls succeed, so a provider failure leaves the thread
    exactly as it was. ``state_lock``, when given, guards the reads used for
    prompt assembly and the final append; it is NOT held across the provider
    calls.
    """
    if not user_msg:
        raise EmptyMessageError()
    lock = state_lock if state_lock is not None else _NULL_LOCK

    with lock:
        node = get_node(project, node_id)
        agent = roles.resolve(section)
        bundle = build_section_prompt(agent, project, node, section, user_msg, sampling)

    assistant_result = provider.complete(bundle)

    with lock:
        node = get_node(project, node_id)
        reflection_bundle = build_reflection_prompt(
            roles, project, node, section, user_msg, assistant_result.content, sampling
        )

    reflection_result = provider.complete(reflection_bundle)

    user_message = ChatMessage(role=MessageRole.USER, content=user_msg)
    assistant_message = ChatMessage(
        role=MessageRole.ASSISTANT, content=assistant_result.content
    )
    reflection_message = ChatMessage(
        role=MessageRole.REFLECTION_QUESTION, content=reflection_result.content
    )
    with lock:
        node = get_node(project, node_id)
        node.thread_for(section).extend(
            [user_message, assistant_message, reflection_message]
        )
    return assistant_message, reflection_message


def generate_meta_reflection(
    project: Project,
    node_id: str,
    provider: Provider,
    roles: AgentRoles,
    *,
    sampling: Optional[SamplingParams] = None,
    state_lock: Optional[LockLike] = None,
) -> str:
    """Produce (or regenerate) the node's evolution summary from the diff
    against its parent. Root nodes have no earlier version to compare."""
    lock = state_lock if state_lock is not None else _NULL_LOCK
    with lock:
        node = get_node(project, node_id)
        if node.parent_id is None:
            raise RootHasNoEvolutionError()
        changeset = diff_nodes(project, node.parent_id, node.id)
        bundle = build_meta_reflection_prompt(roles, project, node, changeset, sampling)

    result = provider.complete(bundle)

    with lock:
        node = get_node(project, node_id)
        node.meta_reflection = result.content
    return result.content


def refine_meta_reflection(
    project: Project,
    node_id: str,
    user_msg: str,
    provider: Provider,
    roles: AgentRoles,
    *,
    sampling: Optional[SamplingParams] = None,
    state_lock: Optional[LockLike] = None,
) -> str:
    """Dialogue turn over an existing meta-reflection: the reply replaces
    the summary and the exchange is recorded on the node's meta thread."""
    if not user_msg:
        raise EmptyMessageError()
    lock = state_lock if state_lock is not None else _NULL_LOCK
    with lock:
        node = get_node(project, node_id)
        if node.meta_reflection is None:
            raise NoMetaReflectionYetError()
        if node.parent_id is None:
            raise RootHasNoEvolutionError()
        changeset = diff_nodes(project, node.parent_id, node.id)
        bundle = build_meta_reflection_prompt(
            roles,
            project,
            node,
            changeset,
            sampling,
            current_text=node.meta_reflection,
            history=_thread_history(node.meta_thread),
            user_msg=user_msg,
        )

    result: CompletionResult = provider.complete(bundle)

    with lock:
        node = get_node(project, node_id)
        node.meta_thread.extend(
            [
                ChatMessage(role=MessageRole.USER, content=user_msg),
                ChatMessage(role=MessageRole.ASSISTANT, content=result.content),
            ]
        )
        node.meta_reflection = result.content
    return result.content
