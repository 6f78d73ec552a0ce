"""Idea-graph operations: project/node lifecycle, lineage, diffs, completion.

All functions operate on an in-memory Project and raise domain errors from
``meflex.errors``. Callers own locking; see the service layer for the
single-writer-per-project discipline.
"""
from __future__ import annotations

from .errors import (
    EmptySectionCannotBeDoneError,
    EmptyTitleError,
    InvalidKindError,
    NodeHasChildrenError,
    NotOnSameLineageError,
    UnknownNodeError,
)
from .model import (
    SECTION_ORDER,
    ChangeKind,
    ChangeSet,
    CompletionSummary,
    ExtensionKind,
    IdeaNode,
    Project,
    Section,
    SectionChange,
    SectionDraft,
    SectionStatus,
    new_id,
)


def create_project(title: str, topic: str) -> Project:
    """New empty project. Title is required; topic may be any text."""
    if not title.strip():
        raise EmptyTitleError()
    return Project(id=new_id(), title=title, topic=topic)


def get_node(project: Project, node_id: str) -> IdeaNode:
    try:
        return project.nodes[node_id]
    except KeyError:
        raise UnknownNodeError(node_id) from None


def create_root_node(project: Project, position: tuple[float, float]) -> IdeaNode:
    """Add a fresh root card. Multiple roots per project are allowed."""
    node = IdeaNode(
        id=new_id(),
        extension_kind=ExtensionKind.ROOT,
        position=(float(position[0]), float(position[1])),
    )
    project.nodes[node.id] = node
    return node


def extend_node(
    project: Project,
    source_id: str,
    kind: ExtensionKind,
    position: tuple[float, float],
) -> IdeaNode:
    """Create a child that inherits every section draft from the source.

    Content and status are copied; chat threads and the meta-reflection are
    not, because they belong to the specific version they were written
    against. The source node is untouched.
    """
    if kind is ExtensionKind.ROOT:
        raise InvalidKindError("extension kind must be 'refinement' or 'branch'")
    source = get_node(project, source_id)
    node = IdeaNode(
        id=new_id(),
        extension_kind=kind,
        parent_id=source.id,
        position=(float(position[0]), float(position[1])),
        sections={s: source.sections[s].copy_for_extension() for s in SECTION_ORDER},
    )
    project.nodes[node.id] = node
    return node


def edit_section(
    project: Project, node_id: str, section: Section, content: str
) -> SectionDraft:
    node = get_node(project, node_id)
    draft = node.sections[section]
    draft.apply_edit(content)
    return draft


def set_section_done(
    project: Project, node_id: str, section: Section, done: bool
) -> SectionDraft:
    node = get_node(project, node_id)
    draft = node.sections[section]
    if done:
        if draft.content == "":
            raise EmptySectionCannotBeDoneError()
        draft.status = SectionStatus.DONE
    elif draft.content != "":
        draft.status = SectionStatus.IN_PROGRESS
    # un-marking an empty section is a no-op: it is already Empty
    return draft


def completion_summary(node: IdeaNode) -> CompletionSummary:
    statuses = {s: node.sections[s].status for s in SECTION_ORDER}
    done = sum(1 for st in statuses.values() if st is SectionStatus.DONE)
    return CompletionSummary(statuses=statuses, done_count=done)


def get_lineage(project: Project, node_id: str) -> list[str]:
    """Node ids from the root down to (and including) the given node."""
    node = get_node(project, node_id)
    chain = [node.id]
    seen = {node.id}
    while node.parent_id is not None:
        node = get_node(project, node.parent_id)
        if node.id in seen:  # defensive; load validation forbids cycles
            raise NotOnSameLineageError("parent links form a cycle")
        seen.add(node.id)
        chain.append(node.id)
    chain.reverse()
    return chain


def is_ancestor_or_self(project: Project, ancestor_id: str, descendant_id: str) -> bool:
    return ancestor_id in get_lineage(project, descendant_id)


def diff_nodes(project: Project, from_id: str, to_id: str) -> ChangeSet:
    """Section-level diff, defined only from an ancestor to a descendant
    (or a node to itself). Whole-section text comparison, one change max
    per section; identical sections are omitted."""
    from_node = get_node(project, from_id)
    to_node = get_node(project, to_id)
    if not is_ancestor_or_self(project, from_id, to_id):
        raise NotOnSameLineageError(
            f"{from_id} is not an ancestor of {to_id} (diffs run along a lineage)"
        )
    changes: list[SectionChange] = []
    for section in SECTION_ORDER:
        before = from_node.sections[section].content
        after = to_node.sections[section].content
        if before == after:
            continue
        if before == "":
            kind = ChangeKind.ADDED
        elif after == "":
            kind = ChangeKind.REMOVED
        else:
            kind = ChangeKind.MODIFIED
        changes.append(SectionChange(section=section, kind=kind, before=before, after=after))
    return ChangeSet(from_node=from_id, to_node=to_id, changes=changes)


def list_children(project: Project, node_id: str) -> dict[ExtensionKind, list[str]]:
    """Children of a node partitioned by extension kind. The Root bucket
    exists for totality and is always empty."""
    get_node(project, node_id)
    buckets: dict[ExtensionKind, list[str]] = {k: [] for k in ExtensionKind}
    for node in project.nodes.values():
        if node.parent_id == node_id:
            buckets[node.extension_kind].append(node.id)
    return buckets


def move_node(
    project: Project, node_id: str, position: tuple[float, float]
) -> IdeaNode:
    node = get_node(project, node_id)
    node.position = (float(position[0]), float(position[1]))
    return node


def delete_node(project: Project, node_id: str) -> None:
    """Remove a leaf node. Interior nodes are protected: deleting them would
    orphan lineage history."""
    get_node(project, node_id)
    for node in project.nodes.values():
        if node.parent_id == node_id:
            raise NodeHasChildrenError(node_id)
    del project.nodes[node_id]


def validate_project(project: Project) -> None:
    """Re-check structural invariants; raises ValueError on violation.

    Used by the persistence layer after deserializing untrusted files.
    Node-local invariants (section totality, root/parent consistency,
    draft status machine) are enforced by the dataclass constructors, so
    this only needs the cross-node checks: parents resolve, links are
    acyclic, every node reaches a root.
    """
    for nid, node in project.nodes.items():
        if nid != node.id:
            raise ValueError(f"node keyed as {nid} carries id {node.id}")
        if node.parent_id is not None and node.parent_id not in project.nodes:
            raise ValueError(f"node {nid} references missing parent {node.parent_id}")
    limit = len(project.nodes)
    for node in project.nodes.values():
        current = node
        steps = 0
        while current.parent_id is not None:
            current = project.nodes[current.parent_id]
            steps += 1
            if steps > limit:
                raise ValueError("parent links form a cycle")
        if current.extension_kind is not ExtensionKind.ROOT:
            raise ValueError(f"lineage of {node.id} ends at a non-root node")
