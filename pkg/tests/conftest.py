"""Shared fixtures, independent oracles, and acceptance reporting.

The oracles here deliberately re-derive expected results by brute force
(iterated parent walks, per-section string comparison, full enumeration)
so the production implementations are checked against something that does
not share their code paths.
"""
from __future__ import annotations

import random
import socket
from contextlib import contextmanager

import pytest

from meflex import (
    ExtensionKind,
    IdeaNode,
    Project,
    Section,
    SectionStatus,
    create_project,
    create_root_node,
    edit_section,
    extend_node,
    load_agent_roles,
    set_section_done,
)

SECTIONS = list(Section)
KINDS = [ExtensionKind.REFINEMENT, ExtensionKind.BRANCH]

WORDS = (
    "queues riders compost subscription campus retrofit pilot margin churn "
    "loyalty deposit fleet solar permits mentors grant vertical kiosk api"
).split()


def random_text(rng: random.Random, max_words: int = 12) -> str:
    n = rng.randint(1, max_words)
    return " ".join(rng.choice(WORDS) for _ in range(n))


def random_edits(rng: random.Random, project: Project, node: IdeaNode, count: int) -> None:
    """Apply a few random section operations to one node."""
    for _ in range(count):
        section = rng.choice(SECTIONS)
        roll = rng.random()
        if roll < 0.6:
            edit_section(project, node.id, section, random_text(rng))
        elif roll < 0.75:
            edit_section(project, node.id, section, "")
        elif node.sections[section].content:
            set_section_done(project, node.id, section, rng.random() < 0.8)


def build_random_project(rng: random.Random, n_nodes: int = 6, edits_per_node: int = 4) -> Project:
    """A random forest with random content: the workhorse generator."""
    project = create_project(f"Project {rng.randint(0, 10**6)}", rng.choice(["eco apps", "travel planning", ""]))
    roots = max(1, rng.randint(1, 2))
    nodes: list[IdeaNode] = []
    for _ in range(roots):
        node = create_root_node(project, (rng.uniform(-500, 500), rng.uniform(-500, 500)))
        nodes.append(node)
    while len(nodes) < n_nodes:
        source = rng.choice(nodes)
        kind = rng.choice(KINDS)
        node = extend_node(project, source.id, kind, (rng.uniform(-500, 500), rng.uniform(-500, 500)))
        nodes.append(node)
    for node in nodes:
        random_edits(rng, project, node, rng.randint(0, edits_per_node))
    return project


# -- oracles (independent re-derivations) -----------------------------------

def lineage_oracle(project: Project, node_id: str) -> list[str]:
    """Reverse of iterated parent lookups; no shared code with get_lineage."""
    chain = []
    current = project.nodes[node_id]
    while True:
        chain.append(current.id)
        if current.parent_id is None:
            break
        current = project.nodes[current.parent_id]
    return list(reversed(chain))


def brute_force_diff(from_node: IdeaNode, to_node: IdeaNode) -> dict[Section, tuple[str, str, str]]:
    """Per-section string comparison oracle: section -> (kind, before, after)."""
    out: dict[Section, tuple[str, str, str]] = {}
    for section in SECTIONS:
        before = from_node.sections[section].content
        after = to_node.sections[section].content
        if before == after:
            continue
        if before == "" and after != "":
            kind = "added"
        elif before != "" and after == "":
            kind = "removed"
        else:
            kind = "modified"
        out[section] = (kind, before, after)
    return out


def done_count_oracle(node: IdeaNode) -> int:
    return len([s for s in SECTIONS if node.sections[s].status is SectionStatus.DONE])


def assert_forest(project: Project) -> None:
    """Traversal oracle: acyclic parent links, every node reaches a root."""
    for node in project.nodes.values():
        seen = set()
        current = node
        while current.parent_id is not None:
            assert current.id not in seen, "cycle detected"
            seen.add(current.id)
            assert current.parent_id in project.nodes, "dangling parent"
            current = project.nodes[current.parent_id]
        assert current.extension_kind is ExtensionKind.ROOT


@contextmanager
def no_network():
    """Fail the test if anything attempts a socket connection."""
    real_connect = socket.socket.connect

    def guard(self, address):  # pragma: no cover - failure path
        raise AssertionError(f"network egress attempted: {address!r}")

    socket.socket.connect = guard
    try:
        yield
    finally:
        socket.socket.connect = real_connect


# -- fixtures ----------------------------------------------------------------

@pytest.fixture(scope="session")
def roles():
    return load_agent_roles()


# -- acceptance reporting ------------------------------------------------------

_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _acceptance_results[name] = report.outcome
    elif report.when == "setup" and report.outcome in ("skipped", "failed"):
        _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results.items():
        label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}.get(
            outcome, outcome.upper()
        )
        terminalreporter.write_line(f"[PRIMARY] {name}: {label}")
