"""Agent framework tests: routing, prompt assembly, section chat with
trailing reflection questions, and diff-grounded meta-reflection."""
from __future__ import annotations

import json
import re

import pytest

from meflex import (
    EmptyMessageError,
    ExtensionKind,
    NoMetaReflectionYetError,
    RateLimitedError,
    RootHasNoEvolutionError,
    Section,
    create_project,
    create_root_node,
    edit_section,
    extend_node,
    generate_meta_reflection,
    refine_meta_reflection,
    resolve_agent,
    scripted_provider,
    section_chat,
)
from meflex.agents import (
    EMPTY_SECTION_MARKER,
    SECTION_DIGEST_BUDGET,
    TRUNCATION_MARKER,
    AgentRole,
    AgentRoles,
    all_sections_digest,
    build_section_prompt,
    load_agent_roles,
    render_template,
)
from meflex.model import MessageRole

# One recognizable phrase per section role; routing must hit all of them.
DIRECTIVE_SNIPPETS = {
    Section.USER_PAIN_POINTS: "core pain points",
    Section.MARKET_ANALYSIS: "market size, growth trends",
    Section.PRODUCT_OVERVIEW: "value proposition, key features",
    Section.COMPETITIVE_ANALYSIS: "main competitors",
    Section.FEASIBILITY_ANALYSIS: "technical, operational, and financial feasibility",
    Section.FUNDING_PLAN: "funding needs, investor profile",
    Section.TEAM: "team strengths, member roles",
}

PLACEHOLDER_RE = re.compile(
    r"\{(topic|section_content|all_sections_digest|changeset_digest)\}"
)

SECTION_LINE_RE = re.compile(r"^- section: (\w+) \| change: (\w+)$", re.MULTILINE)


def make_graph():
    project = create_project("Eco App", "eco apps")
    root = create_root_node(project, (0, 0))
    return project, root


class TestRouting:
    def test_each_section_resolves_to_its_directive(self, roles):
        for section, snippet in DIRECTIVE_SNIPPETS.items():
            role = resolve_agent(roles, section)
            assert snippet in role.system_template, section

    def test_seven_templates_pairwise_distinct(self, roles):
        templates = [resolve_agent(roles, s).system_template for s in Section]
        assert len(set(templates)) == 7

    def test_reflection_and_meta_roles(self, roles):
        assert "asking open-ended questions" in roles.reflection.system_template
        assert "cognitive shift between idea versions" in roles.meta_reflection.system_template

    def test_routing_is_deterministic(self, roles):
        for section in Section:
            assert resolve_agent(roles, section) is resolve_agent(roles, section)


class TestRoleLoading:
    def test_missing_role_rejected(self, tmp_path):
        config = {"roles": [{"name": "Reflection", "template": "x {topic}"}]}
        path = tmp_path / "roles.json"
        path.write_text(json.dumps(config))
        with pytest.raises(ValueError, match="missing"):
            load_agent_roles(str(path))

    def test_unknown_role_rejected(self):
        with pytest.raises(ValueError):
            AgentRoles({"Mystery": AgentRole("Mystery", "hi")})

    def test_stray_placeholder_rejected(self, tmp_path):
        default = load_agent_roles()
        config = {
            "roles": [
                {"name": name, "template": default[name].system_template}
                for name in (
                    "UserPainPoints", "MarketAnalysis", "ProductOverview",
                    "CompetitiveAnalysis", "FeasibilityAnalysis", "FundingPlan",
                    "Team", "Reflection", "MetaReflection",
                )
            ]
        }
        config["roles"][0]["template"] += " {surprise}"
        path = tmp_path / "roles.json"
        path.write_text(json.dumps(config))
        with pytest.raises(ValueError, match="surprise"):
            load_agent_roles(str(path))

    def test_custom_config_roundtrip(self, tmp_path, roles):
        config = {
            "roles": [
                {"name": name, "template": roles[name].system_template + " Custom tail."}
                for name in (
                    "UserPainPoints", "MarketAnalysis", "ProductOverview",
                    "CompetitiveAnalysis", "FeasibilityAnalysis", "FundingPlan",
                    "Team", "Reflection", "MetaReflection",
                )
            ]
        }
        path = tmp_path / "roles.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        loaded = load_agent_roles(str(path))
        assert loaded["Team"].system_template.endswith("Custom tail.")


class TestPromptAssembly:
    def test_empty_section_marker(self, roles):
        project, root = make_graph()
        role = resolve_agent(roles, Section.MARKET_ANALYSIS)
        bundle = build_section_prompt(role, project, root, Section.MARKET_ANALYSIS, "where do I start?")
        assert EMPTY_SECTION_MARKER in bundle.system
        assert PLACEHOLDER_RE.search(bundle.system) is None

    def test_topic_and_content_substituted(self, roles):
        project, root = make_graph()
        edit_section(project, root.id, Section.TEAM, "two engineers, one designer")
        role = resolve_agent(roles, Section.TEAM)
        bundle = build_section_prompt(role, project, root, Section.TEAM, "who else do we need?")
        assert "eco apps" in bundle.system
        assert "two engineers, one designer" in bundle.system

    def test_history_passed_through_in_order(self, roles):
        project, root = make_graph()
        provider = scripted_provider(["A1", "Q1"])
        section_chat(project, root.id, Section.TEAM, "first", provider, roles)
        role = resolve_agent(roles, Section.TEAM)
        bundle = build_section_prompt(role, project, root, Section.TEAM, "second")
        assert bundle.history[0] == ("user", "first")
        assert bundle.history[1][0] == "assistant"
        assert "A1" in bundle.history[1][1]
        # the reflection question rides on the assistant turn so roles alternate
        assert "Q1" in bundle.history[1][1]
        assert len(bundle.history) == 2

    def test_empty_message_rejected(self, roles):
        project, root = make_graph()
        role = resolve_agent(roles, Section.TEAM)
        with pytest.raises(EmptyMessageError):
            build_section_prompt(role, project, root, Section.TEAM, "")

    def test_digest_lists_nonempty_sections_in_order(self):
        project, root = make_graph()
        edit_section(project, root.id, Section.TEAM, "crew")
        edit_section(project, root.id, Section.USER_PAIN_POINTS, "queues")
        digest = all_sections_digest(root)
        lines = digest.splitlines()
        assert lines[0].startswith("User Pain Points:")
        assert lines[1].startswith("Team:")

    def test_digest_truncates_long_sections(self):
        project, root = make_graph()
        edit_section(project, root.id, Section.TEAM, "x" * (SECTION_DIGEST_BUDGET + 50))
        digest = all_sections_digest(root)
        assert TRUNCATION_MARKER in digest
        assert "x" * (SECTION_DIGEST_BUDGET + 1) not in digest

    def test_digest_of_blank_node(self):
        project, root = make_graph()
        assert all_sections_digest(root) == "(no sections drafted yet)"

    def test_single_pass_substitution_does_not_rescan_values(self):
        rendered = render_template(
            "topic: {topic}", {"topic": "braces {section_content} stay literal"}
        )
        assert rendered == "topic: braces {section_content} stay literal"


class TestSectionChat:
    def test_thread_gains_three_messages(self, roles):
        project, root = make_graph()
        provider = scripted_provider(["A1", "Q1"])
        assistant, reflection = section_chat(
            project, root.id, Section.USER_PAIN_POINTS, "hello", provider, roles
        )
        assert assistant.content == "A1"
        assert reflection.content == "Q1"
        thread = root.chat_threads[Section.USER_PAIN_POINTS]
        assert [m.role for m in thread] == [
            MessageRole.USER,
            MessageRole.ASSISTANT,
            MessageRole.REFLECTION_QUESTION,
        ]
        assert [m.content for m in thread] == ["hello", "A1", "Q1"]

    def test_two_provider_calls_in_order(self, roles):
        project, root = make_graph()
        provider = scripted_provider(["A1", "Q1"])
        section_chat(project, root.id, Section.TEAM, "hi", provider, roles)
        assert len(provider.calls) == 2
        section_bundle, reflection_bundle = provider.calls
        assert "team strengths, member roles" in section_bundle.system
        assert "asking open-ended questions" in reflection_bundle.system

    def test_reflection_prompt_carries_exchange(self, roles):
        project, root = make_graph()
        edit_section(project, root.id, Section.TEAM, "a crew of three")
        provider = scripted_provider(["the reply", "the question"])
        section_chat(project, root.id, Section.TEAM, "my message", provider, roles)
        reflection_bundle = provider.calls[1]
        assert "a crew of three" in reflection_bundle.system
        assert "my message" in reflection_bundle.user
        assert "the reply" in reflection_bundle.user

    def test_failure_on_first_call_leaves_thread_untouched(self, roles):
        project, root = make_graph()
        provider = scripted_provider([RateLimitedError("busy")])
        before = json.dumps(root.to_dict(), sort_keys=True)
        with pytest.raises(RateLimitedError):
            section_chat(project, root.id, Section.TEAM, "hi", provider, roles)
        assert json.dumps(root.to_dict(), sort_keys=True) == before

    def test_failure_on_second_call_leaves_thread_untouched(self, roles):
        project, root = make_graph()
        provider = scripted_provider(["A1", RateLimitedError("busy")])
        before = json.dumps(root.to_dict(), sort_keys=True)
        with pytest.raises(RateLimitedError):
            section_chat(project, root.id, Section.TEAM, "hi", provider, roles)
        assert json.dumps(root.to_dict(), sort_keys=True) == before

    def test_empty_message_rejected(self, roles):
        project, root = make_graph()
        provider = scripted_provider([])
        with pytest.raises(EmptyMessageError):
            section_chat(project, root.id, Section.TEAM, "", provider, roles)
        assert provider.calls == []


class TestMetaReflection:
    def test_root_has_no_evolution(self, roles):
        project, root = make_graph()
        with pytest.raises(RootHasNoEvolutionError):
            generate_meta_reflection(project, root.id, scripted_provider(["x"]), roles)

    def test_digest_names_exactly_the_changed_sections(self, roles):
        project, root = make_graph()
        edit_section(project, root.id, Section.PRODUCT_OVERVIEW, "an app")
        child = extend_node(project, root.id, ExtensionKind.REFINEMENT, (160, 0))
        edit_section(project, child.id, Section.PRODUCT_OVERVIEW, "an app with sharing")
        provider = scripted_provider(["summary"])
        generate_meta_reflection(project, child.id, provider, roles)
        system = provider.calls[0].system
        named = {m[0] for m in SECTION_LINE_RE.findall(system)}
        assert named == {Section.PRODUCT_OVERVIEW.tag}

    def test_stores_and_returns_text(self, roles):
        project, root = make_graph()
        child = extend_node(project, root.id, ExtensionKind.BRANCH, (0, 150))
        edit_section(project, child.id, Section.TEAM, "new hire")
        text = generate_meta_reflection(project, child.id, scripted_provider(["v1"]), roles)
        assert text == "v1"
        assert child.meta_reflection == "v1"

    def test_regeneration_overwrites(self, roles):
        project, root = make_graph()
        child = extend_node(project, root.id, ExtensionKind.BRANCH, (0, 150))
        generate_meta_reflection(project, child.id, scripted_provider(["v1"]), roles)
        generate_meta_reflection(project, child.id, scripted_provider(["v2"]), roles)
        assert child.meta_reflection == "v2"

    def test_identical_nodes_get_explicit_no_change_digest(self, roles):
        project, root = make_graph()
        child = extend_node(project, root.id, ExtensionKind.REFINEMENT, (160, 0))
        provider = scripted_provider(["nothing moved"])
        generate_meta_reflection(project, child.id, provider, roles)
        assert "No section content changed" in provider.calls[0].system

    def test_lineage_context_does_not_leak_section_names(self, roles):
        # grounding checks extract section tags from the digest, so the
        # lineage sketch must never mention them
        project, root = make_graph()
        edit_section(project, root.id, Section.FUNDING_PLAN, "grants")
        a = extend_node(project, root.id, ExtensionKind.REFINEMENT, (160, 0))
        b = extend_node(project, a.id, ExtensionKind.REFINEMENT, (320, 0))
        edit_section(project, b.id, Section.TEAM, "grew")
        provider = scripted_provider(["s"])
        generate_meta_reflection(project, b.id, provider, roles)
        system = provider.calls[0].system
        named = {m[0] for m in SECTION_LINE_RE.findall(system)}
        assert named == {Section.TEAM.tag}
        assert "Lineage context" in system

    def test_failure_leaves_meta_untouched(self, roles):
        project, root = make_graph()
        child = extend_node(project, root.id, ExtensionKind.BRANCH, (0, 150))
        generate_meta_reflection(project, child.id, scripted_provider(["v1"]), roles)
        before = json.dumps(child.to_dict(), sort_keys=True)
        with pytest.raises(RateLimitedError):
            generate_meta_reflection(
                project, child.id, scripted_provider([RateLimitedError("x")]), roles
            )
        assert json.dumps(child.to_dict(), sort_keys=True) == before


class TestRefineMetaReflection:
    def _extended(self, roles):
        project, root = make_graph()
        child = extend_node(project, root.id, ExtensionKind.BRANCH, (0, 150))
        edit_section(project, child.id, Section.TEAM, "added advisor")
        generate_meta_reflection(project, child.id, scripted_provider(["v1"]), roles)
        return project, child

    def test_requires_existing_meta(self, roles):
        project, root = make_graph()
        child = extend_node(project, root.id, ExtensionKind.BRANCH, (0, 150))
        with pytest.raises(NoMetaReflectionYetError):
            refine_meta_reflection(project, child.id, "why?", scripted_provider(["x"]), roles)

    def test_refinement_replaces_and_records(self, roles):
        project, child = self._extended(roles)
        text = refine_meta_reflection(
            project, child.id, "focus on the team angle", scripted_provider(["revised summary"]), roles
        )
        assert text == "revised summary"
        assert child.meta_reflection == "revised summary"
        assert [m.role for m in child.meta_thread] == [MessageRole.USER, MessageRole.ASSISTANT]

    def test_two_refinements_accumulate(self, roles):
        project, child = self._extended(roles)
        refine_meta_reflection(project, child.id, "first", scripted_provider(["r1"]), roles)
        refine_meta_reflection(project, child.id, "second", scripted_provider(["r2"]), roles)
        assert len(child.meta_thread) == 4
        assert child.meta_reflection == "r2"

    def test_seeded_with_current_text_and_history(self, roles):
        project, child = self._extended(roles)
        refine_meta_reflection(project, child.id, "first", scripted_provider(["r1"]), roles)
        provider = scripted_provider(["r2"])
        refine_meta_reflection(project, child.id, "second", provider, roles)
        bundle = provider.calls[0]
        assert "r1" in bundle.system  # current summary seeds the prompt
        assert ("user", "first") in bundle.history
        assert bundle.user == "second"

    def test_empty_message_rejected(self, roles):
        project, child = self._extended(roles)
        with pytest.raises(EmptyMessageError):
            refine_meta_reflection(project, child.id, "", scripted_provider(["x"]), roles)

    def test_failure_keeps_thread_and_text(self, roles):
        project, child = self._extended(roles)
        before = json.dumps(child.to_dict(), sort_keys=True)
        with pytest.raises(RateLimitedError):
            refine_meta_reflection(
                project, child.id, "hm", scripted_provider([RateLimitedError("x")]), roles
            )
        assert json.dumps(child.to_dict(), sort_keys=True) == before
