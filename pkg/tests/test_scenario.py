"""Scenario parsing, validation, round-trip property, and drafting."""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import MINIMAL_DOC
from teamsim.errors import AdapterError, ScenarioSemanticError, ScenarioSyntaxError
from teamsim.scenario import (
    EchoGeneratorBackend,
    TemplateGeneratorBackend,
    builtin_scenario_text,
    generate_scenario_draft,
    parse_scenario,
    scenario_to_doc,
    serialize_scenario,
    validate_scenario,
)
from teamsim.scenario.model import (
    AgentProfileSpec,
    EntitySpec,
    EnvSpec,
    GoalSpec,
    Scenario,
)
from teamsim.evaluation.predicate import AllEntitiesInRegion, Constant

FIXTURES = Path(__file__).parent / "fixtures"


def test_minimal_document_parses_with_defaults():
    s = parse_scenario(MINIMAL_DOC)
    assert s.id == "minimal"
    assert s.max_steps == 10
    assert s.members[0].trust_level == "unspecified"
    assert s.members[0].demographics == {}
    assert s.goal.predicate == Constant(False)
    assert validate_scenario(s) == []


def test_only_the_five_core_fields_are_mandatory():
    # env, members, goal, max_steps, seed are required; id and the rest default
    doc = MINIMAL_DOC.replace("id: minimal\n", "")
    s = parse_scenario(doc)
    assert s.id == "untitled-scenario"
    for required in ("seed: 0", "max_steps: 10"):
        with pytest.raises(ScenarioSemanticError):
            parse_scenario(MINIMAL_DOC.replace(required + "\n", ""))


def test_duplicate_member_names_rejected_with_path():
    doc = MINIMAL_DOC.replace(
        "members:\n  - name: Scout\n    role: Searcher",
        "members:\n  - name: medic\n    role: A\n  - name: medic\n    role: B",
    )
    with pytest.raises(ScenarioSemanticError) as err:
        parse_scenario(doc)
    assert err.value.path == "members[1].name"
    assert "duplicate" in str(err.value)


def test_bundled_rescue_has_three_roles():
    s = parse_scenario(builtin_scenario_text())
    assert [m.role for m in s.members] == ["Transporter", "Medic", "Engineer"]
    assert s.max_steps == 2000
    assert validate_scenario(s) == []


def test_unknown_field_rejected():
    doc = MINIMAL_DOC + "extra_field: 1\n"
    with pytest.raises(ScenarioSemanticError) as err:
        parse_scenario(doc)
    assert "unknown field" in str(err.value)


def test_syntax_error_carries_line_and_column():
    with pytest.raises(ScenarioSyntaxError) as err:
        parse_scenario((FIXTURES / "unparseable.scn").read_text())
    assert err.value.line is not None


def test_missing_seed_rejected():
    doc = MINIMAL_DOC.replace("seed: 0\n", "")
    with pytest.raises(ScenarioSemanticError) as err:
        parse_scenario(doc)
    assert "seed" in str(err.value)


def test_insufficient_area_diagnostic():
    s = parse_scenario((FIXTURES / "broken.scn").read_text())
    diagnostics = validate_scenario(s)
    errors = [d for d in diagnostics if d.severity == "error"]
    assert any("insufficient area" in d.message for d in errors)
    assert any(d.path == "env.num_regions" for d in errors)


def test_unknown_region_hint_diagnostic():
    s = parse_scenario((FIXTURES / "broken.scn").read_text())
    diagnostics = validate_scenario(s)
    assert any("unknown region hint" in d.message for d in diagnostics)
    assert any(d.path == "entities[0].region" for d in diagnostics)


def test_diagnostic_paths_resolve_to_document_fields():
    s = parse_scenario((FIXTURES / "broken.scn").read_text())
    doc = scenario_to_doc(s)
    for diag in validate_scenario(s):
        node = doc
        for token in diag.path.replace("]", "").split("."):
            if "[" in token:
                key, idx = token.split("[")
                node = node[key][int(idx)]
            else:
                assert token in node, f"{diag.path} does not resolve"
                node = node[token]


def test_validation_is_pure():
    s = parse_scenario((FIXTURES / "broken.scn").read_text())
    assert validate_scenario(s) == validate_scenario(s)


# --- round-trip property -------------------------------------------------------

_names = st.text(alphabet="abcdefghij", min_size=1, max_size=8)


@st.composite
def scenarios(draw):
    width = draw(st.integers(4, 40))
    height = draw(st.integers(4, 40))
    member_names = draw(st.lists(_names, min_size=1, max_size=4, unique=True))
    entity_names = draw(st.lists(_names, min_size=0, max_size=4, unique=True))
    members = tuple(
        AgentProfileSpec(
            name=name,
            role=draw(st.sampled_from(["Searcher", "Medic", "Engineer"])),
            personality={"grit": draw(st.floats(0, 1, allow_nan=False))},
            skills=tuple(draw(st.lists(_names, max_size=2))),
            backstory=tuple(draw(st.lists(_names, max_size=2))),
            trust_level=draw(st.sampled_from(["low", "high", "unspecified"])),
        )
        for name in member_names
    )
    entities = tuple(
        EntitySpec(
            name=name,
            kind=draw(st.sampled_from(["victim", "obstacle", "beacon"])),
            interactive=draw(st.booleans()),
            attributes={"severity": "critical"} if draw(st.booleans()) else {},
        )
        for name in entity_names
    )
    predicate = Constant(draw(st.booleans()))
    if entities and draw(st.booleans()):
        predicate = AllEntitiesInRegion(kind=entities[0].kind, region="Room-0")
    return Scenario(
        id=draw(_names),
        title=draw(_names),
        description=draw(_names),
        env_spec=EnvSpec(width=width, height=height, num_regions=draw(st.integers(1, 4))),
        members=members,
        entities=entities,
        goal=GoalSpec(statement=draw(_names), predicate=predicate),
        max_steps=draw(st.integers(1, 5000)),
        seed=draw(st.integers(0, 2**64 - 1)),
    )


@given(scenarios())
@settings(max_examples=60, deadline=None)
def test_parse_serialize_roundtrip(scenario):
    assert parse_scenario(serialize_scenario(scenario)) == scenario


# --- drafting -------------------------------------------------------------------


def test_echo_backend_returns_fixture_scenario():
    backend = EchoGeneratorBackend(builtin_scenario_text())
    draft = generate_scenario_draft("anything", backend)
    assert draft.id == "rescue-reference"


def test_malformed_drafts_exhaust_repairs_to_adapter_error():
    backend = EchoGeneratorBackend("not: [valid")
    with pytest.raises(AdapterError):
        generate_scenario_draft("anything", backend, repair_limit=1)


def test_semantically_invalid_drafts_raise_semantic_error():
    backend = EchoGeneratorBackend((FIXTURES / "broken.scn").read_text())
    with pytest.raises(ScenarioSemanticError):
        generate_scenario_draft("anything", backend, repair_limit=1)


def test_template_backend_reads_counts_from_prompt():
    draft = generate_scenario_draft("two searchers, two missing people", TemplateGeneratorBackend())
    assert len(draft.members) == 2
    assert sum(1 for e in draft.entities if e.kind == "victim") == 2
    assert validate_scenario(draft) == []


def test_repair_feedback_reaches_backend():
    calls = []

    class FlakyBackend:
        def draft(self, prompt, feedback):
            calls.append(list(feedback))
            if len(calls) == 1:
                return "bad: [yaml"
            return builtin_scenario_text()

    draft = generate_scenario_draft("x", FlakyBackend(), repair_limit=1)
    assert draft.id == "rescue-reference"
    assert calls[0] == []
    assert calls[1] and "malformed" in calls[1][0]
