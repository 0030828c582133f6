"""Scenario document parsing and serialization.

The on-disk format is a single YAML document with ``format_version: 1`` at the
top level. Parsing is strict: unknown fields are rejected, every invariant
violation is reported with the path of the offending field, and the same
document always produces the same Scenario. ``serialize_scenario`` emits the
canonical full form; parse(serialize(s)) == s for every valid scenario.
"""

from __future__ import annotations

import yaml

from teamsim.errors import ScenarioSemanticError, ScenarioSyntaxError
from teamsim.evaluation.predicate import depth as predicate_depth
from teamsim.evaluation.predicate import MAX_DEPTH, predicate_from_doc, predicate_to_doc
from teamsim.scenario.model import (
    FORMAT_VERSION,
    AgentProfileSpec,
    EntitySpec,
    EnvSpec,
    GoalSpec,
    Scenario,
    TRUST_LEVELS,
)

_TOP_FIELDS = {
    "format_version",
    "id",
    "title",
    "description",
    "seed",
    "max_steps",
    "env",
    "members",
    "entities",
    "goal",
}
_ENV_FIELDS = {"width", "height", "num_regions", "region_names"}
_MEMBER_FIELDS = {"name", "role", "demographics", "personality", "skills", "backstory", "trust_level"}
_ENTITY_FIELDS = {"name", "kind", "interactive", "region", "attributes"}
_GOAL_FIELDS = {"statement", "predicate"}


def _fail(message: str, path: str):
    raise ScenarioSemanticError(message, path)


def _require(mapping: dict, field: str, path: str):
    if field not in mapping:
        _fail(f"missing required field '{field}'", path)
    return mapping[field]


def _reject_unknown(mapping: dict, allowed: set[str], path: str):
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        _fail(f"unknown field '{unknown[0]}'", f"{path}.{unknown[0]}" if path else unknown[0])


def _as_str(value, path: str, allow_empty: bool = True) -> str:
    if not isinstance(value, str):
        _fail("must be a string", path)
    if not allow_empty and not value.strip():
        _fail("must be non-empty", path)
    return value


def _as_int(value, path: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail("must be an integer", path)
    if minimum is not None and value < minimum:
        _fail(f"must be >= {minimum}", path)
    if maximum is not None and value > maximum:
        _fail(f"must be <= {maximum}", path)
    return value


def _as_str_map(value, path: str) -> dict[str, str]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        _fail("must be a mapping", path)
    out = {}
    for k, v in value.items():
        if not isinstance(k, str):
            _fail("keys must be strings", path)
        if not isinstance(v, str):
            _fail(f"value of '{k}' must be a string", f"{path}.{k}")
        out[k] = v
    return out


def _as_str_list(value, path: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        _fail("must be a list", path)
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, str):
            _fail("must be a string", f"{path}[{i}]")
        out.append(item)
    return tuple(out)


def _parse_env(doc, path: str) -> EnvSpec:
    if not isinstance(doc, dict):
        _fail("must be a mapping", path)
    _reject_unknown(doc, _ENV_FIELDS, path)
    width = _as_int(_require(doc, "width", path), f"{path}.width", minimum=4, maximum=254)
    height = _as_int(_require(doc, "height", path), f"{path}.height", minimum=4, maximum=254)
    num_regions = _as_int(_require(doc, "num_regions", path), f"{path}.num_regions", minimum=1)
    hints = _as_str_list(doc.get("region_names"), f"{path}.region_names")
    return EnvSpec(width=width, height=height, num_regions=num_regions, region_name_hints=hints)


def _parse_member(doc, path: str) -> AgentProfileSpec:
    if not isinstance(doc, dict):
        _fail("must be a mapping", path)
    _reject_unknown(doc, _MEMBER_FIELDS, path)
    name = _as_str(_require(doc, "name", path), f"{path}.name", allow_empty=False)
    role = _as_str(_require(doc, "role", path), f"{path}.role")
    personality = {}
    raw_personality = doc.get("personality") or {}
    if not isinstance(raw_personality, dict):
        _fail("must be a mapping", f"{path}.personality")
    for trait, score in raw_personality.items():
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            _fail(f"trait '{trait}' must be a number", f"{path}.personality.{trait}")
        score = float(score)
        if score != score or score in (float("inf"), float("-inf")):
            _fail(f"trait '{trait}' must be finite", f"{path}.personality.{trait}")
        personality[str(trait)] = score
    trust = doc.get("trust_level", "unspecified")
    if trust not in TRUST_LEVELS:
        _fail(f"must be one of {list(TRUST_LEVELS)}", f"{path}.trust_level")
    return AgentProfileSpec(
        name=name,
        role=role,
        demographics=_as_str_map(doc.get("demographics"), f"{path}.demographics"),
        personality=personality,
        skills=_as_str_list(doc.get("skills"), f"{path}.skills"),
        backstory=_as_str_list(doc.get("backstory"), f"{path}.backstory"),
        trust_level=trust,
    )


def _parse_entity(doc, path: str) -> EntitySpec:
    if not isinstance(doc, dict):
        _fail("must be a mapping", path)
    _reject_unknown(doc, _ENTITY_FIELDS, path)
    name = _as_str(_require(doc, "name", path), f"{path}.name", allow_empty=False)
    kind = _as_str(_require(doc, "kind", path), f"{path}.kind", allow_empty=False)
    interactive = doc.get("interactive", True)
    if not isinstance(interactive, bool):
        _fail("must be a boolean", f"{path}.interactive")
    region = doc.get("region")
    if region is not None:
        region = _as_str(region, f"{path}.region", allow_empty=False)
    return EntitySpec(
        name=name,
        kind=kind,
        interactive=interactive,
        region=region,
        attributes=_as_str_map(doc.get("attributes"), f"{path}.attributes"),
    )


def parse_scenario(document: str) -> Scenario:
    """Parse a scenario document; raises ScenarioSyntaxError for malformed
    markup and ScenarioSemanticError for invariant violations."""
    try:
        doc = yaml.safe_load(document)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ScenarioSyntaxError(
            exc.problem or "malformed document",
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from exc
    except yaml.YAMLError as exc:
        raise ScenarioSyntaxError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise ScenarioSyntaxError("document must be a top-level mapping")
    return scenario_from_doc(doc)


def scenario_from_doc(doc: dict) -> Scenario:
    _reject_unknown(doc, _TOP_FIELDS, "")
    version = _as_int(_require(doc, "format_version", "format_version"), "format_version")
    if version != FORMAT_VERSION:
        _fail(f"unsupported format_version {version} (expected {FORMAT_VERSION})", "format_version")
    scenario_id = _as_str(doc.get("id", "untitled-scenario"), "id", allow_empty=False)
    title = _as_str(doc.get("title", scenario_id), "title")
    description = _as_str(doc.get("description", ""), "description")
    seed = _as_int(_require(doc, "seed", "seed"), "seed", minimum=0, maximum=2**64 - 1)
    max_steps = _as_int(_require(doc, "max_steps", "max_steps"), "max_steps", minimum=1)
    env = _parse_env(_require(doc, "env", "env"), "env")

    raw_members = _require(doc, "members", "members")
    if not isinstance(raw_members, list) or not raw_members:
        _fail("must be a non-empty list", "members")
    members = []
    seen_names: set[str] = set()
    for i, m in enumerate(raw_members):
        member = _parse_member(m, f"members[{i}]")
        if member.name in seen_names:
            _fail(f"duplicate member name {member.name!r}", f"members[{i}].name")
        seen_names.add(member.name)
        members.append(member)

    raw_entities = doc.get("entities") or []
    if not isinstance(raw_entities, list):
        _fail("must be a list", "entities")
    entities = []
    seen_entities: set[str] = set()
    for i, e in enumerate(raw_entities):
        entity = _parse_entity(e, f"entities[{i}]")
        if entity.name in seen_entities:
            _fail(f"duplicate entity name {entity.name!r}", f"entities[{i}].name")
        seen_entities.add(entity.name)
        entities.append(entity)

    raw_goal = _require(doc, "goal", "goal")
    if not isinstance(raw_goal, dict):
        _fail("must be a mapping", "goal")
    _reject_unknown(raw_goal, _GOAL_FIELDS, "goal")
    statement = _as_str(_require(raw_goal, "statement", "goal"), "goal.statement")
    predicate = predicate_from_doc(_require(raw_goal, "predicate", "goal"), "goal.predicate")
    if predicate_depth(predicate) > MAX_DEPTH:
        _fail(f"predicate deeper than {MAX_DEPTH}", "goal.predicate")

    return Scenario(
        id=scenario_id,
        title=title,
        description=description,
        env_spec=env,
        members=tuple(members),
        entities=tuple(entities),
        goal=GoalSpec(statement=statement, predicate=predicate),
        max_steps=max_steps,
        seed=seed,
    )


def scenario_to_doc(s: Scenario) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "id": s.id,
        "title": s.title,
        "description": s.description,
        "seed": s.seed,
        "max_steps": s.max_steps,
        "env": {
            "width": s.env_spec.width,
            "height": s.env_spec.height,
            "num_regions": s.env_spec.num_regions,
            "region_names": list(s.env_spec.region_name_hints),
        },
        "members": [
            {
                "name": m.name,
                "role": m.role,
                "demographics": dict(m.demographics),
                "personality": dict(m.personality),
                "skills": list(m.skills),
                "backstory": list(m.backstory),
                "trust_level": m.trust_level,
            }
            for m in s.members
        ],
        "entities": [
            {
                "name": e.name,
                "kind": e.kind,
                "interactive": e.interactive,
                "region": e.region,
                "attributes": dict(e.attributes),
            }
            for e in s.entities
        ],
        "goal": {
            "statement": s.goal.statement,
            "predicate": predicate_to_doc(s.goal.predicate),
        },
    }
    return doc


def serialize_scenario(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_doc(s), sort_keys=False, allow_unicode=True)
