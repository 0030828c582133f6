"""Success predicates: a small combinator tree evaluated against world state.

Goals are declarative trees rather than generated code, so they are safe to
load from documents and evaluate deterministically every timestep. Atoms talk
about entities, agents, regions, and the clock; ``And``/``Or``/``Not`` combine
them. ``always_true`` / ``always_false`` constants round out the language.

Carried entities are in no region: an entity only satisfies a region atom once
it has been put down inside that region.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

from teamsim.errors import ScenarioSemanticError

if TYPE_CHECKING:
    from teamsim.world.types import World

MAX_DEPTH = 16


@dataclass(frozen=True)
class Constant:
    value: bool


@dataclass(frozen=True)
class EntityInRegion:
    """True when the named entity, or at least one entity of the kind, sits in region."""

    entity: str  # entity name or kind
    region: str


@dataclass(frozen=True)
class AllEntitiesInRegion:
    kind: str
    region: str


@dataclass(frozen=True)
class AgentInRegion:
    agent: str
    region: str


@dataclass(frozen=True)
class CountAtLeast:
    kind: str
    region: str
    n: int


@dataclass(frozen=True)
class StepAtMost:
    n: int


@dataclass(frozen=True)
class And:
    children: tuple["PredicateExpr", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["PredicateExpr", ...]


@dataclass(frozen=True)
class Not:
    child: "PredicateExpr"


PredicateExpr = Union[
    Constant, EntityInRegion, AllEntitiesInRegion, AgentInRegion, CountAtLeast, StepAtMost, And, Or, Not
]


def depth(p: PredicateExpr) -> int:
    if isinstance(p, And) or isinstance(p, Or):
        return 1 + max((depth(c) for c in p.children), default=0)
    if isinstance(p, Not):
        return 1 + depth(p.child)
    return 1


def _entities_in_region(world: "World", region: str, kind: str | None = None, name: str | None = None) -> int:
    rid = world.region_id_of_name(region)
    count = 0
    for placement in world.placements.values():
        if placement.carried_by is not None or placement.cell is None:
            continue
        spec = world.entity_specs[placement.entity]
        if name is not None and placement.entity != name:
            continue
        if kind is not None and spec.kind != kind:
            continue
        if world.grid.region_at(*placement.cell) == rid:
            count += 1
    return count


def evaluate_predicate(p: PredicateExpr, world: "World") -> bool:
    """Pure, deterministic evaluation of ``p`` against a world snapshot."""
    if isinstance(p, Constant):
        return p.value
    if isinstance(p, And):
        return all(evaluate_predicate(c, world) for c in p.children)
    if isinstance(p, Or):
        return any(evaluate_predicate(c, world) for c in p.children)
    if isinstance(p, Not):
        return not evaluate_predicate(p.child, world)
    if isinstance(p, EntityInRegion):
        if p.entity in world.entity_specs:
            return _entities_in_region(world, p.region, name=p.entity) > 0
        return _entities_in_region(world, p.region, kind=p.entity) > 0
    if isinstance(p, AllEntitiesInRegion):
        total = sum(1 for s in world.entity_specs.values() if s.kind == p.kind)
        return total > 0 and _entities_in_region(world, p.region, kind=p.kind) == total
    if isinstance(p, AgentInRegion):
        cell = world.agent_positions.get(p.agent)
        if cell is None:
            return False
        return world.grid.region_at(*cell) == world.region_id_of_name(p.region)
    if isinstance(p, CountAtLeast):
        return _entities_in_region(world, p.region, kind=p.kind) >= p.n
    if isinstance(p, StepAtMost):
        return world.clock <= p.n
    raise TypeError(f"unknown predicate node {p!r}")


# --- document form -----------------------------------------------------------
#
# Predicates appear in scenario documents as nested single-key mappings, e.g.
#   {"and": [{"all_entities_in_region": {"kind": "victim", "region": "Hospital"}},
#            {"step_at_most": {"n": 500}}]}
# The strings "always_true" / "always_false" are accepted as shorthand.


def predicate_from_doc(doc, path: str = "goal.predicate") -> PredicateExpr:
    if isinstance(doc, str):
        if doc == "always_true":
            return Constant(True)
        if doc == "always_false":
            return Constant(False)
        raise ScenarioSemanticError(f"unknown predicate shorthand {doc!r}", path)
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ScenarioSemanticError("predicate node must be a single-key mapping", path)
    key, body = next(iter(doc.items()))
    if key == "always_true":
        return Constant(True)
    if key == "always_false":
        return Constant(False)
    if key == "and" or key == "or":
        if not isinstance(body, list):
            raise ScenarioSemanticError(f"'{key}' expects a list", path)
        children = tuple(predicate_from_doc(c, f"{path}.{key}[{i}]") for i, c in enumerate(body))
        return And(children) if key == "and" else Or(children)
    if key == "not":
        return Not(predicate_from_doc(body, f"{path}.not"))
    if not isinstance(body, dict):
        raise ScenarioSemanticError(f"'{key}' expects a mapping", path)

    def want(fields: dict[str, type]):
        unknown = set(body) - set(fields)
        if unknown:
            raise ScenarioSemanticError(f"unknown field(s) {sorted(unknown)} in '{key}'", path)
        out = []
        for fname, ftype in fields.items():
            if fname not in body:
                raise ScenarioSemanticError(f"'{key}' requires '{fname}'", path)
            value = body[fname]
            if ftype is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ScenarioSemanticError(f"'{fname}' must be an integer", path)
            elif not isinstance(value, ftype):
                raise ScenarioSemanticError(f"'{fname}' must be {ftype.__name__}", path)
            out.append(value)
        return out

    if key == "entity_in_region":
        entity, region = want({"entity": str, "region": str})
        return EntityInRegion(entity, region)
    if key == "all_entities_in_region":
        kind, region = want({"kind": str, "region": str})
        return AllEntitiesInRegion(kind, region)
    if key == "agent_in_region":
        agent, region = want({"agent": str, "region": str})
        return AgentInRegion(agent, region)
    if key == "count_at_least":
        kind, region, n = want({"kind": str, "region": str, "n": int})
        return CountAtLeast(kind, region, n)
    if key == "step_at_most":
        (n,) = want({"n": int})
        return StepAtMost(n)
    raise ScenarioSemanticError(f"unknown predicate '{key}'", path)


def predicate_to_doc(p: PredicateExpr):
    if isinstance(p, Constant):
        return "always_true" if p.value else "always_false"
    if isinstance(p, And):
        return {"and": [predicate_to_doc(c) for c in p.children]}
    if isinstance(p, Or):
        return {"or": [predicate_to_doc(c) for c in p.children]}
    if isinstance(p, Not):
        return {"not": predicate_to_doc(p.child)}
    if isinstance(p, EntityInRegion):
        return {"entity_in_region": {"entity": p.entity, "region": p.region}}
    if isinstance(p, AllEntitiesInRegion):
        return {"all_entities_in_region": {"kind": p.kind, "region": p.region}}
    if isinstance(p, AgentInRegion):
        return {"agent_in_region": {"agent": p.agent, "region": p.region}}
    if isinstance(p, CountAtLeast):
        return {"count_at_least": {"kind": p.kind, "region": p.region, "n": p.n}}
    if isinstance(p, StepAtMost):
        return {"step_at_most": {"n": p.n}}
    raise TypeError(f"unknown predicate node {p!r}")


def iter_atoms(p: PredicateExpr):
    """Yield every leaf atom in the tree (for reference validation)."""
    if isinstance(p, (And, Or)):
        for c in p.children:
            yield from iter_atoms(c)
    elif isinstance(p, Not):
        yield from iter_atoms(p.child)
    else:
        yield p


def delivery_targets(p: PredicateExpr) -> dict[str, str]:
    """kind -> region pairs the goal wants populated (scripted policies read this)."""
    targets: dict[str, str] = {}
    for atom in iter_atoms(p):
        if isinstance(atom, (AllEntitiesInRegion, CountAtLeast)):
            targets.setdefault(atom.kind, atom.region)
        elif isinstance(atom, EntityInRegion):
            targets.setdefault(atom.entity, atom.region)
    return targets
