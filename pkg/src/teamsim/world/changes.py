"""World mutations produced by resolved events.

``apply_world_change`` is a pure function: it returns a new World plus the
StateDelta record that, replayed over a snapshot, reproduces the same state.
Violations raise IllegalChange; by the time a change reaches this module it
has passed event validation, so an IllegalChange is an engine bug, not bad
user input.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from teamsim.errors import IllegalChange
from teamsim.world.types import Cell, Placement, World

VICTIM_KIND = "victim"


@dataclass(frozen=True)
class MoveAgent:
    agent: str
    path: tuple[Cell, ...]


@dataclass(frozen=True)
class PickUpEntity:
    agent: str
    entity: str


@dataclass(frozen=True)
class PutDownEntity:
    agent: str
    entity: str


@dataclass(frozen=True)
class RemoveEntity:
    agent: str
    entity: str


@dataclass(frozen=True)
class SetEntityAttribute:
    agent: str
    entity: str
    key: str
    value: str


WorldChange = Union[MoveAgent, PickUpEntity, PutDownEntity, RemoveEntity, SetEntityAttribute]


@dataclass(frozen=True)
class StateDelta:
    """Replayable record of one applied change."""

    change: str
    payload: dict

    def to_doc(self) -> dict:
        return {"change": self.change, **self.payload}


def _carried_victims(world: World, agent: str) -> int:
    count = 0
    for p in world.placements.values():
        if p.carried_by == agent and world.entity_specs[p.entity].kind == VICTIM_KIND:
            count += 1
    return count


def apply_world_change(world: World, change: WorldChange) -> tuple[World, StateDelta]:
    if isinstance(change, MoveAgent):
        if change.agent not in world.agent_positions:
            raise IllegalChange(f"unknown agent {change.agent!r}")
        if not change.path:
            raise IllegalChange("empty move path")
        dest = change.path[-1]
        if not world.grid.is_open(*dest):
            raise IllegalChange(f"move destination {dest} is not open")
        positions = dict(world.agent_positions)
        positions[change.agent] = dest
        new_world = replace(world, agent_positions=positions)
        delta = StateDelta(
            "agent_moved",
            {
                "agent": change.agent,
                "to": list(dest),
                "region": world.grid.region_at(*dest),
                "steps": max(len(change.path) - 1, 0),
            },
        )
        return new_world, delta

    if isinstance(change, PickUpEntity):
        placement = world.placements.get(change.entity)
        if placement is None:
            raise IllegalChange(f"unknown entity {change.entity!r}")
        if placement.carried_by is not None:
            raise IllegalChange(f"{change.entity!r} already carried by {placement.carried_by!r}")
        spec = world.entity_specs[change.entity]
        if spec.kind == VICTIM_KIND and _carried_victims(world, change.agent) >= 1:
            raise IllegalChange(f"{change.agent!r} already carries a victim")
        placements = dict(world.placements)
        placements[change.entity] = Placement(entity=change.entity, cell=None, carried_by=change.agent)
        new_world = replace(world, placements=placements)
        return new_world, StateDelta("entity_carried", {"entity": change.entity, "by": change.agent})

    if isinstance(change, PutDownEntity):
        placement = world.placements.get(change.entity)
        if placement is None or placement.carried_by != change.agent:
            raise IllegalChange(f"{change.agent!r} is not carrying {change.entity!r}")
        cell = world.agent_positions[change.agent]
        placements = dict(world.placements)
        placements[change.entity] = Placement(entity=change.entity, cell=cell)
        new_world = replace(world, placements=placements)
        return new_world, StateDelta(
            "entity_placed",
            {
                "entity": change.entity,
                "cell": list(cell),
                "region": world.grid.region_at(*cell),
                "kind": world.entity_specs[change.entity].kind,
            },
        )

    if isinstance(change, RemoveEntity):
        if change.entity not in world.placements:
            raise IllegalChange(f"unknown entity {change.entity!r}")
        placements = dict(world.placements)
        del placements[change.entity]
        new_world = replace(world, placements=placements)
        return new_world, StateDelta("entity_removed", {"entity": change.entity})

    if isinstance(change, SetEntityAttribute):
        if change.entity not in world.placements:
            raise IllegalChange(f"unknown entity {change.entity!r}")
        specs = dict(world.entity_specs)
        spec = specs[change.entity]
        attrs = dict(spec.attributes)
        attrs[change.key] = change.value
        specs[change.entity] = replace(spec, attributes=attrs)
        new_world = replace(world, entity_specs=specs)
        return new_world, StateDelta(
            "entity_attribute",
            {"entity": change.entity, "key": change.key, "value": change.value},
        )

    raise IllegalChange(f"unknown change {change!r}")


def apply_delta_doc(world: World, doc: dict) -> World:
    """Replay one exported delta record onto a world (log replay path)."""
    change = doc["change"]
    if change == "agent_moved":
        positions = dict(world.agent_positions)
        positions[doc["agent"]] = tuple(doc["to"])
        return replace(world, agent_positions=positions)
    if change == "entity_carried":
        placements = dict(world.placements)
        placements[doc["entity"]] = Placement(entity=doc["entity"], cell=None, carried_by=doc["by"])
        return replace(world, placements=placements)
    if change == "entity_placed":
        placements = dict(world.placements)
        placements[doc["entity"]] = Placement(entity=doc["entity"], cell=tuple(doc["cell"]))
        return replace(world, placements=placements)
    if change == "entity_removed":
        placements = dict(world.placements)
        placements.pop(doc["entity"], None)
        return replace(world, placements=placements)
    if change == "entity_attribute":
        specs = dict(world.entity_specs)
        spec = specs[doc["entity"]]
        attrs = dict(spec.attributes)
        attrs[doc["key"]] = doc["value"]
        specs[doc["entity"]] = replace(spec, attributes=attrs)
        return replace(world, entity_specs=specs)
    raise IllegalChange(f"unknown delta {change!r}")
