"""What an agent perceives at a decision point."""

from __future__ import annotations

from dataclasses import dataclass, field

from teamsim.agents.state import AgentState, Message
from teamsim.errors import UnknownAgent
from teamsim.world.types import Cell, World


@dataclass(frozen=True)
class VisibleEntity:
    name: str
    kind: str
    cell: Cell
    interactive: bool
    attributes: dict[str, str]
    carried_by: str | None = None


@dataclass(frozen=True)
class VisibleAgent:
    name: str
    role: str
    cell: Cell


@dataclass(frozen=True)
class Observation:
    agent: str
    step: int
    remaining_steps: int
    cell: Cell
    region_id: int
    region_name: str
    carrying: str | None
    visible_entities: tuple[VisibleEntity, ...]
    co_located_agents: tuple[VisibleAgent, ...]
    last_result: str | None
    pending_messages: tuple[Message, ...] = field(default_factory=tuple)


def build_observation(
    world: World,
    agents: dict[str, AgentState],
    name: str,
    max_steps: int,
) -> Observation:
    """Region-scoped view: entities and teammates in the agent's room, the
    agent's last event result, and undelivered messages."""
    if name not in agents:
        raise UnknownAgent(name)
    agent = agents[name]
    cell = world.agent_positions[name]
    region_id = world.grid.region_at(*cell)
    region_name = world.tree.leaf(region_id).name

    entities = []
    for entity_name in sorted(world.placements):
        placement = world.placements[entity_name]
        if placement.cell is None:
            continue
        if world.grid.region_at(*placement.cell) != region_id:
            continue
        spec = world.entity_specs[entity_name]
        entities.append(
            VisibleEntity(
                name=entity_name,
                kind=spec.kind,
                cell=placement.cell,
                interactive=spec.interactive,
                attributes=dict(spec.attributes),
                carried_by=placement.carried_by,
            )
        )

    others = []
    for other_name in sorted(world.agent_positions):
        if other_name == name:
            continue
        other_cell = world.agent_positions[other_name]
        if world.grid.region_at(*other_cell) == region_id:
            others.append(
                VisibleAgent(name=other_name, role=agents[other_name].profile.role, cell=other_cell)
            )

    return Observation(
        agent=name,
        step=world.clock,
        remaining_steps=max(max_steps - world.clock, 0),
        cell=cell,
        region_id=region_id,
        region_name=region_name,
        carrying=agent.carrying,
        visible_entities=tuple(entities),
        co_located_agents=tuple(others),
        last_result=agent.last_result,
        pending_messages=tuple(agent.pending_messages),
    )
