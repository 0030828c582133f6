"""Rule-based event validation, with an optional judge hook on top.

The rule checks always run and are deterministic: movement paths must be
contiguous open cells starting at the agent, manipulation requires standing on
an interactive entity, and put-down requires actually carrying the thing. A
judge adapter (e.g. a model asked whether the action is reasonable) may veto a
rule-valid event but can never resurrect a rule-invalid one.
"""

from __future__ import annotations

from typing import Callable, Optional

from teamsim.engine.events import Event, MoveTo, PickUp, PutDown, UseOn, Idle, ACTION, ValidationVerdict
from teamsim.world.changes import VICTIM_KIND
from teamsim.world.types import World

#: judge(event, world) -> ValidationVerdict; may veto rule-valid events.
JudgePolicy = Callable[[Event, World], ValidationVerdict]


def _check_move(event: Event, world: World, actor: str) -> ValidationVerdict:
    path = event.action.path
    if not path:
        return ValidationVerdict(False, "empty path")
    if path[0] != world.agent_positions[actor]:
        return ValidationVerdict(False, f"path must start at current position {world.agent_positions[actor]}")
    for cell in path:
        if not world.grid.is_open(*cell):
            return ValidationVerdict(False, f"path cell {cell} is not open")
    for a, b in zip(path, path[1:]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            return ValidationVerdict(False, f"path jumps from {a} to {b}")
    return ValidationVerdict(True)


def _check_entity_reach(event: Event, world: World, actor: str, entity: str) -> Optional[ValidationVerdict]:
    placement = world.placements.get(entity)
    if placement is None:
        return ValidationVerdict(False, f"no such entity {entity!r}")
    spec = world.entity_specs[entity]
    if not spec.interactive:
        return ValidationVerdict(False, f"{entity!r} is not interactive")
    if placement.carried_by is not None:
        return ValidationVerdict(False, f"{entity!r} is being carried by {placement.carried_by}")
    if placement.cell != world.agent_positions[actor]:
        return ValidationVerdict(False, f"{entity!r} is out of reach")
    return None


def validate_event(event: Event, world: World, judge: JudgePolicy | None = None) -> ValidationVerdict:
    actor = event.participants[0]
    if actor not in world.agent_positions:
        return ValidationVerdict(False, f"unknown agent {actor!r}")

    if event.kind == ACTION:
        action = event.action
        if isinstance(action, MoveTo):
            verdict = _check_move(event, world, actor)
        elif isinstance(action, PickUp):
            verdict = _check_entity_reach(event, world, actor, action.entity)
            if verdict is None:
                spec = world.entity_specs[action.entity]
                carrying_victim = any(
                    p.carried_by == actor and world.entity_specs[p.entity].kind == VICTIM_KIND
                    for p in world.placements.values()
                )
                if spec.kind == VICTIM_KIND and carrying_victim:
                    verdict = ValidationVerdict(False, "already carrying a victim")
                else:
                    verdict = ValidationVerdict(True)
        elif isinstance(action, PutDown):
            placement = world.placements.get(action.entity)
            if placement is None or placement.carried_by != actor:
                verdict = ValidationVerdict(False, f"not carrying {action.entity!r}")
            else:
                verdict = ValidationVerdict(True)
        elif isinstance(action, UseOn):
            verdict = _check_entity_reach(event, world, actor, action.entity)
            if verdict is None:
                verdict = ValidationVerdict(True)
        elif isinstance(action, Idle):
            verdict = ValidationVerdict(True)
        else:
            verdict = ValidationVerdict(False, f"unknown action {action!r}")
    else:
        others = [p for p in event.participants[1:] if p != actor]
        if not others:
            verdict = ValidationVerdict(False, "communication needs another participant")
        elif any(p not in world.agent_positions for p in others):
            missing = next(p for p in others if p not in world.agent_positions)
            verdict = ValidationVerdict(False, f"unknown agent {missing!r}")
        else:
            verdict = ValidationVerdict(True)

    if verdict.valid and judge is not None:
        judged = judge(event, world)
        if not judged.valid:
            return judged
    return verdict
