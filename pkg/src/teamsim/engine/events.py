"""Events and the scheduling queue.

An event is one scheduled unit of agent behavior. Action events mutate the
world when they resolve; communication events deliver one conversation turn.
The queue is a binary heap keyed by (due_step, event id); event ids are the
monotone sequence numbers, so equal due steps pop in FIFO order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional, Union

from teamsim.world.types import Cell

ACTION = "action"
COMMUNICATION = "communication"

# Step costs (MoveTo charges per path cell).
DURATION_PICKUP = 1
DURATION_PUTDOWN = 1
DURATION_USE = 3
DURATION_TURN = 2  # per conversation turn


@dataclass(frozen=True)
class MoveTo:
    path: tuple[Cell, ...]


@dataclass(frozen=True)
class PickUp:
    entity: str


@dataclass(frozen=True)
class PutDown:
    entity: str


@dataclass(frozen=True)
class UseOn:
    entity: str
    verb: str


@dataclass(frozen=True)
class Idle:
    steps: int = 1


ActionPayload = Union[MoveTo, PickUp, PutDown, UseOn, Idle]


@dataclass(frozen=True)
class ConversationTurn:
    conversation_id: int
    speaker: str
    text: str


def action_duration(action: ActionPayload) -> int:
    if isinstance(action, MoveTo):
        return max(len(action.path), 1)
    if isinstance(action, (PickUp, PutDown)):
        return DURATION_PICKUP
    if isinstance(action, UseOn):
        return DURATION_USE
    if isinstance(action, Idle):
        return max(action.steps, 1)
    raise TypeError(f"unknown action {action!r}")


def describe_action(action: ActionPayload) -> str:
    if isinstance(action, MoveTo):
        return f"move_to {action.path[-1]}" if action.path else "move_to (nowhere)"
    if isinstance(action, PickUp):
        return f"pick_up {action.entity}"
    if isinstance(action, PutDown):
        return f"put_down {action.entity}"
    if isinstance(action, UseOn):
        return f"use_on {action.entity} ({action.verb})"
    if isinstance(action, Idle):
        return f"idle {action.steps}"
    return repr(action)


@dataclass(frozen=True)
class Event:
    id: int
    kind: str  # ACTION | COMMUNICATION
    start_step: int
    duration_steps: int
    participants: tuple[str, ...]
    context: str = ""
    action: Optional[ActionPayload] = None
    turn: Optional[ConversationTurn] = None

    def __post_init__(self):
        if self.duration_steps < 1:
            raise ValueError("duration_steps must be >= 1")
        if self.kind == ACTION and len(self.participants) != 1:
            raise ValueError("action events have exactly one participant")
        if self.kind == COMMUNICATION and len(self.participants) < 2:
            raise ValueError("communication events need at least two participants")

    @property
    def due_step(self) -> int:
        return self.start_step + self.duration_steps

    def describe(self) -> str:
        if self.kind == ACTION:
            return describe_action(self.action)
        return f"say({self.turn.speaker})" if self.turn else "conversation turn"


@dataclass
class ValidationVerdict:
    valid: bool
    reason: str = ""

    def __post_init__(self):
        if not self.valid and not self.reason:
            raise ValueError("invalid verdicts carry a reason")


class EventQueue:
    """Priority queue over (due_step, event id)."""

    def __init__(self):
        self._heap: list[tuple[int, int, Event]] = []

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, event: Event) -> None:
        heapq.heappush(self._heap, (event.due_step, event.id, event))

    def pop(self) -> Event | None:
        if not self._heap:
            return None
        return heapq.heappop(self._heap)[2]

    def pop_due(self, step: int) -> list[Event]:
        """All events due at exactly ``step``, in (due, id) order."""
        due = []
        while self._heap and self._heap[0][0] <= step:
            due.append(heapq.heappop(self._heap)[2])
        return due

    def peek_due_step(self) -> int | None:
        return self._heap[0][0] if self._heap else None


@dataclass
class SimClock:
    current_step: int = 0

    def advance(self) -> int:
        self.current_step += 1
        return self.current_step
