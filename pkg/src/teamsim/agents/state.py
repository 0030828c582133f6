"""Per-agent runtime state and the decision type policies return."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from teamsim.agents.memory import Embedder, MemoryStore
from teamsim.engine.events import ActionPayload
from teamsim.scenario.model import AgentProfileSpec, Scenario
from teamsim.world.types import Cell


@dataclass(frozen=True)
class Message:
    step: int
    sender: str
    text: str
    kind: str = "note"  # note | invitation | outcome
    conversation_id: Optional[int] = None


@dataclass(frozen=True)
class Act:
    action: ActionPayload


@dataclass(frozen=True)
class Communicate:
    targets: tuple[str, ...]
    opening: str

    def __post_init__(self):
        if not self.targets:
            raise ValueError("Communicate needs at least one target")


@dataclass(frozen=True)
class IdleFor:
    steps: int = 1


DecisionVariant = Union[Act, Communicate, IdleFor]


@dataclass(frozen=True)
class Decision:
    variant: DecisionVariant
    rationale: str = ""


@dataclass
class BeliefRecord:
    """Last known location of an entity, from sight or a teammate's report."""

    entity: str
    kind: str
    cell: Cell
    critical: bool = False
    stabilized: bool = False
    step: int = 0


@dataclass
class AgentState:
    profile: AgentProfileSpec
    index: int
    position: Cell
    carrying: Optional[str] = None
    memory: MemoryStore = field(default_factory=MemoryStore)
    pending_messages: list[Message] = field(default_factory=list)
    last_result: Optional[str] = None
    visited_regions: set[int] = field(default_factory=set)
    beliefs: dict[str, BeliefRecord] = field(default_factory=dict)
    unshared_discoveries: set[str] = field(default_factory=set)
    share_failures: int = 0

    @property
    def name(self) -> str:
        return self.profile.name


def seed_knowledge(agent: AgentState, scenario: Scenario, start_region_name: str) -> None:
    """Write the initial seed records: role, skills, goal, teammates, starting
    room, and any backstory entries."""
    profile = agent.profile
    agent.memory.add(f"My name is {profile.name} and my role is {profile.role}.", "seed", 0)
    for skill in profile.skills:
        agent.memory.add(f"As the {profile.role}, I must {skill}.", "seed", 0)
    agent.memory.add(f"Team goal: {scenario.goal.statement}", "seed", 0)
    for other in scenario.members:
        if other.name != profile.name:
            agent.memory.add(f"Teammate {other.name} has the role {other.role}.", "seed", 0)
    agent.memory.add(f"I start in the room named {start_region_name}.", "seed", 0)
    for entry in profile.backstory:
        agent.memory.add(entry, "seed", 0)
