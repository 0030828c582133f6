"""Scenario domain types.

A scenario is the single declarative input a run needs: team members,
environment parameters, entities, the goal predicate, and run limits. Parsing
and validation live in :mod:`teamsim.scenario.parser` and
:mod:`teamsim.scenario.validate`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from teamsim.evaluation.predicate import PredicateExpr

FORMAT_VERSION = 1

#: Interior cells per region side; regions smaller than this cannot exist.
MIN_REGION_SIDE = 3

#: Largest full grid edge (interior + border ring) the engine will allocate.
MAX_GRID_SIDE = 256

TRUST_LEVELS = ("low", "high", "unspecified")


@dataclass(frozen=True)
class EnvSpec:
    """Environment parameters. ``width``/``height`` count usable interior cells;
    the generated grid adds a one-cell border wall ring around them."""

    width: int
    height: int
    num_regions: int
    region_name_hints: tuple[str, ...] = ()

    def region_names(self) -> list[str]:
        """Names the generator will assign, hint list first, then Room-k."""
        return [
            self.region_name_hints[i] if i < len(self.region_name_hints) else f"Room-{i}"
            for i in range(self.num_regions)
        ]


@dataclass(frozen=True)
class AgentProfileSpec:
    name: str
    role: str
    demographics: dict[str, str] = field(default_factory=dict)
    personality: dict[str, float] = field(default_factory=dict)
    skills: tuple[str, ...] = ()
    backstory: tuple[str, ...] = ()
    trust_level: str = "unspecified"


@dataclass(frozen=True)
class EntitySpec:
    name: str
    kind: str
    interactive: bool = True
    region: str | None = None
    attributes: dict[str, str] = field(default_factory=dict)

    @property
    def blocking(self) -> bool:
        return self.attributes.get("blocking") == "true"


@dataclass(frozen=True)
class GoalSpec:
    statement: str
    predicate: PredicateExpr


@dataclass(frozen=True)
class Scenario:
    id: str
    title: str
    description: str
    env_spec: EnvSpec
    members: tuple[AgentProfileSpec, ...]
    entities: tuple[EntitySpec, ...]
    goal: GoalSpec
    max_steps: int
    seed: int

    def member_names(self) -> list[str]:
        return [m.name for m in self.members]

    def entity_kinds(self) -> set[str]:
        return {e.kind for e in self.entities}


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; ``path`` points at the offending document field."""

    severity: str  # "error" | "warning"
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


def max_region_capacity(width: int, height: int) -> int:
    """Upper bound on regions that fit a width x height interior.

    Regions need MIN_REGION_SIDE interior cells per side plus a one-cell wall
    between neighbors, so each axis fits floor((side + 1) / (MIN_REGION_SIDE + 1))
    regions.
    """
    per = MIN_REGION_SIDE + 1
    return ((width + 1) // per) * ((height + 1) // per)
