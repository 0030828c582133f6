"""Runnability validation over parsed scenarios.

Parsing already enforces structural invariants; this pass checks everything
that has to hold before a run can start and reports findings as diagnostics
instead of raising. An empty result means the scenario is runnable.
"""

from __future__ import annotations

from teamsim.evaluation.predicate import (
    AgentInRegion,
    AllEntitiesInRegion,
    CountAtLeast,
    EntityInRegion,
    iter_atoms,
)
from teamsim.scenario.model import Diagnostic, MIN_REGION_SIDE, Scenario, max_region_capacity


def validate_scenario(s: Scenario) -> list[Diagnostic]:
    """Pure check; empty list iff the scenario is runnable."""
    out: list[Diagnostic] = []
    env = s.env_spec

    if max_region_capacity(env.width, env.height) < env.num_regions:
        out.append(
            Diagnostic(
                "error",
                "env.num_regions",
                f"insufficient area: {env.num_regions} regions of at least "
                f"{MIN_REGION_SIDE}x{MIN_REGION_SIDE} cells cannot fit {env.width * env.height} cells",
            )
        )

    region_names = set(env.region_names())
    if len(env.region_name_hints) > env.num_regions:
        out.append(
            Diagnostic(
                "warning",
                "env.region_names",
                f"{len(env.region_name_hints)} names for {env.num_regions} regions; extras ignored",
            )
        )
    if len(set(env.region_name_hints)) != len(env.region_name_hints):
        out.append(Diagnostic("error", "env.region_names", "region names must be unique"))

    for i, entity in enumerate(s.entities):
        if entity.region is not None and entity.region not in region_names:
            out.append(
                Diagnostic(
                    "error",
                    f"entities[{i}].region",
                    f"unknown region hint {entity.region!r}",
                )
            )

    kinds = s.entity_kinds()
    entity_names = {e.name for e in s.entities}
    member_names = set(s.member_names())
    for atom in iter_atoms(s.goal.predicate):
        if isinstance(atom, (AllEntitiesInRegion, CountAtLeast)):
            if atom.region not in region_names:
                out.append(Diagnostic("error", "goal.predicate", f"unknown region {atom.region!r}"))
            if atom.kind not in kinds:
                out.append(Diagnostic("error", "goal.predicate", f"no entity of kind {atom.kind!r} declared"))
        elif isinstance(atom, EntityInRegion):
            if atom.region not in region_names:
                out.append(Diagnostic("error", "goal.predicate", f"unknown region {atom.region!r}"))
            if atom.entity not in kinds and atom.entity not in entity_names:
                out.append(
                    Diagnostic("error", "goal.predicate", f"{atom.entity!r} names no declared entity or kind")
                )
        elif isinstance(atom, AgentInRegion):
            if atom.region not in region_names:
                out.append(Diagnostic("error", "goal.predicate", f"unknown region {atom.region!r}"))
            if atom.agent not in member_names:
                out.append(Diagnostic("error", "goal.predicate", f"unknown agent {atom.agent!r}"))

    min_region_area = MIN_REGION_SIDE * MIN_REGION_SIDE
    if len(s.members) > min_region_area:
        out.append(
            Diagnostic(
                "warning",
                "members",
                f"{len(s.members)} members may not fit the start region if it is minimal "
                f"({min_region_area} cells)",
            )
        )
    return out


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)
