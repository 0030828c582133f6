"""Scenario documents: the canonical input every run consumes."""

from importlib import resources

from teamsim.scenario.generator import (
    EchoGeneratorBackend,
    GeneratorAdapter,
    TemplateGeneratorBackend,
    generate_scenario_draft,
)
from teamsim.scenario.model import (
    AgentProfileSpec,
    Diagnostic,
    EntitySpec,
    EnvSpec,
    GoalSpec,
    Scenario,
)
from teamsim.scenario.parser import (
    parse_scenario,
    scenario_from_doc,
    scenario_to_doc,
    serialize_scenario,
)
from teamsim.scenario.validate import has_errors, validate_scenario


def builtin_scenario_text(name: str = "rescue") -> str:
    """Text of a bundled scenario file (currently just ``rescue``)."""
    return resources.files("teamsim.data").joinpath(f"{name}.scn").read_text()


def builtin_scenario(name: str = "rescue") -> Scenario:
    return parse_scenario(builtin_scenario_text(name))


__all__ = [
    "AgentProfileSpec",
    "Diagnostic",
    "EchoGeneratorBackend",
    "EntitySpec",
    "EnvSpec",
    "GeneratorAdapter",
    "GoalSpec",
    "Scenario",
    "TemplateGeneratorBackend",
    "builtin_scenario",
    "builtin_scenario_text",
    "generate_scenario_draft",
    "has_errors",
    "parse_scenario",
    "scenario_from_doc",
    "scenario_to_doc",
    "serialize_scenario",
    "validate_scenario",
]
