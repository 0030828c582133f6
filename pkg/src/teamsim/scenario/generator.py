"""Scenario drafting through a pluggable generator backend.

The core never *needs* this: scenarios are files. A backend (a model, a
template expander, a mock) proposes a document from a free-text prompt; the
draft is parsed and validated like any hand-written scenario, with a bounded
repair loop that feeds diagnostics back to the backend.
"""

from __future__ import annotations

import re
from typing import Protocol

import yaml

from teamsim.errors import AdapterError, ScenarioSemanticError, ScenarioSyntaxError
from teamsim.scenario.model import FORMAT_VERSION, Scenario
from teamsim.scenario.parser import parse_scenario
from teamsim.scenario.validate import has_errors, validate_scenario


class GeneratorAdapter(Protocol):
    def draft(self, prompt: str, feedback: list[str]) -> str:
        """Return a scenario document for the prompt; ``feedback`` lists the
        problems found with the previous draft (empty on the first call)."""
        ...


def generate_scenario_draft(prompt: str, backend: GeneratorAdapter, repair_limit: int = 1) -> Scenario:
    """Draft, validate, and repair up to ``repair_limit`` times.

    Malformed documents count as backend failures (AdapterError); documents
    that parse but stay invalid raise ScenarioSemanticError.
    """
    feedback: list[str] = []
    last_semantic: ScenarioSemanticError | None = None
    for _ in range(repair_limit + 1):
        try:
            document = backend.draft(prompt, feedback)
        except Exception as exc:
            raise AdapterError(f"generator backend failed: {exc}") from exc
        try:
            scenario = parse_scenario(document)
        except ScenarioSyntaxError as exc:
            feedback = [f"document malformed: {exc}"]
            last_semantic = None
            continue
        except ScenarioSemanticError as exc:
            feedback = [str(exc)]
            last_semantic = exc
            continue
        diagnostics = validate_scenario(scenario)
        if has_errors(diagnostics):
            feedback = [str(d) for d in diagnostics if d.severity == "error"]
            last_semantic = ScenarioSemanticError("; ".join(feedback), "draft")
            continue
        return scenario
    if last_semantic is not None:
        raise ScenarioSemanticError(f"draft invalid after {repair_limit} repair attempt(s): {last_semantic}")
    raise AdapterError(f"generator produced malformed documents {repair_limit + 1} time(s)")


class EchoGeneratorBackend:
    """Returns a fixed document regardless of the prompt (testing aid)."""

    def __init__(self, document: str):
        self.document = document

    def draft(self, prompt: str, feedback: list[str]) -> str:
        return self.document


_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
    "a": 1, "an": 1,
}


def _count_before(prompt: str, nouns: list[str]) -> int:
    """Largest count attached to any of the nouns, 0 when none mentioned."""
    best = 0
    for noun in nouns:
        for match in re.finditer(rf"(\w+)\s+(?:\w+\s+)?{noun}", prompt, re.IGNORECASE):
            token = match.group(1).lower()
            count = _NUMBER_WORDS.get(token)
            if count is None and token.isdigit():
                count = int(token)
            if count:
                best = max(best, count)
    return best


class TemplateGeneratorBackend:
    """Deterministic prompt-to-scenario expansion, no model involved.

    Understands counts of team members ("two searchers") and of missing
    people/victims ("two missing people"); everything else gets defaults.
    """

    def draft(self, prompt: str, feedback: list[str]) -> str:
        members = _count_before(prompt, ["searchers?", "members?", "rescuers?", "agents?"]) or 1
        victims = _count_before(prompt, ["victims?", "people", "individuals?", "persons?"])
        doc = {
            "format_version": FORMAT_VERSION,
            "id": "drafted-scenario",
            "title": prompt.strip()[:60] or "Drafted scenario",
            "description": prompt.strip(),
            "seed": 0,
            "max_steps": 500,
            "env": {"width": 16, "height": 16, "num_regions": 4, "region_names": ["Base"]},
            "members": [
                {"name": f"Searcher-{i + 1}", "role": "Searcher"} for i in range(members)
            ],
            "entities": [
                {"name": f"victim-{i + 1}", "kind": "victim", "interactive": True}
                for i in range(victims)
            ],
            "goal": {
                "statement": prompt.strip() or "Complete the mission.",
                "predicate": (
                    {"all_entities_in_region": {"kind": "victim", "region": "Base"}}
                    if victims
                    else "always_false"
                ),
            },
        }
        return yaml.safe_dump(doc, sort_keys=False)
