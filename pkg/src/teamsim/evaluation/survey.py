"""Post-hoc agent surveys on a 0-10 scale.

The default item set paraphrases six team-functioning dimensions
(communication, coordination, trust in automated teammates, emerging
leadership, collective self-efficacy, team processes); the exact wording is
ours, not canonical. Backends answer from agent memory; replies outside the
scale are clamped and flagged rather than dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from teamsim.agents.state import AgentState
from teamsim.llm.adapter import CompletionClient, CompletionRequest

SCALE_MIN = 0
SCALE_MAX = 10


@dataclass(frozen=True)
class SurveyItem:
    id: str
    prompt: str
    scale_min: int = SCALE_MIN
    scale_max: int = SCALE_MAX


DEFAULT_ITEMS: tuple[SurveyItem, ...] = (
    SurveyItem("communication", "How well did your team exchange the information each member needed?"),
    SurveyItem("coordination", "How well did your team mesh its actions without duplicated or wasted effort?"),
    SurveyItem("trust_in_bot", "How much did you trust the navigation directions you were given?"),
    SurveyItem("emerging_leadership", "How clearly did someone step up to organize the team when it mattered?"),
    SurveyItem("collective_self_efficacy", "How confident are you that this team could handle a harder mission?"),
    SurveyItem("team_processes", "How well did your team monitor progress and adjust its plan?"),
)


@dataclass(frozen=True)
class SurveyResponse:
    agent: str
    item_id: str
    value: int
    rationale: str
    clamped: bool = False
    failed: bool = False

    def to_doc(self) -> dict:
        return {
            "agent": self.agent,
            "item": self.item_id,
            "value": self.value,
            "rationale": self.rationale,
            "clamped": self.clamped,
            "failed": self.failed,
        }


_REPLY_RE = re.compile(r"-?\d+")


def parse_survey_reply(text: str) -> tuple[int, str]:
    """Extract the leading integer rating and the free-text rationale."""
    match = _REPLY_RE.search(text)
    if match is None:
        raise ValueError(f"no rating in reply {text!r}")
    value = int(match.group())
    rationale = text[match.end() :].lstrip(" |:-").strip()
    return value, rationale


def administer_survey(
    agents: list[AgentState],
    items: tuple[SurveyItem, ...],
    client: CompletionClient,
    memories_k: int = 4,
) -> list[SurveyResponse]:
    """One response per (agent, item); failures are flagged, values clamped."""
    responses: list[SurveyResponse] = []
    for agent in agents:
        for item in items:
            memories = agent.memory.retrieve(item.prompt, k=memories_k)
            memory_lines = "\n".join(f"- [{m.record.id}] {m.record.text}" for m in memories)
            system = (
                f"You are {agent.profile.name}, the {agent.profile.role}. Answer the survey item "
                f"with '<rating {item.scale_min}-{item.scale_max}> | <one-sentence rationale>'."
            )
            user = f"[item]\n{item.prompt}\n[memories]\n{memory_lines}"
            try:
                reply = client.complete(
                    CompletionRequest(system=system, user=user, tag="survey", max_reply_chars=300)
                )
                value, rationale = parse_survey_reply(reply.text)
            except Exception as exc:
                responses.append(
                    SurveyResponse(
                        agent=agent.profile.name,
                        item_id=item.id,
                        value=item.scale_min,
                        rationale=f"survey backend failed: {exc}",
                        failed=True,
                    )
                )
                continue
            clamped = False
            if value < item.scale_min:
                value, clamped = item.scale_min, True
            elif value > item.scale_max:
                value, clamped = item.scale_max, True
            responses.append(
                SurveyResponse(
                    agent=agent.profile.name,
                    item_id=item.id,
                    value=value,
                    rationale=rationale,
                    clamped=clamped,
                )
            )
    return responses
