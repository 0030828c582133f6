"""Post-run and mid-pause agent interviews.

Answers are grounded in retrieved memories; each Q/A pair is appended to the
agent's memory (kind=message) so follow-up questions can reference earlier
answers. World state is never touched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from teamsim.agents.state import AgentState
from teamsim.errors import PolicyFailure
from teamsim.llm.adapter import CompletionClient, CompletionRequest

_CITED_RE = re.compile(r"memory (\d+)")


@dataclass(frozen=True)
class InterviewAnswer:
    agent: str
    question: str
    text: str
    retrieved_ids: tuple[int, ...]
    cited_ids: tuple[int, ...]

    def to_doc(self) -> dict:
        return {
            "agent": self.agent,
            "question": self.question,
            "text": self.text,
            "retrieved_ids": list(self.retrieved_ids),
            "cited_ids": list(self.cited_ids),
        }


def interview(
    agent: AgentState,
    question: str,
    client: CompletionClient,
    step: int,
    memories_k: int = 4,
) -> InterviewAnswer:
    memories = agent.memory.retrieve(question, k=memories_k)
    memory_lines = "\n".join(f"- [{m.record.id}] {m.record.text}" for m in memories)
    system = (
        f"You are {agent.profile.name}, the team's {agent.profile.role}, being interviewed "
        f"after a simulation. Ground your answer in the listed memories and mention the ids "
        f"you rely on as 'memory <id>'."
    )
    user = f"[question]\n{question}\n[memories]\n{memory_lines}"
    try:
        reply = client.complete(
            CompletionRequest(system=system, user=user, tag="interview", max_reply_chars=800)
        )
    except Exception as exc:
        raise PolicyFailure(f"interview backend failed: {exc}") from exc
    cited = tuple(int(m) for m in _CITED_RE.findall(reply.text))
    agent.memory.add(f"Interview question: {question} My answer: {reply.text}", "message", step)
    return InterviewAnswer(
        agent=agent.profile.name,
        question=question,
        text=reply.text,
        retrieved_ids=tuple(m.record.id for m in memories),
        cited_ids=cited,
    )
