"""Behavioral metrics computed from a run log."""

from __future__ import annotations

from dataclasses import dataclass, field

from teamsim.evaluation.predicate import delivery_targets, predicate_from_doc
from teamsim.evaluation.runlog import RunLog, check_integrity, fixed6


@dataclass
class MetricsSummary:
    outcome: str
    steps: int
    success_step: int | None
    actions_by_agent: dict[str, dict[str, int]]
    messages_sent: dict[str, int]
    messages_listened: dict[str, int]
    messages_ignored: dict[str, int]
    regions_visited: dict[str, int]
    entities_rescued: int
    entities_manipulated: int
    conversations: int
    mean_conversation_turns: float
    survey_means: dict[str, float] = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "outcome": self.outcome,
            "steps": self.steps,
            "success_step": self.success_step,
            "actions_by_agent": self.actions_by_agent,
            "messages_sent": self.messages_sent,
            "messages_listened": self.messages_listened,
            "messages_ignored": self.messages_ignored,
            "regions_visited": self.regions_visited,
            "entities_rescued": self.entities_rescued,
            "entities_manipulated": self.entities_manipulated,
            "conversations": self.conversations,
            "mean_conversation_turns": fixed6(self.mean_conversation_turns),
            "survey_means": {k: fixed6(v) for k, v in sorted(self.survey_means.items())},
        }


def _action_name(desc: str) -> str:
    return desc.split(" ", 1)[0] if desc else "unknown"


def compute_metrics(log: RunLog) -> MetricsSummary:
    """Aggregate counts from the record stream (not from the embedded blob)."""
    check_integrity(log)

    agents = [a["name"] for a in log.snapshot.get("agents", [])]
    actions: dict[str, dict[str, int]] = {a: {} for a in agents}
    sent: dict[str, int] = {a: 0 for a in agents}
    listened: dict[str, int] = {a: 0 for a in agents}
    ignored: dict[str, int] = {a: 0 for a in agents}
    regions: dict[str, set[int]] = {a: set() for a in agents}

    # Starting regions count as visited.
    bounds = [(r["id"], r["bounds"]) for r in log.snapshot.get("regions", [])]
    doors = {(x, y): rid for x, y, rid in log.snapshot.get("doors", [])}

    def region_of_cell(cell) -> int | None:
        x, y = cell
        for rid, (x0, y0, x1, y1) in bounds:
            if x0 <= x <= x1 and y0 <= y <= y1:
                return rid
        return doors.get((x, y))

    for a in log.snapshot.get("agents", []):
        rid = region_of_cell(a["cell"])
        if rid is not None:
            regions[a["name"]].add(rid)

    outcome = "time_limit"
    steps = log.snapshot.get("clock", 0)
    success_step = None
    manipulated = 0
    conversation_turns: list[int] = []
    rescued_entities: set[str] = set()

    goal_doc = log.header.get("goal_predicate")
    victim_targets = delivery_targets(predicate_from_doc(goal_doc)) if goal_doc else {}
    region_names = {r["name"]: r["id"] for r in log.snapshot.get("regions", [])}

    for rec in log.records:
        if rec.kind == "resolved" and rec.agent:
            name = _action_name(rec.payload.get("description", ""))
            per = actions.setdefault(rec.agent, {})
            per[name] = per.get(name, 0) + 1
            if name == "use_on":
                manipulated += 1
        elif rec.kind == "delta":
            payload = rec.payload
            if payload.get("change") == "agent_moved" and rec.agent:
                regions.setdefault(rec.agent, set()).add(payload.get("region"))
            elif payload.get("change") == "entity_placed":
                kind = payload.get("kind")
                target = victim_targets.get(kind) or victim_targets.get(payload.get("entity"))
                if target is not None and payload.get("region") == region_names.get(target):
                    rescued_entities.add(payload["entity"])
            elif payload.get("change") == "entity_removed":
                manipulated += 1
        elif rec.kind == "message" and rec.agent:
            sent[rec.agent] = sent.get(rec.agent, 0) + 1
            for listener in rec.payload.get("listeners", []):
                listened[listener] = listened.get(listener, 0) + 1
        elif rec.kind == "invitation":
            if rec.payload.get("response") in ("ignore", "expired") and rec.agent:
                ignored[rec.agent] = ignored.get(rec.agent, 0) + 1
        elif rec.kind == "conversation_closed":
            conversation_turns.append(rec.payload.get("turns", 0))
        elif rec.kind == "success":
            success_step = rec.step
        elif rec.kind == "ended":
            outcome = rec.payload.get("outcome", "time_limit")
            steps = rec.payload.get("step", rec.step)

    survey_totals: dict[str, list[int]] = {}
    for resp in log.survey:
        if resp.get("failed"):
            continue
        survey_totals.setdefault(resp["item"], []).append(resp["value"])
    survey_means = {item: sum(vals) / len(vals) for item, vals in survey_totals.items() if vals}

    mean_turns = sum(conversation_turns) / len(conversation_turns) if conversation_turns else 0.0
    return MetricsSummary(
        outcome=outcome,
        steps=steps,
        success_step=success_step,
        actions_by_agent={a: dict(sorted(v.items())) for a, v in sorted(actions.items())},
        messages_sent=dict(sorted(sent.items())),
        messages_listened=dict(sorted(listened.items())),
        messages_ignored=dict(sorted(ignored.items())),
        regions_visited={a: len(v) for a, v in sorted(regions.items())},
        entities_rescued=len(rescued_entities),
        entities_manipulated=manipulated,
        conversations=len(conversation_turns),
        mean_conversation_turns=mean_turns,
        survey_means=survey_means,
    )
