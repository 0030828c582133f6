"""Decision policies: the pluggable mapping from observation to decision.

Two implementations share the contract. :class:`ScriptedPolicy` is a
deterministic rule table driven by role, goal, and the agent's beliefs about
where things are; it is a pure function of (observation, agent state,
retrieved memories), which is what makes whole runs replayable.
:class:`LLMPolicy` renders the same information into a versioned structured
prompt and parses the reply under a strict one-line grammar, retrying once on
a malformed reply before falling back to a one-step idle.

Reply grammar (PROMPT_FORMAT_VERSION 1), first non-empty line of the reply,
keywords case-insensitive:

    ACTION MOVE_TO_REGION <region name>
    ACTION MOVE_TO_CELL <x> <y>
    ACTION PICK_UP <entity>
    ACTION PUT_DOWN
    ACTION USE_ON <entity> <verb>
    COMMUNICATE <name>[,<name>...]: <message>
    IDLE <steps>

Invitation replies use ``LISTEN`` or ``IGNORE``; conversation turns use
``SAY <text>`` where a trailing ``[end]`` closes the conversation.

Scripted agents exchange knowledge in parseable sighting lines:

    SIGHTING <entity> <kind> AT <x>,<y> <critical|routine> <stabilized|unstabilized>
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Protocol

from teamsim.agents.state import (
    Act,
    AgentState,
    BeliefRecord,
    Communicate,
    Decision,
    IdleFor,
    Message,
)
from teamsim.dialogue.conversation import Conversation, END_MARKER
from teamsim.engine.events import Idle, MoveTo, PickUp, PutDown, UseOn
from teamsim.engine.observation import Observation, VisibleEntity
from teamsim.errors import PolicyFailure
from teamsim.llm.adapter import CompletionClient, CompletionRequest
from teamsim.world.pathfind import NavigationPlan
from teamsim.world.types import Cell

PROMPT_FORMAT_VERSION = 1

VICTIM = "victim"
OBSTACLE = "obstacle"
STABILIZE_VERB = "stabilize"
CLEAR_VERB = "clear"

_SIGHTING_RE = re.compile(
    r"SIGHTING (\S+) (\S+) AT (\d+),(\d+) (critical|routine) (stabilized|unstabilized)"
)


@dataclass(frozen=True)
class PolicyContext:
    """World-derived lookups policies may use; all pure and deterministic."""

    region_names: tuple[str, ...]
    region_ids: dict[str, int]
    delivery: dict[str, str]  # entity kind (or name) -> destination region name
    members: tuple[str, ...]
    roles: dict[str, str]
    goal_statement: str
    route_to_region: Callable[[Cell, int], NavigationPlan]
    path_to_cell: Callable[[Cell, Cell], Optional[list[Cell]]]
    entity_kind: Callable[[str], Optional[str]]
    region_at: Callable[[Cell], int]


class Policy(Protocol):
    def decide(self, observation: Observation, agent: AgentState, ctx: PolicyContext) -> Decision: ...

    def respond_to_invitation(
        self, observation: Observation, agent: AgentState, invitation: Message, ctx: PolicyContext
    ) -> bool: ...

    def speak(
        self, observation: Observation, agent: AgentState, conversation: Conversation, ctx: PolicyContext
    ) -> str: ...


def format_sighting(belief: BeliefRecord) -> str:
    severity = "critical" if belief.critical else "routine"
    stab = "stabilized" if belief.stabilized else "unstabilized"
    return f"SIGHTING {belief.entity} {belief.kind} AT {belief.cell[0]},{belief.cell[1]} {severity} {stab}"


def parse_sightings(text: str) -> list[BeliefRecord]:
    out = []
    for m in _SIGHTING_RE.finditer(text):
        out.append(
            BeliefRecord(
                entity=m.group(1),
                kind=m.group(2),
                cell=(int(m.group(3)), int(m.group(4))),
                critical=m.group(5) == "critical",
                stabilized=m.group(6) == "stabilized",
            )
        )
    return out


def _is_critical(attributes: dict[str, str]) -> bool:
    return attributes.get("severity") == "critical"


def _is_stabilized(attributes: dict[str, str]) -> bool:
    return attributes.get("stabilized") == "true"


class ScriptedPolicy:
    """Deterministic role-driven behavior.

    Rule order: deliver what you carry, do your role's specialty work
    (medics stabilize, engineers clear), share fresh discoveries when trust
    is high, ferry reachable entities toward the goal regions, explore the
    nearest unvisited room, otherwise idle one step.
    """

    def __init__(self, share_retry_limit: int = 2):
        self.share_retry_limit = share_retry_limit

    # -- helpers -------------------------------------------------------------

    def _deliver_region(self, ctx: PolicyContext, entity: str) -> Optional[str]:
        kind = ctx.entity_kind(entity)
        return ctx.delivery.get(entity) or (ctx.delivery.get(kind) if kind else None)

    def _nearest_visible(
        self, observation: Observation, ctx: PolicyContext, candidates: list[VisibleEntity]
    ) -> Optional[VisibleEntity]:
        best = None
        best_key = None
        for entity in candidates:
            path = ctx.path_to_cell(observation.cell, entity.cell)
            if path is None:
                continue
            key = (len(path), entity.name)
            if best_key is None or key < best_key:
                best, best_key = entity, key
        return best

    def _move_or_interact(
        self, observation: Observation, ctx: PolicyContext, entity: VisibleEntity, verb: str | None, why: str
    ) -> Decision:
        if entity.cell == observation.cell:
            if verb == "pick":
                return Decision(Act(PickUp(entity.name)), rationale=f"{why}: picking up {entity.name}")
            return Decision(Act(UseOn(entity.name, verb)), rationale=f"{why}: {verb} {entity.name}")
        path = ctx.path_to_cell(observation.cell, entity.cell)
        if path is None:
            return Decision(IdleFor(1), rationale=f"{why}: {entity.name} unreachable")
        return Decision(Act(MoveTo(tuple(path))), rationale=f"{why}: heading to {entity.name} at {entity.cell}")

    def _believed_target(
        self,
        observation: Observation,
        agent: AgentState,
        ctx: PolicyContext,
        want: Callable[[BeliefRecord], bool],
    ) -> Optional[BeliefRecord]:
        best = None
        best_key = None
        for name in sorted(agent.beliefs):
            belief = agent.beliefs[name]
            if not want(belief):
                continue
            path = ctx.path_to_cell(observation.cell, belief.cell)
            if path is None:
                continue
            key = (len(path), name)
            if best_key is None or key < best_key:
                best, best_key = belief, key
        return best

    # -- contract ------------------------------------------------------------

    def decide(self, observation: Observation, agent: AgentState, ctx: PolicyContext) -> Decision:
        role = agent.profile.role.lower()
        # Retrieval keeps scripted decisions a function of the same inputs the
        # model-backed policy sees; the duty memory anchors the rationale.
        duty = agent.memory.retrieve(f"{agent.profile.role} duty role", k=1)
        duty_note = duty[0].record.text if duty else ""

        # 1. Carrying something: deliver it.
        if agent.carrying is not None:
            target = self._deliver_region(ctx, agent.carrying)
            if target is None or observation.region_name == target:
                return Decision(
                    Act(PutDown(agent.carrying)),
                    rationale=f"delivering {agent.carrying} here in {observation.region_name}",
                )
            plan = ctx.route_to_region(observation.cell, ctx.region_ids[target])
            if plan.empty:
                return Decision(Act(PutDown(agent.carrying)), rationale=f"already inside {target}")
            return Decision(
                Act(MoveTo(plan.path)),
                rationale=f"carrying {agent.carrying} to {target} ({plan.distance()} steps)",
            )

        # 2. Role specialty.
        if "medic" in role:
            visible = [
                e
                for e in observation.visible_entities
                if e.kind == VICTIM and _is_critical(e.attributes) and not _is_stabilized(e.attributes)
            ]
            if visible:
                target = self._nearest_visible(observation, ctx, visible)
                if target is not None:
                    return self._move_or_interact(
                        observation, ctx, target, STABILIZE_VERB, f"medic duty ({duty_note[:40]})"
                    )
            believed = self._believed_target(
                observation,
                agent,
                ctx,
                lambda b: b.kind == VICTIM and b.critical and not b.stabilized and b.cell != observation.cell,
            )
            if believed is not None:
                path = ctx.path_to_cell(observation.cell, believed.cell)
                if path is not None:
                    return Decision(
                        Act(MoveTo(tuple(path))),
                        rationale=f"medic duty: reported critical {believed.entity} at {believed.cell}",
                    )
        if "engineer" in role:
            visible = [e for e in observation.visible_entities if e.kind == OBSTACLE and e.interactive]
            if visible:
                target = self._nearest_visible(observation, ctx, visible)
                if target is not None:
                    return self._move_or_interact(observation, ctx, target, CLEAR_VERB, "engineer duty")
            believed = self._believed_target(
                observation, agent, ctx, lambda b: b.kind == OBSTACLE and b.cell != observation.cell
            )
            if believed is not None:
                path = ctx.path_to_cell(observation.cell, believed.cell)
                if path is not None:
                    return Decision(
                        Act(MoveTo(tuple(path))),
                        rationale=f"engineer duty: reported {believed.entity} at {believed.cell}",
                    )

        # 3. High trust: broadcast fresh discoveries.
        teammates = tuple(n for n in ctx.members if n != agent.name)
        if (
            agent.profile.trust_level == "high"
            and agent.unshared_discoveries
            and teammates
            and agent.share_failures < self.share_retry_limit
        ):
            lines = [
                format_sighting(agent.beliefs[name])
                for name in sorted(agent.unshared_discoveries)
                if name in agent.beliefs
            ]
            if lines:
                opening = "Team update. " + " ".join(lines)
                return Decision(
                    Communicate(targets=teammates, opening=opening),
                    rationale=f"sharing {len(lines)} discovery report(s) with the team",
                )

        # 4. Ferry work: transportable goal entities.
        def transportable_visible(e: VisibleEntity) -> bool:
            if e.carried_by is not None or not e.interactive:
                return False
            dest = self._deliver_region(ctx, e.name)
            if dest is None or observation.region_name == dest:
                return False
            if e.kind == VICTIM and _is_critical(e.attributes) and not _is_stabilized(e.attributes):
                return False  # medic must stabilize first
            return True

        visible = [e for e in observation.visible_entities if transportable_visible(e)]
        if visible:
            target = self._nearest_visible(observation, ctx, visible)
            if target is not None:
                return self._move_or_interact(observation, ctx, target, "pick", "transport duty")

        def transportable_believed(b: BeliefRecord) -> bool:
            dest = self._deliver_region(ctx, b.entity)
            if dest is None or b.kind == OBSTACLE:
                return False
            if b.kind == VICTIM and b.critical and not b.stabilized:
                return False
            if ctx.region_at(b.cell) == ctx.region_ids.get(dest):
                return False  # already delivered
            return b.cell != observation.cell

        believed = self._believed_target(observation, agent, ctx, transportable_believed)
        if believed is not None:
            path = ctx.path_to_cell(observation.cell, believed.cell)
            if path is not None:
                return Decision(
                    Act(MoveTo(tuple(path))),
                    rationale=f"transport duty: reported {believed.entity} at {believed.cell}",
                )

        # 5. Explore the nearest unvisited region.
        unexplored = [
            rid for rid, name in enumerate(ctx.region_names) if rid not in agent.visited_regions
        ]
        best_plan = None
        best_key = None
        for rid in unexplored:
            plan = ctx.route_to_region(observation.cell, rid)
            if plan.empty:
                continue
            key = (plan.distance(), rid)
            if best_key is None or key < best_key:
                best_plan, best_key = plan, key
        if best_plan is not None:
            return Decision(
                Act(MoveTo(best_plan.path)),
                rationale=f"exploring {ctx.region_names[best_plan.target_region]} "
                f"({best_plan.distance()} steps away)",
            )

        return Decision(IdleFor(1), rationale="nothing actionable; holding position")

    def respond_to_invitation(
        self, observation: Observation, agent: AgentState, invitation: Message, ctx: PolicyContext
    ) -> bool:
        return True

    def speak(
        self, observation: Observation, agent: AgentState, conversation: Conversation, ctx: PolicyContext
    ) -> str:
        lines = [
            format_sighting(agent.beliefs[name])
            for name in sorted(agent.unshared_discoveries)
            if name in agent.beliefs
        ]
        if lines:
            return "Noted. My report: " + " ".join(lines)
        return f"Understood, thanks for the update. {END_MARKER}"


class SilentPolicy(ScriptedPolicy):
    """Scripted variant that never initiates or accepts conversations."""

    def decide(self, observation, agent, ctx):
        decision = super().decide(observation, agent, ctx)
        if isinstance(decision.variant, Communicate):
            return Decision(IdleFor(1), rationale="keeping findings to myself")
        return decision

    def respond_to_invitation(self, observation, agent, invitation, ctx):
        return False


# --- model-backed policy ------------------------------------------------------


def render_prompt(observation: Observation, agent: AgentState, ctx: PolicyContext, k: int = 5) -> tuple[str, str]:
    """(system, user) texts for a decision request. Versioned and stable."""
    profile = agent.profile
    system = (
        f"You are {profile.name}, the team's {profile.role}. "
        f"Traits: {', '.join(f'{k_}={v}' for k_, v in sorted(profile.personality.items())) or 'none listed'}. "
        f"Trust level: {profile.trust_level}. Reply with exactly one grammar line."
    )
    memories = agent.memory.retrieve(f"{observation.region_name} {profile.role}", k=k)
    lines = [f"[format v{PROMPT_FORMAT_VERSION}]"]
    lines.append("[profile]")
    lines.append(f"name: {profile.name}; role: {profile.role}")
    lines.append("[goal]")
    lines.append(ctx.goal_statement)
    lines.append("[observation]")
    lines.append(
        f"step {observation.step}, {observation.remaining_steps} steps remain; "
        f"in {observation.region_name} at {observation.cell}; carrying: {observation.carrying or 'nothing'}"
    )
    for e in observation.visible_entities:
        attrs = ", ".join(f"{k_}={v}" for k_, v in sorted(e.attributes.items()))
        lines.append(f"entity: {e.name} ({e.kind}) at {e.cell}" + (f" [{attrs}]" if attrs else ""))
    for a in observation.co_located_agents:
        lines.append(f"teammate here: {a.name} ({a.role})")
    if observation.last_result:
        lines.append(f"last result: {observation.last_result}")
    for msg in observation.pending_messages:
        lines.append(f"message from {msg.sender}: {msg.text}")
    lines.append("[memories]")
    for sm in memories:
        lines.append(f"- [{sm.record.id}] {sm.record.text}")
    lines.append("[allowed actions]")
    lines.append("ACTION MOVE_TO_REGION <region name> | ACTION MOVE_TO_CELL <x> <y> | ACTION PICK_UP <entity>")
    lines.append("ACTION PUT_DOWN | ACTION USE_ON <entity> <verb> | COMMUNICATE <name>[,<name>]: <text> | IDLE <steps>")
    lines.append(f"regions: {', '.join(ctx.region_names)}")
    return system, "\n".join(lines)


def parse_decision_reply(
    text: str, observation: Observation, agent: AgentState, ctx: PolicyContext
) -> Decision:
    """Parse one grammar line into a Decision; raises ValueError when malformed."""
    line = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if not line:
        raise ValueError("empty reply")
    upper = line.upper()
    if upper.startswith("IDLE"):
        parts = line.split()
        steps = int(parts[1]) if len(parts) > 1 and parts[1].isdigit() else 1
        return Decision(IdleFor(max(steps, 1)), rationale=f"model reply: {line}")
    if upper.startswith("COMMUNICATE"):
        rest = line[len("COMMUNICATE") :].strip()
        if ":" not in rest:
            raise ValueError("COMMUNICATE needs '<targets>: <message>'")
        target_part, message = rest.split(":", 1)
        targets = tuple(t.strip() for t in target_part.split(",") if t.strip())
        unknown = [t for t in targets if t not in ctx.members or t == agent.name]
        if not targets or unknown:
            raise ValueError(f"bad communicate targets {targets!r}")
        return Decision(Communicate(targets=targets, opening=message.strip()), rationale=f"model reply: {line}")
    if not upper.startswith("ACTION"):
        raise ValueError(f"unrecognized reply {line!r}")
    rest = line[len("ACTION") :].strip()
    upper_rest = rest.upper()
    if upper_rest.startswith("MOVE_TO_REGION"):
        name = rest[len("MOVE_TO_REGION") :].strip()
        if name not in ctx.region_ids:
            raise ValueError(f"unknown region {name!r}")
        plan = ctx.route_to_region(observation.cell, ctx.region_ids[name])
        if plan.empty:
            return Decision(IdleFor(1), rationale=f"model reply: {line} (already there)")
        return Decision(Act(MoveTo(plan.path)), rationale=f"model reply: {line}")
    if upper_rest.startswith("MOVE_TO_CELL"):
        parts = rest.split()
        if len(parts) != 3:
            raise ValueError("MOVE_TO_CELL needs x and y")
        cell = (int(parts[1]), int(parts[2]))
        path = ctx.path_to_cell(observation.cell, cell)
        if path is None:
            raise ValueError(f"cell {cell} unreachable")
        return Decision(Act(MoveTo(tuple(path))), rationale=f"model reply: {line}")
    if upper_rest.startswith("PICK_UP"):
        entity = rest[len("PICK_UP") :].strip()
        if not entity:
            raise ValueError("PICK_UP needs an entity")
        return Decision(Act(PickUp(entity)), rationale=f"model reply: {line}")
    if upper_rest.startswith("PUT_DOWN"):
        if agent.carrying is None:
            raise ValueError("not carrying anything")
        return Decision(Act(PutDown(agent.carrying)), rationale=f"model reply: {line}")
    if upper_rest.startswith("USE_ON"):
        parts = rest.split()
        if len(parts) < 3:
            raise ValueError("USE_ON needs entity and verb")
        return Decision(Act(UseOn(parts[1], parts[2])), rationale=f"model reply: {line}")
    raise ValueError(f"unrecognized action {rest!r}")


class LLMPolicy:
    """Model-backed policy: structured prompt out, grammar line back in."""

    def __init__(self, client: CompletionClient, memories_k: int = 5):
        self.client = client
        self.memories_k = memories_k

    def _complete(self, system: str, user: str, tag: str = "decision") -> str:
        reply = self.client.complete(
            CompletionRequest(system=system, user=user, tag=tag, max_reply_chars=400)
        )
        return reply.text

    def decide(self, observation: Observation, agent: AgentState, ctx: PolicyContext) -> Decision:
        system, user = render_prompt(observation, agent, ctx, k=self.memories_k)
        try:
            text = self._complete(system, user)
        except Exception as exc:
            raise PolicyFailure(f"decision backend failed: {exc}") from exc
        try:
            return parse_decision_reply(text, observation, agent, ctx)
        except ValueError as first_error:
            retry_user = user + f"\n[error]\nYour previous reply was malformed: {first_error}. Reply with one grammar line."
            try:
                text = self._complete(system, retry_user)
                return parse_decision_reply(text, observation, agent, ctx)
            except Exception:
                return Decision(IdleFor(1), rationale=f"malformed model reply twice ({first_error}); idling")

    def respond_to_invitation(
        self, observation: Observation, agent: AgentState, invitation: Message, ctx: PolicyContext
    ) -> bool:
        system, user = render_prompt(observation, agent, ctx, k=self.memories_k)
        user += f"\n[invitation]\n{invitation.sender} invites you to talk: {invitation.text}\nReply LISTEN or IGNORE."
        try:
            text = self._complete(system, user)
        except Exception:
            return False
        return text.strip().upper().startswith("LISTEN")

    def speak(
        self, observation: Observation, agent: AgentState, conversation: Conversation, ctx: PolicyContext
    ) -> str:
        system, user = render_prompt(observation, agent, ctx, k=self.memories_k)
        transcript = "\n".join(f"{t.speaker}: {t.text}" for t in conversation.transcript[-6:])
        user += f"\n[conversation]\n{transcript}\nReply 'SAY <text>'; append {END_MARKER} to finish."
        try:
            text = self._complete(system, user)
        except Exception:
            return f"I need to get back to work. {END_MARKER}"
        line = text.strip()
        if line.upper().startswith("SAY"):
            line = line[3:].strip()
        return line or f"Nothing to add. {END_MARKER}"
