"""The simulation loop: validate, schedule, advance, resolve, evaluate.

One tick advances the clock by exactly one step, resolves every event due at
that step in (due, sequence) order, then collects decisions from idle agents
in ascending agent-index order. An invalid decision earns exactly one
re-prompt carrying the rejection reason; a second invalid decision forces a
one-step idle. The loop is single-threaded over world state; determinism
comes from total ordering everywhere (event ids, agent indexes, sorted
iteration) plus seeded randomness in world generation.

Engine events are simultaneously appended to the run log and fanned out to
registered listeners (the service streams them to clients).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from teamsim.agents.memory import Embedder
from teamsim.agents.policy import (
    CLEAR_VERB,
    Policy,
    PolicyContext,
    STABILIZE_VERB,
    parse_sightings,
)
from teamsim.agents.state import (
    Act,
    AgentState,
    BeliefRecord,
    Communicate,
    Decision,
    IdleFor,
    Message,
    seed_knowledge,
)
from teamsim.dialogue import conversation as dialogue
from teamsim.dialogue.conversation import Conversation, SpeakerSelector
from teamsim.engine.events import (
    ACTION,
    COMMUNICATION,
    ConversationTurn,
    DURATION_TURN,
    Event,
    EventQueue,
    Idle,
    MoveTo,
    PickUp,
    PutDown,
    SimClock,
    UseOn,
    action_duration,
)
from teamsim.engine.observation import Observation, build_observation
from teamsim.engine.validate import JudgePolicy, validate_event
from teamsim.errors import ParticipantBusy, PolicyFailure
from teamsim.evaluation.predicate import delivery_targets, evaluate_predicate, predicate_to_doc
from teamsim.evaluation.runlog import RunLog, RunLogBuilder
from teamsim.evaluation.survey import DEFAULT_ITEMS, SurveyItem, administer_survey
from teamsim.llm.adapter import CompletionClient
from teamsim.scenario.model import Scenario
from teamsim.world.changes import (
    MoveAgent,
    PickUpEntity,
    PutDownEntity,
    RemoveEntity,
    SetEntityAttribute,
    apply_world_change,
)
from teamsim.world.generate import generate_environment
from teamsim.world.pathfind import directions_to_region, shortest_path
from teamsim.world.place import place_agents, place_entities
from teamsim.world.snapshot import export_snapshot
from teamsim.world.types import World

START_REGION = 0

OUTCOME_SUCCESS = "success"
OUTCOME_TIME_LIMIT = "time_limit"
OUTCOME_ABORTED = "aborted"

EngineListener = Callable[[dict], None]


@dataclass
class TickReport:
    step: int
    resolved_events: int
    deltas: int
    decisions: int


@dataclass
class RunResult:
    outcome: str
    final_step: int
    success_step: Optional[int]
    log: RunLog


@dataclass
class _Busy:
    kind: str  # "event" | "await" | "conversation"
    ref: int


class Simulation:
    """A single run's mutable state. Construct, then call ``run()``, or drive
    ``initial_decisions()`` + ``tick()`` manually."""

    def __init__(
        self,
        scenario: Scenario,
        policies: dict[str, Policy],
        seed: Optional[int] = None,
        max_steps: Optional[int] = None,
        judge: JudgePolicy | None = None,
        speaker_selector: SpeakerSelector | None = None,
        embedder: Embedder | None = None,
        listeners: tuple[EngineListener, ...] = (),
    ):
        missing = [m.name for m in scenario.members if m.name not in policies]
        if missing:
            raise ValueError(f"no policy bound for member(s) {missing}")
        self.scenario = scenario
        self.policies = policies
        self.seed = scenario.seed if seed is None else seed
        self.max_steps = scenario.max_steps if max_steps is None else max_steps
        self.judge = judge
        self.speaker_selector = speaker_selector
        self._listeners = list(listeners)

        grid, tree, adjacency = generate_environment(scenario.env_spec, self.seed)
        placements = place_entities(list(scenario.entities), tree, grid, self.seed)
        agent_cells = place_agents(
            [m.name for m in scenario.members], START_REGION, grid, self.seed
        )
        self.world = World(
            grid=grid,
            tree=tree,
            adjacency=adjacency,
            entity_specs={e.name: e for e in scenario.entities},
            placements={p.entity: p for p in placements},
            agent_positions=agent_cells,
            clock=0,
        )

        self.agents: dict[str, AgentState] = {}
        start_region_name = tree.leaf(START_REGION).name
        from teamsim.agents.memory import MemoryStore

        for index, member in enumerate(scenario.members):
            state = AgentState(
                profile=member,
                index=index,
                position=agent_cells[member.name],
                memory=MemoryStore(embedder) if embedder else MemoryStore(),
            )
            seed_knowledge(state, scenario, start_region_name)
            self.agents[member.name] = state

        self.clock = SimClock()
        self.queue = EventQueue()
        self.busy: dict[str, _Busy] = {}
        self.conversations: dict[int, Conversation] = {}
        self._next_event_id = 0
        self._next_conversation_id = 0
        self._success_step: Optional[int] = None

        self.log = RunLogBuilder(scenario.id, self.seed, scenario.title)
        self.log.header["goal_predicate"] = predicate_to_doc(scenario.goal.predicate)
        self.log.set_snapshot(export_snapshot(self.world))

        self.ctx = PolicyContext(
            region_names=tuple(leaf.name for leaf in tree.leaves),
            region_ids={leaf.name: leaf.region_id for leaf in tree.leaves},
            delivery=delivery_targets(scenario.goal.predicate),
            members=tuple(m.name for m in scenario.members),
            roles={m.name: m.role for m in scenario.members},
            goal_statement=scenario.goal.statement,
            route_to_region=lambda cell, rid: directions_to_region(grid, adjacency, cell, rid),
            path_to_cell=lambda a, b: shortest_path(grid, a, b),
            entity_kind=lambda name: (
                self.world.entity_specs[name].kind if name in self.world.entity_specs else None
            ),
            region_at=lambda cell: grid.region_at(*cell),
        )
        self._delivery_region_ids = {
            kind: self.ctx.region_ids[region]
            for kind, region in self.ctx.delivery.items()
            if region in self.ctx.region_ids
        }

    # -- plumbing --------------------------------------------------------------

    def add_listener(self, listener: EngineListener) -> None:
        self._listeners.append(listener)

    def _record(self, kind: str, payload: dict, agent: str | None = None, rationale: str = "") -> None:
        rec = self.log.record(self.clock.current_step, kind, payload, agent, rationale)
        doc = rec.to_doc()
        for listener in self._listeners:
            listener(doc)

    def _is_idle(self, name: str) -> bool:
        return name not in self.busy

    def agent_order(self) -> list[str]:
        return sorted(self.agents, key=lambda n: self.agents[n].index)

    # -- knowledge maintenance ---------------------------------------------------

    def _entity_delivered(self, belief: BeliefRecord) -> bool:
        target = self._delivery_region_ids.get(belief.entity) or self._delivery_region_ids.get(belief.kind)
        return target is not None and self.world.grid.region_at(*belief.cell) == target

    def _refresh_knowledge(self, agent: AgentState, obs: Observation) -> None:
        agent.visited_regions.add(obs.region_id)
        visible_names = set()
        for e in obs.visible_entities:
            if e.carried_by is not None:
                continue
            visible_names.add(e.name)
            critical = e.attributes.get("severity") == "critical"
            stabilized = e.attributes.get("stabilized") == "true"
            old = agent.beliefs.get(e.name)
            if old is None or (old.cell, old.critical, old.stabilized) != (e.cell, critical, stabilized):
                belief = BeliefRecord(
                    entity=e.name, kind=e.kind, cell=e.cell,
                    critical=critical, stabilized=stabilized, step=obs.step,
                )
                agent.beliefs[e.name] = belief
                agent.memory.add(
                    f"I can see {e.name} ({e.kind}) in {obs.region_name} at {e.cell}"
                    + (" in critical condition" if critical and not stabilized else "")
                    + (" already stabilized" if stabilized else ""),
                    "observation",
                    obs.step,
                )
                if not self._entity_delivered(belief):
                    agent.unshared_discoveries.add(e.name)
                else:
                    agent.unshared_discoveries.discard(e.name)
        # Drop beliefs about this region that no longer hold.
        for name in list(agent.beliefs):
            belief = agent.beliefs[name]
            if name not in visible_names and self.world.grid.region_at(*belief.cell) == obs.region_id:
                del agent.beliefs[name]
                agent.unshared_discoveries.discard(name)

    def _ingest_message(self, agent: AgentState, text: str, step: int) -> None:
        for sighting in parse_sightings(text):
            old = agent.beliefs.get(sighting.entity)
            if old is None or old.step <= step:
                sighting.step = step
                agent.beliefs[sighting.entity] = sighting

    # -- scheduling ----------------------------------------------------------------

    def _new_event(self, kind: str, participants: tuple[str, ...], duration: int, context: str,
                   action=None, turn=None) -> Event:
        event = Event(
            id=self._next_event_id,
            kind=kind,
            start_step=self.clock.current_step,
            duration_steps=duration,
            participants=participants,
            context=context,
            action=action,
            turn=turn,
        )
        self._next_event_id += 1
        return event

    def schedule(self, event: Event) -> None:
        for name in event.participants:
            current = self.busy.get(name)
            if current is not None and not (
                event.turn is not None
                and current.kind == "conversation"
                and current.ref == event.turn.conversation_id
            ):
                raise ParticipantBusy(f"{name} is already committed ({current.kind} {current.ref})")
        for name in event.participants:
            if event.turn is not None:
                self.busy[name] = _Busy("conversation", event.turn.conversation_id)
            else:
                self.busy[name] = _Busy("event", event.id)
        self.queue.push(event)
        self._record(
            "scheduled",
            {
                "event": event.id,
                "event_kind": event.kind,
                "description": event.describe(),
                "participants": list(event.participants),
                "start": event.start_step,
                "duration": event.duration_steps,
                "due": event.due_step,
            },
            agent=event.participants[0],
            rationale=event.context,
        )

    # -- resolution ------------------------------------------------------------------

    def _free(self, name: str) -> None:
        self.busy.pop(name, None)

    def _notify_region(self, actor: str, text: str) -> None:
        cell = self.world.agent_positions[actor]
        region = self.world.grid.region_at(*cell)
        for other in self.agent_order():
            if other == actor:
                continue
            other_cell = self.world.agent_positions[other]
            if self.world.grid.region_at(*other_cell) == region:
                self.agents[other].pending_messages.append(
                    Message(step=self.clock.current_step, sender=actor, text=text, kind="outcome")
                )

    def _apply_changes(self, event: Event, changes: list) -> None:
        for change in changes:
            self.world, delta = apply_world_change(self.world, change)
            self._record("delta", delta.to_doc(), agent=event.participants[0])

    def _resolve_action(self, event: Event) -> None:
        actor = event.participants[0]
        agent = self.agents[actor]
        action = event.action
        description = event.describe()
        if not isinstance(action, Idle):
            # The world may have moved on since validation (another agent
            # carried the entity away, cleared the obstacle, ...); a stale
            # event fails without effect instead of corrupting state.
            verdict = validate_event(event, self.world)
            if not verdict.valid:
                agent.last_result = f"failed: {verdict.reason}"
                agent.memory.add(
                    f"My attempt to {description} failed: {verdict.reason}.",
                    "outcome",
                    self.clock.current_step,
                )
                self._record(
                    "resolved",
                    {
                        "event": event.id,
                        "description": description,
                        "participants": list(event.participants),
                        "failed": verdict.reason,
                    },
                    agent=actor,
                )
                return
        if isinstance(action, MoveTo):
            self._apply_changes(event, [MoveAgent(actor, action.path)])
            agent.position = action.path[-1]
            region_name = self.world.region_name_at(agent.position)
            agent.last_result = f"completed: arrived in {region_name} at {agent.position}"
        elif isinstance(action, PickUp):
            self._apply_changes(event, [PickUpEntity(actor, action.entity)])
            agent.carrying = action.entity
            agent.beliefs.pop(action.entity, None)
            agent.unshared_discoveries.discard(action.entity)
            agent.last_result = f"completed: picked up {action.entity}"
            self._notify_region(actor, f"{actor} picked up {action.entity}")
        elif isinstance(action, PutDown):
            self._apply_changes(event, [PutDownEntity(actor, action.entity)])
            agent.carrying = None
            cell = self.world.agent_positions[actor]
            spec = self.world.entity_specs[action.entity]
            agent.beliefs[action.entity] = BeliefRecord(
                entity=action.entity,
                kind=spec.kind,
                cell=cell,
                critical=spec.attributes.get("severity") == "critical",
                stabilized=spec.attributes.get("stabilized") == "true",
                step=self.clock.current_step,
            )
            agent.last_result = f"completed: put down {action.entity}"
            self._notify_region(actor, f"{actor} put down {action.entity}")
        elif isinstance(action, UseOn):
            if action.verb == STABILIZE_VERB:
                changes = [SetEntityAttribute(actor, action.entity, "stabilized", "true")]
            elif action.verb == CLEAR_VERB:
                changes = [RemoveEntity(actor, action.entity)]
            else:
                changes = [SetEntityAttribute(actor, action.entity, "last_verb", action.verb)]
            self._apply_changes(event, changes)
            if action.verb == CLEAR_VERB:
                agent.beliefs.pop(action.entity, None)
                agent.unshared_discoveries.discard(action.entity)
            agent.last_result = f"completed: {action.verb} on {action.entity}"
            self._notify_region(actor, f"{actor} applied {action.verb} to {action.entity}")
        elif isinstance(action, Idle):
            agent.last_result = "completed: idled"
        if not isinstance(action, Idle):
            agent.memory.add(
                f"I {description} (finished at step {self.clock.current_step}).",
                "outcome",
                self.clock.current_step,
            )
        self._record(
            "resolved",
            {"event": event.id, "description": description, "participants": list(event.participants)},
            agent=actor,
        )

    def _resolve_turn(self, event: Event) -> None:
        turn = event.turn
        conv = self.conversations[turn.conversation_id]
        step = self.clock.current_step
        conv.append_turn(step, turn.speaker, turn.text)
        listeners = [p for p in conv.participants if p != turn.speaker]
        for listener in listeners:
            self.agents[listener].memory.add(f"{turn.speaker} said: {turn.text}", "message", step)
            self._ingest_message(self.agents[listener], turn.text, step)
        speaker_agent = self.agents[turn.speaker]
        for sighting in parse_sightings(turn.text):
            speaker_agent.unshared_discoveries.discard(sighting.entity)
        speaker_agent.share_failures = 0
        self._record(
            "message",
            {
                "conversation": conv.id,
                "text": turn.text,
                "listeners": listeners,
                "turn": conv.turns,
            },
            agent=turn.speaker,
        )
        self._record(
            "resolved",
            {"event": event.id, "description": event.describe(), "participants": list(event.participants)},
            agent=turn.speaker,
        )
        reason = dialogue.should_terminate(conv)
        if reason is not None:
            self._close_conversation(conv, reason)
            return
        next_speaker = dialogue.select_next_speaker(
            conv,
            selector=self.speaker_selector,
            warn=lambda msg: self._record("warning", {"message": msg}, agent=None),
        )
        agent = self.agents[next_speaker]
        obs = build_observation(self.world, self.agents, next_speaker, self.max_steps)
        try:
            text = self.policies[next_speaker].speak(obs, agent, conv, self.ctx)
        except Exception as exc:
            self._record("policy_failure", {"error": str(exc)}, agent=next_speaker)
            text = f"I need to focus on the mission. {dialogue.END_MARKER}"
        self.schedule(
            self._new_event(
                COMMUNICATION,
                tuple(conv.participants),
                DURATION_TURN,
                context=f"conversation {conv.id} turn {conv.turns + 1}",
                turn=ConversationTurn(conv.id, next_speaker, text),
            )
        )

    def _close_conversation(self, conv: Conversation, reason: str) -> None:
        conv.close(reason)
        for name in conv.participants or [conv.initiator]:
            self._free(name)
            self.agents[name].last_result = f"conversation closed ({reason})"
        if reason == "unanswered":
            self.agents[conv.initiator].share_failures += 1
        self._record(
            "conversation_closed",
            {"conversation": conv.id, "reason": reason, "turns": conv.turns,
             "participants": list(conv.participants) or [conv.initiator]},
            agent=conv.initiator,
        )

    # -- invitations ---------------------------------------------------------------

    def _start_conversation(self, initiator: str, decision: Decision) -> None:
        variant = decision.variant
        conv = dialogue.start_conversation(
            self._next_conversation_id,
            initiator,
            list(variant.targets),
            variant.opening,
            self.clock.current_step,
        )
        self._next_conversation_id += 1
        self.conversations[conv.id] = conv
        self.busy[initiator] = _Busy("await", conv.id)
        for target in conv.invited:
            self.agents[target].pending_messages.append(
                Message(
                    step=self.clock.current_step,
                    sender=initiator,
                    text=variant.opening,
                    kind="invitation",
                    conversation_id=conv.id,
                )
            )
        self._record(
            "decision",
            {"variant": "communicate", "targets": list(conv.invited), "opening": variant.opening,
             "conversation": conv.id},
            agent=initiator,
            rationale=decision.rationale,
        )

    def _maybe_open(self, conv: Conversation) -> None:
        if not conv.try_open():
            return
        if conv.state == dialogue.OPEN:
            for name in conv.participants:
                self.busy[name] = _Busy("conversation", conv.id)
            self.schedule(
                self._new_event(
                    COMMUNICATION,
                    tuple(conv.participants),
                    DURATION_TURN,
                    context=f"conversation {conv.id} opening",
                    turn=ConversationTurn(conv.id, conv.initiator, conv.opening),
                )
            )
        elif conv.state == dialogue.CLOSED:
            self._close_conversation_pending(conv)

    def _close_conversation_pending(self, conv: Conversation) -> None:
        # Closed before opening: only the initiator was committed.
        self._free(conv.initiator)
        self.agents[conv.initiator].last_result = f"conversation closed ({conv.close_reason})"
        if conv.close_reason == "unanswered":
            self.agents[conv.initiator].share_failures += 1
        self._record(
            "conversation_closed",
            {"conversation": conv.id, "reason": conv.close_reason, "turns": conv.turns,
             "participants": [conv.initiator]},
            agent=conv.initiator,
        )

    def _expire_invitations(self) -> None:
        for conv in list(self.conversations.values()):
            if conv.state != dialogue.PENDING:
                continue
            for target in conv.expire_stale(self.clock.current_step):
                self._record(
                    "invitation",
                    {"conversation": conv.id, "from": conv.initiator, "response": "expired"},
                    agent=target,
                )
                # An expired invitation no longer awaits an answer.
                self.agents[target].pending_messages = [
                    m
                    for m in self.agents[target].pending_messages
                    if not (m.kind == "invitation" and m.conversation_id == conv.id)
                ]
            self._maybe_open(conv)

    def _respond_invitation(self, name: str, obs: Observation, invitation: Message) -> bool:
        """Returns True when the agent joined a conversation (now busy)."""
        agent = self.agents[name]
        conv = self.conversations.get(invitation.conversation_id)
        agent.pending_messages = [m for m in agent.pending_messages if m is not invitation]
        if conv is None or conv.state != dialogue.PENDING or name in conv.responses:
            return False
        policy = self.policies[name]
        try:
            listen = policy.respond_to_invitation(obs, agent, invitation, self.ctx)
        except Exception as exc:
            self._record("policy_failure", {"error": str(exc)}, agent=name)
            listen = False
        conv.respond(name, listen)
        self._record(
            "invitation",
            {"conversation": conv.id, "from": conv.initiator, "response": "listen" if listen else "ignore"},
            agent=name,
        )
        if listen:
            self.busy[name] = _Busy("await", conv.id)
        self._maybe_open(conv)
        return listen

    # -- decisions -------------------------------------------------------------------

    def _decision_to_event(self, name: str, decision: Decision) -> Event | None:
        variant = decision.variant
        if isinstance(variant, Act):
            return self._new_event(
                ACTION, (name,), action_duration(variant.action), decision.rationale, action=variant.action
            )
        if isinstance(variant, IdleFor):
            action = Idle(max(variant.steps, 1))
            return self._new_event(ACTION, (name,), action_duration(action), decision.rationale, action=action)
        if isinstance(variant, Communicate):
            return self._new_event(
                COMMUNICATION,
                (name, *variant.targets),
                DURATION_TURN,
                decision.rationale,
                turn=ConversationTurn(-1, name, variant.opening),
            )
        raise PolicyFailure(f"unknown decision variant {variant!r}")

    def _collect_decision(self, name: str) -> bool:
        """One decision point for an idle agent; True if anything was scheduled."""
        agent = self.agents[name]
        obs = build_observation(self.world, self.agents, name, self.max_steps)
        self._refresh_knowledge(agent, obs)

        invitation = next((m for m in agent.pending_messages if m.kind == "invitation"), None)
        if invitation is not None:
            joined = self._respond_invitation(name, obs, invitation)
            if joined:
                return True
            obs = build_observation(self.world, self.agents, name, self.max_steps)

        policy = self.policies[name]
        try:
            decision = policy.decide(obs, agent, self.ctx)
        except Exception as exc:
            self._record("policy_failure", {"error": str(exc)}, agent=name)
            self._force_idle(name, "policy failure")
            self._consume_messages(agent)
            return True

        scheduled = self._try_schedule_decision(name, decision, obs, reprompt_allowed=True)
        self._consume_messages(agent)
        return scheduled

    def _consume_messages(self, agent: AgentState) -> None:
        """Observed messages are consumed; unanswered invitations persist."""
        agent.pending_messages = [m for m in agent.pending_messages if m.kind == "invitation"]
        agent.last_result = None

    def _try_schedule_decision(
        self, name: str, decision: Decision, obs: Observation, reprompt_allowed: bool
    ) -> bool:
        agent = self.agents[name]
        if isinstance(decision.variant, Communicate):
            probe = self._decision_to_event(name, decision)
            verdict = validate_event(probe, self.world, self.judge)
            if verdict.valid:
                self._start_conversation(name, decision)
                return True
        else:
            event = self._decision_to_event(name, decision)
            verdict = validate_event(event, self.world, self.judge)
            if verdict.valid:
                self._record(
                    "decision",
                    {"variant": "act", "description": event.describe()},
                    agent=name,
                    rationale=decision.rationale,
                )
                self.schedule(event)
                return True

        self._record("rejected", {"reason": verdict.reason, "description": decision.rationale}, agent=name)
        if not reprompt_allowed:
            self._force_idle(name, f"second invalid decision ({verdict.reason})")
            return True
        agent.last_result = f"rejected: {verdict.reason}"
        retry_obs = build_observation(self.world, self.agents, name, self.max_steps)
        policy = self.policies[name]
        try:
            retry = policy.decide(retry_obs, agent, self.ctx)
        except Exception as exc:
            self._record("policy_failure", {"error": str(exc)}, agent=name)
            self._force_idle(name, "policy failure on re-prompt")
            return True
        return self._try_schedule_decision(name, retry, retry_obs, reprompt_allowed=False)

    def _force_idle(self, name: str, why: str) -> None:
        event = self._new_event(ACTION, (name,), 1, f"forced idle: {why}", action=Idle(1))
        self.schedule(event)

    # -- the loop ---------------------------------------------------------------------

    def initial_decisions(self) -> int:
        count = 0
        for name in self.agent_order():
            if self._is_idle(name):
                if self._collect_decision(name):
                    count += 1
        return count

    def tick(self) -> TickReport:
        step = self.clock.advance()
        self.world = self.world.with_clock(step)
        self._expire_invitations()

        resolved = 0
        deltas_before = len(self.log.records)
        for event in self.queue.pop_due(step):
            for name in event.participants:
                current = self.busy.get(name)
                if current is not None and current.kind == "event" and current.ref == event.id:
                    self._free(name)
                elif current is not None and current.kind == "conversation" and event.turn is not None:
                    self._free(name)
            if event.kind == ACTION:
                self._resolve_action(event)
            else:
                self._resolve_turn(event)
            resolved += 1

        decisions = 0
        for name in self.agent_order():
            if self._is_idle(name):
                if self._collect_decision(name):
                    decisions += 1

        delta_count = sum(
            1 for r in self.log.records[deltas_before:] if r.kind == "delta"
        )
        return TickReport(step=step, resolved_events=resolved, deltas=delta_count, decisions=decisions)

    def success(self) -> bool:
        return evaluate_predicate(self.scenario.goal.predicate, self.world)

    def run(
        self,
        survey_client: CompletionClient | None = None,
        survey_items: tuple[SurveyItem, ...] = DEFAULT_ITEMS,
        tick_gate: Callable[[], bool] | None = None,
    ) -> RunResult:
        """Run to success or the step cap. ``tick_gate`` is called before each
        tick; returning False aborts the run (the service uses it for
        pause/abort)."""
        self.initial_decisions()
        outcome = OUTCOME_TIME_LIMIT
        while self.clock.current_step < self.max_steps:
            if tick_gate is not None and not tick_gate():
                outcome = OUTCOME_ABORTED
                break
            self.tick()
            if self.success():
                self._success_step = self.clock.current_step
                self._record("success", {"step": self.clock.current_step})
                outcome = OUTCOME_SUCCESS
                break
        final_step = self.clock.current_step
        self._record("ended", {"outcome": outcome, "step": final_step})

        survey_docs: list[dict] = []
        if survey_client is not None:
            responses = administer_survey(
                [self.agents[n] for n in self.agent_order()], survey_items, survey_client
            )
            survey_docs = [r.to_doc() for r in responses]

        from teamsim.evaluation.metrics import compute_metrics

        final_snapshot = export_snapshot(self.world)
        log = self.log.build(survey=survey_docs, metrics={}, final_snapshot=final_snapshot)
        log.metrics = compute_metrics(log).to_doc()
        return RunResult(
            outcome=outcome,
            final_step=final_step,
            success_step=self._success_step,
            log=log,
        )
