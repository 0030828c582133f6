"""Conversation lifecycle: invitations, speaker selection, termination."""

from __future__ import annotations

import pytest

from teamsim.agents.policy import ScriptedPolicy
from teamsim.agents.state import Communicate, Decision, IdleFor
from teamsim.dialogue.conversation import (
    DEFAULT_MAX_TURNS,
    END_MARKER,
    Conversation,
    select_next_speaker,
    should_terminate,
    start_conversation,
)
from teamsim.engine.loop import Simulation
from teamsim.errors import NoTargets
from teamsim.scenario import parse_scenario

from test_engine import QueuedPolicy


def open_conversation(participants, max_turns=DEFAULT_MAX_TURNS) -> Conversation:
    c = start_conversation(0, participants[0], list(participants[1:]), "hello", 0, max_turns)
    for target in participants[1:]:
        c.respond(target, True)
    assert c.try_open()
    return c


# --- state machine ----------------------------------------------------------------


def test_no_targets_raises():
    with pytest.raises(NoTargets):
        start_conversation(0, "A", [], "hi", 0)
    with pytest.raises(NoTargets):
        start_conversation(0, "A", ["A"], "hi", 0)


def test_all_ignore_closes_unanswered():
    c = start_conversation(0, "A", ["B", "C"], "hi", 0)
    c.respond("B", False)
    c.respond("C", False)
    c.try_open()
    assert c.state == "closed" and c.close_reason == "unanswered"


def test_partial_listen_opens_with_listeners_only():
    c = start_conversation(0, "A", ["B", "C"], "hi", 0)
    c.respond("B", True)
    c.respond("C", False)
    c.try_open()
    assert c.state == "open"
    assert c.participants == ["A", "B"]


def test_expiry_counts_as_ignore():
    c = start_conversation(0, "A", ["B"], "hi", step=10)
    assert c.expire_stale(14) == []
    assert c.expire_stale(15) == ["B"]
    c.try_open()
    assert c.state == "closed" and c.close_reason == "unanswered"


def test_round_robin_excludes_last_speaker():
    c = open_conversation(["A", "B", "C"])
    c.append_turn(0, "A", "no names mentioned")
    assert select_next_speaker(c) == "B"
    c.append_turn(1, "B", "still no names")
    assert select_next_speaker(c) == "C"
    c.append_turn(2, "C", "rolling over")
    assert select_next_speaker(c) == "A"


def test_mention_rule_selects_named_participant():
    c = open_conversation(["A", "B", "C"])
    c.append_turn(0, "A", "C, what did you find")
    assert select_next_speaker(c) == "C"


def test_mention_of_last_speaker_falls_back_to_round_robin():
    c = open_conversation(["A", "B", "C"])
    c.append_turn(0, "A", "as A said before, A is sure")
    assert select_next_speaker(c) == "B"


def test_adapter_returning_last_speaker_is_overridden():
    c = open_conversation(["A", "B", "C"])
    c.append_turn(0, "A", "hello")
    warnings = []
    chosen = select_next_speaker(c, selector=lambda conv: "A", warn=warnings.append)
    assert chosen == "B"
    assert warnings and "overridden" in warnings[0]


def test_adapter_choice_respected_when_legal():
    c = open_conversation(["A", "B", "C"])
    c.append_turn(0, "A", "hello")
    assert select_next_speaker(c, selector=lambda conv: "C") == "C"


def test_no_consecutive_same_speaker_enforced():
    c = open_conversation(["A", "B"])
    c.append_turn(0, "A", "one")
    with pytest.raises(ValueError):
        c.append_turn(1, "A", "two")


def test_terminate_on_max_turns():
    c = open_conversation(["A", "B"], max_turns=3)
    for i, speaker in enumerate(["A", "B", "A"]):
        c.append_turn(i, speaker, f"unique message {i} {'x' * i}")
    assert should_terminate(c) == "max_turns"


def test_terminate_on_redundancy():
    c = open_conversation(["A", "B"])
    c.append_turn(0, "A", "we found the victim near the door")
    c.append_turn(1, "B", "we found the victim near the door")
    assert should_terminate(c) == "redundant"


def test_terminate_on_end_marker():
    c = open_conversation(["A", "B"])
    c.append_turn(0, "A", "hello there")
    c.append_turn(1, "B", f"copy that {END_MARKER}")
    assert should_terminate(c) == "ended"


def test_fresh_conversation_does_not_terminate():
    c = open_conversation(["A", "B"])
    c.append_turn(0, "A", "first message")
    assert should_terminate(c) is None


# --- engine integration -------------------------------------------------------------


THREE_DOC = """\
format_version: 1
id: trio
seed: 2
max_steps: 60
env: {width: 10, height: 10, num_regions: 1}
members:
  - {name: A, role: Searcher, trust_level: high}
  - {name: B, role: Searcher, trust_level: high}
  - {name: C, role: Searcher, trust_level: high}
goal: {statement: chat, predicate: always_false}
"""


def run_trio(policy_a, policy_b, policy_c, max_steps=None):
    scenario = parse_scenario(THREE_DOC)
    sim = Simulation(scenario, {"A": policy_a, "B": policy_b, "C": policy_c}, max_steps=max_steps)
    result = sim.run()
    return sim, result


def test_accepted_invitation_opens_and_delivers_to_memory():
    talker = QueuedPolicy([Decision(Communicate(("B",), "hello B, report in"))])
    sim, result = run_trio(talker, QueuedPolicy(), QueuedPolicy(), max_steps=20)
    closed = [r for r in result.log.records if r.kind == "conversation_closed"]
    assert closed and closed[0].payload["reason"] in ("ended", "redundant", "max_turns")
    assert set(closed[0].payload["participants"]) == {"A", "B"}
    # B listened: the opening reached B's memory, and only B's
    assert any("hello B" in r.text for r in sim.agents["B"].memory.records if r.kind == "message")
    assert not any("hello B" in r.text for r in sim.agents["C"].memory.records if r.kind == "message")


def test_all_targets_ignoring_closes_unanswered():
    talker = QueuedPolicy([Decision(Communicate(("B", "C"), "anyone there?"))])
    deaf_b = QueuedPolicy(accept_invitations=False)
    deaf_c = QueuedPolicy(accept_invitations=False)
    sim, result = run_trio(talker, deaf_b, deaf_c, max_steps=20)
    closed = [r for r in result.log.records if r.kind == "conversation_closed"]
    assert closed and closed[0].payload["reason"] == "unanswered"
    assert not any("anyone there" in r.text for r in sim.agents["B"].memory.records)


def test_busy_target_expires_invitation_to_unanswered():
    from teamsim.engine.events import Idle
    from teamsim.agents.state import Act

    talker = QueuedPolicy([Decision(IdleFor(1)), Decision(Communicate(("B",), "wake up"))])
    sleeper = QueuedPolicy([Decision(Act(Idle(30)))], accept_invitations=False)
    sim, result = run_trio(talker, sleeper, QueuedPolicy(), max_steps=30)
    invitations = [r for r in result.log.records if r.kind == "invitation"]
    assert any(r.payload["response"] == "expired" for r in invitations)
    closed = [r for r in result.log.records if r.kind == "conversation_closed"]
    assert closed and closed[0].payload["reason"] == "unanswered"


class ChatterboxPolicy(QueuedPolicy):
    """Adversarial: always starts conversations, never stops talking."""

    def __init__(self, targets):
        super().__init__()
        self.targets = targets
        self.counter = 0

    def decide(self, observation, agent, ctx):
        return Decision(Communicate(tuple(self.targets), "so much to discuss, endlessly"))

    def speak(self, observation, agent, conversation, ctx):
        self.counter += 1
        return f"and another thing, point number {self.counter} of many distinct points {self.counter}"


def test_adversarial_talkers_always_terminate_within_cap():
    sim, result = run_trio(
        ChatterboxPolicy(["B", "C"]), ChatterboxPolicy(["A", "C"]), ChatterboxPolicy(["A", "B"]),
        max_steps=60,
    )
    closed = [r for r in result.log.records if r.kind == "conversation_closed"]
    assert closed, "no conversation ever closed"
    for rec in closed:
        assert rec.payload["turns"] <= DEFAULT_MAX_TURNS
    for conv in sim.conversations.values():
        if conv.state == "closed" and conv.transcript:
            speakers = [t.speaker for t in conv.transcript]
            assert all(a != b for a, b in zip(speakers, speakers[1:]))
