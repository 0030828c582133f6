"""Multi-party conversation state machine.

A conversation starts as a set of invitations. Invited agents answer
listen/ignore at their next decision point; invitations not answered within
INVITATION_TTL steps count as ignored. Once somebody listens, turns alternate
under a speaker-selection rule (explicit mention wins, else round-robin, never
the same speaker twice in a row) until a termination rule closes it: the turn
cap, a redundancy check on near-identical consecutive messages, or an explicit
end marker in an utterance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from teamsim.errors import NoTargets

INVITATION_TTL = 5
DEFAULT_MAX_TURNS = 8
REDUNDANCY_JACCARD = 0.8
END_MARKER = "[end]"

OPEN = "open"
PENDING = "pending"
CLOSED = "closed"

#: selector(conversation) -> proposed next speaker (may be overridden).
SpeakerSelector = Callable[["Conversation"], str]


@dataclass(frozen=True)
class TranscriptEntry:
    step: int
    speaker: str
    text: str


@dataclass
class Conversation:
    id: int
    initiator: str
    invited: tuple[str, ...]
    opening: str
    created_step: int
    max_turns: int = DEFAULT_MAX_TURNS
    state: str = PENDING
    close_reason: str = ""
    participants: list[str] = field(default_factory=list)
    transcript: list[TranscriptEntry] = field(default_factory=list)
    responses: dict[str, str] = field(default_factory=dict)  # target -> listen|ignore|expired

    @property
    def turns(self) -> int:
        return len(self.transcript)

    @property
    def last_speaker(self) -> Optional[str]:
        return self.transcript[-1].speaker if self.transcript else None

    def pending_targets(self) -> list[str]:
        return [t for t in self.invited if t not in self.responses]

    def respond(self, target: str, listen: bool) -> None:
        if target not in self.invited or target in self.responses:
            return
        self.responses[target] = "listen" if listen else "ignore"

    def expire_stale(self, step: int) -> list[str]:
        """Mark unanswered invitations as expired once the TTL passes."""
        expired = []
        if step - self.created_step >= INVITATION_TTL:
            for target in self.pending_targets():
                self.responses[target] = "expired"
                expired.append(target)
        return expired

    def all_responded(self) -> bool:
        return not self.pending_targets()

    def listeners(self) -> list[str]:
        return [t for t in self.invited if self.responses.get(t) == "listen"]

    def try_open(self) -> bool:
        """Move to Open once every invitation is answered and someone listened."""
        if self.state != PENDING or not self.all_responded():
            return False
        joined = self.listeners()
        if joined:
            self.participants = [self.initiator, *joined]
            self.state = OPEN
        else:
            self.close("unanswered")
        return True

    def append_turn(self, step: int, speaker: str, text: str) -> None:
        if self.transcript and self.transcript[-1].speaker == speaker:
            raise ValueError("consecutive turns by the same speaker")
        self.transcript.append(TranscriptEntry(step=step, speaker=speaker, text=text))

    def close(self, reason: str) -> None:
        self.state = CLOSED
        self.close_reason = reason


def start_conversation(
    conversation_id: int,
    initiator: str,
    targets: list[str],
    opening: str,
    step: int,
    max_turns: int = DEFAULT_MAX_TURNS,
) -> Conversation:
    targets = [t for t in targets if t != initiator]
    if not targets:
        raise NoTargets("conversation needs at least one target other than the initiator")
    return Conversation(
        id=conversation_id,
        initiator=initiator,
        invited=tuple(dict.fromkeys(targets)),
        opening=opening,
        created_step=step,
        max_turns=max_turns,
    )


def _round_robin(c: Conversation) -> str:
    last = c.last_speaker
    if last is None or last not in c.participants:
        return c.participants[0]
    i = c.participants.index(last)
    return c.participants[(i + 1) % len(c.participants)]


def select_next_speaker(
    c: Conversation,
    selector: SpeakerSelector | None = None,
    warn: Callable[[str], None] | None = None,
) -> str:
    """Mention rule, then round-robin; adapter proposals that repeat the last
    speaker are overridden."""
    last = c.last_speaker
    if selector is not None:
        proposed = selector(c)
        if proposed in c.participants and proposed != last:
            return proposed
        if warn is not None:
            warn(f"speaker selector proposed {proposed!r}; overridden to round-robin")
        return _round_robin(c)
    if c.transcript:
        text = c.transcript[-1].text
        for name in c.participants:
            if name != last and re.search(rf"\b{re.escape(name)}\b", text):
                return name
    return _round_robin(c)


def _token_set(text: str) -> set[str]:
    return set(re.findall(r"[a-z0-9]+", text.lower()))


def _jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def should_terminate(c: Conversation) -> Optional[str]:
    """Close reason if the conversation should end now, else None."""
    if c.turns >= c.max_turns:
        return "max_turns"
    if c.transcript and c.transcript[-1].text.strip().lower().endswith(END_MARKER):
        return "ended"
    if c.turns >= 2:
        last, prev = c.transcript[-1], c.transcript[-2]
        if _jaccard(_token_set(last.text), _token_set(prev.text)) >= REDUNDANCY_JACCARD:
            return "redundant"
    return None
