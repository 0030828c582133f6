"""Session management: one engine loop per session, streamed to subscribers.

The engine thread appends every engine record to a session-wide ring buffer;
subscribers read by cursor, so a slow client can never block the simulation.
Late joiners are handed a full world snapshot taken at a tick boundary, then
the records that follow it; if a cursor falls off the ring, the reader gets a
gap marker and resumes from the latest snapshot. Pacing, pause, resume, and
abort all act between ticks through the engine's tick gate, so a paused
session is parked at an exact step and resumes from it.
"""

from __future__ import annotations

import itertools
import json
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from teamsim.agents.interview import InterviewAnswer, interview
from teamsim.agents.policy import ScriptedPolicy
from teamsim.engine.loop import RunResult, Simulation
from teamsim.errors import TeamSimError
from teamsim.evaluation.runlog import export_log, log_to_doc
from teamsim.llm.adapter import CompletionClient
from teamsim.llm.backends import TemplateBackend
from teamsim.scenario import (
    has_errors,
    parse_scenario,
    scenario_from_doc,
    scenario_to_doc,
    validate_scenario,
)
from teamsim.world.snapshot import export_snapshot

NOT_STARTED = "not_started"
RUNNING = "running"
PAUSED = "paused"
FINISHED = "finished"

SNAPSHOT_INTERVAL_TICKS = 50
STREAM_BUFFER_SIZE = 200_000


class SessionError(TeamSimError):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


@dataclass
class StreamItem:
    seq: int
    type: str  # "record" | "snapshot" | "gap"
    payload: dict

    def to_doc(self) -> dict:
        return {"seq": self.seq, "type": self.type, "payload": self.payload}


class Session:
    def __init__(self, session_id: str, document: str, log_dir: Optional[Path] = None):
        self.id = session_id
        self.document = document
        self.scenario = parse_scenario(document)
        diagnostics = validate_scenario(self.scenario)
        if has_errors(diagnostics):
            raise SessionError(
                "; ".join(str(d) for d in diagnostics if d.severity == "error"), status=422
            )
        self.diagnostics = diagnostics
        self.log_dir = log_dir

        self.state = NOT_STARTED
        self.aborted = False
        self.result: Optional[RunResult] = None
        self.pacing_sps: Optional[float] = None

        self._lock = threading.Lock()
        self._wakeup = threading.Condition(self._lock)
        self._buffer: deque[StreamItem] = deque(maxlen=STREAM_BUFFER_SIZE)
        self._base_seq = 0
        self._next_seq = 0
        self._last_snapshot_seq: Optional[int] = None
        self._snapshot_requested = False
        self._ticks_since_snapshot = 0

        self._thread: Optional[threading.Thread] = None
        self._resume_event = threading.Event()
        self._resume_event.set()
        self.sim: Optional[Simulation] = None
        self.interview_client = CompletionClient(TemplateBackend())

    # -- stream plumbing -------------------------------------------------------

    def _append(self, item_type: str, payload: dict) -> StreamItem:
        with self._wakeup:
            if self._buffer.maxlen and len(self._buffer) == self._buffer.maxlen:
                self._base_seq += 1
            item = StreamItem(seq=self._next_seq, type=item_type, payload=payload)
            self._next_seq += 1
            self._buffer.append(item)
            if item_type == "snapshot":
                self._last_snapshot_seq = item.seq
            self._wakeup.notify_all()
            return item

    def _on_engine_record(self, record: dict) -> None:
        self._append("record", record)

    def _push_snapshot(self) -> StreamItem:
        assert self.sim is not None
        return self._append("snapshot", export_snapshot(self.sim.world))

    def read_items(self, since: Optional[int], limit: int = 2000, wait_s: float = 0.0) -> list[dict]:
        """Items with seq >= since (or from the latest snapshot when since is
        None). A cursor older than the ring start yields a gap marker."""
        deadline = time.monotonic() + wait_s
        while True:
            with self._wakeup:
                if since is None:
                    if self._last_snapshot_seq is None:
                        self.request_snapshot_locked()
                    else:
                        since = self._last_snapshot_seq
                if since is not None:
                    items = []
                    if since < self._base_seq:
                        items.append(
                            StreamItem(seq=since, type="gap", payload={"resume_from": self._base_seq}).to_doc()
                        )
                        since = self._base_seq
                    start = since - self._base_seq
                    for item in itertools.islice(self._buffer, start, start + limit):
                        items.append(item.to_doc())
                    if items:
                        return items
                if time.monotonic() >= deadline:
                    return []
                self._wakeup.wait(timeout=min(0.05, max(deadline - time.monotonic(), 0.001)))

    def request_snapshot_locked(self) -> None:
        """Ask for a snapshot at the next safe point (caller holds the lock)."""
        if self.state in (NOT_STARTED, PAUSED, FINISHED):
            # Engine is parked (or absent): its state is stable, snapshot now.
            if self.sim is not None:
                self._snapshot_now_locked()
        else:
            self._snapshot_requested = True

    def _snapshot_now_locked(self) -> None:
        assert self.sim is not None
        if self._buffer.maxlen and len(self._buffer) == self._buffer.maxlen:
            self._base_seq += 1
        item = StreamItem(seq=self._next_seq, type="snapshot", payload=export_snapshot(self.sim.world))
        self._next_seq += 1
        self._buffer.append(item)
        self._last_snapshot_seq = item.seq
        self._wakeup.notify_all()

    # -- run control -------------------------------------------------------------

    def _tick_gate(self) -> bool:
        if self.aborted:
            return False
        self._resume_event.wait()
        if self.aborted:
            return False
        with self._lock:
            want_snapshot = self._snapshot_requested or self._ticks_since_snapshot >= SNAPSHOT_INTERVAL_TICKS
            self._snapshot_requested = False
        if want_snapshot:
            self._push_snapshot()
            self._ticks_since_snapshot = 0
        self._ticks_since_snapshot += 1
        if self.pacing_sps:
            time.sleep(1.0 / self.pacing_sps)
        return True

    def _run_thread(self) -> None:
        assert self.sim is not None
        try:
            result = self.sim.run(
                survey_client=CompletionClient(TemplateBackend()),
                tick_gate=self._tick_gate,
            )
        except Exception as exc:  # engine crash: surface through the stream
            with self._lock:
                self.state = FINISHED
            self._append("record", {"kind": "error", "payload": {"error": str(exc)}})
            return
        with self._lock:
            self.result = result
            self.state = FINISHED
        self._push_snapshot()
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            (self.log_dir / f"{self.id}.json").write_text(export_log(result.log))

    def start(self, pacing_sps: Optional[float]) -> None:
        with self._lock:
            if self.state != NOT_STARTED:
                raise SessionError(f"cannot start a session in state {self.state}", status=409)
            self.pacing_sps = pacing_sps
            self.sim = Simulation(
                self.scenario,
                {m.name: ScriptedPolicy() for m in self.scenario.members},
                listeners=(self._on_engine_record,),
            )
            self.state = RUNNING
        self._push_snapshot()
        self._thread = threading.Thread(target=self._run_thread, name=f"session-{self.id}", daemon=True)
        self._thread.start()

    def pause(self) -> None:
        with self._lock:
            if self.state != RUNNING:
                raise SessionError(f"cannot pause a session in state {self.state}", status=409)
            self.state = PAUSED
        self._resume_event.clear()

    def resume(self) -> None:
        with self._lock:
            if self.state != PAUSED:
                raise SessionError(f"cannot resume a session in state {self.state}", status=409)
            self.state = RUNNING
        self._resume_event.set()

    def abort(self) -> None:
        with self._lock:
            if self.state not in (RUNNING, PAUSED):
                raise SessionError(f"cannot abort a session in state {self.state}", status=409)
        self.aborted = True
        self._resume_event.set()
        if self._thread is not None:
            self._thread.join(timeout=30)

    def wait_finished(self, timeout_s: float) -> bool:
        if self._thread is None:
            return False
        self._thread.join(timeout=timeout_s)
        return self.state == FINISHED

    # -- queries --------------------------------------------------------------------

    def info(self) -> dict:
        with self._lock:
            step = self.sim.clock.current_step if self.sim is not None else 0
            return {
                "id": self.id,
                "state": self.state,
                "step": step,
                "scenario_id": self.scenario.id,
                "title": self.scenario.title,
                "members": [
                    {"name": m.name, "role": m.role, "trust_level": m.trust_level}
                    for m in self.scenario.members
                ],
                "max_steps": self.scenario.max_steps,
                "outcome": self.result.outcome if self.result else None,
                "diagnostics": [str(d) for d in self.diagnostics],
            }

    def update_members(self, edits: list[dict]) -> list[dict]:
        with self._lock:
            if self.state != NOT_STARTED:
                raise SessionError("agents can only be edited before the run starts", status=409)
            doc = scenario_to_doc(self.scenario)
            by_name = {m["name"]: m for m in doc["members"]}
            for edit in edits:
                name = edit.get("name")
                if name not in by_name:
                    raise SessionError(f"unknown member {name!r}", status=422)
                for key, value in edit.items():
                    if key == "name":
                        continue
                    by_name[name][key] = value
            scenario = scenario_from_doc(doc)
            diagnostics = validate_scenario(scenario)
            if has_errors(diagnostics):
                raise SessionError(
                    "; ".join(str(d) for d in diagnostics if d.severity == "error"), status=422
                )
            self.scenario = scenario
            self.diagnostics = diagnostics
            return [
                {"severity": d.severity, "path": d.path, "message": d.message} for d in diagnostics
            ]

    def interview_agent(self, agent_name: str, question: str) -> InterviewAnswer:
        with self._lock:
            if self.state not in (PAUSED, FINISHED):
                raise SessionError("interviews are available while paused or finished", status=409)
            if self.sim is None or agent_name not in self.sim.agents:
                raise SessionError(f"unknown agent {agent_name!r}", status=404)
            agent = self.sim.agents[agent_name]
            step = self.sim.clock.current_step
        return interview(agent, question, self.interview_client, step)

    def results(self) -> dict:
        with self._lock:
            if self.result is None:
                raise SessionError("run has not finished", status=409)
            return {
                "outcome": self.result.outcome,
                "final_step": self.result.final_step,
                "success_step": self.result.success_step,
                "metrics": self.result.log.metrics,
                "survey": self.result.log.survey,
            }

    def log_document(self) -> str:
        with self._lock:
            if self.result is None:
                raise SessionError("run has not finished", status=409)
            return export_log(self.result.log)


class SessionManager:
    def __init__(self, max_sessions: int = 8, log_dir: Optional[str] = None):
        self.max_sessions = max_sessions
        self.log_dir = Path(log_dir) if log_dir else None
        self._sessions: dict[str, Session] = {}
        self._counter = 0
        self._lock = threading.Lock()

    def create(self, document: str) -> Session:
        with self._lock:
            active = sum(1 for s in self._sessions.values() if s.state in (RUNNING, PAUSED))
            if active >= self.max_sessions:
                raise SessionError(f"session limit reached ({self.max_sessions})", status=429)
            self._counter += 1
            session_id = f"s{self._counter:04d}"
        session = Session(session_id, document, log_dir=self.log_dir)
        with self._lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionError(f"no session {session_id!r}", status=404)
        return session

    def list(self) -> list[dict]:
        return [self._sessions[k].info() for k in sorted(self._sessions)]


def stream_sse(session: Session, since: Optional[int]):
    """Generator producing server-sent events for a session's stream."""
    cursor = since
    idle_rounds = 0
    while True:
        items = session.read_items(cursor, wait_s=1.0)
        for item in items:
            cursor = item["seq"] + 1
            yield f"data: {json.dumps(item, sort_keys=True)}\n\n"
        if not items:
            idle_rounds += 1
            if session.state == FINISHED and idle_rounds >= 2:
                yield "event: end\ndata: {}\n\n"
                return
            yield ": keepalive\n\n"
        else:
            idle_rounds = 0
