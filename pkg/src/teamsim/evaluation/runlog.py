"""The canonical run log: snapshot, ordered records, surveys, metrics.

Exports are byte-stable: canonical JSON with sorted keys, integers only in
core records, and any non-integral number rendered as a fixed 6-decimal
string. A log replays: applying its delta records to the initial snapshot
must reproduce the final snapshot exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from teamsim.errors import MalformedLog, VersionMismatch
from teamsim.world.changes import apply_delta_doc
from teamsim.world.snapshot import export_snapshot, import_snapshot

LOG_FORMAT_VERSION = 1

RECORD_KINDS = (
    "scheduled",
    "resolved",
    "rejected",
    "delta",
    "decision",
    "invitation",
    "message",
    "conversation_closed",
    "policy_failure",
    "success",
    "ended",
    "warning",
)


def fixed6(value: float) -> str:
    """Canonical 6-decimal rendering used for every non-integral number."""
    return f"{value:.6f}"


@dataclass(frozen=True)
class LogRecord:
    step: int
    seq: int
    kind: str
    agent: str | None
    payload: dict
    rationale: str = ""

    def to_doc(self) -> dict:
        return {
            "step": self.step,
            "seq": self.seq,
            "kind": self.kind,
            "agent": self.agent,
            "payload": self.payload,
            "rationale": self.rationale,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "LogRecord":
        return cls(
            step=doc["step"],
            seq=doc["seq"],
            kind=doc["kind"],
            agent=doc.get("agent"),
            payload=doc.get("payload", {}),
            rationale=doc.get("rationale", ""),
        )


@dataclass
class RunLog:
    header: dict
    snapshot: dict
    records: list[LogRecord] = field(default_factory=list)
    survey: list[dict] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    final_snapshot: dict = field(default_factory=dict)

    def records_of_kind(self, kind: str) -> list[LogRecord]:
        return [r for r in self.records if r.kind == kind]


class RunLogBuilder:
    """Single consumer of engine events; enforces the (step, seq) ordering."""

    def __init__(self, scenario_id: str, seed: int, title: str = ""):
        self.header = {
            "format_version": LOG_FORMAT_VERSION,
            "scenario_id": scenario_id,
            "seed": seed,
            "title": title,
        }
        self.snapshot: dict = {}
        self.records: list[LogRecord] = []
        self._seq = 0
        self._last_step = 0

    def set_snapshot(self, snapshot: dict) -> None:
        self.snapshot = snapshot

    def record(self, step: int, kind: str, payload: dict, agent: str | None = None, rationale: str = "") -> LogRecord:
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        if step < self._last_step:
            raise ValueError(f"record step {step} precedes {self._last_step}")
        self._last_step = step
        rec = LogRecord(step=step, seq=self._seq, kind=kind, agent=agent, payload=payload, rationale=rationale)
        self._seq += 1
        self.records.append(rec)
        return rec

    def build(self, survey: list[dict], metrics: dict, final_snapshot: dict) -> RunLog:
        return RunLog(
            header=dict(self.header),
            snapshot=self.snapshot,
            records=list(self.records),
            survey=survey,
            metrics=metrics,
            final_snapshot=final_snapshot,
        )


def log_to_doc(log: RunLog) -> dict:
    return {
        "header": log.header,
        "snapshot": log.snapshot,
        "records": [r.to_doc() for r in log.records],
        "survey": log.survey,
        "metrics": log.metrics,
        "final_snapshot": log.final_snapshot,
    }


def export_log(log: RunLog) -> str:
    """Canonical serialization; byte-identical for equal logs."""
    return json.dumps(log_to_doc(log), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def import_log(document: str) -> RunLog:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedLog(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "header" not in doc:
        raise MalformedLog("missing header")
    version = doc["header"].get("format_version")
    if version != LOG_FORMAT_VERSION:
        raise VersionMismatch(f"log format_version {version} unsupported (expected {LOG_FORMAT_VERSION})")
    records = [LogRecord.from_doc(r) for r in doc.get("records", [])]
    return RunLog(
        header=doc["header"],
        snapshot=doc.get("snapshot", {}),
        records=records,
        survey=doc.get("survey", []),
        metrics=doc.get("metrics", {}),
        final_snapshot=doc.get("final_snapshot", {}),
    )


def check_integrity(log: RunLog) -> None:
    """Sequence ids contiguous from zero, steps nondecreasing."""
    last_step = 0
    for i, rec in enumerate(log.records):
        if rec.seq != i:
            raise MalformedLog(f"sequence gap at index {i}: seq {rec.seq}")
        if rec.step < last_step:
            raise MalformedLog(f"record {i} steps backwards ({rec.step} < {last_step})")
        last_step = rec.step


def replay_world(log: RunLog):
    """Rebuild the final world by applying delta records to the snapshot."""
    check_integrity(log)
    world = import_snapshot(log.snapshot)
    final_step = world.clock
    for rec in log.records:
        if rec.kind == "delta":
            world = apply_delta_doc(world, rec.payload)
        if rec.kind == "ended":
            final_step = rec.payload.get("step", rec.step)
        final_step = max(final_step, rec.step)
    return world.with_clock(final_step)


def verify_replay(log: RunLog) -> bool:
    """True iff snapshot + deltas reproduces the recorded final snapshot."""
    if not log.final_snapshot:
        raise MalformedLog("log has no final snapshot to verify against")
    replayed = replay_world(log)
    return export_snapshot(replayed) == log.final_snapshot
