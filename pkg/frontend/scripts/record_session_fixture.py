"""Records a full session event stream into tests/fixtures/session-stream.json.

Runs the bundled rescue scenario through the session layer (no HTTP) and dumps
every stream item plus the final snapshot, giving the client replay tests a
stable ground-truth fixture. Re-run after engine changes: npm run record-fixture
"""

import json
from pathlib import Path

from teamsim.scenario import builtin_scenario_text
from teamsim.service.sessions import Session
from teamsim.world.snapshot import export_snapshot

OUT = Path(__file__).parent.parent / "tests" / "fixtures" / "session-stream.json"


def main():
    session = Session("fixture", builtin_scenario_text())
    session.start(pacing_sps=None)
    assert session.wait_finished(timeout_s=60), "run did not finish"
    items = session.read_items(since=0, limit=10**6)
    assert session.sim is not None and session.result is not None
    doc = {
        "scenario_id": session.scenario.id,
        "outcome": session.result.outcome,
        "final_step": session.result.final_step,
        "items": items,
        "final_snapshot": export_snapshot(session.sim.world),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, sort_keys=True))
    snapshots = sum(1 for i in items if i["type"] == "snapshot")
    print(f"wrote {OUT} ({len(items)} items, {snapshots} snapshots, outcome {doc['outcome']})")


if __name__ == "__main__":
    main()
