"""Acceptance suite: every release gate runs here at its stated tolerance.

Each test prints one PASS line with its measured numbers so a bare
``pytest tests/test_acceptance.py -s`` doubles as the acceptance report.
"""

from __future__ import annotations

import random
import time

from oracles import bfs_distance_oracle, cosine_rank_oracle, reachable_cells_oracle
from teamsim.agents.memory import MemoryStore
from teamsim.agents.policy import LLMPolicy, ScriptedPolicy
from teamsim.engine.events import ACTION, Event, EventQueue, Idle
from teamsim.engine.loop import Simulation
from teamsim.evaluation.runlog import export_log, import_log, verify_replay
from teamsim.evaluation.survey import DEFAULT_ITEMS, administer_survey
from teamsim.grid import kernels
from teamsim.llm.adapter import CompletionClient, CompletionReply
from teamsim.llm.backends import Cassette, RecordingBackend, ReplayBackend, TemplateBackend
from teamsim.scenario import builtin_scenario, parse_scenario
from teamsim.scenario.model import EnvSpec
from teamsim.world.generate import generate_environment
from teamsim.world.pathfind import path_distance, shortest_path

from conftest import MINIMAL_DOC
from test_dialogue import THREE_DOC, ChatterboxPolicy
from test_survey import FixedBackend, make_agents


def report(name: str, detail: str):
    print(f"PASS {name}: {detail}")


# ---------------------------------------------------------------------------


def test_environment_generation_matrix():
    """Seeds 0..99 x sizes {16,32,64}^2 x regions {2,4,8,16}: exact leaf count,
    disjoint cover, connectivity; total runtime < 10 s."""
    started = time.monotonic()
    checked = 0
    for size in (16, 32, 64):
        for num_regions in (2, 4, 8, 16):
            for seed in range(100):
                spec = EnvSpec(size, size, num_regions)
                grid, tree, adjacency = generate_environment(spec, seed)
                assert len(tree.leaves) == num_regions, (size, num_regions, seed)

                # disjoint cover: interiors are disjoint, open, and carry
                # their leaf id; doors account for every remaining open cell
                interior_total = 0
                for leaf in tree.leaves:
                    x0, y0, x1, y1 = leaf.bounds
                    interior_total += (x1 - x0 + 1) * (y1 - y0 + 1)
                    for y in range(y0, y1 + 1):
                        row = grid.region_of[y * grid.width + x0 : y * grid.width + x1 + 1]
                        assert set(row) == {leaf.region_id}, (size, num_regions, seed)
                doors = adjacency.door_cells()
                open_count = grid.open_count()
                assert interior_total + len(doors) == open_count, (size, num_regions, seed)
                assert all(grid.open_mask[grid.idx(*cell)] for cell in doors)

                # connectivity: flood fill from the first open cell reaches all
                first_open = grid.open_mask.index(1)
                reached = kernels.flood_fill_count(grid.open_mask, grid.width, grid.height, first_open)
                assert reached == open_count, (size, num_regions, seed)
                checked += 1
    elapsed = time.monotonic() - started
    assert checked == 1200
    assert elapsed < 10.0, f"environment matrix took {elapsed:.2f}s"
    report("environment-generation", f"{checked} environments, {elapsed:.2f}s (< 10 s)")


def test_pathfinding_against_bfs_oracle():
    """1,000 random endpoint pairs across 100 generated maps: zero mismatches."""
    rng = random.Random(4242)
    mismatches = 0
    pairs = 0
    for seed in range(100):
        grid, _, _ = generate_environment(EnvSpec(32, 32, 8), seed)
        cells = grid.open_cells()
        for _ in range(10):
            a, b = rng.choice(cells), rng.choice(cells)
            path = shortest_path(grid, a, b)
            expected = bfs_distance_oracle(grid, a, b)
            pairs += 1
            if path is None or path_distance(path) != expected:
                mismatches += 1
    assert pairs == 1000
    assert mismatches == 0
    report("pathfinding-oracle", f"{pairs} endpoint pairs on 100 maps, 0 mismatches")


def test_queue_ordering_property():
    """10^4 random schedule/pop interleavings: nondecreasing due, FIFO ties."""
    rng = random.Random(99)
    violations = 0
    for trial in range(10_000):
        queue = EventQueue()
        shadow: set[tuple[int, int]] = set()
        event_id = 0
        last_popped: tuple[int, int] | None = None
        for _ in range(rng.randrange(1, 12)):
            if shadow and rng.random() < 0.4:
                event = queue.pop()
                key = (event.due_step, event.id)
                if key != min(shadow):
                    violations += 1
                shadow.remove(key)
                last_popped = key
            else:
                start = rng.randrange(0, 20)
                duration = rng.randrange(1, 10)
                queue.push(
                    Event(
                        id=event_id, kind=ACTION, start_step=start, duration_steps=duration,
                        participants=(f"a{event_id}",), action=Idle(duration),
                    )
                )
                shadow.add((start + duration, event_id))
                event_id += 1
        drained = [(e.due_step, e.id) for e in iter(queue.pop, None)]
        if drained != sorted(drained):
            violations += 1
    assert violations == 0
    report("queue-ordering", "10000 interleavings, 0 violations")


def _scripted_rescue_run():
    scenario = builtin_scenario()
    sim = Simulation(scenario, {m.name: ScriptedPolicy() for m in scenario.members})
    return scenario, sim.run(survey_client=CompletionClient(TemplateBackend()))


def test_determinism_and_replay():
    """Same fixture + seed twice: byte-identical exports; replay reconstructs."""
    _, first = _scripted_rescue_run()
    _, second = _scripted_rescue_run()
    a, b = export_log(first.log), export_log(second.log)
    assert a == b, "exports differ between identical runs"
    log = import_log(a)
    assert verify_replay(log)
    report("determinism-replay", f"byte-identical logs ({len(a)} bytes), replay verified")


def test_reference_rescue_scenario():
    """Success strictly before 2,000 steps; critical victims stabilized by the
    Medic before any Transporter puts them down at the Hospital; < 5 s."""
    started = time.monotonic()
    scenario, result = _scripted_rescue_run()
    elapsed = time.monotonic() - started
    assert result.outcome == "success"
    assert result.success_step is not None and result.success_step < 2000

    critical = {e.name for e in scenario.entities if e.attributes.get("severity") == "critical"}
    assert critical, "fixture must include at least one critical victim"
    medic = next(m.name for m in scenario.members if m.role == "Medic")
    stabilize_step: dict[str, int] = {}
    putdown_step: dict[str, int] = {}
    putdown_agent: dict[str, str] = {}
    for rec in result.log.records:
        if rec.kind != "resolved" or rec.payload.get("failed"):
            continue
        desc = rec.payload.get("description", "")
        if desc.startswith("use_on") and "(stabilize)" in desc:
            victim = desc.split()[1]
            stabilize_step.setdefault(victim, rec.step)
            assert rec.agent == medic, f"{rec.agent} stabilized {victim}; only the Medic may"
        if desc.startswith("put_down"):
            victim = desc.split()[1]
            putdown_step[victim] = rec.step
            putdown_agent[victim] = rec.agent
    for victim in critical:
        assert victim in stabilize_step, f"{victim} never stabilized"
        assert victim in putdown_step, f"{victim} never delivered"
        assert stabilize_step[victim] < putdown_step[victim], (
            f"{victim} put down at {putdown_step[victim]} before stabilization "
            f"at {stabilize_step[victim]}"
        )
    assert elapsed < 5.0, f"rescue run took {elapsed:.2f}s"
    report(
        "reference-rescue",
        f"success at step {result.success_step} (< 2000), "
        f"{len(critical)} critical stabilized first, {elapsed:.2f}s (< 5 s)",
    )


def test_memory_retrieval_oracle():
    """200 randomized stores (up to 1,000 records): ranking equals the
    exhaustive cosine-scan oracle, zero mismatches."""
    words = (
        "hospital ward victim medic rescue corridor door storage triage debris carry "
        "stabilize search north east clear team radio report atrium lab beacon tunnel"
    ).split()
    rng = random.Random(31337)
    mismatches = 0
    for trial in range(200):
        store = MemoryStore()
        n = rng.randrange(5, 1001)
        for i in range(n):
            text = " ".join(rng.choice(words) for _ in range(rng.randrange(2, 9)))
            store.add(text, "observation", i)
        query = " ".join(rng.choice(words) for _ in range(4))
        k = rng.randrange(1, 12)
        got = [s.record.id for s in store.retrieve(query, k)]
        expected = cosine_rank_oracle(
            list(store.embedder.embed(query)), [r.embedding for r in store.records], k
        )
        if got != expected:
            mismatches += 1
    assert mismatches == 0
    report("memory-retrieval", "200 stores vs exhaustive scan, 0 mismatches")


def test_conversation_termination_under_adversarial_policies():
    """Never-ending talkers: every conversation closes within 8 turns, no
    consecutive same-speaker entries."""
    scenario = parse_scenario(THREE_DOC)
    sim = Simulation(
        scenario,
        {
            "A": ChatterboxPolicy(["B", "C"]),
            "B": ChatterboxPolicy(["A", "C"]),
            "C": ChatterboxPolicy(["A", "B"]),
        },
        max_steps=120,
    )
    result = sim.run()
    closed = [r for r in result.log.records if r.kind == "conversation_closed"]
    assert closed, "adversarial run never produced a closed conversation"
    for rec in closed:
        assert rec.payload["turns"] <= 8, f"conversation ran {rec.payload['turns']} turns"
    violations = 0
    for conv in sim.conversations.values():
        speakers = [t.speaker for t in conv.transcript]
        violations += sum(1 for a, b in zip(speakers, speakers[1:]) if a == b)
    assert violations == 0
    report(
        "conversation-termination",
        f"{len(closed)} conversations closed, max {max(r.payload['turns'] for r in closed)} turns, "
        "0 same-speaker violations",
    )


def test_survey_bounds_randomized():
    """10^4 randomized backend replies: stored values in [0,10], clamps flagged."""
    rng = random.Random(8)
    agents = make_agents(1)
    checked = 0
    for _ in range(10_000):
        raw = rng.randrange(-100, 111)
        backend = FixedBackend([f"{raw} | noisy reply"])
        (resp,) = administer_survey(agents, DEFAULT_ITEMS[:1], CompletionClient(backend))
        assert 0 <= resp.value <= 10
        assert resp.clamped == (raw < 0 or raw > 10)
        checked += 1
    assert checked == 10_000
    report("survey-bounds", "10000 replies, all in [0,10], clamps flagged")


def test_strict_replay_llm_mode(tmp_path):
    """A recorded cassette run replays to an identical RunLog offline."""
    scenario = parse_scenario(MINIMAL_DOC)
    tape = tmp_path / "tape.json"

    recorder = RecordingBackend(TemplateBackend(), Cassette(tape))
    client = CompletionClient(recorder)
    sim = Simulation(scenario, {"Scout": LLMPolicy(client)})
    recorded = sim.run(survey_client=client)
    recorder.save()

    class Dead:
        backend_id = "dead"

        def complete(self, request) -> CompletionReply:
            raise AssertionError("live backend must not be called in strict replay")

    replay_client = CompletionClient(ReplayBackend(Cassette(tape), strict=True))
    sim2 = Simulation(scenario, {"Scout": LLMPolicy(replay_client)})
    replayed = sim2.run(survey_client=replay_client)

    a, b = export_log(recorded.log), export_log(replayed.log)
    assert a == b, "strict replay diverged from the recorded run"
    report("strict-replay", f"cassette with {len(Cassette(tape).entries)} entries replayed byte-identically")
