"""Headless command-line front end.

Subcommands: validate, genmap, run, metrics, replay, serve. Exit codes:
0 success, 1 scenario error, 2 run failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from teamsim.errors import TeamSimError

EXIT_OK = 0
EXIT_SCENARIO = 1
EXIT_RUN = 2


def _load_scenario(path: str):
    from teamsim.scenario import parse_scenario

    return parse_scenario(Path(path).read_text())


def cmd_validate(args) -> int:
    from teamsim.scenario import has_errors, validate_scenario

    try:
        scenario = _load_scenario(args.scenario)
    except TeamSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    diagnostics = validate_scenario(scenario)
    for diag in diagnostics:
        print(str(diag), file=sys.stderr)
    if has_errors(diagnostics):
        return EXIT_SCENARIO
    print(f"{args.scenario}: ok ({len(diagnostics)} warning(s))")
    return EXIT_OK


def cmd_genmap(args) -> int:
    from teamsim.world.generate import generate_environment
    from teamsim.world.place import place_agents, place_entities
    from teamsim.world.snapshot import export_snapshot
    from teamsim.world.types import World
    from teamsim.engine.loop import START_REGION

    try:
        scenario = _load_scenario(args.scenario)
        seed = args.seed if args.seed is not None else scenario.seed
        grid, tree, adjacency = generate_environment(scenario.env_spec, seed)
        placements = place_entities(list(scenario.entities), tree, grid, seed)
        agents = place_agents([m.name for m in scenario.members], START_REGION, grid, seed)
    except TeamSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    world = World(
        grid=grid,
        tree=tree,
        adjacency=adjacency,
        entity_specs={e.name: e for e in scenario.entities},
        placements={p.entity: p for p in placements},
        agent_positions=agents,
    )
    doc = json.dumps(export_snapshot(world), sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(doc)
        print(f"wrote {args.out}")
    else:
        print(doc)
    return EXIT_OK


def _build_policies(scenario, policy_name: str, cassette_path: str | None, record: bool):
    from teamsim.agents.policy import LLMPolicy, ScriptedPolicy
    from teamsim.llm.adapter import CompletionClient
    from teamsim.llm.backends import Cassette, RecordingBackend, ReplayBackend, TemplateBackend

    recorder = None
    if policy_name == "scripted":
        policies = {m.name: ScriptedPolicy() for m in scenario.members}
        survey_backend = TemplateBackend()
    elif policy_name == "llm":
        if cassette_path and not record:
            backend = ReplayBackend(Cassette(cassette_path), strict=True)
        else:
            try:
                from teamsim.llm.adapter import AdapterConfig
                from teamsim.llm.backends import HttpChatBackend

                backend = HttpChatBackend(AdapterConfig.load(None))
            except TeamSimError:
                backend = TemplateBackend()
            if cassette_path and record:
                recorder = RecordingBackend(backend, Cassette(cassette_path))
                backend = recorder
        client = CompletionClient(backend)
        policies = {m.name: LLMPolicy(client) for m in scenario.members}
        survey_backend = backend
    else:
        raise ValueError(f"unknown policy {policy_name!r}")
    return policies, CompletionClient(survey_backend), recorder


def _run_once(scenario, args, seed: int, out_path: Path | None):
    from teamsim.engine.loop import Simulation
    from teamsim.evaluation.runlog import export_log

    policies, survey_client, recorder = _build_policies(
        scenario, args.policy, args.cassette, getattr(args, "record", False)
    )
    sim = Simulation(scenario, policies, seed=seed, max_steps=args.max_steps)
    result = sim.run(survey_client=survey_client if not args.no_survey else None)
    if recorder is not None:
        recorder.save()
    if out_path is not None:
        out_path.write_text(export_log(result.log))
    return result


def cmd_run(args) -> int:
    try:
        scenario = _load_scenario(args.scenario)
    except TeamSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO

    from teamsim.scenario import has_errors, validate_scenario

    diagnostics = validate_scenario(scenario)
    if has_errors(diagnostics):
        for diag in diagnostics:
            print(str(diag), file=sys.stderr)
        return EXIT_SCENARIO

    try:
        if args.repeat is not None:
            base = args.seed_base if args.seed_base is not None else scenario.seed
            rows = []
            for i in range(args.repeat):
                seed = base + i
                out = None
                if args.out:
                    stem = Path(args.out)
                    out = stem.with_name(f"{stem.stem}-seed{seed}{stem.suffix or '.json'}")
                result = _run_once(scenario, args, seed, out)
                rows.append((seed, result.outcome, result.final_step))
            print(f"{'seed':>8} {'outcome':>12} {'steps':>8}")
            for seed, outcome, steps in rows:
                print(f"{seed:>8} {outcome:>12} {steps:>8}")
            successes = sum(1 for _, outcome, _ in rows if outcome == 'success')
            print(f"# {successes}/{len(rows)} succeeded")
            return EXIT_OK
        seed = args.seed if args.seed is not None else scenario.seed
        out = Path(args.out) if args.out else None
        result = _run_once(scenario, args, seed, out)
    except TeamSimError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN
    print(f"outcome: {result.outcome} at step {result.final_step}")
    if out is not None:
        print(f"log written to {out}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    from teamsim.evaluation.metrics import compute_metrics
    from teamsim.evaluation.runlog import import_log

    try:
        log = import_log(Path(args.log).read_text())
        summary = compute_metrics(log)
    except (TeamSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN
    print(json.dumps(summary.to_doc(), indent=1, sort_keys=True))
    return EXIT_OK


def cmd_replay(args) -> int:
    from teamsim.evaluation.runlog import import_log, verify_replay

    try:
        log = import_log(Path(args.log).read_text())
        ok = verify_replay(log)
    except (TeamSimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN
    if not ok:
        print("replay mismatch: deltas do not reproduce the final snapshot", file=sys.stderr)
        return EXIT_RUN
    print(f"{args.log}: replay verified ({len(log.records)} records)")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from teamsim.service.app import create_app

    app = create_app(max_sessions=args.max_sessions, log_dir=args.log_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teamsim", description="Deterministic team simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("genmap", help="generate the environment and export the snapshot")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_genmap)

    p = sub.add_parser("run", help="run a simulation headless")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--policy", choices=["scripted", "llm"], default="scripted")
    p.add_argument("--cassette", default=None, help="cassette file for llm replay/recording")
    p.add_argument("--record", action="store_true", help="record backend replies into the cassette")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--out", default=None, help="write the run log here")
    p.add_argument("--no-survey", action="store_true")
    p.add_argument("--repeat", type=int, default=None, help="run N times with seeds S..S+N-1")
    p.add_argument("--seed-base", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("metrics", help="print the metrics summary of a run log")
    p.add_argument("log")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("replay", help="verify snapshot+delta replay of a run log")
    p.add_argument("log")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="start the studio service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--max-sessions", type=int, default=8)
    p.add_argument("--log-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
