"""Benchmark: compiled grid kernels vs the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Measures the three kernels on generated maps of several sizes plus a
full scripted rescue run under each backend. Falls back gracefully if the
compiled module is absent.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from teamsim.grid import _kernels_py
from teamsim.scenario.model import EnvSpec
from teamsim.world.generate import generate_environment

try:
    from teamsim.grid import _kernels_cy
except ImportError:
    _kernels_cy = None


def time_call(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - started)
    return statistics.median(samples)


def bench_kernels(repeats: int):
    rng = random.Random(0)
    rows = []
    for size, regions in ((32, 8), (64, 16), (128, 16), (254, 16)):
        grid, _, _ = generate_environment(EnvSpec(size, size, regions), 7)
        cells = [grid.idx(x, y) for x, y in grid.open_cells()]
        starts = [rng.choice(cells) for _ in range(20)]
        mask, w, h = grid.open_mask, grid.width, grid.height

        def run(module):
            def inner():
                for s in starts:
                    module.bfs_parents(mask, w, h, s)
                    module.bfs_distances(mask, w, h, s)
                    module.flood_fill_count(mask, w, h, s)
            return inner

        py_t = time_call(run(_kernels_py), repeats)
        cy_t = time_call(run(_kernels_cy), repeats) if _kernels_cy else None
        rows.append((f"{size}x{size}/{regions}r x20 starts", py_t, cy_t))
    return rows


def bench_rescue(repeats: int):
    import importlib
    import os
    import subprocess
    import sys

    code = (
        "import time\n"
        "from teamsim.scenario import builtin_scenario\n"
        "from teamsim.engine.loop import Simulation\n"
        "from teamsim.agents.policy import ScriptedPolicy\n"
        "from teamsim.grid import kernels\n"
        "s = builtin_scenario()\n"
        "t0 = time.perf_counter()\n"
        "r = Simulation(s, {m.name: ScriptedPolicy() for m in s.members}).run()\n"
        "print(kernels.BACKEND, time.perf_counter() - t0, r.final_step)\n"
    )
    rows = []
    for pure in ("0", "1"):
        env = dict(os.environ, TEAMSIM_PURE_PYTHON=pure)
        samples = []
        backend = None
        for _ in range(repeats):
            out = subprocess.run(
                [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
            ).stdout.split()
            backend, elapsed = out[0], float(out[1])
            samples.append(elapsed)
        rows.append((backend, statistics.median(samples)))
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"{'kernel workload':<28} {'pure-python':>12} {'compiled':>12} {'speedup':>9}")
    for name, py_t, cy_t in bench_kernels(args.repeats):
        if cy_t is None:
            print(f"{name:<28} {py_t * 1e3:>10.2f}ms {'n/a':>12} {'n/a':>9}")
        else:
            print(f"{name:<28} {py_t * 1e3:>10.2f}ms {cy_t * 1e3:>10.2f}ms {py_t / cy_t:>8.1f}x")

    print()
    print("full scripted rescue run (fresh process per backend):")
    for backend, elapsed in bench_rescue(max(args.repeats // 2, 1)):
        print(f"  backend={backend:<10} median {elapsed * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
