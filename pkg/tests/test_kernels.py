"""Grid kernel tests: pure/compiled equivalence and BFS correctness."""

from __future__ import annotations

import random

import pytest

from oracles import bfs_all_distances_oracle, reachable_cells_oracle
from teamsim.grid import _kernels_py, kernels
from teamsim.scenario.model import EnvSpec
from teamsim.world.generate import generate_environment

try:
    from teamsim.grid import _kernels_cy
except ImportError:
    _kernels_cy = None


def _random_grid(rng: random.Random, width: int = 20, height: int = 14):
    mask = bytearray(width * height)
    for y in range(1, height - 1):
        for x in range(1, width - 1):
            mask[y * width + x] = 1 if rng.random() > 0.3 else 0
    return bytes(mask), width, height


def test_bfs_distances_match_oracle_on_generated_map():
    grid, _, _ = generate_environment(EnvSpec(24, 24, 6), 5)
    start = grid.open_cells()[0]
    dist = kernels.bfs_distances(grid.open_mask, grid.width, grid.height, grid.idx(*start))
    oracle = bfs_all_distances_oracle(grid, start)
    for x, y in grid.open_cells():
        expected = oracle.get((x, y), -1)
        assert dist[grid.idx(x, y)] == expected


def test_flood_fill_count_matches_oracle():
    grid, _, _ = generate_environment(EnvSpec(16, 16, 4), 9)
    start = grid.open_cells()[0]
    count = kernels.flood_fill_count(grid.open_mask, grid.width, grid.height, grid.idx(*start))
    assert count == len(reachable_cells_oracle(grid, start))


def test_parents_walk_back_gives_shortest_contiguous_path():
    grid, _, _ = generate_environment(EnvSpec(24, 24, 6), 2)
    cells = grid.open_cells()
    rng = random.Random(0)
    for _ in range(25):
        a, b = rng.choice(cells), rng.choice(cells)
        parents = kernels.bfs_parents(grid.open_mask, grid.width, grid.height, grid.idx(*a))
        flat = kernels.path_from_parents(parents, grid.idx(*a), grid.idx(*b))
        oracle = bfs_all_distances_oracle(grid, a)
        assert flat is not None
        assert len(flat) - 1 == oracle[b]
        for i, j in zip(flat, flat[1:]):
            xi, yi = i % grid.width, i // grid.width
            xj, yj = j % grid.width, j // grid.width
            assert abs(xi - xj) + abs(yi - yj) == 1
            assert grid.open_mask[j]


def test_wall_start_returns_empty_results():
    mask = bytes([0, 1, 1, 0])
    assert kernels.flood_fill_count(mask, 2, 2, 0) == 0
    parents = kernels.bfs_parents(mask, 2, 2, 0)
    assert all(p == -2 for p in parents)


@pytest.mark.skipif(_kernels_cy is None, reason="compiled kernels not built")
def test_compiled_and_pure_twins_agree_exactly():
    rng = random.Random(42)
    for trial in range(30):
        mask, width, height = _random_grid(rng)
        opens = [i for i, v in enumerate(mask) if v]
        if not opens:
            continue
        start = rng.choice(opens)
        assert list(_kernels_cy.bfs_parents(mask, width, height, start)) == list(
            _kernels_py.bfs_parents(mask, width, height, start)
        ), f"trial {trial}"
        assert list(_kernels_cy.bfs_distances(mask, width, height, start)) == list(
            _kernels_py.bfs_distances(mask, width, height, start)
        )
        assert _kernels_cy.flood_fill_count(mask, width, height, start) == _kernels_py.flood_fill_count(
            mask, width, height, start
        )
