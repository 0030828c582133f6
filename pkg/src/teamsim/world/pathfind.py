"""Grid navigation: shortest paths and routes to regions.

Thin deterministic wrappers over the BFS kernels. Paths are 4-connected,
inclusive of both endpoints, and unique for a given grid because the kernels
expand neighbors in N, E, S, W order.
"""

from __future__ import annotations

from dataclasses import dataclass

from teamsim.errors import CellNotOpen, NoRoute
from teamsim.grid import kernels
from teamsim.world.types import Cell, RegionAdjacency, TraversabilityGrid, region_cells


def shortest_path(grid: TraversabilityGrid, start: Cell, goal: Cell) -> list[Cell] | None:
    """Minimum-length path from start to goal, or None when disconnected."""
    for cell in (start, goal):
        if not grid.is_open(*cell):
            raise CellNotOpen(f"cell {cell} is not open")
    if start == goal:
        return [start]
    parents = kernels.bfs_parents(grid.open_mask, grid.width, grid.height, grid.idx(*start))
    flat = kernels.path_from_parents(parents, grid.idx(*start), grid.idx(*goal))
    if flat is None:
        return None
    w = grid.width
    return [(i % w, i // w) for i in flat]


def path_distance(path: list[Cell]) -> int:
    return len(path) - 1


@dataclass(frozen=True)
class NavigationPlan:
    """Route to a region: the door cells crossed, in order, plus the full path."""

    target_region: int
    doors: tuple[Cell, ...]
    path: tuple[Cell, ...]

    @property
    def empty(self) -> bool:
        return len(self.path) == 0

    def distance(self) -> int:
        return max(len(self.path) - 1, 0)


def directions_to_region(
    grid: TraversabilityGrid,
    adjacency: RegionAdjacency,
    start: Cell,
    target: int,
) -> NavigationPlan:
    """Shortest route from ``start`` to the nearest open cell of ``target``.

    Already inside the target region yields an empty plan. Raises NoRoute when
    no open cell of the region is reachable.
    """
    if not grid.is_open(*start):
        raise CellNotOpen(f"cell {start} is not open")
    if grid.region_at(*start) == target:
        return NavigationPlan(target_region=target, doors=(), path=())
    start_idx = grid.idx(*start)
    dist = kernels.bfs_distances(grid.open_mask, grid.width, grid.height, start_idx)
    best_idx = -1
    best = None
    for x, y in region_cells(grid, target):
        i = grid.idx(x, y)
        d = dist[i]
        if d >= 0 and (best is None or d < best or (d == best and i < best_idx)):
            best = d
            best_idx = i
    if best is None:
        raise NoRoute(f"region {target} unreachable from {start}")
    parents = kernels.bfs_parents(grid.open_mask, grid.width, grid.height, start_idx)
    flat = kernels.path_from_parents(parents, start_idx, best_idx)
    assert flat is not None
    w = grid.width
    path = tuple((i % w, i // w) for i in flat)
    door_set = adjacency.door_cells()
    doors = tuple(cell for cell in path if cell in door_set)
    return NavigationPlan(target_region=target, doors=doors, path=path)
