"""Spatial world state: grid, region tree, adjacency, placements, agents, clock.

The grid is dense and small (full edge at most 256 cells including the border
ring). Open cells carry exactly one region id; door cells carved between two
regions are assigned to the lower id of the pair.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from teamsim.scenario.model import EntitySpec

Cell = tuple[int, int]

WALL = 0
OPEN = 1


@dataclass(frozen=True)
class TraversabilityGrid:
    width: int  # full grid, border ring included
    height: int
    open_mask: bytes  # row-major, 1 = open
    region_of: tuple[int, ...]  # row-major, -1 on walls

    def idx(self, x: int, y: int) -> int:
        return y * self.width + x

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def is_open(self, x: int, y: int) -> bool:
        return self.in_bounds(x, y) and self.open_mask[self.idx(x, y)] == OPEN

    def region_at(self, x: int, y: int) -> int:
        return self.region_of[self.idx(x, y)]

    def open_cells(self) -> list[Cell]:
        w = self.width
        return [(i % w, i // w) for i, v in enumerate(self.open_mask) if v]

    def open_count(self) -> int:
        return sum(self.open_mask)


@dataclass(frozen=True)
class Region:
    """A leaf of the partition tree: a named rectangular room.

    ``bounds`` is the interior rectangle (x0, y0, x1, y1), inclusive, in full
    grid coordinates.
    """

    region_id: int
    name: str
    bounds: tuple[int, int, int, int]
    description: str = ""

    def interior_cells(self) -> list[Cell]:
        x0, y0, x1, y1 = self.bounds
        return [(x, y) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1)]

    def area(self) -> int:
        x0, y0, x1, y1 = self.bounds
        return (x1 - x0 + 1) * (y1 - y0 + 1)


@dataclass(frozen=True)
class Split:
    """Internal partition node; ``wall`` is the x column (axis 'x') or y row
    (axis 'y') of the separating wall in full grid coordinates."""

    axis: str  # 'x' | 'y'
    wall: int
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Split, Region]


@dataclass(frozen=True)
class RegionTree:
    root: TreeNode
    leaves: tuple[Region, ...]  # indexed by region_id

    def leaf(self, region_id: int) -> Region:
        return self.leaves[region_id]

    def by_name(self) -> dict[str, int]:
        return {leaf.name: leaf.region_id for leaf in self.leaves}


@dataclass(frozen=True)
class RegionAdjacency:
    """Symmetric region graph; each edge carries its carved door cell."""

    edges: dict[int, dict[int, Cell]]

    def neighbors(self, region_id: int) -> dict[int, Cell]:
        return self.edges.get(region_id, {})

    def door_cells(self) -> dict[Cell, tuple[int, int]]:
        doors: dict[Cell, tuple[int, int]] = {}
        for a, nbrs in self.edges.items():
            for b, cell in nbrs.items():
                if a < b:
                    doors[cell] = (a, b)
        return doors

    def edge_list(self) -> list[tuple[int, int, Cell]]:
        return sorted((a, b, cell) for (cell, (a, b)) in self.door_cells().items())


@dataclass(frozen=True)
class Placement:
    entity: str
    cell: Optional[Cell]  # None while carried
    carried_by: Optional[str] = None


@dataclass(frozen=True)
class World:
    grid: TraversabilityGrid
    tree: RegionTree
    adjacency: RegionAdjacency
    entity_specs: dict[str, EntitySpec]
    placements: dict[str, Placement]
    agent_positions: dict[str, Cell]
    clock: int = 0
    _name_to_region: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._name_to_region:
            object.__setattr__(self, "_name_to_region", self.tree.by_name())

    def region_id_of_name(self, name: str) -> int:
        try:
            return self._name_to_region[name]
        except KeyError:
            raise KeyError(f"unknown region name {name!r}") from None

    def region_name_at(self, cell: Cell) -> str:
        rid = self.grid.region_at(*cell)
        return self.tree.leaf(rid).name

    def with_clock(self, clock: int) -> "World":
        return replace(self, clock=clock)

    def entities_at(self, cell: Cell) -> list[str]:
        return [p.entity for p in self.placements.values() if p.cell == cell]

    def entities_in_region(self, region_id: int) -> list[str]:
        out = []
        for p in self.placements.values():
            if p.cell is not None and self.grid.region_at(*p.cell) == region_id:
                out.append(p.entity)
        return out

    def structural_equals(self, other: "World") -> bool:
        """Equality over everything replay must reproduce. Entity specs are
        compared by kind/interactivity/attributes; placement hints are not
        world state."""
        def spec_key(specs):
            return {
                name: (s.name, s.kind, s.interactive, tuple(sorted(s.attributes.items())))
                for name, s in specs.items()
            }

        return (
            self.grid == other.grid
            and self.tree == other.tree
            and self.adjacency.edge_list() == other.adjacency.edge_list()
            and spec_key(self.entity_specs) == spec_key(other.entity_specs)
            and self.placements == other.placements
            and self.agent_positions == other.agent_positions
            and self.clock == other.clock
        )


def open_mask_array(grid: TraversabilityGrid) -> bytes:
    """Kernel-ready view of the walkability mask."""
    return grid.open_mask


def region_cells(grid: TraversabilityGrid, region_id: int) -> list[Cell]:
    """All open cells assigned to a region, doors included, row-major order."""
    w = grid.width
    return [
        (i % w, i // w)
        for i, rid in enumerate(grid.region_of)
        if rid == region_id and grid.open_mask[i]
    ]


def distances_from(grid: TraversabilityGrid, start: Cell) -> array:
    from teamsim.grid import kernels

    return kernels.bfs_distances(grid.open_mask, grid.width, grid.height, grid.idx(*start))
