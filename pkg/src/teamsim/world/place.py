"""Seeded entity placement into a generated environment."""

from __future__ import annotations

from teamsim.errors import NoFreeCell, UnknownRegion
from teamsim.scenario.model import EntitySpec
from teamsim.world.generate import derive_rng
from teamsim.world.types import Placement, RegionTree, TraversabilityGrid, region_cells


def place_entities(
    specs: list[EntitySpec],
    tree: RegionTree,
    grid: TraversabilityGrid,
    seed: int,
) -> list[Placement]:
    """Place entities uniformly at random (seeded) in their hinted region, or
    anywhere open when unhinted. Blocking entities never share a cell."""
    rng = derive_rng(seed, "placement")
    by_name = tree.by_name()
    blocked: set[tuple[int, int]] = set()
    placements: list[Placement] = []
    for spec in specs:
        if spec.region is not None:
            if spec.region not in by_name:
                raise UnknownRegion(f"entity {spec.name!r} hints unknown region {spec.region!r}")
            candidates = region_cells(grid, by_name[spec.region])
        else:
            candidates = grid.open_cells()
        if spec.blocking:
            candidates = [c for c in candidates if c not in blocked]
        if not candidates:
            raise NoFreeCell(f"no free cell for entity {spec.name!r}")
        cell = candidates[rng.randrange(len(candidates))]
        if spec.blocking:
            blocked.add(cell)
        placements.append(Placement(entity=spec.name, cell=cell))
    return placements


def place_agents(
    names: list[str],
    start_region: int,
    grid: TraversabilityGrid,
    seed: int,
    occupied: set[tuple[int, int]] | None = None,
) -> dict[str, tuple[int, int]]:
    """Start every agent on a distinct open cell of the start region."""
    rng = derive_rng(seed, "agents")
    candidates = [c for c in region_cells(grid, start_region) if not occupied or c not in occupied]
    if len(candidates) < len(names):
        raise NoFreeCell(f"start region {start_region} has {len(candidates)} free cells for {len(names)} agents")
    cells = rng.sample(candidates, len(names))
    return {name: cell for name, cell in zip(names, cells)}
