"""Entity and agent placement semantics."""

from __future__ import annotations

import pytest

from teamsim.errors import NoFreeCell, UnknownRegion
from teamsim.scenario.model import EntitySpec, EnvSpec
from teamsim.world.generate import generate_environment
from teamsim.world.place import place_agents, place_entities


@pytest.fixture()
def env():
    return generate_environment(EnvSpec(32, 32, 8, region_name_hints=("Hospital", "Ward")), 21)


def test_region_hint_respected(env):
    grid, tree, _ = env
    specs = [EntitySpec(name="v", kind="victim", region="Ward")]
    placements = place_entities(specs, tree, grid, 21)
    ward = tree.by_name()["Ward"]
    assert grid.region_at(*placements[0].cell) == ward


def test_unhinted_entity_lands_on_any_open_cell(env):
    grid, tree, _ = env
    placements = place_entities([EntitySpec(name="v", kind="victim")], tree, grid, 4)
    assert grid.is_open(*placements[0].cell)


def test_same_seed_identical_placements(env):
    grid, tree, _ = env
    specs = [
        EntitySpec(name=f"v{i}", kind="victim", region="Ward" if i % 2 else None)
        for i in range(6)
    ]
    first = place_entities(specs, tree, grid, 77)
    second = place_entities(specs, tree, grid, 77)
    assert first == second
    third = place_entities(specs, tree, grid, 78)
    assert first != third


def test_unknown_region_hint_raises(env):
    grid, tree, _ = env
    with pytest.raises(UnknownRegion):
        place_entities([EntitySpec(name="v", kind="victim", region="Attic")], tree, grid, 0)


def test_blocking_entities_never_share_a_cell():
    grid, tree, _ = generate_environment(EnvSpec(16, 16, 4, region_name_hints=("A",)), 5)
    specs = [
        EntitySpec(name=f"rock{i}", kind="obstacle", region="A", attributes={"blocking": "true"})
        for i in range(8)
    ]
    placements = place_entities(specs, tree, grid, 5)
    cells = [p.cell for p in placements]
    assert len(set(cells)) == len(cells)


def test_more_blocking_entities_than_cells_raises():
    grid, tree, _ = generate_environment(EnvSpec(16, 16, 4, region_name_hints=("A",)), 5)
    area = len(tree.leaves[0].interior_cells())
    specs = [
        EntitySpec(name=f"rock{i}", kind="obstacle", region="A", attributes={"blocking": "true"})
        for i in range(area + 3)
    ]
    with pytest.raises(NoFreeCell):
        place_entities(specs, tree, grid, 5)


def test_non_blocking_entities_may_stack():
    # tiny region, many non-blocking entities: placement succeeds
    grid, tree, _ = generate_environment(EnvSpec(4, 4, 1, region_name_hints=("A",)), 5)
    specs = [EntitySpec(name=f"v{i}", kind="victim", region="A") for i in range(40)]
    placements = place_entities(specs, tree, grid, 5)
    assert len(placements) == 40


def test_agents_start_in_region_on_distinct_cells(env):
    grid, tree, _ = env
    cells = place_agents(["a", "b", "c"], 0, grid, 9)
    assert len(set(cells.values())) == 3
    for cell in cells.values():
        assert grid.region_at(*cell) == 0
