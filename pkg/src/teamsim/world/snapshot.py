"""World snapshot documents: the map/state view embedded in run logs and
served to the studio for rendering.

The grid is run-length encoded per row, alternating wall/open run lengths and
always starting with a wall run (possibly zero). Snapshots round-trip: a world
rebuilt from its snapshot is structurally equal to the original.
"""

from __future__ import annotations

from teamsim.scenario.model import EntitySpec
from teamsim.world.types import (
    Placement,
    Region,
    RegionAdjacency,
    RegionTree,
    Split,
    TraversabilityGrid,
    World,
)

SNAPSHOT_VERSION = 1


def _encode_rows(grid: TraversabilityGrid) -> list[list[int]]:
    rows = []
    for y in range(grid.height):
        row = grid.open_mask[y * grid.width : (y + 1) * grid.width]
        runs = [0]  # first run counts walls
        current = 0
        for v in row:
            if v == current:
                runs[-1] += 1
            else:
                current = v
                runs.append(1)
        rows.append(runs)
    return rows


def _decode_rows(rows: list[list[int]], width: int) -> bytes:
    mask = bytearray()
    for runs in rows:
        value = 0
        for run in runs:
            mask.extend(bytes([value]) * run)
            value ^= 1
        if len(mask) % width:
            raise ValueError("row run lengths do not fill the grid width")
    return bytes(mask)


def _tree_to_doc(node) -> dict:
    if isinstance(node, Split):
        return {
            "axis": node.axis,
            "wall": node.wall,
            "left": _tree_to_doc(node.left),
            "right": _tree_to_doc(node.right),
        }
    return {"leaf": node.region_id}


def _tree_from_doc(doc: dict, leaves: tuple[Region, ...]):
    if "leaf" in doc:
        return leaves[doc["leaf"]]
    return Split(
        axis=doc["axis"],
        wall=doc["wall"],
        left=_tree_from_doc(doc["left"], leaves),
        right=_tree_from_doc(doc["right"], leaves),
    )


def export_snapshot(world: World) -> dict:
    grid = world.grid
    doors = [
        [cell[0], cell[1], grid.region_at(*cell)]
        for cell in sorted(world.adjacency.door_cells())
    ]
    return {
        "format_version": SNAPSHOT_VERSION,
        "clock": world.clock,
        "grid": {
            "width": grid.width,
            "height": grid.height,
            "rows": _encode_rows(grid),
        },
        "regions": [
            {
                "id": r.region_id,
                "name": r.name,
                "bounds": list(r.bounds),
                "description": r.description,
            }
            for r in world.tree.leaves
        ],
        "tree": _tree_to_doc(world.tree.root),
        "adjacency": [[a, b, [cell[0], cell[1]]] for a, b, cell in world.adjacency.edge_list()],
        "doors": doors,
        "entities": [
            {
                "name": spec.name,
                "kind": spec.kind,
                "interactive": spec.interactive,
                "attributes": dict(sorted(spec.attributes.items())),
            }
            for spec in (world.entity_specs[name] for name in sorted(world.entity_specs))
        ],
        "placements": [
            {
                "entity": p.entity,
                "cell": list(p.cell) if p.cell is not None else None,
                "carried_by": p.carried_by,
            }
            for p in (world.placements[name] for name in sorted(world.placements))
        ],
        "agents": [
            {"name": name, "cell": list(cell)}
            for name, cell in sorted(world.agent_positions.items())
        ],
    }


def import_snapshot(doc: dict) -> World:
    width = doc["grid"]["width"]
    height = doc["grid"]["height"]
    mask = _decode_rows(doc["grid"]["rows"], width)
    leaves = tuple(
        Region(
            region_id=r["id"],
            name=r["name"],
            bounds=tuple(r["bounds"]),
            description=r.get("description", ""),
        )
        for r in doc["regions"]
    )
    region_of = [-1] * (width * height)
    for r in leaves:
        x0, y0, x1, y1 = r.bounds
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                region_of[y * width + x] = r.region_id
    for x, y, rid in doc["doors"]:
        region_of[y * width + x] = rid
    grid = TraversabilityGrid(width=width, height=height, open_mask=mask, region_of=tuple(region_of))
    tree = RegionTree(root=_tree_from_doc(doc["tree"], leaves), leaves=leaves)
    edges: dict[int, dict[int, tuple[int, int]]] = {r.region_id: {} for r in leaves}
    for a, b, cell in doc["adjacency"]:
        edges[a][b] = tuple(cell)
        edges[b][a] = tuple(cell)
    entity_specs = {
        e["name"]: EntitySpec(
            name=e["name"],
            kind=e["kind"],
            interactive=e["interactive"],
            region=None,
            attributes=dict(e["attributes"]),
        )
        for e in doc["entities"]
    }
    placements = {
        p["entity"]: Placement(
            entity=p["entity"],
            cell=tuple(p["cell"]) if p["cell"] is not None else None,
            carried_by=p["carried_by"],
        )
        for p in doc["placements"]
    }
    agents = {a["name"]: tuple(a["cell"]) for a in doc["agents"]}
    return World(
        grid=grid,
        tree=tree,
        adjacency=RegionAdjacency(edges=edges),
        entity_specs=entity_specs,
        placements=placements,
        agent_positions=agents,
        clock=doc["clock"],
    )
