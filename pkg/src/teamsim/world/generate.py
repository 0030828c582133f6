"""Environment generation: recursive binary partition plus door carving.

The interior (EnvSpec.width x EnvSpec.height) is wrapped in a border wall ring
and split by one-cell-thick walls into exactly ``num_regions`` rectangular
rooms, each at least 3x3 interior cells. Splits alternate axis where possible
and the cut position is drawn uniformly from the positions that keep both
children able to host their share of the remaining region count, which is what
guarantees the exact leaf count for every feasible request. Every pair of
rooms separated by a shared wall run becomes an adjacency edge and gets exactly
one door carved at a seeded-uniform position on that run, which makes the open
subgraph connected by construction.

Everything here is a pure function of (spec, seed): same inputs, same map,
on every platform.
"""

from __future__ import annotations

import hashlib
import random

from teamsim.errors import InsufficientArea
from teamsim.scenario.model import EnvSpec, MIN_REGION_SIDE, max_region_capacity
from teamsim.world.types import (
    OPEN,
    Region,
    RegionAdjacency,
    RegionTree,
    Split,
    TraversabilityGrid,
    TreeNode,
)

_SIDE = MIN_REGION_SIDE


def derive_rng(seed: int, purpose: str) -> random.Random:
    """Independent deterministic RNG stream for one purpose.

    Hash-derived so streams stay stable regardless of call order and of
    Python's per-process string hash randomization.
    """
    digest = hashlib.sha256(f"{seed}:{purpose}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _cap(w: int, h: int) -> int:
    return max_region_capacity(w, h)


def _split_rect(rect, count, rng, prefer_axis):
    """Recursively partition ``rect`` (x0, y0, x1, y1 interior) into ``count`` leaves.

    Returns (tree node, leaf rect list in creation order).
    """
    x0, y0, x1, y1 = rect
    w = x1 - x0 + 1
    h = y1 - y0 + 1
    if count == 1:
        return None, [rect]  # leaf marker; node built by caller

    def cuts_for(axis: str) -> list[int]:
        # Cut c is the wall offset from the rect origin along the axis; child
        # sizes are c and (size - 1 - c). Keep only cuts where the two children
        # can still host `count` regions between them.
        size = w if axis == "x" else h
        other = h if axis == "x" else w
        valid = []
        for c in range(_SIDE, size - _SIDE):
            if _cap(c, other) + _cap(size - 1 - c, other) >= count:
                valid.append(c)
        return valid

    axes = [prefer_axis, "y" if prefer_axis == "x" else "x"]
    for axis in axes:
        cuts = cuts_for(axis)
        if not cuts:
            continue
        c = cuts[rng.randrange(len(cuts))]
        if axis == "x":
            wall = x0 + c
            left_rect = (x0, y0, wall - 1, y1)
            right_rect = (wall + 1, y0, x1, y1)
            cap_l = _cap(c, h)
            cap_r = _cap(w - 1 - c, h)
        else:
            wall = y0 + c
            left_rect = (x0, y0, x1, wall - 1)
            right_rect = (x0, wall + 1, x1, y1)
            cap_l = _cap(c, w)
            cap_r = _cap(h - 1 - c, w)
        n_left = (count + 1) // 2
        n_left = max(n_left, count - cap_r)
        n_left = min(n_left, cap_l, count - 1)
        child_axis = "y" if axis == "x" else "x"
        lnode, lleaves = _split_rect(left_rect, n_left, rng, child_axis)
        rnode, rleaves = _split_rect(right_rect, count - n_left, rng, child_axis)
        node = Split(axis, wall, lnode if lnode is not None else left_rect, rnode if rnode is not None else right_rect)
        return node, lleaves + rleaves
    raise InsufficientArea(
        f"cannot split a {w}x{h} area into {count} regions of at least {_SIDE}x{_SIDE} cells"
    )


def _materialize(node, rect_to_region):
    """Replace leaf-rect placeholders with Region leaves."""
    if isinstance(node, Split):
        return Split(node.axis, node.wall, _materialize(node.left, rect_to_region), _materialize(node.right, rect_to_region))
    return rect_to_region[node]


def generate_environment(spec: EnvSpec, seed: int) -> tuple[TraversabilityGrid, RegionTree, RegionAdjacency]:
    """Deterministically generate (grid, region tree, adjacency) for a spec."""
    if _cap(spec.width, spec.height) < spec.num_regions:
        raise InsufficientArea(
            f"{spec.num_regions} regions of at least {_SIDE}x{_SIDE} cells cannot fit a "
            f"{spec.width}x{spec.height} interior"
        )
    rng = derive_rng(seed, "worldgen")
    width = spec.width + 2
    height = spec.height + 2
    interior = (1, 1, spec.width, spec.height)

    prefer = "x" if spec.width >= spec.height else "y"
    if spec.num_regions == 1:
        node, leaf_rects = None, [interior]
    else:
        node, leaf_rects = _split_rect(interior, spec.num_regions, rng, prefer)

    names = spec.region_names()
    leaves = []
    rect_to_region: dict[tuple[int, int, int, int], Region] = {}
    for i, rect in enumerate(leaf_rects):
        region = Region(region_id=i, name=names[i], bounds=rect, description=f"{names[i]} ({rect[2]-rect[0]+1}x{rect[3]-rect[1]+1} room)")
        leaves.append(region)
        rect_to_region[rect] = region
    root: TreeNode = _materialize(node, rect_to_region) if node is not None else leaves[0]
    tree = RegionTree(root=root, leaves=tuple(leaves))

    open_mask = bytearray(width * height)
    region_of = [-1] * (width * height)
    for region in leaves:
        x0, y0, x1, y1 = region.bounds
        for y in range(y0, y1 + 1):
            base = y * width
            for x in range(x0, x1 + 1):
                open_mask[base + x] = OPEN
                region_of[base + x] = region.region_id

    # Adjacency: every pair of rooms separated by a single shared wall run.
    edges: dict[int, dict[int, tuple[int, int]]] = {r.region_id: {} for r in leaves}
    pairs = []
    for a in leaves:
        ax0, ay0, ax1, ay1 = a.bounds
        for b in leaves:
            if b.region_id <= a.region_id:
                continue
            bx0, by0, bx1, by1 = b.bounds
            if bx0 == ax1 + 2:  # b to the east of a
                lo, hi = max(ay0, by0), min(ay1, by1)
                if lo <= hi:
                    pairs.append((a.region_id, b.region_id, "x", ax1 + 1, lo, hi))
            elif ax0 == bx1 + 2:  # b to the west
                lo, hi = max(ay0, by0), min(ay1, by1)
                if lo <= hi:
                    pairs.append((a.region_id, b.region_id, "x", bx1 + 1, lo, hi))
            elif by0 == ay1 + 2:  # b to the south
                lo, hi = max(ax0, bx0), min(ax1, bx1)
                if lo <= hi:
                    pairs.append((a.region_id, b.region_id, "y", ay1 + 1, lo, hi))
            elif ay0 == by1 + 2:  # b to the north
                lo, hi = max(ax0, bx0), min(ax1, bx1)
                if lo <= hi:
                    pairs.append((a.region_id, b.region_id, "y", by1 + 1, lo, hi))

    for a_id, b_id, axis, wall, lo, hi in sorted(pairs):
        pos = rng.randint(lo, hi)
        door = (wall, pos) if axis == "x" else (pos, wall)
        di = door[1] * width + door[0]
        open_mask[di] = OPEN
        region_of[di] = min(a_id, b_id)
        edges[a_id][b_id] = door
        edges[b_id][a_id] = door

    grid = TraversabilityGrid(
        width=width,
        height=height,
        open_mask=bytes(open_mask),
        region_of=tuple(region_of),
    )
    return grid, tree, RegionAdjacency(edges=edges)
