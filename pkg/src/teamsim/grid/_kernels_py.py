"""Pure-Python grid kernels.

Reference implementation of the breadth-first kernels used by pathfinding and
map verification. The compiled twin in ``_kernels_cy`` mirrors these functions
exactly, including the N, E, S, W neighbor visiting order that makes paths
deterministic. Cells are flat row-major indices over a width x height grid;
``open_mask[i]`` is 1 for walkable cells and 0 for walls.
"""

from __future__ import annotations

from array import array

_UNSEEN = -2
_ROOT = -1


def bfs_parents(open_mask, width: int, height: int, start: int) -> array:
    """BFS tree from ``start``: parents[i] is the predecessor index.

    Unreached cells hold -2, the start cell holds -1. Neighbors are expanded
    north, east, south, west, so the tree (and every path read from it) is
    unique for a given grid.
    """
    n = width * height
    parents = array("i", [_UNSEEN]) * n
    if not open_mask[start]:
        return parents
    parents[start] = _ROOT
    queue = array("i", [0]) * n
    queue[0] = start
    head, tail = 0, 1
    while head < tail:
        cur = queue[head]
        head += 1
        x = cur % width
        y = cur // width
        if y > 0:
            nb = cur - width
            if open_mask[nb] and parents[nb] == _UNSEEN:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
        if x + 1 < width:
            nb = cur + 1
            if open_mask[nb] and parents[nb] == _UNSEEN:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
        if y + 1 < height:
            nb = cur + width
            if open_mask[nb] and parents[nb] == _UNSEEN:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
        if x > 0:
            nb = cur - 1
            if open_mask[nb] and parents[nb] == _UNSEEN:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
    return parents


def bfs_distances(open_mask, width: int, height: int, start: int) -> array:
    """Shortest 4-connected distance from ``start`` to every cell, -1 if unreachable."""
    n = width * height
    dist = array("i", [-1]) * n
    if not open_mask[start]:
        return dist
    dist[start] = 0
    queue = array("i", [0]) * n
    queue[0] = start
    head, tail = 0, 1
    while head < tail:
        cur = queue[head]
        head += 1
        d = dist[cur] + 1
        x = cur % width
        y = cur // width
        if y > 0:
            nb = cur - width
            if open_mask[nb] and dist[nb] < 0:
                dist[nb] = d
                queue[tail] = nb
                tail += 1
        if x + 1 < width:
            nb = cur + 1
            if open_mask[nb] and dist[nb] < 0:
                dist[nb] = d
                queue[tail] = nb
                tail += 1
        if y + 1 < height:
            nb = cur + width
            if open_mask[nb] and dist[nb] < 0:
                dist[nb] = d
                queue[tail] = nb
                tail += 1
        if x > 0:
            nb = cur - 1
            if open_mask[nb] and dist[nb] < 0:
                dist[nb] = d
                queue[tail] = nb
                tail += 1
    return dist


def flood_fill_count(open_mask, width: int, height: int, start: int) -> int:
    """Number of open cells reachable from ``start`` (0 if start is a wall)."""
    if not open_mask[start]:
        return 0
    n = width * height
    seen = bytearray(n)
    seen[start] = 1
    queue = array("i", [0]) * n
    queue[0] = start
    head, tail = 0, 1
    count = 1
    while head < tail:
        cur = queue[head]
        head += 1
        x = cur % width
        y = cur // width
        if y > 0:
            nb = cur - width
            if open_mask[nb] and not seen[nb]:
                seen[nb] = 1
                count += 1
                queue[tail] = nb
                tail += 1
        if x + 1 < width:
            nb = cur + 1
            if open_mask[nb] and not seen[nb]:
                seen[nb] = 1
                count += 1
                queue[tail] = nb
                tail += 1
        if y + 1 < height:
            nb = cur + width
            if open_mask[nb] and not seen[nb]:
                seen[nb] = 1
                count += 1
                queue[tail] = nb
                tail += 1
        if x > 0:
            nb = cur - 1
            if open_mask[nb] and not seen[nb]:
                seen[nb] = 1
                count += 1
                queue[tail] = nb
                tail += 1
    return count
