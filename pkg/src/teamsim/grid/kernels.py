"""Kernel selection: compiled extension when present, pure Python otherwise.

Set TEAMSIM_PURE_PYTHON=1 to force the fallback (used by the equivalence tests
and the benchmark). ``BACKEND`` reports which implementation is active.
"""

from __future__ import annotations

import os

from teamsim.grid import _kernels_py

_impl = _kernels_py
BACKEND = "python"

if os.environ.get("TEAMSIM_PURE_PYTHON") != "1":
    try:
        from teamsim.grid import _kernels_cy as _compiled

        _impl = _compiled
        BACKEND = "compiled"
    except ImportError:
        pass

bfs_parents = _impl.bfs_parents
bfs_distances = _impl.bfs_distances
flood_fill_count = _impl.flood_fill_count


def path_from_parents(parents, start: int, goal: int) -> list[int] | None:
    """Walk a parent tree back from ``goal``; None when goal was not reached."""
    if parents[goal] == -2:
        return None
    path = [goal]
    cur = goal
    while cur != start:
        cur = parents[cur]
        path.append(cur)
    path.reverse()
    return path
