# cython: language_level=3
"""Compiled grid kernels; behavior matches ``_kernels_py`` exactly.

Same flat row-major layout and the same N, E, S, W expansion order, so parent
trees, distances and reachable counts are bit-identical to the pure-Python
reference.
"""

from cpython cimport array
import array

cdef array.array _INT_TEMPLATE = array.array("i", [])


def bfs_parents(const unsigned char[::1] open_mask, int width, int height, int start):
    cdef int n = width * height
    cdef array.array parents_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int[::1] parents = parents_arr
    cdef array.array queue_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int[::1] queue = queue_arr
    cdef int i, cur, x, y, nb, head, tail
    for i in range(n):
        parents[i] = -2
    if not open_mask[start]:
        return parents_arr
    parents[start] = -1
    queue[0] = start
    head = 0
    tail = 1
    while head < tail:
        cur = queue[head]
        head += 1
        x = cur % width
        y = cur // width
        if y > 0:
            nb = cur - width
            if open_mask[nb] and parents[nb] == -2:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
        if x + 1 < width:
            nb = cur + 1
            if open_mask[nb] and parents[nb] == -2:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
        if y + 1 < height:
            nb = cur + width
            if open_mask[nb] and parents[nb] == -2:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
        if x > 0:
            nb = cur - 1
            if open_mask[nb] and parents[nb] == -2:
                parents[nb] = cur
                queue[tail] = nb
                tail += 1
    return parents_arr


def bfs_distances(const unsigned char[::1] open_mask, int width, int height, int start):
    cdef int n = width * height
    cdef array.array dist_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int[::1] dist = dist_arr
    cdef array.array queue_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int[::1] queue = queue_arr
    cdef int i, cur, x, y, nb, head, tail, d
    for i in range(n):
        dist[i] = -1
    if not open_mask[start]:
        return dist_arr
    dist[start] = 0
    queue[0] = start
    head = 0
    tail = 1
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
    return dist_arr


def flood_fill_count(const unsigned char[::1] open_mask, int width, int height, int start):
    cdef int n = width * height
    if not open_mask[start]:
        return 0
    cdef bytearray seen_bytes = bytearray(n)
    cdef unsigned char[::1] seen = seen_bytes
    cdef array.array queue_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int[::1] queue = queue_arr
    cdef int cur, x, y, nb, head, tail, count
    seen[start] = 1
    queue[0] = start
    head = 0
    tail = 1
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
