"""Numba max-flow kernel (Dinic) used by the min-cut solvers.

The kernel works on a flat arc-pair representation: arcs are stored in
pairs, arc ``2e`` and ``2e+1`` being mutual reverses, with residual
capacities in ``arc_res``. Adjacency is CSR: node ``v`` owns arc ids
``adj_arc[adj_start[v]:adj_start[v+1]]``.

Residual capacities below ``EPS`` are treated as zero. Augmentations
subtract the exact bottleneck, so integer-valued capacities stay exact
throughout and the final reachability search is tie-free on such inputs.
"""

import numpy as np
from numba import njit

EPS = 1e-14


@njit(cache=True)
def dinic_min_source(num_nodes, arc_to, arc_res, adj_start, adj_arc, s, t):
    """Run Dinic to max flow, then return the s-reachable residual mask.

    Mutates ``arc_res`` in place. The returned uint8 mask (length
    ``num_nodes``) marks nodes reachable from ``s`` in the residual
    network, i.e. the minimal minimum-cut source set plus ``s`` itself.
    """
    n = num_nodes
    level = np.empty(n, dtype=np.int64)
    it = np.empty(n, dtype=np.int64)
    path = np.empty(n + 2, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)

    while True:
        # BFS level graph from s on positive residuals
        for i in range(n):
            level[i] = -1
        level[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            for ptr in range(adj_start[v], adj_start[v + 1]):
                a = adj_arc[ptr]
                w = arc_to[a]
                if arc_res[a] > EPS and level[w] < 0:
                    level[w] = level[v] + 1
                    queue[tail] = w
                    tail += 1
        if level[t] < 0:
            break

        # blocking flow, iterative DFS with current-arc pointers
        for i in range(n):
            it[i] = adj_start[i]
        v = s
        path_len = 0
        while True:
            if v == t:
                b = np.inf
                for idx in range(path_len):
                    a = path[idx]
                    if arc_res[a] < b:
                        b = arc_res[a]
                for idx in range(path_len):
                    a = path[idx]
                    arc_res[a] -= b
                    arc_res[a ^ 1] += b
                retreat = 0
                for idx in range(path_len):
                    if arc_res[path[idx]] <= EPS:
                        retreat = idx
                        break
                path_len = retreat
                if path_len == 0:
                    v = s
                else:
                    v = arc_to[path[path_len - 1]]
                continue
            advanced = False
            while it[v] < adj_start[v + 1]:
                a = adj_arc[it[v]]
                w = arc_to[a]
                if arc_res[a] > EPS and level[w] == level[v] + 1:
                    path[path_len] = a
                    path_len += 1
                    v = w
                    advanced = True
                    break
                it[v] += 1
            if not advanced:
                if v == s:
                    break
                level[v] = -1
                path_len -= 1
                a = path[path_len]
                v = arc_to[a ^ 1]
                it[v] += 1

    # residual reachability from s
    mask = np.zeros(n, dtype=np.uint8)
    mask[s] = 1
    queue[0] = s
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        for ptr in range(adj_start[v], adj_start[v + 1]):
            a = adj_arc[ptr]
            w = arc_to[a]
            if arc_res[a] > EPS and mask[w] == 0:
                mask[w] = 1
                queue[tail] = w
                tail += 1
    return mask
