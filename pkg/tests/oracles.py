"""Slow, obviously-correct reference implementations used by the tests.

None of these share code with the package beyond its data types.
"""

from __future__ import annotations

import itertools

import numpy as np


def all_paths_from(g, start):
    """Every maximal path (ending at a vertex without successors) leaving ``start``."""
    out = []

    def rec(path):
        nxt = g.successors[path[-1]]
        if not nxt:
            out.append(list(path))
            return
        for w in nxt:
            path.append(w)
            rec(path)
            path.pop()

    rec([start])
    return out


def longest_path_oracle(g) -> dict:
    """Depth of each vertex as the longest of all enumerated source paths reaching it."""
    depth = {v: -1 for v in g.layers}
    for path in all_paths_from(g, g.source):
        for i, v in enumerate(path):
            depth[v] = max(depth[v], i)
    return depth


def ap_oracle(g, v_prev, v) -> bool:
    """Every maximal path out of ``v_prev`` visits ``v``."""
    return all(v in p for p in all_paths_from(g, v_prev))


def candidate_points_oracle(g) -> list:
    depth = longest_path_oracle(g)
    values = list(depth.values())
    pts = [g.source]
    for v in sorted(depth, key=lambda x: depth[x]):
        if v == g.source or values.count(depth[v]) != 1:
            continue
        if ap_oracle(g, pts[-1], v):
            pts.append(v)
    return pts


def removal_disconnects(g, depth, p_prev, p) -> bool:
    """Deleting ``p`` cuts ``p_prev`` off from every vertex deeper than ``p``."""
    seen = {p_prev}
    stack = [p_prev]
    while stack:
        u = stack.pop()
        for w in g.successors[u]:
            if w == p or w in seen:
                continue
            if depth[w] > depth[p]:
                return False
            seen.add(w)
            stack.append(w)
    return True


def segment_memory(g, points, depth) -> list:
    """Memory of each gap between consecutive candidates, by depth interval."""
    cd = [depth[p] for p in points]
    out = []
    for i, d in enumerate(cd):
        lo = cd[i - 1] if i else -1
        out.append(sum(layer.memory_bytes for v, layer in g.layers.items() if lo < depth[v] <= d))
    return out


def compositions(n):
    """All ways to cut ``0..n-1`` into contiguous ranges."""
    for cuts in itertools.product((False, True), repeat=n - 1):
        ranges, start = [], 0
        for i, c in enumerate(cuts):
            if c:
                ranges.append((start, i))
                start = i + 1
        ranges.append((start, n - 1))
        yield ranges


def min_cost_oracle(g, points, kappa):
    """Cheapest feasible covering in output elements; ``None`` when nothing fits.
    Ties go to fewer parts then lexicographically smaller ends."""
    depth = longest_path_oracle(g)
    seg = segment_memory(g, points, depth)
    elems = [g.layers[p].output_elements for p in points]
    best = None
    for ranges in compositions(len(points)):
        if any(sum(seg[i:j + 1]) >= kappa for i, j in ranges):
            continue
        key = (sum(elems[j] for _, j in ranges), len(ranges), tuple(j for _, j in ranges))
        if best is None or key < best[0]:
            best = (key, ranges)
    return best


def k_path_exists(adj, k, s=None, u=None):
    """Exhaustive search for a simple path of ``k`` vertices from ``s`` to ``u``."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    starts = [s] if s is not None else range(n)

    def rec(path):
        if len(path) == k:
            return u is None or path[-1] == u
        for w in np.nonzero(adj[path[-1]])[0]:
            w = int(w)
            if w in path or (w == u and len(path) + 1 < k):
                continue
            path.append(w)
            if rec(path):
                return True
            path.pop()
        return False

    for v in starts:
        if u is not None and v == u and k > 1:
            continue
        if rec([v]):
            return True
    return False


def is_simple_path(adj, path) -> bool:
    return len(set(path)) == len(path) and all(adj[a, b] for a, b in zip(path, path[1:]))


def best_threshold(bandwidth, k, s=None, u=None, allowed=None):
    """Largest weight t such that the edges with weight at least t contain the path."""
    n = bandwidth.shape[0]
    allowed = list(range(n)) if allowed is None else allowed
    sub = bandwidth[np.ix_(allowed, allowed)]
    loc = {v: i for i, v in enumerate(allowed)}
    ls = loc[s] if s is not None else None
    lu = loc[u] if u is not None else None
    for t in sorted(set(sub[np.triu_indices(len(allowed), 1)]), reverse=True):
        adj = sub >= t
        np.fill_diagonal(adj, False)
        if k_path_exists(adj, k, ls, lu):
            return t
    return None


def permutation_beta(hop_bytes, bandwidth):
    n = bandwidth.shape[0]
    best = np.inf
    for seq in itertools.permutations(range(n), len(hop_bytes) + 1):
        best = min(best, max(t * 8e-6 / bandwidth[seq[i], seq[i + 1]] for i, t in enumerate(hop_bytes)))
    return best
