"""Placement of pipeline partitions onto communication-graph nodes.

Hops are grouped into maximal runs of equal transfer-size class. Runs are
matched from the largest class down, longest run first; each run of ``L``
hops becomes a simple path of ``L + 1`` nodes found by color-coding, using
only links at or above the highest bandwidth threshold that still admits
such a path. Runs that touch an already placed neighbour are anchored to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .comm_graph import CommGraph
from .errors import InfeasibleError, MatchingError, NoPathError
from .partitioner import PartitionScheme

DEFAULT_DELTA = 0.01
# bound on the boolean DP table held in memory at once (trials * 2^k * n)
_DP_CELLS = 1 << 22


def default_trials(k: int, delta: float = DEFAULT_DELTA) -> int:
    """Colorings needed to find a fixed k-path with probability 1 - delta."""
    return math.ceil(math.exp(k) * math.log(1.0 / delta))


def find_subarrays(classes, x) -> list[tuple[int, int]]:
    """Maximal runs of label ``x`` as ``(start, length)``, longest first then leftmost."""
    runs = []
    start = None
    for i, c in enumerate(list(classes) + [object()]):
        if c == x and start is None:
            start = i
        elif c != x and start is not None:
            runs.append((start, i - start))
            start = None
    runs.sort(key=lambda r: (-r[1], r[0]))
    return runs


def color_coding_k_path(adj, k: int, s=None, u=None, trials: int | None = None, seed=None, rng=None, delta=DEFAULT_DELTA):
    """Search for a simple path of ``k`` vertices in the graph ``adj``.

    ``s`` fixes the first vertex and ``u`` the last; ``u`` is never used as an
    interior vertex. Returns the vertex list or ``None`` when no path turned
    up within ``trials`` random colorings. Graphs whose connected components
    are too small to host a k-path are rejected without coloring.
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if s is not None and u is not None and s == u:
        return [s] if k == 1 else None
    if k > n:
        return None
    if k == 1:
        if u is not None and s is not None:
            return None
        return [s if s is not None else (u if u is not None else 0)]
    if rng is None:
        rng = np.random.default_rng(seed)
    if trials is None:
        trials = default_trials(k, delta)

    n_comp, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=n_comp)
    if s is not None and u is not None and labels[s] != labels[u]:
        return None
    anchor = s if s is not None else u
    if anchor is not None:
        if sizes[labels[anchor]] < k:
            return None
    elif sizes.max() < k:
        return None

    a32 = adj.astype(np.float32)
    chunk_cap = max(1, _DP_CELLS // ((1 << k) * n))
    chunk = min(8, chunk_cap)
    done = 0
    while done < trials:
        t = min(chunk, trials - done)
        colors = rng.integers(0, k, size=(t, n))
        path = _colorful_path(adj, a32, colors, k, s, u)
        if path is not None:
            return path
        done += t
        chunk = min(chunk * 2, chunk_cap)
    return None


def _colorful_path(adj, a32, colors, k, s, u):
    t, n = colors.shape
    bits = np.left_shift(1, colors)
    full = (1 << k) - 1
    dp = np.zeros((t, 1 << k, n), dtype=bool)
    tt = np.arange(t)
    if s is not None:
        dp[tt, bits[:, s], s] = True
    else:
        dp[tt[:, None], bits, np.arange(n)[None, :]] = True
        if u is not None:
            dp[:, :, u] = False
    popcount = [bin(m).count("1") for m in range(full + 1)]
    for mask in range(1, full):
        cur = dp[:, mask, :]
        if not cur.any():
            continue
        reach = (cur.astype(np.float32) @ a32) > 0
        valid = reach & ((bits & mask) == 0)
        if u is not None and popcount[mask] + 1 < k:
            valid[:, u] = False
        ti, wi = np.nonzero(valid)
        if ti.size:
            dp[ti, mask | bits[ti, wi], wi] = True
    final = dp[:, full, :]
    if u is not None:
        hits = np.nonzero(final[:, u])[0]
    else:
        hits = np.nonzero(final.any(axis=1))[0]
    if hits.size == 0:
        return None
    ti = int(hits[0])
    v = u if u is not None else int(np.nonzero(final[ti])[0][0])
    mask = full
    path = [v]
    while mask != bits[ti, v]:
        prev = mask ^ bits[ti, v]
        cands = np.nonzero(adj[:, v] & dp[ti, prev, :])[0]
        if u is not None:
            cands = cands[cands != u]
        v = int(cands[0])
        mask = prev
        path.append(v)
    return path[::-1]


@dataclass(frozen=True)
class EdgeClassification:
    """Edges at or above ``threshold`` take class ``x``; the rest fall to ``x - 1``."""

    n_classes: int
    x: int
    threshold: float
    class_of: np.ndarray = field(repr=False)

    def subgraph(self) -> np.ndarray:
        adj = self.class_of == self.x
        np.fill_diagonal(adj, False)
        return adj


def classify_edges(bandwidth: np.ndarray, x: int, threshold: float, n_classes: int) -> EdgeClassification:
    labels = np.where(bandwidth >= threshold, x, x - 1)
    np.fill_diagonal(labels, -1)
    return EdgeClassification(n_classes, x, float(threshold), labels)


def subgraph_k_path(g_c: CommGraph, x: int, k: int, s=None, u=None, consumed=frozenset(),
                    n_classes: int = 2, rng=None, seed=None, delta=DEFAULT_DELTA):
    """Bisect the descending list of available link weights for the highest
    threshold at which a k-path exists. Returns ``(path, threshold)``.

    ``consumed`` nodes are unavailable except as the anchors ``s`` / ``u``;
    the caller adds the returned path to its consumed set.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    avail = sorted((set(range(g_c.n)) - set(consumed)) | {v for v in (s, u) if v is not None})
    if len(avail) < k:
        raise NoPathError(f"{len(avail)} available nodes, need {k}")
    local = {v: i for i, v in enumerate(avail)}
    bw = g_c.bandwidth[np.ix_(avail, avail)]
    ls = local[s] if s is not None else None
    lu = local[u] if u is not None else None
    weights = np.unique(bw[np.triu_indices(len(avail), 1)])[::-1]
    # a pair without bandwidth is not a link at any threshold
    weights = weights[weights > 0]
    low, high = 0, len(weights)
    best, best_thr = None, None
    while low < high:
        median = (low + high) // 2
        cls = classify_edges(bw, x, weights[median], n_classes)
        found = color_coding_k_path(cls.subgraph(), k, ls, lu, rng=rng, delta=delta)
        if found is None:
            low = median + 1
        else:
            high = median
            best, best_thr = found, float(weights[median])
    if best is None:
        raise NoPathError(f"no {k}-path for class {x}")
    return [avail[i] for i in best], best_thr


@dataclass(frozen=True)
class Placement:
    """``node_sequence[0]`` hosts the dispatcher, ``node_sequence[k]`` partition ``k``."""

    node_sequence: tuple[int, ...]
    scheme: PartitionScheme
    algorithm: str = "kpath"
    n_classes: int | None = None
    hop_thresholds: tuple | None = None

    def __len__(self):
        return len(self.node_sequence)

    def hop_bandwidths(self, g_c: CommGraph) -> list[float]:
        seq = self.node_sequence
        return [float(g_c.bandwidth[seq[i], seq[i + 1]]) for i in range(len(seq) - 1)]

    def to_dict(self, g_c: CommGraph | None = None) -> dict:
        out = {
            "algorithm": self.algorithm,
            "n_classes": self.n_classes,
            "nodes": list(self.node_sequence),
            "hop_classes": self.scheme.hop_classes,
        }
        if g_c is not None:
            out["hop_bandwidth_mbps"] = self.hop_bandwidths(g_c)
        return out


def k_path_matching(scheme: PartitionScheme, g_c: CommGraph, n_classes: int | None = None,
                    seed=None, delta: float = DEFAULT_DELTA) -> Placement:
    """Greedy class-ordered k-path matching of the scheme's hops onto ``g_c``."""
    if n_classes is not None:
        if n_classes < 2:
            raise ValueError("n_classes must be at least 2")
        scheme = scheme.reclassify(n_classes)
    classes = scheme.hop_classes
    m = len(classes)
    if g_c.n < m + 1:
        raise InfeasibleError(f"{m + 1} nodes needed, graph has {g_c.n}")
    rng = np.random.default_rng(seed)
    nodes: list = [None] * (m + 1)
    thresholds: list = [None] * m
    consumed: set = set()
    for x in sorted(set(classes), reverse=True):
        for start, length in find_subarrays(classes, x):
            s, u = nodes[start], nodes[start + length]
            try:
                path, thr = subgraph_k_path(
                    g_c, x, length + 1, s, u, consumed,
                    n_classes=scheme.classifier.n_classes, rng=rng, delta=delta,
                )
            except NoPathError:
                raise MatchingError(x, start, length) from None
            nodes[start:start + length + 1] = path
            thresholds[start:start + length] = [thr] * length
            consumed.update(path)
    return Placement(tuple(nodes), scheme, "kpath", scheme.classifier.n_classes, tuple(thresholds))


def place_with_retry(scheme: PartitionScheme, g_c: CommGraph, n_classes: int, seed=None,
                     max_retries: int = 3, delta: float = DEFAULT_DELTA) -> Placement:
    """Run the matching, halving the class count after each failure."""
    classes = n_classes
    for attempt in range(max_retries + 1):
        try:
            return k_path_matching(scheme, g_c, classes, seed=seed, delta=delta)
        except MatchingError:
            if attempt == max_retries:
                raise
            classes = max(2, classes // 2)
