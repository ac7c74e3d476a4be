"""Comparison algorithms: random partition/placement and greedy joint optimisation."""

from __future__ import annotations

import numpy as np

from .comm_graph import CommGraph
from .errors import InfeasibleError
from .evaluator import evaluate
from .model_graph import CandidatePoints, ModelGraph
from .partitioner import DEFAULT_LAMBDA, build_partition_graph, default_classifier, make_scheme
from .placement import Placement

MAX_RANDOM_DRAWS = 10_000


def random_baseline(points: CandidatePoints, g: ModelGraph, g_c: CommGraph, kappa: float, seed=None,
                    lambda_ratio: float = DEFAULT_LAMBDA, n_classes: int = 3, max_draws: int = MAX_RANDOM_DRAWS):
    """Random node, random feasible next partition, until the model is covered.

    An attempt that runs out of nodes is thrown away and redrawn from scratch.
    """
    graph = build_partition_graph(points, g, kappa, lambda_ratio)
    graph.classifier = default_classifier(graph, n_classes)
    rng = np.random.default_rng(seed)
    n_points = len(points)
    for _ in range(max_draws):
        free = list(range(g_c.n))
        seq = [free.pop(int(rng.integers(len(free))))]
        ranges = []
        i = 0
        while i < n_points and free:
            seq.append(free.pop(int(rng.integers(len(free)))))
            ends = graph.feasible_ends(i)
            j = ends[int(rng.integers(len(ends)))]
            ranges.append((i, j))
            i = j + 1
        if i == n_points:
            scheme = make_scheme(graph, ranges)
            return scheme, Placement(tuple(seq), scheme, "random", n_classes)
    raise InfeasibleError(f"no random draw covered the model within {max_draws} attempts")


def greedy_ranges(graph) -> list[tuple[int, int]]:
    """From each start, take the feasible partition with the smallest outgoing
    transfer; on ties prefer the longer partition."""
    ranges = []
    i = 0
    while i <= graph.last:
        ends = graph.feasible_ends(i)
        j = min(ends, key=lambda e: (graph.point_elements[e], -e))
        ranges.append((i, j))
        i = j + 1
    return ranges


def greedy_walk(g_c: CommGraph, start: int, length: int) -> list[int] | None:
    """Follow the fastest link to an unvisited node, ``length`` nodes in total."""
    if length > g_c.n:
        return None
    seq = [start]
    visited = np.zeros(g_c.n, dtype=bool)
    visited[start] = True
    while len(seq) < length:
        row = np.where(visited, -np.inf, g_c.bandwidth[seq[-1]])
        nxt = int(np.argmax(row))
        seq.append(nxt)
        visited[nxt] = True
    return seq


def joint_optimization_baseline(points: CandidatePoints, g: ModelGraph, g_c: CommGraph, kappa: float,
                                lambda_ratio: float = DEFAULT_LAMBDA, n_classes: int = 3):
    """Greedy smallest-transfer partitions walked along greedy fastest-link paths
    from every possible dispatcher node; the smallest bottleneck wins."""
    graph = build_partition_graph(points, g, kappa, lambda_ratio)
    graph.classifier = default_classifier(graph, n_classes)
    scheme = make_scheme(graph, greedy_ranges(graph))
    need = len(scheme.partitions)
    if need > g_c.n:
        raise InfeasibleError(f"{need} nodes needed, graph has {g_c.n}")
    best, best_beta = None, np.inf
    for start in range(g_c.n):
        seq = greedy_walk(g_c, start, need)
        placement = Placement(tuple(seq), scheme, "joint", n_classes)
        beta = evaluate(scheme, placement, g_c).bottleneck_beta
        if beta < best_beta:
            best, best_beta = placement, beta
    return scheme, best
