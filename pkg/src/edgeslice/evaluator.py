"""Hop latencies, bottleneck latency, the max-size/max-bandwidth lower bound,
and an exhaustive oracle for small instances.

Units: transfer sizes in bytes, bandwidths in Mbps, latencies in seconds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .comm_graph import CommGraph
from .errors import InfeasibleError, InstanceTooLargeError, LengthMismatchError
from .model_graph import CandidatePoints, ModelGraph
from .partitioner import (
    DEFAULT_LAMBDA,
    PartitionScheme,
    build_partition_graph,
    default_classifier,
    enumerate_partitionings,
    make_scheme,
)
from .placement import Placement

MEGABITS_PER_BYTE = 8e-6

ORACLE_MAX_POINTS = 14
ORACLE_MAX_NODES = 8


def hop_latency(size_bytes: float, bandwidth_mbps: float) -> float:
    return size_bytes * MEGABITS_PER_BYTE / bandwidth_mbps


@dataclass(frozen=True)
class LatencyReport:
    per_hop_latency: tuple[float, ...]
    bottleneck_beta: float
    throughput: float
    lower_bound: float
    approx_ratio: float
    bottleneck_hop: int

    def to_dict(self) -> dict:
        return {
            "per_hop_latency_s": list(self.per_hop_latency),
            "beta_s": self.bottleneck_beta,
            "throughput_hz": self.throughput,
            "bound_s": self.lower_bound,
            "ratio": self.approx_ratio,
            "bottleneck_hop": self.bottleneck_hop,
        }


def lower_bound(sizes, bandwidths) -> float:
    """Largest transfer over the fastest link: no placement can beat it."""
    sizes = list(sizes)
    bandwidths = np.asarray(bandwidths, dtype=float)
    if not sizes or bandwidths.size == 0:
        raise ValueError("sizes and bandwidths must be non-empty")
    return hop_latency(max(sizes), float(bandwidths.max()))


def hop_latencies(hop_bytes, hop_bandwidths, compute_times=None) -> list[float]:
    if len(hop_bytes) != len(hop_bandwidths):
        raise LengthMismatchError(f"{len(hop_bytes)} hop sizes vs {len(hop_bandwidths)} bandwidths")
    gamma = [hop_latency(t, b) for t, b in zip(hop_bytes, hop_bandwidths)]
    if compute_times is not None:
        if len(compute_times) != len(gamma):
            raise LengthMismatchError(f"{len(compute_times)} compute times vs {len(gamma)} hops")
        gamma = [g + c for g, c in zip(gamma, compute_times)]
    return gamma


def report_from_latencies(gamma, bound) -> LatencyReport:
    beta = max(gamma)
    return LatencyReport(
        per_hop_latency=tuple(gamma),
        bottleneck_beta=beta,
        throughput=1.0 / beta,
        lower_bound=bound,
        approx_ratio=beta / bound,
        bottleneck_hop=int(np.argmax(gamma)),
    )


def evaluate(scheme: PartitionScheme, placement: Placement, g_c: CommGraph, compute_times=None) -> LatencyReport:
    """Latency of every hop from the dispatcher onward; the output's trip back
    to the dispatcher is not counted."""
    seq = placement.node_sequence
    if len(seq) != len(scheme.partitions):
        raise LengthMismatchError(f"placement has {len(seq)} nodes for {len(scheme.partitions)} partitions")
    if len(set(seq)) != len(seq):
        raise ValueError("placement repeats a node")
    bws = [g_c.bandwidth[seq[i], seq[i + 1]] for i in range(len(seq) - 1)]
    gamma = hop_latencies(scheme.hop_sizes, bws, compute_times)
    return report_from_latencies(gamma, lower_bound(scheme.hop_sizes, g_c.edge_weights()))


def best_sequence(hop_bytes, bandwidth: np.ndarray, incumbent: float = np.inf):
    """Injective node sequence minimising the bottleneck for fixed hop sizes.

    Depth-first over nodes in ascending id order; a branch is cut as soon as
    its running bottleneck reaches the incumbent, so among equal optima the
    lexicographically smallest sequence is returned.
    Returns ``(beta, sequence)`` or ``(incumbent, None)`` if nothing beats it.
    """
    n = bandwidth.shape[0]
    m = len(hop_bytes)
    lat = [hop_bytes[k] * MEGABITS_PER_BYTE / np.where(bandwidth > 0, bandwidth, np.inf) for k in range(m)]
    best = [incumbent, None]
    seq = []
    used = [False] * n

    def dfs(v, worst):
        k = len(seq) - 1
        if k == m:
            if worst < best[0]:
                best[0], best[1] = worst, tuple(seq)
            return
        row = lat[k][v]
        for w in range(n):
            if used[w]:
                continue
            nw = max(worst, row[w])
            if nw >= best[0]:
                continue
            used[w] = True
            seq.append(w)
            dfs(w, nw)
            seq.pop()
            used[w] = False

    for v in range(n):
        used[v] = True
        seq.append(v)
        dfs(v, 0.0)
        seq.pop()
        used[v] = False
    return best[0], best[1]


def brute_force_optimum(points: CandidatePoints, g: ModelGraph, g_c: CommGraph, kappa: float,
                        lambda_ratio: float = DEFAULT_LAMBDA, n_classes: int = 3):
    """Global bottleneck minimiser over every feasible partitioning and node order.

    Partitionings are visited fewest parts first, then lexicographically.
    """
    if len(points) > ORACLE_MAX_POINTS or g_c.n > ORACLE_MAX_NODES:
        raise InstanceTooLargeError(
            f"oracle limited to {ORACLE_MAX_POINTS} points and {ORACLE_MAX_NODES} nodes "
            f"(got {len(points)} and {g_c.n})"
        )
    graph = build_partition_graph(points, g, kappa, lambda_ratio)
    graph.classifier = default_classifier(graph, n_classes)
    max_bw = g_c.max_bandwidth
    candidates = []
    for ranges in enumerate_partitionings(graph):
        if len(ranges) + 1 > g_c.n:
            continue
        hops = [graph.transfer_bytes(0)] + [graph.transfer_bytes(j) for _, j in ranges[:-1]]
        candidates.append((len(ranges), tuple(j for _, j in ranges), ranges, hops))
    if not candidates:
        raise InfeasibleError(f"every feasible partitioning needs more than {g_c.n} nodes")
    candidates.sort(key=lambda c: (c[0], c[1]))
    best_beta, best_ranges, best_seq = np.inf, None, None
    for _, _, ranges, hops in candidates:
        if hop_latency(max(hops), max_bw) >= best_beta:
            continue
        beta, seq = best_sequence(hops, g_c.bandwidth, best_beta)
        if seq is not None:
            best_beta, best_ranges, best_seq = beta, ranges, seq
    scheme = make_scheme(graph, best_ranges)
    placement = Placement(best_seq, scheme, "oracle", n_classes)
    return scheme, placement, evaluate(scheme, placement, g_c)


def exhaustive_sequence_beta(hop_bytes, bandwidth: np.ndarray) -> float:
    """Plain permutation scan, used to cross-check :func:`best_sequence`."""
    n = bandwidth.shape[0]
    best = np.inf
    for seq in itertools.permutations(range(n), len(hop_bytes) + 1):
        beta = max(hop_latency(t, bandwidth[seq[i], seq[i + 1]]) for i, t in enumerate(hop_bytes))
        best = min(best, beta)
    return best
