"""Seeded random models and instances for property tests and oracle comparisons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .comm_graph import CommGraph, generate_rgg
from .model_graph import CandidatePoints, Layer, ModelGraph, candidate_partition_points
from .partitioner import _segment_prefix


def random_dag(rng: np.random.Generator, n: int, edge_prob: float = 0.3) -> ModelGraph:
    """Single-source, single-sink DAG on ``n`` vertices ``v0 .. v{n-1}``.

    Edges only go from lower to higher index. Every vertex gets at least one
    predecessor and one successor so ``v0`` is the only source and ``v{n-1}``
    the only sink.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    edges = set()
    for j in range(1, n):
        for i in range(j):
            if rng.random() < edge_prob:
                edges.add((i, j))
        if not any(e[1] == j for e in edges):
            edges.add((int(rng.integers(j)), j))
    for i in range(n - 1):
        if not any(e[0] == i for e in edges):
            edges.add((i, int(rng.integers(i + 1, n))))
    layers = [Layer(f"v{i}", int(rng.integers(1, 1000)), int(rng.integers(1, 10_000))) for i in range(n)]
    return ModelGraph.from_records(layers, [(f"v{i}", f"v{j}") for i, j in sorted(edges)], name="random_dag")


def random_block_model(rng: np.random.Generator, n_blocks: int, max_branches: int = 3,
                       max_elements: int = 200_000, max_memory: int = 2_000_000) -> ModelGraph:
    """CNN-like chain of blocks; each block is one layer or parallel branches
    merged by a join layer. Every block output is a candidate partition point."""
    layers = []
    edges = []
    prev = "input"
    layers.append(Layer(prev, int(rng.integers(1, max_elements)), int(rng.integers(1, max_memory))))
    for b in range(n_blocks):
        out = f"b{b}_out"
        width = int(rng.integers(0, max_branches + 1))
        for k in range(width):
            lid = f"b{b}_br{k}"
            layers.append(Layer(lid, int(rng.integers(1, max_elements)), int(rng.integers(1, max_memory))))
            edges.append((prev, lid))
            edges.append((lid, out))
        if width < 2:
            edges.append((prev, out))
        layers.append(Layer(out, int(rng.integers(1, max_elements)), int(rng.integers(1, max_memory))))
        prev = out
    return ModelGraph.from_records(layers, edges, name=f"blocks{n_blocks}")


@dataclass(frozen=True)
class SmallInstance:
    model: ModelGraph
    points: CandidatePoints
    g_c: CommGraph
    kappa: float
    seed: int


def small_instance(seed: int, max_points: int = 14, min_nodes: int = 4, max_nodes: int = 8) -> SmallInstance:
    """A random block model with at most ``max_points`` candidates, a random
    RGG, and a capacity between the largest segment and the whole model."""
    rng = np.random.default_rng(seed)
    model = random_block_model(rng, int(rng.integers(2, max_points)))
    points = candidate_partition_points(model)
    n_nodes = int(rng.integers(min_nodes, max_nodes + 1))
    g_c = generate_rgg(n_nodes, int(rng.integers(2**31)))
    prefix = _segment_prefix(model, points)
    largest = float(np.diff(prefix).max())
    total = float(prefix[-1])
    kappa = largest + 1 + rng.random() * (total - largest)
    return SmallInstance(model, points, g_c, kappa, seed)


def guarded_suite(count: int = 50, seed: int = 0, **kwargs) -> list[SmallInstance]:
    """``count`` small instances from consecutive derived seeds."""
    base = np.random.SeedSequence(seed)
    seeds = [int(s.generate_state(1)[0]) for s in base.spawn(count)]
    return [small_instance(s, **kwargs) for s in seeds]
