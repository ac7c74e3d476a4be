"""Transfer sizes, transfer-size classes, the partition graph and optimal partitioning.

Partitions are contiguous runs of candidate points. Running a partition
``[i..j]`` means holding every layer whose depth lies after candidate
``i - 1`` and up to candidate ``j``; its outgoing transfer is the compressed
output of candidate ``j``. The optimal scheme is the min-cost root-to-leaf
path through the partition graph, with the cost of a path being the total
bytes sent across its partition boundaries.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, ModelFormatError, UnpartitionableError
from .model_graph import CandidatePoints, Layer, ModelGraph, candidate_partition_points, is_partitionable

PARTS_FORMAT = "edgeslice-parts/1"

BYTES_PER_ELEMENT = 4
# ZFP ratio times LZ4 ratio
DEFAULT_LAMBDA = 1.44 * 2.1
MIB = 2**20


def transfer_size(layer: Layer, lambda_ratio: float = DEFAULT_LAMBDA, bytes_per_element: int = BYTES_PER_ELEMENT) -> float:
    """Compressed bytes sent when the pipeline is cut after ``layer``."""
    if lambda_ratio <= 0:
        raise ValueError("lambda_ratio must be positive")
    return layer.output_elements * bytes_per_element / lambda_ratio


@dataclass(frozen=True)
class TransferClassifier:
    """Maps a transfer size to a class label ``0 .. len(breakpoints)``.

    Class ``c`` holds sizes in ``[breakpoints[c-1], breakpoints[c])``;
    larger labels mean larger transfers.
    """

    n_classes: int
    breakpoints: tuple[float, ...]

    @property
    def effective_classes(self) -> int:
        return len(self.breakpoints) + 1

    def classify(self, size: float) -> int:
        return bisect.bisect_right(self.breakpoints, size)

    def classify_many(self, sizes) -> list[int]:
        return [self.classify(s) for s in sizes]


def fit_classifier(sizes: Sequence[float], n_classes: int) -> TransferClassifier:
    """Equal-frequency bins over ``sizes``; duplicate cut points collapse."""
    if n_classes < 2:
        raise ValueError("n_classes must be at least 2")
    values = np.asarray(sizes, dtype=float)
    if values.size == 0:
        raise ValueError("sizes must be non-empty")
    qs = np.quantile(values, np.arange(1, n_classes) / n_classes)
    lo = values.min()
    cuts = sorted({float(q) for q in qs if q > lo})
    return TransferClassifier(n_classes, tuple(cuts))


@dataclass
class PartitionGraph:
    """Memory-feasible contiguous candidate ranges and their adjacency."""

    model: ModelGraph
    points: CandidatePoints
    kappa: float
    lambda_ratio: float
    point_elements: tuple[int, ...]
    vertices: list[tuple[int, int]]
    children: dict[tuple[int, int], list[tuple[int, int]]]
    classifier: TransferClassifier | None = None
    _prefix: np.ndarray = field(default=None, repr=False)

    @property
    def last(self) -> int:
        return len(self.points) - 1

    @property
    def roots(self) -> list[tuple[int, int]]:
        return [v for v in self.vertices if v[0] == 0]

    @property
    def leaves(self) -> list[tuple[int, int]]:
        return [v for v in self.vertices if v[1] == self.last]

    def memory(self, i: int, j: int) -> int:
        return int(self._prefix[j + 1] - self._prefix[i])

    def transfer_bytes(self, idx: int) -> float:
        return self.point_elements[idx] * BYTES_PER_ELEMENT / self.lambda_ratio

    def weight(self, u, v) -> float:
        """Bytes crossing the boundary between ranges ``u`` and ``v``."""
        return self.transfer_bytes(u[1])

    def edge_class(self, u, v) -> int | None:
        if self.classifier is None:
            return None
        return self.classifier.classify(self.weight(u, v))

    def feasible_ends(self, i: int) -> list[int]:
        return [j for (a, j) in self.vertices_from(i)]

    def vertices_from(self, i: int):
        return self._by_start.get(i, [])

    def __post_init__(self):
        self._by_start = {}
        for v in self.vertices:
            self._by_start.setdefault(v[0], []).append(v)


def _segment_prefix(g: ModelGraph, points: CandidatePoints) -> np.ndarray:
    """prefix[k] = memory of all layers up to and including candidate k-1."""
    depths = points.depths
    cut_depths = [depths[p] for p in points]
    per_segment = np.zeros(len(points), dtype=np.int64)
    for lid, layer in g.layers.items():
        seg = bisect.bisect_left(cut_depths, depths[lid])
        if seg >= len(points):
            raise UnpartitionableError(f"layer {lid} lies beyond the last candidate point")
        per_segment[seg] += layer.memory_bytes
    return np.concatenate([[0], np.cumsum(per_segment)])


def build_partition_graph(
    points: CandidatePoints,
    g: ModelGraph,
    kappa: float,
    lambda_ratio: float = DEFAULT_LAMBDA,
    classifier: TransferClassifier | None = None,
) -> PartitionGraph:
    """Vertices are ranges ``(i, j)`` whose memory is below ``kappa``; edges join
    ``(i, j)`` to every ``(j + 1, k)``."""
    if len(points) == 0:
        raise ValueError("no candidate points")
    if not is_partitionable(g, points):
        raise UnpartitionableError(
            f"model {g.name or '<model>'} has no candidate chain reaching its output"
        )
    prefix = _segment_prefix(g, points)
    n = len(points)
    vertices = []
    for i in range(n):
        if prefix[i + 1] - prefix[i] >= kappa:
            raise InfeasibleError(
                f"segment ending at {points[i]} needs {int(prefix[i + 1] - prefix[i])} bytes, "
                f"capacity is {kappa:g}"
            )
        for j in range(i, n):
            if prefix[j + 1] - prefix[i] >= kappa:
                break
            vertices.append((i, j))
    by_start: dict[int, list] = {}
    for v in vertices:
        by_start.setdefault(v[0], []).append(v)
    children = {v: by_start.get(v[1] + 1, []) for v in vertices}
    elements = tuple(g.layers[p].output_elements for p in points)
    return PartitionGraph(
        model=g,
        points=points,
        kappa=kappa,
        lambda_ratio=lambda_ratio,
        point_elements=elements,
        vertices=vertices,
        children=children,
        classifier=classifier,
        _prefix=prefix,
    )


@dataclass(frozen=True)
class Partition:
    start: int
    end: int
    memory_bytes: int
    boundary_point: str
    transfer_bytes: float
    transfer_class: int | None
    is_dispatcher: bool = False

    @property
    def layer_range(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class PartitionScheme:
    """Ordered partitions, dispatcher first.

    ``transfer_sizes[k]`` is what partition ``k`` sends downstream; the last
    entry is the model output returned to the dispatcher and is not part of
    the bottleneck.
    """

    partitions: tuple[Partition, ...]
    classifier: TransferClassifier
    candidate_transfer_bytes: tuple[float, ...]
    total_cost: float
    model_name: str = ""
    kappa: float = float("inf")

    @property
    def transfer_sizes(self) -> list[float]:
        return [p.transfer_bytes for p in self.partitions]

    @property
    def classes(self) -> list[int]:
        return [p.transfer_class for p in self.partitions]

    @property
    def hop_sizes(self) -> list[float]:
        """Bytes on each pipeline hop, dispatcher hop first."""
        return self.transfer_sizes[:-1]

    @property
    def hop_classes(self) -> list[int]:
        return self.classes[:-1]

    @property
    def n_hops(self) -> int:
        return len(self.partitions) - 1

    @property
    def compute_partitions(self) -> tuple[Partition, ...]:
        return self.partitions[1:]

    def reclassify(self, n_classes: int) -> "PartitionScheme":
        clf = fit_classifier(self.candidate_transfer_bytes, n_classes)
        parts = tuple(replace(p, transfer_class=clf.classify(p.transfer_bytes)) for p in self.partitions)
        return replace(self, partitions=parts, classifier=clf)

    def to_dict(self) -> dict:
        return {
            "format": PARTS_FORMAT,
            "model": self.model_name,
            "capacity_bytes": None if self.kappa == float("inf") else self.kappa,
            "n_classes": self.classifier.n_classes,
            "breakpoints": list(self.classifier.breakpoints),
            "candidate_transfer_bytes": list(self.candidate_transfer_bytes),
            "total_cost_bytes": self.total_cost,
            "partitions": [
                {
                    "layer_range": [p.start, p.end],
                    "memory_bytes": p.memory_bytes,
                    "boundary_point": p.boundary_point,
                    "transfer_bytes": p.transfer_bytes,
                    "class": p.transfer_class,
                    "dispatcher": p.is_dispatcher,
                }
                for p in self.partitions
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "PartitionScheme":
        if not isinstance(data, dict) or data.get("format") != PARTS_FORMAT:
            raise ModelFormatError(f"not an {PARTS_FORMAT} report")
        try:
            clf = TransferClassifier(int(data["n_classes"]), tuple(float(b) for b in data["breakpoints"]))
            parts = tuple(
                Partition(
                    start=int(p["layer_range"][0]),
                    end=int(p["layer_range"][1]),
                    memory_bytes=int(p["memory_bytes"]),
                    boundary_point=str(p["boundary_point"]),
                    transfer_bytes=float(p["transfer_bytes"]),
                    transfer_class=None if p["class"] is None else int(p["class"]),
                    is_dispatcher=bool(p["dispatcher"]),
                )
                for p in data["partitions"]
            )
            cap = data.get("capacity_bytes")
            return cls(
                partitions=parts,
                classifier=clf,
                candidate_transfer_bytes=tuple(float(x) for x in data["candidate_transfer_bytes"]),
                total_cost=float(data["total_cost_bytes"]),
                model_name=str(data.get("model", "")),
                kappa=float("inf") if cap is None else float(cap),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ModelFormatError(f"malformed partition report: {exc!r}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "PartitionScheme":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


def default_classifier(graph: PartitionGraph, n_classes: int) -> TransferClassifier:
    return fit_classifier([graph.transfer_bytes(i) for i in range(len(graph.points))], n_classes)


def make_scheme(graph: PartitionGraph, ranges: Sequence[tuple[int, int]], classifier: TransferClassifier | None = None) -> PartitionScheme:
    """Wrap contiguous ranges covering all candidate points into a scheme with a dispatcher."""
    if classifier is None:
        classifier = graph.classifier or default_classifier(graph, 3)
    expect = 0
    for i, j in ranges:
        if i != expect or j < i:
            raise ValueError(f"ranges are not contiguous at {(i, j)}")
        expect = j + 1
    if expect != len(graph.points):
        raise ValueError("ranges do not cover every candidate point")
    points = graph.points
    d_bytes = graph.transfer_bytes(0)
    parts = [Partition(0, -1, 0, points[0], d_bytes, classifier.classify(d_bytes), True)]
    for i, j in ranges:
        t = graph.transfer_bytes(j)
        parts.append(Partition(i, j, graph.memory(i, j), points[j], t, classifier.classify(t)))
    total = sum(graph.point_elements[j] for _, j in ranges) * BYTES_PER_ELEMENT / graph.lambda_ratio
    return PartitionScheme(
        partitions=tuple(parts),
        classifier=classifier,
        candidate_transfer_bytes=tuple(graph.transfer_bytes(i) for i in range(len(points))),
        total_cost=total,
        model_name=graph.model.name,
        kappa=graph.kappa,
    )


def min_cost_ranges(graph: PartitionGraph, memoize: bool = True) -> list[tuple[int, int]]:
    """Cheapest root-to-leaf path through the partition graph.

    Every range on the path pays for the bytes leaving its last candidate.
    Costs are compared in integer output elements so equal totals tie exactly;
    ties go to fewer partitions, then the lexicographically smallest boundaries.
    The memo is keyed on the last candidate index of a range, since every range
    ending there has the same children and the same outgoing weight.
    """
    last = graph.last
    elements = graph.point_elements
    memo: dict[int, tuple] = {}
    dead = ((float("inf"), 0, ()), None)

    def min_cost_path(v):
        if v[1] == last:
            return (elements[last], 1, (last,)), [v]
        if memoize and v[1] in memo:
            tail = memo[v[1]]
        else:
            tail = dead
            for c in graph.children[v]:
                cand = min_cost_path(c)
                if cand[1] is not None and cand[0] < tail[0]:
                    tail = cand
            if memoize:
                memo[v[1]] = tail
        (cost, parts, ends), path = tail
        if path is None:
            return dead
        return (cost + elements[v[1]], parts + 1, (v[1],) + ends), [v] + path

    best = dead
    for r in graph.roots:
        cand = min_cost_path(r)
        if cand[1] is not None and cand[0] < best[0]:
            best = cand
    if best[1] is None:
        raise InfeasibleError("no root-to-leaf path in the partition graph")
    return best[1]


def optimal_partition(graph: PartitionGraph, classifier: TransferClassifier | None = None, memoize: bool = True) -> PartitionScheme:
    """Minimum total-transfer partitioning with the dispatcher partition prepended."""
    ranges = min_cost_ranges(graph, memoize=memoize)
    return make_scheme(graph, ranges, classifier)


def partition_model(
    g: ModelGraph,
    kappa: float,
    n_classes: int = 3,
    lambda_ratio: float = DEFAULT_LAMBDA,
    points: CandidatePoints | None = None,
) -> PartitionScheme:
    points = points or candidate_partition_points(g)
    graph = build_partition_graph(points, g, kappa, lambda_ratio)
    graph.classifier = default_classifier(graph, n_classes)
    return optimal_partition(graph)


def enumerate_partitionings(graph: PartitionGraph):
    """Yield every feasible covering as a list of ranges (exhaustive, small instances only)."""
    last = graph.last

    def rec(i):
        for v in graph.vertices_from(i):
            if v[1] == last:
                yield [v]
            else:
                for rest in rec(v[1] + 1):
                    yield [v] + rest

    yield from rec(0)


def ranges_cost(graph: PartitionGraph, ranges) -> float:
    return sum(graph.point_elements[j] for _, j in ranges) * BYTES_PER_ELEMENT / graph.lambda_ratio
