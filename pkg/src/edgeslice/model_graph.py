"""Model DAG ingestion, topological depths and candidate partition points.

A model is a DAG of layers with a single input layer (the source). Layers
carry a flat output element count (batch size 1) and a declared resident
memory footprint. Candidate partition points are the layers at which the
DAG can be cut into a linear pipeline: their topological depth is shared
with no other layer and every path from the previous candidate runs
through them.

Files use the ``edgeslice-model/1`` JSON format::

    {
      "format": "edgeslice-model/1",
      "name": "resnet50_like",
      "fragment": false,
      "layers": [{"id": "input", "output_elements": 150328, "memory_bytes": 601312}, ...],
      "edges": [{"from": "input", "to": "conv1"}, ...]
    }

A ``fragment`` is a portion of a larger DAG. It may have several terminal
layers; it can be analysed for candidate points but never partitioned.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ModelFormatError, ModelValidationError

MODEL_FORMAT = "edgeslice-model/1"


@dataclass(frozen=True)
class Layer:
    id: str
    output_elements: int
    memory_bytes: int


@dataclass(frozen=True)
class ModelGraph:
    """Validated layer DAG. Build it with :meth:`from_records` or :func:`load_model_graph`."""

    layers: Mapping[str, Layer]
    edges: tuple[tuple[str, str], ...]
    source: str
    sink: str | None
    name: str = ""
    fragment: bool = False
    successors: Mapping[str, tuple[str, ...]] = field(repr=False, compare=False, default=None)
    predecessors: Mapping[str, tuple[str, ...]] = field(repr=False, compare=False, default=None)

    @classmethod
    def from_records(
        cls,
        layers: Iterable[Layer],
        edges: Iterable[tuple[str, str]],
        name: str = "",
        fragment: bool = False,
    ) -> "ModelGraph":
        table: dict[str, Layer] = {}
        for layer in layers:
            if layer.id in table:
                raise ModelValidationError("duplicate layer", layer.id)
            if layer.output_elements < 0 or layer.memory_bytes < 0:
                raise ModelValidationError("negative size", layer.id)
            table[layer.id] = layer
        if not table:
            raise ModelValidationError("empty graph", name or "<model>")

        succ: dict[str, list[str]] = {v: [] for v in table}
        pred: dict[str, list[str]] = {v: [] for v in table}
        seen = set()
        edge_list = []
        for u, v in edges:
            for end in (u, v):
                if end not in table:
                    raise ModelValidationError("unknown layer", end, f"unknown layer in edge {u}->{v}: {end}")
            if u == v:
                raise ModelValidationError("cycle", u, f"cycle: self-loop on {u}")
            if (u, v) in seen:
                raise ModelValidationError("duplicate edge", f"{u}->{v}")
            seen.add((u, v))
            edge_list.append((u, v))
            succ[u].append(v)
            pred[v].append(u)

        sources = [v for v in table if not pred[v]]
        if len(sources) != 1:
            if not sources:
                # every vertex has a predecessor, so there must be a cycle
                _raise_cycle(table, succ, pred)
            raise ModelValidationError("multiple sources", ", ".join(sources))
        source = sources[0]

        _topological_order(table, succ, pred)  # raises on cycles

        reached = _reachable(source, succ)
        for v in table:
            if v not in reached:
                raise ModelValidationError("unreachable vertex", v)

        sinks = [v for v in table if not succ[v]]
        if fragment:
            sink = sinks[0] if len(sinks) == 1 else None
        else:
            if len(sinks) != 1:
                raise ModelValidationError("multiple sinks", ", ".join(sinks))
            sink = sinks[0]
            for v, layer in table.items():
                if layer.output_elements < 1:
                    raise ModelValidationError("empty output", v)

        return cls(
            layers=table,
            edges=tuple(edge_list),
            source=source,
            sink=sink,
            name=name,
            fragment=fragment,
            successors={v: tuple(s) for v, s in succ.items()},
            predecessors={v: tuple(p) for v, p in pred.items()},
        )

    def __len__(self):
        return len(self.layers)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "name": self.name,
            "fragment": self.fragment,
            "layers": [
                {"id": l.id, "output_elements": l.output_elements, "memory_bytes": l.memory_bytes}
                for l in self.layers.values()
            ],
            "edges": [{"from": u, "to": v} for u, v in self.edges],
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")


def _reachable(start, succ) -> set:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _topological_order(table, succ, pred) -> list[str]:
    indeg = {v: len(pred[v]) for v in table}
    queue = deque(v for v in table if indeg[v] == 0)
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for w in succ[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if len(order) != len(table):
        _raise_cycle(table, succ, pred)
    return order


def _raise_cycle(table, succ, pred):
    # walk backwards along unresolved vertices until one repeats
    indeg = {v: len(pred[v]) for v in table}
    queue = deque(v for v in table if indeg[v] == 0)
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    v = next(v for v in table if indeg[v] > 0)
    path = []
    seen = {}
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(p for p in pred[v] if indeg[p] > 0)
    cycle = path[seen[v]:][::-1]
    raise ModelValidationError("cycle", v, "cycle: " + " -> ".join(cycle + [cycle[0]]))


def model_graph_from_dict(data: Mapping) -> ModelGraph:
    if not isinstance(data, Mapping):
        raise ModelFormatError("model file must contain a JSON object")
    fmt = data.get("format")
    if fmt != MODEL_FORMAT:
        raise ModelFormatError(f"unsupported model format {fmt!r}, expected {MODEL_FORMAT!r}")
    try:
        layers = [
            Layer(str(rec["id"]), _as_int(rec["output_elements"]), _as_int(rec["memory_bytes"]))
            for rec in data["layers"]
        ]
        edges = [(str(rec["from"]), str(rec["to"])) for rec in data["edges"]]
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed layer or edge record: {exc!r}") from exc
    return ModelGraph.from_records(
        layers, edges, name=str(data.get("name", "")), fragment=bool(data.get("fragment", False))
    )


def _as_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected integer, got {value!r}")
    return value


def load_model_graph(path) -> ModelGraph:
    """Parse and validate a model-DAG file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
    return model_graph_from_dict(data)


def longest_path_depths(g: ModelGraph) -> dict[str, int]:
    """Topological depth of every layer: edges on the longest source path."""
    order = _topological_order(g.layers, g.successors, g.predecessors)
    depth = {v: 0 for v in g.layers}
    for u in order:
        for w in g.successors[u]:
            if depth[u] + 1 > depth[w]:
                depth[w] = depth[u] + 1
    return depth


def all_paths_through(g: ModelGraph, depths: Mapping[str, int], v_prev: str, v: str) -> bool:
    """True iff every path leaving ``v_prev`` meets ``v`` before going deeper than ``v``.

    A path that terminates without meeting ``v`` also counts as a bypass.
    Vertices already shown to lead only to ``v`` are not expanded twice.
    """
    limit = depths[v]
    if depths[v_prev] >= limit:
        raise ValueError(f"depth({v_prev}) must be smaller than depth({v})")
    visited = {v_prev}
    stack = [v_prev]
    while stack:
        u = stack.pop()
        nxt = g.successors[u]
        if not nxt:
            return False
        for w in nxt:
            if w == v:
                continue
            if depths[w] > limit:
                return False
            if w not in visited:
                visited.add(w)
                stack.append(w)
    return True


@dataclass(frozen=True)
class CandidatePoints:
    points: tuple[str, ...]
    depths: Mapping[str, int] = field(repr=False)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, idx):
        return self.points[idx]

    def index(self, layer_id):
        return self.points.index(layer_id)


def candidate_partition_points(g: ModelGraph) -> CandidatePoints:
    depths = longest_path_depths(g)
    count: dict[int, int] = {}
    for d in depths.values():
        count[d] = count.get(d, 0) + 1
    unique = sorted((d, v) for v, d in depths.items() if count[d] == 1 and v != g.source)
    points = [g.source]
    for _, u in unique:
        if all_paths_through(g, depths, points[-1], u):
            points.append(u)
    return CandidatePoints(tuple(points), dict(depths))


def is_partitionable(g: ModelGraph, points: CandidatePoints) -> bool:
    """A model can be split only if its candidate chain ends at the unique sink."""
    return g.sink is not None and points.points[-1] == g.sink
