"""Parameter sweeps, graph-shape runs and statistics reports.

Every (model, node count, capacity, trial) cell draws one communication graph
from a seed derived from the sweep seed, the node count and the trial index.
All algorithms, class counts, capacities and models of that trial therefore
see the same graph, which makes cross-algorithm ratios paired comparisons.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import joint_optimization_baseline, random_baseline
from .comm_graph import analytic_rgg_statistics, generate_rgg, generate_shape
from .errors import InfeasibleError, MatchingError, ModelFormatError, UnpartitionableError
from .evaluator import evaluate
from .model_graph import candidate_partition_points
from .partitioner import MIB, build_partition_graph, default_classifier, optimal_partition
from .pipeline_sim import simulate
from .placement import place_with_retry
from .zoo import resolve_model

CONFIG_FORMAT = "edgeslice-config/1"
SWEEP_FORMAT = "edgeslice-sweep/1"
ALGORITHMS = ("kpath", "joint", "random")

ROW_COLUMNS = ("model", "n_nodes", "n_classes", "capacity_mb", "algorithm", "trial",
               "beta_s", "bound_s", "ratio", "seed", "status", "classes_used")
CELL_COLUMNS = ("model", "n_nodes", "n_classes", "capacity_mb", "algorithm",
                "trials_ok", "mean_beta_s", "mean_bound_s", "mean_ratio")
RATIO_COLUMNS = ("model", "n_nodes", "n_classes", "capacity_mb",
                 "random_over_kpath", "joint_over_kpath")
SHAPE_COLUMNS = ("shape", "n_nodes", "throughput_hz", "e2e_latency_s")


@dataclass
class ExperimentConfig:
    models: list = field(default_factory=lambda: ["inception_resnet_v2_like", "resnet50_like"])
    node_counts: list = field(default_factory=lambda: [5, 10, 15, 20, 50])
    class_counts: list = field(default_factory=lambda: [2, 5, 8, 11, 14, 17, 20])
    capacities_mb: list = field(default_factory=lambda: [64, 128, 256, 512])
    trials: int = 50
    seed: int = 0
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))

    def __post_init__(self):
        for name in ("models", "node_counts", "class_counts", "capacities_mb", "algorithms"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if min(self.class_counts) < 2:
            raise ValueError("class counts must be at least 2")

    def to_dict(self) -> dict:
        return {"format": CONFIG_FORMAT, **asdict(self)}

    @classmethod
    def from_dict(cls, data) -> "ExperimentConfig":
        if not isinstance(data, dict) or data.get("format") != CONFIG_FORMAT:
            raise ModelFormatError(f"not an {CONFIG_FORMAT} file")
        fields = {k: v for k, v in data.items() if k != "format"}
        try:
            return cls(**fields)
        except TypeError as exc:
            raise ModelFormatError(f"bad config: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc


def graph_seed(seed: int, n_nodes: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, n_nodes, trial]).generate_state(1)[0])


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def _row(model, n, nc, cap, alg, trial, seed, report=None, status="ok", classes_used=None):
    return {
        "model": model, "n_nodes": n, "n_classes": nc, "capacity_mb": cap, "algorithm": alg,
        "trial": trial,
        "beta_s": report.bottleneck_beta if report else None,
        "bound_s": report.lower_bound if report else None,
        "ratio": report.approx_ratio if report else None,
        "seed": seed, "status": status, "classes_used": classes_used,
    }


def _run_group(args):
    """All rows of one (model, node count, capacity) group, across trials,
    class counts and algorithms."""
    model_spec, n, cap, config = args
    g = resolve_model(model_spec)
    name = g.name or str(model_spec)
    rows = []
    try:
        points = candidate_partition_points(g)
        graph = build_partition_graph(points, g, cap * MIB)
    except (InfeasibleError, UnpartitionableError):
        graph = None
    for trial in range(config.trials):
        seed = graph_seed(config.seed, n, trial)
        if graph is None:
            for nc in config.class_counts:
                for alg in config.algorithms:
                    rows.append(_row(name, n, nc, cap, alg, trial, seed, status="infeasible"))
            continue
        g_c = generate_rgg(n, seed)
        shared = {}
        for alg in ("joint", "random"):
            if alg not in config.algorithms:
                continue
            try:
                if alg == "joint":
                    scheme, placement = joint_optimization_baseline(points, g, g_c, cap * MIB)
                else:
                    scheme, placement = random_baseline(points, g, g_c, cap * MIB, seed=seed)
                shared[alg] = ("ok", evaluate(scheme, placement, g_c))
            except InfeasibleError:
                shared[alg] = ("infeasible", None)
        for nc in config.class_counts:
            for alg in config.algorithms:
                if alg != "kpath":
                    status, report = shared[alg]
                    rows.append(_row(name, n, nc, cap, alg, trial, seed, report, status))
                    continue
                graph.classifier = default_classifier(graph, nc)
                scheme = optimal_partition(graph)
                if len(scheme.partitions) > n:
                    rows.append(_row(name, n, nc, cap, alg, trial, seed, status="infeasible"))
                    continue
                try:
                    placement = place_with_retry(scheme, g_c, nc, seed=seed)
                except MatchingError:
                    rows.append(_row(name, n, nc, cap, alg, trial, seed, status="matching_failed"))
                    continue
                rows.append(_row(name, n, nc, cap, alg, trial, seed, evaluate(scheme, placement, g_c),
                                 classes_used=placement.n_classes))
    return rows


def sweep_rows(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """Every trial row of the sweep, in a fixed order independent of ``workers``."""
    groups = [(m, n, cap, config) for m in config.models for n in config.node_counts for cap in config.capacities_mb]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_group, groups))
    else:
        chunks = [_run_group(gr) for gr in groups]
    rows = [r for chunk in chunks for r in chunk]
    model_rank = {resolve_model(m).name or str(m): i for i, m in enumerate(config.models)}
    rows.sort(key=lambda r: (model_rank[r["model"]], config.node_counts.index(r["n_nodes"]),
                             config.class_counts.index(r["n_classes"]),
                             config.capacities_mb.index(r["capacity_mb"]),
                             config.algorithms.index(r["algorithm"]), r["trial"]))
    return rows


def aggregate_cells(rows: list[dict]) -> list[dict]:
    cells: dict = {}
    for r in rows:
        key = tuple(r[c] for c in CELL_COLUMNS[:5])
        cells.setdefault(key, []).append(r)
    out = []
    for key, group in cells.items():
        ok = [r for r in group if r["status"] == "ok"]
        cell = dict(zip(CELL_COLUMNS[:5], key))
        cell["trials_ok"] = len(ok)
        for col, src in (("mean_beta_s", "beta_s"), ("mean_bound_s", "bound_s"), ("mean_ratio", "ratio")):
            cell[col] = float(np.mean([r[src] for r in ok])) if ok else None
        out.append(cell)
    return out


def aggregate_ratios(cells: list[dict]) -> list[dict]:
    beta = {(c["model"], c["n_nodes"], c["n_classes"], c["capacity_mb"], c["algorithm"]): c["mean_beta_s"] for c in cells}
    out = []
    seen = set()
    for c in cells:
        key = (c["model"], c["n_nodes"], c["n_classes"], c["capacity_mb"])
        if key in seen:
            continue
        seen.add(key)
        k = beta.get(key + ("kpath",))
        row = dict(zip(RATIO_COLUMNS[:4], key))
        for alg in ("random", "joint"):
            other = beta.get(key + (alg,))
            row[f"{alg}_over_kpath"] = other / k if k and other is not None else None
        out.append(row)
    return out


def summarize(rows: list[dict], config: ExperimentConfig) -> dict:
    """Mean beta per node count and algorithm over cells where every
    algorithm succeeded, plus bound checks."""
    by_trial: dict = {}
    for r in rows:
        key = (r["model"], r["n_nodes"], r["n_classes"], r["capacity_mb"], r["trial"])
        by_trial.setdefault(key, {})[r["algorithm"]] = r
    per_nodes = {}
    for n in config.node_counts:
        betas = {a: [] for a in config.algorithms}
        for key, algs in by_trial.items():
            if key[1] != n or any(algs[a]["status"] != "ok" for a in config.algorithms):
                continue
            for a in config.algorithms:
                betas[a].append(algs[a]["beta_s"])
        entry = {"paired_trials": len(betas[config.algorithms[0]])}
        for a, vals in betas.items():
            entry[f"mean_beta_{a}_s"] = float(np.mean(vals)) if vals else None
        k = entry.get("mean_beta_kpath_s")
        for a in ("random", "joint"):
            v = entry.get(f"mean_beta_{a}_s")
            entry[f"{a}_over_kpath"] = v / k if k and v is not None else None
        per_nodes[str(n)] = entry
    ok = [r for r in rows if r["status"] == "ok"]
    return {
        "format": SWEEP_FORMAT,
        "config": config.to_dict(),
        "rows": len(rows),
        "rows_ok": len(ok),
        "status_counts": {s: sum(r["status"] == s for r in rows) for s in sorted({r["status"] for r in rows})},
        "bound_violations": int(sum(r["beta_s"] < r["bound_s"] * (1 - 1e-12) for r in ok)),
        "bound_equalities": int(sum(math.isclose(r["beta_s"], r["bound_s"], rel_tol=1e-12) for r in ok)),
        "by_node_count": per_nodes,
    }


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) if isinstance(r[c], float) or r[c] is None else r[c] for c in columns])
    return buf.getvalue()


@dataclass
class SweepResult:
    rows: list
    cells: list
    ratios: list
    summary: dict

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "rows": out / "rows.csv",
            "cells": out / "cells.csv",
            "ratios": out / "ratios.csv",
            "summary": out / "summary.json",
        }
        paths["rows"].write_text(to_csv(self.rows, ROW_COLUMNS))
        paths["cells"].write_text(to_csv(self.cells, CELL_COLUMNS))
        paths["ratios"].write_text(to_csv(self.ratios, RATIO_COLUMNS))
        paths["summary"].write_text(json.dumps(self.summary, indent=2, sort_keys=True) + "\n")
        return paths


def run_sweep(config: ExperimentConfig, out_dir=None, workers: int = 1) -> SweepResult:
    rows = sweep_rows(config, workers)
    cells = aggregate_cells(rows)
    result = SweepResult(rows, cells, aggregate_ratios(cells), summarize(rows, config))
    if out_dir is not None:
        result.write(out_dir)
    return result


def bound_equality_frequency(model="inception_resnet_v2_like", n_nodes=50, n_classes=20, capacity_mb=64,
                             trials=1000, seed=0) -> tuple[int, int, int]:
    """Run k-path placement on ``trials`` fresh graphs.

    Returns ``(equalities, violations, trials)`` against the max-size over
    max-bandwidth bound.
    """
    g = resolve_model(model)
    graph = build_partition_graph(candidate_partition_points(g), g, capacity_mb * MIB)
    graph.classifier = default_classifier(graph, n_classes)
    scheme = optimal_partition(graph)
    eq = bad = 0
    for trial in range(trials):
        s = graph_seed(seed, n_nodes, trial)
        g_c = generate_rgg(n_nodes, s)
        r = evaluate(scheme, place_with_retry(scheme, g_c, n_classes, seed=s), g_c)
        eq += math.isclose(r.bottleneck_beta, r.lower_bound, rel_tol=1e-12)
        bad += r.bottleneck_beta < r.lower_bound * (1 - 1e-12)
    return eq, bad, trials


DEFAULT_SHAPES = tuple((shape, n) for n in (5, 9, 20) for shape in ("ring", "grid", "cluster"))


def run_shapes(shapes=DEFAULT_SHAPES, model="resnet50_like", capacity_mb=64, n_classes=3,
               batches=1000, spacing=30.0, seed=0) -> list[dict]:
    """Pipeline simulation of the k-path placement on each structured layout."""
    g = resolve_model(model)
    graph = build_partition_graph(candidate_partition_points(g), g, capacity_mb * MIB)
    graph.classifier = default_classifier(graph, n_classes)
    scheme = optimal_partition(graph)
    rows = []
    for shape, n in shapes:
        g_c = generate_shape(shape, n, spacing=spacing, seed=seed)
        if len(scheme.partitions) > n:
            raise InfeasibleError(f"{len(scheme.partitions)} nodes needed, {shape} has {n}")
        placement = place_with_retry(scheme, g_c, n_classes, seed=seed)
        run = simulate(scheme, placement, g_c, batches)
        rows.append({"shape": shape, "n_nodes": n, "throughput_hz": run.measured_throughput,
                     "e2e_latency_s": run.end_to_end_latency})
    return rows


def statistics_report(method="quadrature", resolution=2000, samples=10**6, seed=0) -> dict:
    stats = analytic_rgg_statistics(resolution=resolution, method=method, samples=samples, seed=seed)
    return {
        "mean_bandwidth_mbps": stats.mean_mu,
        "stddev_bandwidth_mbps": stats.stddev_sigma,
        "cv": stats.cv,
        "cluster_coefficient": stats.cluster_coefficient,
        "threshold_distance_m": stats.threshold_distance,
        "threshold_radius": stats.threshold_radius,
        "mean_degree": {str(k): v for k, v in stats.mean_degree.items()},
        "largest_cluster_fraction": {str(k): v for k, v in stats.largest_cluster_fraction.items()},
    }


def format_statistics(report: dict) -> str:
    lines = [
        f"mean bandwidth mu      {report['mean_bandwidth_mbps']:.4f} Mbps",
        f"std deviation sigma    {report['stddev_bandwidth_mbps']:.4f} Mbps",
        f"coefficient of var.    {report['cv']:.4f}",
        f"cluster coefficient C  {report['cluster_coefficient']:.4f}",
        f"threshold distance     {report['threshold_distance_m']:.3f} m",
        f"threshold radius r     {report['threshold_radius']:.5f}",
    ]
    for n, p in report["largest_cluster_fraction"].items():
        lines.append(f"P(alpha) for N={n:<3}     {p:.6f}  (mean degree {report['mean_degree'][n]:.3f})")
    return "\n".join(lines)

