"""Command-line entry point.

Exit codes: 0 success, 2 usage or unreadable input, 3 invalid model,
4 infeasible or unpartitionable instance, 5 placement matching failure,
6 instance too large for the exhaustive oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiment
from .comm_graph import CommGraph, generate_rgg, generate_shape
from .errors import (
    InfeasibleError,
    InstanceTooLargeError,
    MatchingError,
    ModelFormatError,
    ModelValidationError,
    NoPathError,
    UnpartitionableError,
)
from .evaluator import brute_force_optimum, evaluate
from .model_graph import candidate_partition_points
from .partitioner import MIB, PartitionScheme, partition_model
from .placement import place_with_retry
from .zoo import resolve_model

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID_MODEL = 3
EXIT_INFEASIBLE = 4
EXIT_MATCHING = 5
EXIT_TOO_LARGE = 6


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_partition(args) -> int:
    g = resolve_model(args.model)
    points = candidate_partition_points(g)
    scheme = partition_model(g, args.capacity_mb * MIB, args.classes, points=points)
    if args.out:
        scheme.save(args.out)
    report = scheme.to_dict()
    report["candidate_points"] = list(points.points)
    if not args.out:
        _emit(report)
    return EXIT_OK


def cmd_place(args) -> int:
    scheme = PartitionScheme.load(args.scheme)
    g_c = CommGraph.load(args.comm)
    placement = place_with_retry(scheme, g_c, args.classes or scheme.classifier.n_classes, seed=args.seed)
    report = evaluate(scheme, placement, g_c)
    _emit({"placement": placement.to_dict(g_c), "latency": report.to_dict()}, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = experiment.ExperimentConfig.load(args.config) if args.config else experiment.ExperimentConfig()
    overrides = {
        "models": args.model, "node_counts": args.nodes, "class_counts": args.classes,
        "capacities_mb": args.capacity_mb, "algorithms": args.algorithms,
    }
    for key, value in overrides.items():
        if value:
            setattr(config, key, value)
    if args.trials is not None:
        config.trials = args.trials
    if args.seed is not None:
        config.seed = args.seed
    config.__post_init__()
    result = experiment.run_sweep(config, args.out, workers=args.workers)
    by_n = result.summary["by_node_count"]
    for n, entry in by_n.items():
        line = f"{n:>3} nodes: " + ", ".join(
            f"{a}={entry.get(f'mean_beta_{a}_s'):.4f}s" for a in config.algorithms
            if entry.get(f"mean_beta_{a}_s") is not None
        )
        print(line)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_shapes(args) -> int:
    shapes = [(s, n) for n in args.nodes for s in args.shape]
    rows = experiment.run_shapes(shapes, args.model, args.capacity_mb, args.classes, args.batches,
                                 args.spacing, args.seed)
    text = experiment.to_csv(rows, experiment.SHAPE_COLUMNS)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    report = experiment.statistics_report(args.method, args.resolution, args.samples, args.seed)
    if args.json:
        _emit(report)
    else:
        print(experiment.format_statistics(report))
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = resolve_model(args.model)
    g_c = CommGraph.load(args.comm)
    scheme, placement, report = brute_force_optimum(candidate_partition_points(g), g, g_c, args.capacity_mb * MIB)
    _emit({"scheme": scheme.to_dict(), "placement": placement.to_dict(g_c), "latency": report.to_dict()}, args.out)
    return EXIT_OK


def cmd_gen_comm(args) -> int:
    if args.shape == "rgg":
        g_c = generate_rgg(args.nodes, args.seed)
    else:
        g_c = generate_shape(args.shape, args.nodes, args.spacing, args.seed)
    g_c.save(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edgeslice", description="Split a layer DAG into a pipeline and place it on edge nodes.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("partition", help="model -> partition scheme")
    sp.add_argument("model", help="bundled fixture name or model JSON path")
    sp.add_argument("--capacity-mb", type=float, required=True)
    sp.add_argument("--classes", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("place", help="scheme + comm graph -> placement and latency")
    sp.add_argument("scheme")
    sp.add_argument("comm")
    sp.add_argument("--classes", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_place)

    sp = sub.add_parser("sweep", help="parameter sweep -> CSV")
    sp.add_argument("--config")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--model", nargs="+")
    sp.add_argument("--nodes", nargs="+", type=int)
    sp.add_argument("--classes", nargs="+", type=int)
    sp.add_argument("--capacity-mb", nargs="+", type=float)
    sp.add_argument("--algorithms", nargs="+", choices=experiment.ALGORITHMS)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("shapes", help="pipeline simulation on ring/grid/cluster layouts")
    sp.add_argument("--shape", nargs="+", default=["ring", "grid", "cluster"], choices=["ring", "grid", "cluster"])
    sp.add_argument("--nodes", nargs="+", type=int, default=[5, 9, 20])
    sp.add_argument("--model", default="resnet50_like")
    sp.add_argument("--capacity-mb", type=float, default=64)
    sp.add_argument("--classes", type=int, default=3)
    sp.add_argument("--batches", type=int, default=1000)
    sp.add_argument("--spacing", type=float, default=30.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_shapes)

    sp = sub.add_parser("stats", help="analytic bandwidth statistics of the random geometric graph")
    sp.add_argument("--method", choices=["quadrature", "monte_carlo"], default="quadrature")
    sp.add_argument("--resolution", type=int, default=2000)
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("oracle", help="exhaustive optimum for small instances")
    sp.add_argument("model")
    sp.add_argument("comm")
    sp.add_argument("--capacity-mb", type=float, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gen-comm", help="write a communication graph")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--shape", choices=["rgg", "ring", "grid", "cluster"], default="rgg")
    sp.add_argument("--spacing", type=float, default=30.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen_comm)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_MODEL
    except (ModelFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InfeasibleError, UnpartitionableError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MatchingError, NoPathError) as exc:
        print(f"matching failed: {exc}", file=sys.stderr)
        return EXIT_MATCHING
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE


if __name__ == "__main__":
    sys.exit(main())
