"""How does the class-ordered placement compare with simpler strategies?

The random strategy draws a feasible split and a random node order. The
joint greedy strategy splits on the smallest reachable transfer and walks to
the nearest strongest neighbour. On small instances an exhaustive search over
every split and node order gives the true optimum.
"""

import numpy as np

from edgeslice.baselines import joint_optimization_baseline, random_baseline
from edgeslice.comm_graph import generate_rgg
from edgeslice.evaluator import brute_force_optimum, evaluate
from edgeslice.model_graph import candidate_partition_points
from edgeslice.partitioner import MIB, partition_model
from edgeslice.placement import place_with_retry
from edgeslice.synth import guarded_suite
from edgeslice.zoo import load_fixture

g = load_fixture("resnet50_like")
pts = candidate_partition_points(g)
scheme = partition_model(g, 64 * MIB, 3, points=pts)
betas = {"kpath": [], "joint": [], "random": []}
for seed in range(20):
    g_c = generate_rgg(20, seed)
    betas["kpath"].append(evaluate(scheme, place_with_retry(scheme, g_c, 3, seed=seed), g_c).bottleneck_beta)
    betas["joint"].append(evaluate(*joint_optimization_baseline(pts, g, g_c, 64 * MIB), g_c).bottleneck_beta)
    betas["random"].append(evaluate(*random_baseline(pts, g, g_c, 64 * MIB, seed=seed), g_c).bottleneck_beta)
for name, values in betas.items():
    print(f"{name:7s} mean bottleneck over 20 layouts: {np.mean(values):.4f} s")

ratios = []
for inst in guarded_suite(30, seed=5):
    s = partition_model(inst.model, inst.kappa, 3, points=inst.points)
    if len(s.partitions) > inst.g_c.n:
        continue
    beta = evaluate(s, place_with_retry(s, inst.g_c, 3, seed=inst.seed), inst.g_c).bottleneck_beta
    ratios.append(beta / brute_force_optimum(inst.points, inst.model, inst.g_c, inst.kappa)[2].bottleneck_beta)
print(f"\nsmall instances: k-path / optimum = {np.mean(ratios):.3f} on average over {len(ratios)}")
