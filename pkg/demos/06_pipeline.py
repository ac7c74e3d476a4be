"""Stream batches through the placed pipeline and watch the bottleneck take over.

Every hop is a store-and-forward server. With enough batches the delivered
rate settles at one batch per bottleneck latency, while a single batch sees
just the sum of hop latencies.
"""

from edgeslice.comm_graph import generate_rgg
from edgeslice.evaluator import evaluate
from edgeslice.experiment import run_shapes
from edgeslice.partitioner import MIB, partition_model
from edgeslice.pipeline_sim import simulate
from edgeslice.placement import place_with_retry
from edgeslice.zoo import load_fixture

scheme = partition_model(load_fixture("inception_resnet_v2_like"), 64 * MIB, 5)
g_c = generate_rgg(20, seed=8)
placement = place_with_retry(scheme, g_c, 5, seed=0)
beta = evaluate(scheme, placement, g_c).bottleneck_beta
for batches in (1, 10, 100, 1000):
    run = simulate(scheme, placement, g_c, batches)
    print(f"{batches:5d} batches: {run.measured_throughput:6.3f}/s (limit {1 / beta:.3f}), "
          f"mean latency {run.end_to_end_latency:.3f} s")

print("\nstructured layouts, 30 m spacing:")
for row in run_shapes():
    print(f"{row['shape']:8s} {row['n_nodes']:3d} nodes  {row['throughput_hz']:6.3f}/s  "
          f"latency {row['e2e_latency_s']:.3f} s")
