"""Map the partition chain onto nodes so the slowest hop is as fast as possible.

The largest transfers are matched first: for each run of same-class hops we
look for a simple path on the strongest links that still admit one, using
randomized color-coding. The bottleneck can never beat the largest transfer
over the best link, which gives a yardstick for every placement.
"""

import numpy as np

from edgeslice.comm_graph import generate_rgg
from edgeslice.evaluator import evaluate
from edgeslice.partitioner import MIB, partition_model
from edgeslice.placement import color_coding_k_path, place_with_retry
from edgeslice.zoo import load_fixture

adj = np.zeros((6, 6), dtype=bool)
for a, b in [(0, 3), (3, 5), (5, 1), (1, 4), (2, 4)]:
    adj[a, b] = adj[b, a] = True
print("5-node path in a sparse graph:", color_coding_k_path(adj, 5, seed=0))

scheme = partition_model(load_fixture("inception_resnet_v2_like"), 64 * MIB, n_classes=5)
g_c = generate_rgg(50, seed=3)
placement = place_with_retry(scheme, g_c, n_classes=5, seed=0)
report = evaluate(scheme, placement, g_c)
print("node sequence:", placement.node_sequence)
for k, (t, bw, gamma) in enumerate(zip(scheme.hop_sizes, placement.hop_bandwidths(g_c), report.per_hop_latency)):
    print(f"hop {k}: {t / 1000:6.1f} kB over {bw:5.2f} Mbps -> {gamma * 1000:6.1f} ms")
print(f"bottleneck {report.bottleneck_beta:.4f} s, lower bound {report.lower_bound:.4f} s, "
      f"ratio {report.approx_ratio:.3f}, throughput {report.throughput:.2f}/s")
