"""A wireless edge cluster as a complete graph with distance-dependent bandwidth.

Nodes are scattered uniformly in a disc; the link rate falls off with the
squared distance. Analytic moments of that rate, checked by Monte Carlo,
tell us how strongly the layout matters.
"""

import numpy as np

from edgeslice.comm_graph import bandwidth_moments_monte_carlo, generate_rgg, generate_shape
from edgeslice.experiment import format_statistics, statistics_report

print(format_statistics(statistics_report()))
mu_mc, sd_mc = bandwidth_moments_monte_carlo(10**6, seed=1)
print(f"Monte Carlo check: mean {mu_mc:.4f} Mbps, std {sd_mc:.4f} Mbps\n")

g_c = generate_rgg(20, seed=7)
w = g_c.bandwidth[np.triu_indices(g_c.n, 1)]
print(f"20-node layout: links {w.min():.2f} .. {w.max():.2f} Mbps, mean {w.mean():.2f}")
for shape in ("ring", "grid", "cluster"):
    s = generate_shape(shape, 9)
    print(f"{shape:8s} best link {s.max_bandwidth:.2f} Mbps")
