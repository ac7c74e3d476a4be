"""Split a model into memory-bounded partitions with the least transferred data.

Each partition must fit under the per-node capacity. Among all feasible
splits we keep the one whose boundary tensors add up to the fewest elements,
then bucket every transfer into a small number of size classes.
"""

from edgeslice.partitioner import MIB, partition_model
from edgeslice.zoo import load_fixture

g = load_fixture("inception_resnet_v2_like")
for cap in (64, 128, 256, 512):
    scheme = partition_model(g, cap * MIB, n_classes=3)
    hops = " ".join(f"{t / 1000:.0f}k" for t in scheme.hop_sizes)
    print(f"capacity {cap:3d} MiB: {len(scheme.compute_partitions)} partitions, "
          f"hops [{hops}] bytes, classes {scheme.hop_classes}")

scheme = partition_model(g, 64 * MIB, n_classes=3)
print(f"\n{'boundary':>16s}  layers     memory MiB   sends kB")
for p in scheme.compute_partitions:
    print(f"{p.boundary_point:>16s}  {p.start:4d}..{p.end:<4d}  {p.memory_bytes / MIB:10.1f}  "
          f"{p.transfer_bytes / 1000:9.1f}")
