"""Where can a network be cut so that exactly one tensor crosses the cut?

A layer qualifies when it sits alone at its longest-path depth and every path
from the previous qualifying layer passes through it. Branchy blocks collapse
to their merge layer; a cell-based network whose cells feed several later
cells leaves only its input.
"""

from edgeslice.model_graph import candidate_partition_points, is_partitionable
from edgeslice.zoo import load_fixture

for name in ("chain", "diamond", "resnet50_like", "inception_resnet_v2_like", "nasnet_like"):
    g = load_fixture(name)
    points = candidate_partition_points(g)
    shown = ", ".join(points.points[:6]) + (" ..." if len(points) > 6 else "")
    print(f"{name:26s} {len(g.layers):4d} layers  {len(points):3d} cut points  "
          f"partitionable={is_partitionable(g, points)}  [{shown}]")
