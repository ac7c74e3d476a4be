"""A reduced parameter sweep written to CSV, the same harness the CLI drives.

Every algorithm sees the same layout for a given trial, so per-cell
ratios compare like with like. Rerunning with the same seed reproduces the
files byte for byte.
"""

import sys
import tempfile
from pathlib import Path

from edgeslice.experiment import ExperimentConfig, run_sweep

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
config = ExperimentConfig(node_counts=[10, 20, 50], class_counts=[2, 8], capacities_mb=[64, 256], trials=5)
result = run_sweep(config, out)
print(f"wrote {len(result.rows)} rows to {out}")
for n, entry in result.summary["by_node_count"].items():
    print(f"{n:>3s} nodes: random/k-path {entry['random_over_kpath']:.2f}, joint/k-path {entry['joint_over_kpath']:.2f}")
print("status counts:", result.summary["status_counts"])
