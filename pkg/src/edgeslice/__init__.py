"""edgeslice: split a DNN layer DAG into memory-feasible pipeline stages and
place them on a wireless edge cluster so the slowest link is as fast as possible."""

__version__ = "0.1.0"
