"""Discrete-event simulation of a pipelined inference chain.

Every hop is a server that transmits one batch at a time. A batch must fully
arrive at a node before that node forwards it (store-and-forward), queues are
unbounded, and the dispatcher always has another batch ready as soon as the
first hop frees up.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .comm_graph import CommGraph
from .errors import LengthMismatchError
from .evaluator import hop_latencies
from .partitioner import PartitionScheme
from .placement import Placement


@dataclass(frozen=True)
class PipelineRun:
    placement: Placement | None
    batch_count: int
    measured_throughput: float
    end_to_end_latency: float
    per_hop_busy_fraction: tuple[float, ...]
    makespan: float

    def to_dict(self) -> dict:
        return {
            "batches": self.batch_count,
            "throughput_hz": self.measured_throughput,
            "e2e_latency_s": self.end_to_end_latency,
            "busy_fraction": list(self.per_hop_busy_fraction),
            "makespan_s": self.makespan,
        }


def simulate_hops(service_times, batches: int):
    """Event loop over hops with fixed service times.

    Returns ``(finish, start, busy)``: the arrival time of each batch at the
    last node, the time each batch left the dispatcher, and busy seconds per hop.
    """
    service = [float(s) for s in service_times]
    if batches < 1:
        raise ValueError("batches must be at least 1")
    if not service:
        raise ValueError("need at least one hop")
    m = len(service)
    queues = [[] for _ in range(m)]
    idle = [True] * m
    busy = [0.0] * m
    start = [0.0] * batches
    finish = [0.0] * batches
    events = []  # (time, seq, hop, batch): hop finished sending batch
    seq = 0
    issued = 0

    def begin(hop, batch, now):
        nonlocal seq
        idle[hop] = False
        busy[hop] += service[hop]
        heapq.heappush(events, (now + service[hop], seq, hop, batch))
        seq += 1

    begin(0, 0, 0.0)
    issued = 1
    while events:
        now, _, hop, batch = heapq.heappop(events)
        idle[hop] = True
        if hop + 1 < m:
            if idle[hop + 1]:
                begin(hop + 1, batch, now)
            else:
                queues[hop + 1].append(batch)
        else:
            finish[batch] = now
        if hop == 0:
            if issued < batches:
                start[issued] = now
                begin(0, issued, now)
                issued += 1
        elif queues[hop]:
            begin(hop, queues[hop].pop(0), now)
    return finish, start, busy


def recurrence_finish_times(service_times, batches: int) -> np.ndarray:
    """Tandem-queue departure recurrence, an independent check on the event loop:
    D[i, k] = max(D[i, k-1], D[i-1, k]) + s_k."""
    s = np.asarray(service_times, dtype=float)
    d = np.zeros((batches + 1, len(s) + 1))
    for i in range(1, batches + 1):
        # batch i may leave the dispatcher once batch i-1 has cleared hop 0
        d[i, 0] = d[i - 1, 1] if i > 1 else 0.0
        for k in range(1, len(s) + 1):
            d[i, k] = max(d[i, k - 1], d[i - 1, k]) + s[k - 1]
    return d[1:, -1]


def run_from_service_times(service_times, batches: int, placement=None) -> PipelineRun:
    finish, start, busy = simulate_hops(service_times, batches)
    makespan = finish[-1]
    latency = float(np.mean(np.subtract(finish, start)))
    return PipelineRun(
        placement=placement,
        batch_count=batches,
        measured_throughput=batches / makespan,
        end_to_end_latency=latency,
        per_hop_busy_fraction=tuple(b / makespan for b in busy),
        makespan=makespan,
    )


def simulate(scheme: PartitionScheme, placement: Placement, g_c: CommGraph, batches: int = 1000,
             compute_times=None) -> PipelineRun:
    """Push ``batches`` through the placed pipeline; throughput is batches over makespan."""
    if len(placement.node_sequence) != len(scheme.partitions):
        raise LengthMismatchError(
            f"placement has {len(placement.node_sequence)} nodes for {len(scheme.partitions)} partitions"
        )
    gamma = hop_latencies(scheme.hop_sizes, placement.hop_bandwidths(g_c), compute_times)
    return run_from_service_times(gamma, batches, placement)
