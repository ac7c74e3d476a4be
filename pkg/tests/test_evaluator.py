import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgeslice.baselines import joint_optimization_baseline, random_baseline
from edgeslice.comm_graph import generate_rgg
from edgeslice.errors import InfeasibleError, InstanceTooLargeError, LengthMismatchError
from edgeslice.evaluator import (
    best_sequence,
    brute_force_optimum,
    evaluate,
    exhaustive_sequence_beta,
    hop_latencies,
    hop_latency,
    report_from_latencies,
    lower_bound,
)
from edgeslice.model_graph import candidate_partition_points
from edgeslice.partitioner import MIB, partition_model
from edgeslice.placement import Placement, place_with_retry
from edgeslice.synth import guarded_suite
from edgeslice.zoo import chain_model, load_fixture

from conftest import comm_from_matrix, scheme_from_hops
from oracles import permutation_beta

MBIT = 1e6 / 8  # bytes in one megabit


class TestLatency:
    def test_two_hops(self):
        gamma = hop_latencies([4 * MBIT, 2 * MBIT], [2, 4])
        r = report_from_latencies(gamma, 1.0)
        assert gamma == pytest.approx([2.0, 0.5])
        assert r.bottleneck_beta == pytest.approx(2.0)
        assert r.throughput == pytest.approx(0.5)
        assert r.bottleneck_hop == 0

    def test_single_hop(self):
        r = report_from_latencies(hop_latencies([3 * MBIT], [6]), 0.1)
        assert r.bottleneck_beta == r.per_hop_latency[0]

    def test_resnet_hop(self):
        assert hop_latency(10.2 * MBIT, 6) == pytest.approx(1.7)

    def test_bound(self):
        assert lower_bound([10 * MBIT, 5 * MBIT], [2, 1]) == pytest.approx(5.0)
        assert lower_bound([3 * MBIT], [1, 2, 3]) == pytest.approx(1.0)

    def test_bound_needs_input(self):
        with pytest.raises(ValueError):
            lower_bound([], [1])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            hop_latencies([1, 2], [1])
        with pytest.raises(LengthMismatchError):
            hop_latencies([1, 2], [1, 1], compute_times=[0])

    def test_compute_time_adds(self):
        assert hop_latencies([MBIT], [1], [0.25]) == pytest.approx([1.25])

    def test_placement_length_checked(self):
        scheme = scheme_from_hops([1, 2])
        with pytest.raises(LengthMismatchError):
            evaluate(scheme, Placement((0, 1), scheme), generate_rgg(4, 0))

    def test_repeated_node_rejected(self):
        scheme = scheme_from_hops([1, 2])
        with pytest.raises(ValueError):
            evaluate(scheme, Placement((0, 1, 0), scheme), generate_rgg(4, 0))

    def test_report_invariants(self):
        g_c = generate_rgg(10, 1)
        scheme = scheme_from_hops([2e5, 3e5, 1e5], 2)
        r = evaluate(scheme, place_with_retry(scheme, g_c, 2, seed=0), g_c)
        assert r.bottleneck_beta == max(r.per_hop_latency)
        assert r.throughput * r.bottleneck_beta == pytest.approx(1.0)
        assert r.approx_ratio >= 1.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.1, 10.0))
def test_scaling_bandwidth_scales_latency(seed, c):
    g_c = generate_rgg(8, seed)
    scheme = scheme_from_hops(np.random.default_rng(seed).uniform(1e5, 5e5, 4), 3)
    pl = place_with_retry(scheme, g_c, 3, seed=seed)
    scaled = comm_from_matrix(g_c.bandwidth * c)
    a, b = evaluate(scheme, pl, g_c), evaluate(scheme, pl, scaled)
    assert b.bottleneck_beta == pytest.approx(a.bottleneck_beta / c)
    assert b.bottleneck_hop == a.bottleneck_hop


class TestSequenceSearch:
    @pytest.mark.parametrize("seed", range(20))
    def test_branch_and_bound_matches_permutations(self, seed):
        rng = np.random.default_rng(seed)
        g_c = generate_rgg(int(rng.integers(3, 7)), seed)
        hops = list(rng.uniform(1e5, 5e5, int(rng.integers(1, g_c.n))))
        beta, seq = best_sequence(hops, g_c.bandwidth)
        assert beta == pytest.approx(exhaustive_sequence_beta(hops, g_c.bandwidth))
        assert beta == pytest.approx(permutation_beta(hops, g_c.bandwidth))
        assert len(set(seq)) == len(hops) + 1

    def test_three_nodes_forced_partitioning(self):
        g = chain_model(2)
        g_c = generate_rgg(3, 4)
        scheme, placement, report = brute_force_optimum(candidate_partition_points(g), g, g_c, 10**9)
        assert report.bottleneck_beta == pytest.approx(permutation_beta(scheme.hop_sizes, g_c.bandwidth))

    def test_guard(self):
        g = load_fixture("resnet50_like")
        with pytest.raises(InstanceTooLargeError):
            brute_force_optimum(candidate_partition_points(g), g, generate_rgg(5, 0), 64 * MIB)
        g = chain_model(4)
        with pytest.raises(InstanceTooLargeError):
            brute_force_optimum(candidate_partition_points(g), g, generate_rgg(9, 0), 10**9)


class TestOracleDominance:
    @pytest.mark.parametrize("inst", guarded_suite(50, seed=3), ids=lambda i: str(i.seed))
    def test_oracle_beats_every_algorithm(self, inst):
        try:
            _, _, best = brute_force_optimum(inst.points, inst.model, inst.g_c, inst.kappa)
        except InfeasibleError as exc:
            pytest.skip(f"instance has no feasible placement: {exc}")
        betas = []
        scheme = partition_model(inst.model, inst.kappa, 3, points=inst.points)
        if len(scheme.partitions) <= inst.g_c.n:
            betas.append(evaluate(scheme, place_with_retry(scheme, inst.g_c, 3, seed=0), inst.g_c).bottleneck_beta)
        for run in (joint_optimization_baseline, random_baseline):
            try:
                s, p = run(inst.points, inst.model, inst.g_c, inst.kappa)
            except InfeasibleError:
                continue
            betas.append(evaluate(s, p, inst.g_c).bottleneck_beta)
        assert all(best.bottleneck_beta <= b * (1 + 1e-12) for b in betas)
        assert best.bottleneck_beta >= best.lower_bound * (1 - 1e-12)

    def test_bound_attained_means_oracle_agrees(self):
        hits = 0
        for inst in guarded_suite(40, seed=11):
            scheme = partition_model(inst.model, inst.kappa, 3, points=inst.points)
            if len(scheme.partitions) > inst.g_c.n:
                continue
            r = evaluate(scheme, place_with_retry(scheme, inst.g_c, 3, seed=0), inst.g_c)
            if np.isclose(r.bottleneck_beta, r.lower_bound, rtol=1e-12):
                beta, _ = best_sequence(scheme.hop_sizes, inst.g_c.bandwidth)
                assert beta == pytest.approx(r.bottleneck_beta, rel=1e-12)
                hits += 1
        assert hits > 0
