import numpy as np
import pytest

from cliquepart import (
    HeuristicConfig,
    Partition,
    WeightedGraph,
    brute_force_optimum,
    heuristic_left_branch,
    heuristic_partition,
    heuristic_right_branch,
    median_delta,
    partition_weight,
)
from cliquepart.errors import InputError
from conftest import rand_signed_graph


class TestHeuristicPartition:
    def test_all_positive_reaches_single_cluster(self):
        G = WeightedGraph(5, [(i, j, 1.0 + i + j) for i in range(5) for j in range(i + 1, 5)])
        P = heuristic_partition(G)
        assert P.k == 1
        assert partition_weight(G, P) == pytest.approx(G.positive_sum())

    def test_all_negative_reaches_singletons(self):
        G = WeightedGraph(4, [(i, j, -1.0) for i in range(4) for j in range(i + 1, 4)])
        P = heuristic_partition(G)
        assert P.k == 4
        assert partition_weight(G, P) == 0.0

    def test_never_below_baselines(self):
        for seed in range(25):
            G = rand_signed_graph(8, seed=seed)
            value = partition_weight(G, heuristic_partition(G, HeuristicConfig(seed=seed)))
            floor = max(
                partition_weight(G, Partition.singletons(8)),
                partition_weight(G, Partition.together(8)),
            )
            assert value >= floor - 1e-12

    def test_lower_bound_contract(self):
        for seed in range(25):
            G = rand_signed_graph(7, seed=100 + seed)
            opt, _ = brute_force_optimum(G)
            value = partition_weight(G, heuristic_partition(G))
            assert value <= opt + 1e-9

    def test_determinism(self):
        G = rand_signed_graph(9, seed=50)
        cfg = HeuristicConfig(seed=7)
        assert heuristic_partition(G, cfg) == heuristic_partition(G, cfg)

    def test_seed_quality_smoke(self):
        # best-of-50-seeds hits the exact optimum on at least 90% of instances
        hits = 0
        total = 40
        for inst in range(total):
            n = 5 + inst % 5
            G = rand_signed_graph(n, seed=300 + inst)
            opt, _ = brute_force_optimum(G)
            best = max(
                partition_weight(G, heuristic_partition(G, HeuristicConfig(seed=s)))
                for s in range(50)
            )
            hits += abs(best - opt) < 1e-9
        assert hits >= 0.9 * total

    def test_together_start_mode(self):
        G = rand_signed_graph(8, seed=4)
        P = heuristic_partition(G, HeuristicConfig(start_mode="together"))
        assert partition_weight(G, P) >= partition_weight(G, Partition.together(8)) - 1e-12

    def test_trace_segments_monotone(self):
        G = rand_signed_graph(9, seed=13)
        trace = []
        heuristic_partition(G, HeuristicConfig(seed=3), trace=trace)
        assert trace  # at least one descent improved something
        for segment in trace:
            assert all(g > 0 for g in segment)  # accepted moves strictly improve


class TestMedianDelta:
    def test_odd(self):
        G = WeightedGraph(3, [(0, 1, -3.0), (0, 2, 1.0), (1, 2, 5.0)])
        assert median_delta(G) == 1.0

    def test_even_cancels(self):
        G = WeightedGraph(4, [(0, 1, -4.0), (0, 2, -2.0), (0, 3, 2.0), (1, 2, 4.0)])
        assert median_delta(G) == 0.0

    def test_all_negative(self):
        G = WeightedGraph(3, [(0, 1, -5.0), (0, 2, -3.0), (1, 2, -1.0)])
        assert median_delta(G) == 3.0

    def test_edgeless(self):
        assert median_delta(WeightedGraph(2, [(0, 0, 1.0)])) == 0.0


class TestRightBranch:
    def test_delta_zero_is_identity(self):
        G = rand_signed_graph(8, seed=21)
        cfg = HeuristicConfig(seed=2)
        assert heuristic_right_branch(G, (0, 1, 2), 0.0, cfg) == heuristic_partition(G, cfg)

    def test_large_delta_separates_triple(self):
        G = WeightedGraph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
        P = heuristic_right_branch(G, (0, 1, 2), 10.0, HeuristicConfig())
        assert P.k == 3  # perturbed weights -9 each force singletons

    def test_negative_delta_rejected(self):
        G = rand_signed_graph(5, seed=1)
        with pytest.raises(InputError):
            heuristic_right_branch(G, (0, 1, 2), -1.0)

    def test_value_bounded_by_optimum(self):
        for seed in range(10):
            G = rand_signed_graph(7, seed=400 + seed)
            opt, _ = brute_force_optimum(G)
            P = heuristic_right_branch(G, (0, 1, 2), median_delta(G))
            assert partition_weight(G, P) <= opt + 1e-9


class TestLeftBranch:
    def test_triple_contraction_groups_members(self):
        G = WeightedGraph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
        P = heuristic_left_branch(G, [frozenset({0, 1, 2})])
        assert P.k == 1

    def test_empty_sets_is_plain_heuristic(self):
        G = rand_signed_graph(7, seed=9)
        cfg = HeuristicConfig(seed=5)
        assert heuristic_left_branch(G, [], cfg) == heuristic_partition(G, cfg)

    def test_merged_sets_stay_together(self):
        for seed in range(10):
            G = rand_signed_graph(9, seed=500 + seed)
            P = heuristic_left_branch(G, [frozenset({0, 1, 2}), frozenset({4, 5})])
            a = P.assignment
            assert a[0] == a[1] == a[2]
            assert a[4] == a[5]

    def test_overlapping_sets_rejected(self):
        G = rand_signed_graph(5, seed=2)
        with pytest.raises(InputError):
            heuristic_left_branch(G, [frozenset({0, 1}), frozenset({1, 2})])

    def test_contraction_preserves_objective(self):
        # evaluate an arbitrary partition on both the contracted graph and
        # its expansion; bookkeeping (parallel edges, loops) must be exact
        from cliquepart.heuristic import heuristic_left_branch as _  # noqa: F401

        rng = np.random.default_rng(8)
        for seed in range(10):
            G = rand_signed_graph(8, seed=600 + seed)
            sets = [frozenset({0, 1}), frozenset({2, 3, 4})]
            rep = {0: 0, 1: 0, 2: 1, 3: 1, 4: 1, 5: 2, 6: 3, 7: 4}
            agg = {}
            loops = np.zeros(5)
            for i, j, w in G.edges():
                a, b = rep[i], rep[j]
                if a == b:
                    loops[a] += w
                else:
                    key = (min(a, b), max(a, b))
                    agg[key] = agg.get(key, 0.0) + w
            edges = [(i, j, w) for (i, j), w in agg.items() if w != 0]
            edges += [(v, v, loops[v]) for v in range(5) if loops[v] != 0]
            C = WeightedGraph(5, edges)
            for _trial in range(10):
                inner = Partition(rng.integers(0, 3, size=5))
                expanded = Partition([inner.assignment[rep[v]] for v in range(8)])
                assert partition_weight(C, inner) == pytest.approx(
                    partition_weight(G, expanded)
                )
