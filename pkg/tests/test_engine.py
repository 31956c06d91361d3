import dataclasses

import numpy as np
import pytest

from cliquepart import (
    Partition,
    SolveConfig,
    WeightedGraph,
    brute_force_optimum,
    build_model,
    compute_gap,
    heuristic_solve,
    partition_weight,
    root_bounds,
    solve,
    upper_bound_subnetwork,
)
from cliquepart.engine import (
    SearchNode,
    branch,
    fix_by_reduced_cost,
    propagate_logical,
    select_triple,
)
from cliquepart.errors import InternalInconsistencyError
from cliquepart.lp import solve_to_separation_fixpoint
from conftest import rand_signed_graph


class TestComputeGap:
    def test_formula(self):
        assert compute_gap(100.0, 95.0) == pytest.approx(0.05)

    def test_equal_bounds(self):
        assert compute_gap(42.0, 42.0) == 0.0

    def test_degenerate_zero(self):
        assert compute_gap(0.0, 0.0) == 0.0

    def test_degenerate_negative(self):
        assert compute_gap(-5.0, -5.0) == 0.0
        assert compute_gap(-1.0, -3.0) == 1.0

    def test_bound_below_incumbent_raises(self):
        with pytest.raises(InternalInconsistencyError):
            compute_gap(1.0, 2.0)


class TestSubnetworkBound:
    def test_all_positive_is_trivial_sum(self):
        G = WeightedGraph(3, [(0, 1, 2.0), (0, 2, 3.0), (1, 2, 1.0)])
        assert upper_bound_subnetwork(G) == pytest.approx(6.0)

    def test_single_mixed_triangle_exact(self, triangle_mixed):
        # the packed triangle contributes its exact 3-node optimum (1.0)
        assert upper_bound_subnetwork(triangle_mixed) == pytest.approx(1.0)

    def test_never_above_trivial(self):
        for seed in range(20):
            G = rand_signed_graph(9, seed=seed)
            assert (
                upper_bound_subnetwork(G)
                <= G.positive_sum() + G.loop_sum() + 1e-12
            )

    def test_dominates_oracle(self):
        for seed in range(20):
            G = rand_signed_graph(8, seed=700 + seed)
            opt, _ = brute_force_optimum(G)
            assert upper_bound_subnetwork(G) >= opt - 1e-9


class TestRootBounds:
    def test_all_positive_closes_at_root(self):
        G = WeightedGraph(4, [(i, j, 1.0) for i in range(4) for j in range(i + 1, 4)])
        (lower, part), upper = root_bounds(G)
        assert lower == pytest.approx(6.0)
        assert upper == pytest.approx(6.0)
        assert part.k == 1

    def test_sandwich_on_random(self):
        for seed in range(10):
            G = rand_signed_graph(8, seed=800 + seed)
            opt, _ = brute_force_optimum(G)
            (lower, _), upper = root_bounds(G)
            assert lower - 1e-9 <= opt <= upper + 1e-9


def _evaluated_root(G, incumbent_floor=-np.inf):
    """Root node with its LP solved to the separation fixpoint."""
    m = build_model(G)
    node = SearchNode(depth=0, node_id=0, parent_bound=np.inf)
    sol = solve_to_separation_fixpoint(m)
    node.lp_bound = sol.objective
    node.all_cuts = m.cuts
    return m, node, sol


class TestBranch:
    def test_children_bounds_never_exceed_parent(self):
        from cliquepart.lp import solve_lp

        for seed in (3, 5):
            G = rand_signed_graph(7, seed=900 + seed)
            m, node, sol = _evaluated_root(G)
            from cliquepart.model import violated_branch_triples

            cand = violated_branch_triples(m, sol.primal)
            if len(cand) == 0:
                continue
            triple = tuple(int(v) for v in m.tri_nodes[cand[0]])
            left, right = branch(node, triple, pair_index=m.pair_index)
            for child in (left, right):
                cm = m.child()
                cm.cuts = child.all_cuts
                for (i, j), val in child.fixed_vars.items():
                    v = cm.pair_index.get((i, j))
                    if v is not None:
                        cm.fix(v, val)
                csol = solve_lp(cm)
                if csol.optimal:
                    assert csol.objective <= node.lp_bound + 1e-7

    def test_parent_optimum_is_max_of_children(self):
        # solving the two children exactly recovers the parent optimum
        for seed in range(8):
            G = rand_signed_graph(6, seed=950 + seed)
            opt, _ = brute_force_optimum(G)
            triple = (0, 1, 2)
            best = -np.inf
            # left: all three together; right: at most one pair together
            for a in _assignments_with(6, triple, "together"):
                best = max(best, partition_weight(G, Partition(a)))
            for a in _assignments_with(6, triple, "apart"):
                best = max(best, partition_weight(G, Partition(a)))
            assert best == pytest.approx(opt)

    def test_left_child_merges_overlapping_triples(self):
        node = SearchNode(depth=1, node_id=1,
                          merged_sets=(frozenset({0, 1, 2}),),
                          fixed_vars={(0, 1): 0, (0, 2): 0, (1, 2): 0},
                          lp_bound=10.0)
        left, right = branch(node, (2, 3, 4))
        assert left.merged_sets == (frozenset({0, 1, 2, 3, 4}),)
        assert right.merged_sets == (frozenset({0, 1, 2}),)

    def test_decided_triple_rejected(self):
        from cliquepart.engine import InvalidBranchError

        node = SearchNode(depth=0, node_id=0,
                          fixed_vars={(0, 1): 0, (0, 2): 1, (1, 2): 1},
                          lp_bound=5.0)
        with pytest.raises(InvalidBranchError):
            branch(node, (0, 1, 2))


def _assignments_with(n, triple, mode):
    from conftest import all_partitions

    i, j, k = triple
    for a in all_partitions(n):
        same = a[i] == a[j] == a[k]
        pairs_together = (a[i] == a[j]) + (a[i] == a[k]) + (a[j] == a[k])
        if mode == "together" and same:
            yield a
        elif mode == "apart" and pairs_together <= 1:
            yield a


class TestPropagateLogical:
    def test_same_then_diff_implies_diff(self):
        node = SearchNode(depth=0, node_id=0, fixed_vars={(0, 1): 0, (1, 2): 1})
        propagate_logical(node)
        assert node.fixed_vars[(0, 2)] == 1

    def test_left_triple_spreads_equalities(self):
        node = SearchNode(
            depth=0, node_id=0,
            fixed_vars={(0, 1): 0, (0, 2): 0, (1, 2): 0, (0, 3): 1},
        )
        propagate_logical(node)
        assert node.fixed_vars[(1, 3)] == 1
        assert node.fixed_vars[(2, 3)] == 1

    def test_left_triple_absorbs_same(self):
        node = SearchNode(
            depth=0, node_id=0,
            fixed_vars={(0, 1): 0, (0, 2): 0, (1, 2): 0, (0, 3): 0},
        )
        propagate_logical(node)
        assert node.fixed_vars[(1, 3)] == 0
        assert node.fixed_vars[(2, 3)] == 0

    def test_conflict_marks_infeasible(self):
        node = SearchNode(depth=0, node_id=0,
                          fixed_vars={(0, 1): 0, (0, 2): 0, (1, 2): 1})
        propagate_logical(node)
        assert node.status == ("fathomed", "InfeasibleLp")

    def test_implied_right_cut_generated(self):
        G = WeightedGraph(4, [(i, j, 1.0) for i in range(4) for j in range(i + 1, 4)])
        m = build_model(G)
        node = SearchNode(
            depth=1, node_id=1,
            fixed_vars={(0, 3): 0},
            ge2_triples=((0, 1, 2),),
        )
        fixings, cuts = propagate_logical(node, pair_index=m.pair_index)
        assert cuts >= 1
        derived = {(1, 2, 3)}
        assert derived <= set(node.ge2_triples)

    def test_counts_returned(self):
        node = SearchNode(depth=0, node_id=0, fixed_vars={(0, 1): 0, (1, 2): 0})
        fixings, cuts = propagate_logical(node)
        assert fixings == 1  # (0,2) joins the group
        assert cuts == 0


class TestFixByReducedCost:
    def test_no_fixings_without_gap(self):
        G = rand_signed_graph(6, seed=42)
        m, node, sol = _evaluated_root(G)
        # incumbent far below: z + rc <= LB never holds
        added = fix_by_reduced_cost(node, sol, sol.objective - 1e9, m)
        assert added == 0

    def test_fixes_at_tight_incumbent(self):
        # with LB = z, any variable with strictly negative rc at lo is fixed
        for seed in range(10):
            G = rand_signed_graph(7, seed=1000 + seed)
            m, node, sol = _evaluated_root(G)
            added = fix_by_reduced_cost(node, sol, sol.objective, m)
            lo, hi = m.effective_bounds()
            for (i, j), val in node.fixed_vars.items():
                v = m.pair_index[(i, j)]
                rc = sol.reduced_costs[v]
                if val == 0:
                    assert sol.objective + rc <= sol.objective - 1e-9
                else:
                    assert sol.objective - rc <= sol.objective - 1e-9

    def test_soundness_fixing_keeps_optimum(self):
        for seed in range(20):
            G = rand_signed_graph(7, seed=1100 + seed)
            opt, _ = brute_force_optimum(G)
            for flag in (True, False):
                cfg = SolveConfig(gap_tolerance=1e-9, seed=seed,
                                  use_reduced_cost_fixing=flag)
                assert solve(G, cfg).incumbent == pytest.approx(opt)


class TestSelectTriple:
    def _mk(self):
        G = WeightedGraph(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
                              (0, 3, -1.0), (1, 3, 2.0), (2, 3, -3.0)])
        return G, build_model(G)

    def test_single_candidate_returned(self):
        G, m = self._mk()
        node = SearchNode(depth=0, node_id=0)
        rng = np.random.default_rng(0)
        assert select_triple(node, [(0, 1, 2)], m.triple_sets(), rng, graph=G) == (0, 1, 2)

    def test_prefers_richest_stratum(self):
        G, m = self._mk()
        ts = m.triple_sets()
        assert (0, 1, 2) in ts.t3
        node = SearchNode(depth=0, node_id=0)
        for s in range(10):
            rng = np.random.default_rng(s)
            chosen = select_triple(
                node, [(0, 1, 2), (0, 1, 3), (0, 2, 3)], ts, rng, graph=G
            )
            assert chosen == (0, 1, 2)

    def test_score_shape(self):
        # score s = 1 - exp(-f) + beta + |d|/(n-1): zero at f=beta=d=0 and
        # approaching 3 in the limit
        assert 1 - np.exp(-0) + 0 + 0 == 0
        assert 1 - np.exp(-50) + 1 + 1 == pytest.approx(3.0)

    def test_deterministic_given_rng(self):
        G, m = self._mk()
        node = SearchNode(depth=0, node_id=0, fixed_vars={(0, 3): 1})
        cands = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        pick1 = select_triple(node, cands, m.triple_sets(), np.random.default_rng(5), graph=G)
        pick2 = select_triple(node, cands, m.triple_sets(), np.random.default_rng(5), graph=G)
        assert pick1 == pick2


class TestSolve:
    def test_all_negative_loopfree_zero(self):
        G = WeightedGraph(4, [(i, j, -1.0) for i in range(4) for j in range(i + 1, 4)])
        rep = solve(G)
        assert rep.incumbent == 0.0
        assert rep.best_bound == 0.0
        assert rep.gap == 0.0
        assert rep.best_partition.k == 4

    def test_matches_oracle_small(self):
        for seed in range(40):
            n = 4 + seed % 6
            G = rand_signed_graph(n, seed=1200 + seed)
            opt, _ = brute_force_optimum(G)
            rep = solve(G, SolveConfig(gap_tolerance=1e-9, seed=seed))
            assert rep.incumbent == pytest.approx(opt)
            assert rep.incumbent == pytest.approx(partition_weight(G, rep.best_partition))

    def test_disconnected_graph(self):
        G = WeightedGraph(7, [(0, 1, 2.0), (1, 2, -1.0), (3, 4, 3.0), (5, 6, -2.0)])
        opt, _ = brute_force_optimum(G)
        rep = solve(G, SolveConfig(gap_tolerance=1e-9))
        assert rep.incumbent == pytest.approx(opt)
        assert len(rep.trace) == 3  # one trace per component

    def test_trace_sandwich_and_monotone(self):
        from cliquepart import decompose_components

        for seed in range(12):
            G = rand_signed_graph(8, seed=1300 + seed)
            rep = solve(G, SolveConfig(gap_tolerance=1e-9, seed=seed))
            comps = decompose_components(G)
            assert len(rep.trace) == len(comps)
            for (Gc, _), trace in zip(comps, rep.trace):
                opt_c, _ = brute_force_optimum(Gc)
                prev_inc, prev_bound = -np.inf, np.inf
                for depth, inc, bound in trace:
                    assert inc - 1e-9 <= opt_c <= bound + 1e-9
                    assert inc >= prev_inc - 1e-12
                    assert bound <= prev_bound + 1e-12
                    prev_inc, prev_bound = inc, bound

    def test_gap_reported_within_tolerance(self):
        for seed in range(10):
            G = rand_signed_graph(11, seed=1400 + seed)
            rep = solve(G, SolveConfig(gap_tolerance=0.05, seed=seed))
            if rep.status == "GapReached":
                assert rep.gap <= 0.05 + 1e-12

    def test_acceleration_toggles_preserve_optimum(self):
        toggles = (
            "use_pendant_reduction",
            "use_reduced_cost_fixing",
            "use_logical_propagation",
            "use_implied_cuts",
        )
        for seed in range(8):
            G = rand_signed_graph(7, seed=1500 + seed)
            opt, _ = brute_force_optimum(G)
            for name in toggles:
                cfg = SolveConfig(gap_tolerance=1e-9, seed=seed, **{name: False})
                assert solve(G, cfg).incumbent == pytest.approx(opt), name

    def test_determinism_fixed_seed(self):
        G = rand_signed_graph(9, seed=1600)
        cfg = SolveConfig(gap_tolerance=1e-9, seed=3, workers=1)
        reports = [solve(G, cfg) for _ in range(3)]
        for r in reports[1:]:
            assert r.incumbent == reports[0].incumbent
            assert r.best_bound == reports[0].best_bound
            assert r.gap == reports[0].gap
            assert r.status == reports[0].status
            assert r.best_partition == reports[0].best_partition
            assert r.trace == reports[0].trace
            s0 = dataclasses.asdict(reports[0].stats)
            s1 = dataclasses.asdict(r.stats)
            s0.pop("wall_time"), s1.pop("wall_time")
            assert s0 == s1

    def test_workers_same_objective(self):
        G = rand_signed_graph(10, seed=1700)
        opt = solve(G, SolveConfig(gap_tolerance=1e-9, seed=0, workers=1)).incumbent
        par = solve(G, SolveConfig(gap_tolerance=1e-9, seed=0, workers=4)).incumbent
        assert par == pytest.approx(opt)

    def test_time_limit_graceful(self):
        G = rand_signed_graph(12, p=0.9, seed=1800)
        rep = solve(G, SolveConfig(gap_tolerance=1e-12, time_limit=0.0, seed=0))
        assert rep.status in ("TimeLimit", "GapReached", "Exhausted")
        assert rep.incumbent == pytest.approx(partition_weight(G, rep.best_partition))
        assert rep.best_bound >= rep.incumbent - 1e-9

    def test_self_loops_are_constants(self):
        G = WeightedGraph(3, [(0, 1, 2.0), (1, 2, -1.0), (0, 0, -4.0), (2, 2, 1.0)])
        opt, _ = brute_force_optimum(G)
        rep = solve(G, SolveConfig(gap_tolerance=1e-9))
        assert rep.incumbent == pytest.approx(opt)

    def test_heuristic_solve_shape(self):
        G = rand_signed_graph(9, seed=1900)
        part, value = heuristic_solve(G)
        assert value == pytest.approx(partition_weight(G, part))
        opt, _ = brute_force_optimum(G)
        assert value <= opt + 1e-9


class TestFathomingCorrectness:
    def test_bound_dominated_subtrees_hold_nothing_better(self):
        # spot-check: solve records incumbent == optimum, so no fathomed
        # subtree can contain anything strictly better
        for seed in range(10):
            G = rand_signed_graph(8, seed=2000 + seed)
            opt, _ = brute_force_optimum(G)
            rep = solve(G, SolveConfig(gap_tolerance=1e-9, seed=seed))
            assert rep.incumbent == pytest.approx(opt)
            assert rep.best_bound <= opt + 1e-6
