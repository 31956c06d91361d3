"""Solver library for clique partitioning of real-weighted signed graphs.

Find a node partition maximizing the sum of within-cluster edge weights,
with a certified optimality gap, via triple-branching branch-and-cut over a
reduced transitivity relaxation.  Includes problem reductions (modularity
maximization, attribute agreement, screened correlation networks),
synthetic generators, a brute-force oracle, and a benchmark harness.
"""

from .bench import BenchConfig, BenchRecord, eos, run_benchmark
from .engine import (
    SolveConfig,
    SolveReport,
    compute_gap,
    heuristic_solve,
    root_bounds,
    solve,
    upper_bound_subnetwork,
)
from .graph import (
    Partition,
    WeightedGraph,
    connected_components,
    degree,
    load_graph,
    partition_weight,
    write_edge_list,
)
from .heuristic import (
    HeuristicConfig,
    heuristic_left_branch,
    heuristic_partition,
    heuristic_right_branch,
    median_delta,
)
from .instances import (
    AttributeMatrix,
    ReturnsMatrix,
    abr_to_cp,
    fisher_portfolio_graph,
    fisher_transform,
    gen_ba_weighted,
    gen_clusedit_instance,
    gen_correlation_instance,
    modularity,
    modularity_to_cp,
)
from .lp import LpSolution, ScipyBackend, SimplexBackend, lp_upper_bound, solve_lp
from .model import (
    CpModel,
    TripleSets,
    build_model,
    classic_constraint_count,
    pp_postprocess,
    separate_violations,
    violated_branch_triples,
)
from .oracle import bell_number, brute_force_optimum
from .preprocess import (
    ReductionLog,
    decompose_components,
    lift_partition,
    reduce_pendants,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
