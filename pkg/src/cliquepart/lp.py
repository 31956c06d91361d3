"""LP relaxation solving behind a pluggable backend interface.

The default backend is the package's own bounded-variable revised simplex;
`ScipyBackend` adapts ``scipy.optimize.linprog`` behind the same interface
and is used by the tests as an independent cross-check.  A conforming
backend returns the objective, primal values, reduced costs (sign
convention for maximization: nonpositive at the lower bound, nonnegative at
the upper bound), and an opaque warm-start token.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._tolerances import VIOL_TOL
from .model import build_model, separate_violations
from .simplex import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, BoundedSimplex

DEFAULT_MAX_PIVOTS = 1_000_000


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "iteration_limit"
    objective: float
    primal: object  # ndarray over model variables, or None
    reduced_costs: object  # ndarray, or None
    basis: object  # opaque warm-start token, or None

    @property
    def optimal(self):
        return self.status == OPTIMAL


class SimplexBackend:
    """Default self-contained LP backend; one in-flight solve at a time."""

    def solve_arrays(self, obj, lo, hi, cuts, const, warm_start=None,
                     max_pivots=DEFAULT_MAX_PIVOTS):
        rows = [(cut.vars, cut.coefs, cut.rhs) for cut in cuts]
        keys = [cut.key for cut in cuts]
        core = BoundedSimplex(obj, lo, hi, rows, row_keys=keys)
        res = core.solve(warm=warm_start, max_pivots=max_pivots)
        if res.status != OPTIMAL:
            return LpSolution(res.status, float("nan"), None, None, None)
        objective = float(obj @ res.x + const)
        return LpSolution(OPTIMAL, objective, res.x, res.reduced, res.token)

    def solve(self, model, warm_start=None, max_pivots=DEFAULT_MAX_PIVOTS):
        lo, hi = model.effective_bounds()
        return self.solve_arrays(model.obj, lo, hi, model.cuts, model.const,
                                 warm_start=warm_start, max_pivots=max_pivots)


class ScipyBackend:
    """Adapter over scipy.optimize.linprog (HiGHS); no warm starts."""

    def solve(self, model, warm_start=None, max_pivots=DEFAULT_MAX_PIVOTS):
        from scipy.optimize import linprog

        nv = model.num_vars
        lo, hi = model.effective_bounds()
        a_ub = np.zeros((len(model.cuts), nv))
        b_ub = np.zeros(len(model.cuts))
        for r, cut in enumerate(model.cuts):
            for v, c in zip(cut.vars, cut.coefs):
                a_ub[r, v] = -c  # flip >= to <=
            b_ub[r] = -cut.rhs
        res = linprog(
            -model.obj,
            A_ub=a_ub if len(model.cuts) else None,
            b_ub=b_ub if len(model.cuts) else None,
            bounds=list(zip(lo, hi)),
            method="highs",
        )
        if res.status == 2:
            return LpSolution(INFEASIBLE, float("nan"), None, None, None)
        if not res.success:
            return LpSolution(ITERATION_LIMIT, float("nan"), None, None, None)
        reduced = -(res.lower.marginals + res.upper.marginals)
        return LpSolution(OPTIMAL, float(-res.fun + model.const), res.x, reduced, None)


def solve_lp(model, warm_start=None, backend=None, max_pivots=DEFAULT_MAX_PIVOTS):
    """Solve the LP relaxation of `model` (fixings folded into bounds)."""
    backend = backend or SimplexBackend()
    return backend.solve(model, warm_start=warm_start, max_pivots=max_pivots)


def cut_slacks(cuts, x):
    """Activity minus rhs for each cut at the point x."""
    xv = np.asarray(x)
    return np.array(
        [sum(c * xv[v] for v, c in zip(cut.vars, cut.coefs)) - cut.rhs for cut in cuts]
    )


def solve_to_separation_fixpoint(model, backend=None, warm_start=None, rounds=50,
                                 cuts_per_round=500, purge=True, max_rows=5000,
                                 max_pivots=DEFAULT_MAX_PIVOTS, stats=None):
    """Iterate LP solve / cut separation until no violated transitivity cut.

    Mutates ``model.cuts``.  Separation cuts with positive slack are dropped
    between rounds (branch cuts are always kept); dropping never invalidates
    the bound because the final point satisfies the entire constraint pool.
    Returns the last LpSolution.
    """
    backend = backend or SimplexBackend()
    sol = backend.solve(model, warm_start=warm_start, max_pivots=max_pivots)
    if stats is not None:
        stats.lp_solves += 1
    for _ in range(rounds):
        if not sol.optimal:
            return sol
        if purge and model.cuts:
            slacks = cut_slacks(model.cuts, sol.primal)
            model.cuts = tuple(
                cut
                for cut, s in zip(model.cuts, slacks)
                if cut.tag != "tri" or s <= VIOL_TOL
            )
        if len(model.cuts) >= max_rows:
            return sol
        active = {cut.key for cut in model.cuts}
        new = [
            cut
            for cut in separate_violations(model, sol.primal, cuts_per_round)
            if cut.key not in active
        ]
        if not new:
            return sol
        model.cuts = model.cuts + tuple(new)
        if stats is not None:
            stats.cuts_added += len(new)
            stats.lp_solves += 1
        sol = backend.solve(model, warm_start=sol.basis, max_pivots=max_pivots)
    return sol


def lp_upper_bound(G, backend=None, rounds=50, cuts_per_round=500):
    """Upper bound from the separation-fixpoint LP relaxation."""
    model = build_model(G)
    if model.num_vars == 0:
        return G.loop_sum()
    sol = solve_to_separation_fixpoint(model, backend=backend, rounds=rounds,
                                       cuts_per_round=cuts_per_round)
    if not sol.optimal:
        # fall back to the trivial bound if the LP could not be finished
        return G.positive_sum() + G.loop_sum()
    return sol.objective
