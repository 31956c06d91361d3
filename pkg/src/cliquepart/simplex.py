"""Dense bounded-variable revised simplex for  max c'x, Ax >= b, lo <= x <= hi.

Row constraints are stored as ``Ax - s = b`` with surplus variables
``s >= 0``, so the variable space is [structural | one surplus per row].
A cold start puts every structural variable at its objective-preferred bound
and all surpluses in the basis; that point is always dual feasible, so the
solver never needs a phase-1: the dual simplex restores primal feasibility
(also after cuts are added or bounds are tightened on a warm basis) and the
primal simplex then finishes to optimality.

The basis inverse is maintained explicitly and refactorized periodically.
Designed for the desk-scale LPs of this package (hundreds to a few thousand
variables, cut rows in the hundreds).
"""

from __future__ import annotations

import numpy as np

from ._tolerances import FEAS_TOL, OPT_TOL

BASIC, AT_LO, AT_HI = 0, 1, 2

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"

_REFACTOR_EVERY = 150
_BLAND_AFTER = 1000  # degenerate pivots before switching to Bland's rule
_PIVOT_EPS = 1e-9
_FIXED_EPS = 1e-12


class BasisToken:
    """Opaque warm-start token: which variables/cut rows were basic."""

    def __init__(self, basic_structural, basic_cut_keys, statuses):
        self.basic_structural = basic_structural  # set of structural indices
        self.basic_cut_keys = basic_cut_keys  # set of cut keys
        self.statuses = statuses  # structural index -> AT_LO / AT_HI


class SimplexResult:
    __slots__ = ("status", "x", "reduced", "pivots", "token")

    def __init__(self, status, x, reduced, pivots, token):
        self.status = status
        self.x = x
        self.reduced = reduced
        self.pivots = pivots
        self.token = token


class BoundedSimplex:
    def __init__(self, c, lo, hi, rows, row_keys=None):
        """rows: list of (var_ids, coefs, rhs) meaning sum(coefs*x) >= rhs."""
        self.nv = len(c)
        self.m = len(rows)
        self.c = np.concatenate([np.asarray(c, dtype=float), np.zeros(self.m)])
        big = np.inf
        self.lo = np.concatenate([np.asarray(lo, dtype=float), np.zeros(self.m)])
        self.hi = np.concatenate([np.asarray(hi, dtype=float), np.full(self.m, big)])
        self.b = np.array([r[2] for r in rows], dtype=float)
        self.row_keys = row_keys if row_keys is not None else list(range(self.m))

        # sparse columns for the structural block (rows have few nonzeros)
        ncols = self.nv + self.m
        col_rows = [[] for _ in range(self.nv)]
        col_vals = [[] for _ in range(self.nv)]
        for r, (vids, coefs, _) in enumerate(rows):
            for v, a in zip(vids, coefs):
                col_rows[v].append(r)
                col_vals[v].append(a)
        self._col_rows = [np.array(cr, dtype=np.int64) for cr in col_rows]
        self._col_vals = [np.array(cv, dtype=float) for cv in col_vals]
        # flat CSC over structural columns for vectorized row products
        self._cat_rows = (
            np.concatenate(self._col_rows) if self.nv else np.empty(0, dtype=np.int64)
        )
        self._cat_vals = np.concatenate(self._col_vals) if self.nv else np.empty(0)
        self._cat_ptr = np.zeros(self.nv + 1, dtype=np.int64)
        np.cumsum([len(cr) for cr in self._col_rows], out=self._cat_ptr[1:])

        self.status_arr = np.empty(ncols, dtype=np.int8)
        self.basis = np.empty(self.m, dtype=np.int64)
        self.x = np.zeros(ncols)
        self.binv = np.eye(self.m)
        self._pivots_since_refactor = 0
        self.degenerate_pivots = 0
        self.pivots = 0

    # -- setup --------------------------------------------------------------

    def cold_start(self):
        self.status_arr[: self.nv] = np.where(self.c[: self.nv] > 0, AT_HI, AT_LO)
        fixed = self.hi[: self.nv] - self.lo[: self.nv] <= _FIXED_EPS
        self.status_arr[: self.nv][fixed] = AT_LO
        self.status_arr[self.nv :] = BASIC
        self.basis = np.arange(self.nv, self.nv + self.m, dtype=np.int64)
        self._refactor()

    def warm_start(self, token):
        basic = set()
        for v in token.basic_structural:
            if v < self.nv:
                basic.add(v)
        key_to_row = {k: r for r, k in enumerate(self.row_keys)}
        for k in token.basic_cut_keys:
            r = key_to_row.get(k)
            if r is not None:
                basic.add(self.nv + r)
        # rows whose surplus is not basic yet and were not in the old basis:
        # make the new surpluses basic so the count matches the row count
        for r in range(self.m):
            if len(basic) >= self.m:
                break
            if self.nv + r not in basic and self.row_keys[r] not in token.basic_cut_keys:
                basic.add(self.nv + r)
        if len(basic) != self.m:
            self.cold_start()
            return
        self.basis = np.array(sorted(basic), dtype=np.int64)
        self.status_arr[:] = AT_LO
        for v in range(self.nv):
            st = token.statuses.get(v)
            if st == AT_HI and np.isfinite(self.hi[v]):
                self.status_arr[v] = AT_HI
        fixed = self.hi[: self.nv] - self.lo[: self.nv] <= _FIXED_EPS
        self.status_arr[: self.nv][fixed] = AT_LO
        self.status_arr[self.basis] = BASIC
        try:
            self._refactor()
        except np.linalg.LinAlgError:
            self.cold_start()

    def _nonbasic_values(self):
        vals = np.where(self.status_arr == AT_HI, self.hi, self.lo)
        vals[self.status_arr == BASIC] = 0.0
        return vals

    def _refactor(self):
        B = np.zeros((self.m, self.m))
        for pos, var in enumerate(self.basis):
            if var < self.nv:
                B[self._col_rows[var], pos] = self._col_vals[var]
            else:
                B[var - self.nv, pos] = -1.0
        self.binv = np.linalg.inv(B)
        self._pivots_since_refactor = 0
        self._recompute_basics()

    def _recompute_basics(self):
        vals = self._nonbasic_values()
        q = self.b.copy()
        if self.m:
            nz = np.flatnonzero(vals[: self.nv])
            for v in nz:
                q[self._col_rows[v]] -= vals[v] * self._col_vals[v]
            surplus = vals[self.nv :]
            q += surplus  # surplus column is -e_r
        self.x = vals
        if self.m:
            self.x[self.basis] = self.binv @ q

    # -- pieces -------------------------------------------------------------

    def _column(self, var):
        col = np.zeros(self.m)
        if var < self.nv:
            col[self._col_rows[var]] = self._col_vals[var]
        else:
            col[var - self.nv] = -1.0
        return col

    def _reduced_costs(self):
        if self.m == 0:
            return self.c.copy()
        y = self.c[self.basis] @ self.binv
        d = self.c.copy()
        if self.nv:
            prod = self._cat_vals * y[self._cat_rows]
            d[: self.nv] -= np.add.reduceat(
                np.concatenate([prod, [0.0]]), self._cat_ptr[:-1]
            ) * (np.diff(self._cat_ptr) > 0)
        d[self.nv :] += y
        d[self.basis] = 0.0
        return d

    def _alpha_row(self, r):
        rho = self.binv[r]
        alpha = np.zeros(self.nv + self.m)
        if self.nv:
            prod = self._cat_vals * rho[self._cat_rows]
            alpha[: self.nv] = np.add.reduceat(
                np.concatenate([prod, [0.0]]), self._cat_ptr[:-1]
            ) * (np.diff(self._cat_ptr) > 0)
        alpha[self.nv :] = -rho
        return alpha

    def _pivot(self, r, entering, u):
        """Replace basis row r with `entering`; u = binv @ column(entering)."""
        leaving = self.basis[r]
        piv = u[r]
        self.binv[r] /= piv
        others = np.flatnonzero(np.abs(u) > 1e-13)
        for i in others:
            if i != r:
                self.binv[i] -= u[i] * self.binv[r]
        self.basis[r] = entering
        self.status_arr[entering] = BASIC
        self.pivots += 1
        self._pivots_since_refactor += 1
        if self._pivots_since_refactor >= _REFACTOR_EVERY:
            self._refactor()
        return leaving

    # -- dual simplex: restore primal feasibility ----------------------------

    def _dual_simplex(self, max_pivots):
        if self.m == 0:
            return OPTIMAL
        while True:
            if self.pivots >= max_pivots:
                return ITERATION_LIMIT
            xb = self.x[self.basis]
            below = self.lo[self.basis] - xb
            above = xb - self.hi[self.basis]
            worst = np.maximum(below, above)
            if worst.max() <= FEAS_TOL:
                return OPTIMAL
            if self.degenerate_pivots >= _BLAND_AFTER:
                # Bland-style: leaving row with the smallest basic var index
                rows = np.flatnonzero(worst > FEAS_TOL)
                r = int(rows[np.argmin(self.basis[rows])])
            else:
                r = int(np.argmax(worst))
            leaving_low = below[r] > above[r]

            alpha = self._alpha_row(r)
            d = self._reduced_costs()
            at_lo = self.status_arr == AT_LO
            at_hi = self.status_arr == AT_HI
            movable = self.hi - self.lo > _FIXED_EPS
            if leaving_low:
                elig = movable & ((at_lo & (alpha < -_PIVOT_EPS)) | (at_hi & (alpha > _PIVOT_EPS)))
            else:
                elig = movable & ((at_lo & (alpha > _PIVOT_EPS)) | (at_hi & (alpha < -_PIVOT_EPS)))
            cand = np.flatnonzero(elig)
            if cand.size == 0:
                return INFEASIBLE
            ratios = np.abs(d[cand]) / np.abs(alpha[cand])
            # two-pass: among near-minimal ratios take the strongest pivot
            near = ratios <= ratios.min() + 1e-9
            sub = cand[near]
            best = sub[np.lexsort((sub, -np.abs(alpha[sub])))[0]]

            beta = self.lo[self.basis[r]] if leaving_low else self.hi[self.basis[r]]
            delta_t = (self.x[self.basis[r]] - beta) / alpha[best]
            u = self.binv @ self._column(best)
            entering_val = self.x[best] + delta_t
            self.x[self.basis] -= u * delta_t
            self.x[self.basis[r]] = beta
            self.status_arr[self.basis[r]] = AT_LO if leaving_low else AT_HI
            leaving = self._pivot(r, best, u)
            self.x[best] = entering_val
            if abs(delta_t) <= _PIVOT_EPS:
                self.degenerate_pivots += 1
            if self._pivots_since_refactor == 0:
                self._recompute_basics()

    # -- primal simplex: reach optimality from a feasible basis -------------

    def _primal_simplex(self, max_pivots):
        while True:
            if self.pivots >= max_pivots:
                return ITERATION_LIMIT
            d = self._reduced_costs()
            movable = self.hi - self.lo > _FIXED_EPS
            up = (self.status_arr == AT_LO) & movable & (d > OPT_TOL)
            down = (self.status_arr == AT_HI) & movable & (d < -OPT_TOL)
            elig = np.flatnonzero(up | down)
            if elig.size == 0:
                return OPTIMAL
            if self.degenerate_pivots >= _BLAND_AFTER:
                t = int(elig[0])  # Bland: smallest eligible index
            else:
                t = int(elig[np.argmax(np.abs(d[elig]))])
            sigma = 1.0 if self.status_arr[t] == AT_LO else -1.0

            u = self.binv @ self._column(t)
            deltas = -sigma * u  # change of basic values per unit step
            limit = self.hi[t] - self.lo[t]
            r_best = -1
            xb = self.x[self.basis]
            room_all = np.full(self.m, np.inf)
            shrink = deltas < -_PIVOT_EPS
            grow = deltas > _PIVOT_EPS
            room_all[shrink] = (xb[shrink] - self.lo[self.basis[shrink]]) / -deltas[shrink]
            room_all[grow] = (self.hi[self.basis[grow]] - xb[grow]) / deltas[grow]
            if self.m and np.isfinite(room_all).any():
                rmin = room_all.min()
                if rmin < limit - 1e-15:
                    # two-pass: among near-minimal rooms take the strongest pivot
                    near = np.flatnonzero(room_all <= rmin + 1e-9)
                    r_best = int(near[np.lexsort((self.basis[near], -np.abs(u[near])))[0]])
                    limit = max(rmin, 0.0)
            if not np.isfinite(limit):
                # boxed structurals cannot produce a true ray; numerical anomaly
                return ITERATION_LIMIT
            if limit <= _PIVOT_EPS:
                self.degenerate_pivots += 1
            theta = sigma * limit
            if r_best < 0:
                # bound flip, no basis change
                self.x[t] += theta
                self.x[self.basis] += deltas * limit
                self.status_arr[t] = AT_HI if sigma > 0 else AT_LO
                self.pivots += 1
                continue
            entering_val = self.x[t] + theta
            self.x[self.basis] += deltas * limit
            leave_var = self.basis[r_best]
            hit_lo = deltas[r_best] < 0
            self.x[leave_var] = self.lo[leave_var] if hit_lo else self.hi[leave_var]
            self.status_arr[leave_var] = AT_LO if hit_lo else AT_HI
            self._pivot(r_best, t, u)
            self.x[t] = entering_val
            if self._pivots_since_refactor == 0:
                self._recompute_basics()

    # -- driver --------------------------------------------------------------

    def _optimize(self, max_pivots):
        status = self._dual_simplex(max_pivots)
        if status == OPTIMAL:
            status = self._primal_simplex(max_pivots)
            if status == OPTIMAL:
                # one repair pass in case of numerical drift
                self._refactor()
                if self._max_infeasibility() > FEAS_TOL:
                    status = self._dual_simplex(max_pivots)
                    if status == OPTIMAL:
                        status = self._primal_simplex(max_pivots)
        return status

    def solve(self, warm=None, max_pivots=1_000_000):
        if warm is not None:
            self.warm_start(warm)
        else:
            self.cold_start()
        try:
            status = self._optimize(max_pivots)
        except np.linalg.LinAlgError:
            # basis went singular (tiny pivots); restart from scratch
            self.cold_start()
            try:
                status = self._optimize(max_pivots)
            except np.linalg.LinAlgError:
                status = ITERATION_LIMIT
        if status != OPTIMAL:
            return SimplexResult(status, None, None, self.pivots, None)
        reduced = self._reduced_costs()[: self.nv]
        token = BasisToken(
            basic_structural={int(v) for v in self.basis if v < self.nv},
            basic_cut_keys={self.row_keys[v - self.nv] for v in self.basis if v >= self.nv},
            statuses={
                v: int(self.status_arr[v])
                for v in range(self.nv)
                if self.status_arr[v] != BASIC
            },
        )
        x = np.clip(self.x[: self.nv], self.lo[: self.nv], self.hi[: self.nv])
        return SimplexResult(OPTIMAL, x, reduced, self.pivots, token)

    def _max_infeasibility(self):
        xb = self.x[self.basis]
        worst = np.maximum(self.lo[self.basis] - xb, xb - self.hi[self.basis])
        return float(worst.max()) if self.m else 0.0

    def slack_values(self):
        """Row activity minus rhs at the current point (surplus values)."""
        return self.x[self.nv :].copy()
