"""Numerical tolerances used throughout the solver, kept in one place.

FEAS_TOL     constraint / bound feasibility for LP solutions
OPT_TOL      reduced-cost optimality threshold
INT_TOL      integrality detection on LP primal values
VIOL_TOL     cut violation threshold during separation and branching
GAP_EPS      smallest best-bound magnitude for the relative gap formula
GAP_ABS      absolute fallback criterion when the best bound is ~0 or negative
FIX_SLACK    safety slack for reduced-cost variable fixing
GAIN_TOL     minimum objective gain accepted by the local-search heuristic
"""

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
INT_TOL = 1e-6
VIOL_TOL = 1e-7
GAP_EPS = 1e-12
GAP_ABS = 1e-9
FIX_SLACK = 1e-9
GAIN_TOL = 1e-10
