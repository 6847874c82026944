"""Exact desk-scale MILP solving."""

from logic2ilp.solver.bnb import SolverConfig, solve
from logic2ilp.solver.brute import TooLargeError, solve_bruteforce
from logic2ilp.solver.simplex import LPResult, lp_solve

__all__ = ["LPResult", "SolverConfig", "TooLargeError", "lp_solve", "solve", "solve_bruteforce"]
