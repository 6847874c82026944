"""Depth-first branch and bound over the simplex relaxation."""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from logic2ilp.ilpcore import Model, Solution, to_arrays
from logic2ilp.solver.simplex import solve_lp_arrays

INT_TOL = 1e-6
OBJ_TOL = 1e-9
BRANCHING_RULES = ("most-fractional", "first-fractional")


class BoundMonotonicityError(AssertionError):
    pass


@dataclass
class SolverConfig:
    node_limit: int | None = None
    time_limit_s: float | None = None
    branching: str = "most-fractional"
    pivot_rule: str = "bland"
    seed: int = 0  # recorded in run reports; the default rules are deterministic

    def __post_init__(self):
        if self.branching not in BRANCHING_RULES:
            raise ValueError(f"unknown branching rule {self.branching!r}")
        if self.pivot_rule not in ("bland", "dantzig"):
            raise ValueError(f"unknown pivot rule {self.pivot_rule!r}")


@dataclass(order=True)
class BnBNode:
    key: tuple
    lower: np.ndarray = field(compare=False)
    upper: np.ndarray = field(compare=False)
    bound: float = field(compare=False)
    depth: int = field(compare=False)
    x: np.ndarray = field(compare=False)


def _pick_branch_var(x: np.ndarray, integral: np.ndarray, rule: str) -> int:
    frac = x - np.floor(x)
    dist = np.minimum(frac, 1.0 - frac)
    dist[~integral] = 0.0
    cand = np.flatnonzero(dist > INT_TOL)
    if cand.size == 0:
        return -1
    if rule == "first-fractional":
        return int(cand[0])
    # argmax returns the first maximum, i.e. the lowest id on ties
    return int(cand[np.argmax(dist[cand])])


def solve(model: Model, config: SolverConfig | None = None) -> Solution:
    """Exact maximization of ``model``.

    Status is one of ``optimal``, ``infeasible``, ``unbounded``,
    ``node_limit`` or ``time_limit``; on a limit the best incumbent (if any)
    is returned with that status.
    """
    config = config or SolverConfig()
    start = time.perf_counter()
    arrays = to_arrays(model)
    integral = arrays.integral
    lower = arrays.lower.copy()
    upper = arrays.upper.copy()
    lower[integral] = np.ceil(lower[integral] - INT_TOL)
    upper[integral] = np.floor(upper[integral] + INT_TOL)

    nodes = 0
    seq = itertools.count()

    def relax(lo, hi):
        nonlocal nodes
        nodes += 1
        return solve_lp_arrays(arrays, lo, hi, config.pivot_rule)

    def finish(status, x=None):
        sol = Solution(status=status, nodes=nodes, wall_s=time.perf_counter() - start)
        if x is not None:
            x = x.copy()
            x[integral] = np.round(x[integral])
            sol.assignment = {mv.id: float(v) for mv, v in zip(model.vars, x)}
            sol.objective = model.objective_value(sol.assignment)
        return sol

    root = relax(lower, upper)
    if root.status == "infeasible":
        return finish("infeasible")
    if root.status == "unbounded":
        return finish("unbounded")
    if not root.optimal:
        raise RuntimeError(f"LP relaxation failed: {root.status}")

    heap: list[BnBNode] = []
    # deepest first; among equals, best bound; then creation order (down before up)
    heapq.heappush(heap, BnBNode((0, -root.value, next(seq)), lower, upper, root.value, 0, root.x))
    best_x, best_val = None, -math.inf

    while heap:
        if config.time_limit_s is not None and time.perf_counter() - start > config.time_limit_s:
            return finish("time_limit", best_x)
        node = heapq.heappop(heap)
        if node.bound <= best_val + OBJ_TOL:
            continue
        j = _pick_branch_var(node.x, integral, config.branching)
        if j < 0:
            best_x, best_val = node.x, node.bound
            continue
        v = node.x[j]
        children = []
        hi = node.upper.copy()
        hi[j] = math.floor(v)
        children.append((node.lower, hi))
        lo = node.lower.copy()
        lo[j] = math.ceil(v)
        children.append((lo, node.upper))
        for clo, chi in children:
            if config.node_limit is not None and nodes >= config.node_limit:
                return finish("node_limit", best_x)
            res = relax(clo, chi)
            if res.status == "unbounded":
                return finish("unbounded")
            if not res.optimal:
                continue
            if res.value > node.bound + 1e-6 * max(1.0, abs(node.bound)):
                raise BoundMonotonicityError(
                    f"child bound {res.value} exceeds parent bound {node.bound}"
                )
            if res.value <= best_val + OBJ_TOL:
                continue
            depth = node.depth + 1
            heapq.heappush(
                heap, BnBNode((-depth, -res.value, next(seq)), clo, chi, res.value, depth, res.x)
            )

    if best_x is None:
        return finish("infeasible")
    return finish("optimal", best_x)
