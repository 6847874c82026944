"""Dense two-phase primal simplex with implicit variable bounds.

Every column is shifted so that its lower bound is zero; finite upper bounds
are kept on the columns (a nonbasic variable sits at either bound) instead of
becoming extra rows.  Bland's rule is the default pivot rule; the
largest-coefficient rule is available and falls back to Bland after a run of
degenerate pivots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from logic2ilp.ilpcore import Model, ModelArrays, to_arrays

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
PHASE1_TOL = 1e-7
FIXED_TOL = 1e-12
DEGENERATE_SWITCH = 50


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded" | "iteration_limit"
    x: np.ndarray | None
    value: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Unbounded(Exception):
    pass


class _IterationLimit(Exception):
    pass


class SimplexTableau:
    """``T = B^-1 A`` over shifted columns, with explicit column values.

    ``x`` holds the current value of every column (basic or not); nonbasic
    columns sit at 0 or at their upper bound ``ub`` (``at_upper``).
    """

    def __init__(self, T: np.ndarray, b: np.ndarray, ub: np.ndarray, basis: np.ndarray):
        self.T = T
        self.ub = ub
        self.basis = basis
        self.x = np.zeros(T.shape[1])
        self.x[basis] = b
        self.at_upper = np.zeros(T.shape[1], dtype=bool)
        self.is_basic = np.zeros(T.shape[1], dtype=bool)
        self.is_basic[basis] = True
        self.iterations = 0
        self.d: np.ndarray | None = None  # reduced costs, kept current by pivot()

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        nz = np.nonzero(col)[0]
        if nz.size:
            T[nz] -= np.outer(col[nz], T[r])
        if self.d is not None and self.d[j] != 0.0:
            self.d -= self.d[j] * T[r]
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.at_upper[j] = False
        self.basis[r] = j

    def run(self, cost: np.ndarray, rule: str, max_iter: int) -> None:
        T, x, ub = self.T, self.x, self.ub
        degenerate = 0
        use_bland = rule == "bland"
        self.d = None
        fresh = False
        while True:
            if self.iterations >= max_iter:
                raise _IterationLimit
            if self.d is None:
                self.d = cost - cost[self.basis] @ T
                fresh = True
            d = self.d
            d[self.is_basic] = 0.0
            up = (~self.at_upper) & (d > COST_TOL) & (ub > 0)
            down = self.at_upper & (d < -COST_TOL)
            cand = np.flatnonzero((up | down) & ~self.is_basic)
            if cand.size == 0:
                if fresh:
                    self.d = None
                    return
                self.d = None  # confirm optimality on exact reduced costs
                continue
            fresh = False
            if use_bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            delta = -1.0 if self.at_upper[j] else 1.0
            col = T[:, j] * delta
            xb = x[self.basis]
            ubb = ub[self.basis]
            ratios = np.full(col.shape, math.inf)
            dec = col > PIVOT_TOL
            inc = col < -PIVOT_TOL
            ratios[dec] = np.maximum(xb[dec], 0.0) / col[dec]
            fin = inc & np.isfinite(ubb)
            ratios[fin] = np.maximum(ubb[fin] - xb[fin], 0.0) / -col[fin]
            t_row = ratios.min() if ratios.size else math.inf
            t_flip = ub[j]
            if t_flip <= t_row:
                if math.isinf(t_flip):
                    raise _Unbounded
                t = t_flip
                r = -1
            else:
                t = t_row
                ties = np.flatnonzero(ratios <= t_row + 1e-12)
                # Bland: leave with the lowest column index among tied rows
                r = int(ties[np.argmin(self.basis[ties])])
            x[self.basis] = xb - t * col
            x[j] += delta * t
            if r < 0:
                self.at_upper[j] = not self.at_upper[j]
                x[j] = ub[j] if self.at_upper[j] else 0.0
            else:
                leaving = self.basis[r]
                goes_up = col[r] < 0
                self.pivot(r, j)
                self.at_upper[leaving] = goes_up
                x[leaving] = ub[leaving] if goes_up else 0.0
            np.maximum(x, 0.0, out=x)
            self.iterations += 1
            if t <= PIVOT_TOL:
                degenerate += 1
                if degenerate >= DEGENERATE_SWITCH:
                    use_bland = True
            else:
                degenerate = 0


def _column_map(lower: np.ndarray, upper: np.ndarray):
    """Per original var: (column, sign) pairs and an offset; plus column upper bounds."""
    cols, ub, offset = [], [], np.zeros(len(lower))
    for j, (lo, hi) in enumerate(zip(lower, upper)):
        if hi - lo <= FIXED_TOL:
            offset[j] = lo
            cols.append(())
        elif math.isfinite(lo):
            offset[j] = lo
            cols.append(((len(ub), 1.0),))
            ub.append(hi - lo)
        elif math.isfinite(hi):
            offset[j] = hi
            cols.append(((len(ub), -1.0),))
            ub.append(math.inf)
        else:
            cols.append(((len(ub), 1.0), (len(ub) + 1, -1.0)))
            ub += [math.inf, math.inf]
    return cols, np.array(ub, dtype=float), offset


def solve_lp_arrays(
    arrays: ModelArrays,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
    pivot_rule: str = "bland",
    max_iter: int = 100_000,
) -> LPResult:
    """Maximize ``c x`` s.t. rows and ``lower <= x <= upper`` (integrality ignored)."""
    if pivot_rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    lower = arrays.lower if lower is None else lower
    upper = arrays.upper if upper is None else upper
    if np.any(lower > upper + FIXED_TOL):
        return LPResult("infeasible", None, math.nan)
    A, b0, c = arrays.A, arrays.b, arrays.c
    m = A.shape[0]
    cols, ub_s, offset = _column_map(lower, upper)
    ns = len(ub_s)

    # structural part of the shifted system
    S = np.zeros((m, ns))
    cost_s = np.zeros(ns)
    for j, entries in enumerate(cols):
        for k, sign in entries:
            S[:, k] = A[:, j] * sign
            cost_s[k] = c[j] * sign
    b = b0 - A @ offset

    senses = arrays.senses
    slack_sign = np.array([1.0 if s == "<=" else -1.0 if s == ">=" else 0.0 for s in senses])
    ineq = np.flatnonzero(slack_sign != 0)
    # make b >= 0; a >= row with b == 0 is flipped too so its slack can start basic
    flip = (b < 0) | ((b == 0) & (slack_sign < 0))
    sign_row = np.where(flip, -1.0, 1.0)
    S = S * sign_row[:, None]
    b = b * sign_row
    slack_coef = slack_sign * sign_row

    n_slack = ineq.size
    needs_art = np.array([not (slack_coef[i] > 0) for i in range(m)], dtype=bool)
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    ncol = ns + n_slack + n_art
    T = np.zeros((m, ncol))
    T[:, :ns] = S
    basis = np.empty(m, dtype=np.int64)
    for k, i in enumerate(ineq):
        T[i, ns + k] = slack_coef[i]
        if slack_coef[i] > 0:
            basis[i] = ns + k
    for k, i in enumerate(art_rows):
        T[i, ns + n_slack + k] = 1.0
        basis[i] = ns + n_slack + k
    ub = np.concatenate([ub_s, np.full(n_slack + n_art, math.inf)])
    A_full = T.copy()
    b_full = b.copy()

    tab = SimplexTableau(T, b, ub, basis)
    try:
        if n_art:
            cost1 = np.zeros(ncol)
            cost1[ns + n_slack :] = -1.0
            tab.run(cost1, pivot_rule, max_iter)
            infeas = tab.x[ns + n_slack :].sum()
            if infeas > PHASE1_TOL * max(1.0, np.abs(b).max(initial=0.0)):
                return LPResult("infeasible", None, math.nan, tab.iterations)
            keep_rows = _drive_out_artificials(tab, ns + n_slack)
            tab.T = tab.T[keep_rows][:, : ns + n_slack]
            tab.basis = tab.basis[keep_rows]
            tab.x = tab.x[: ns + n_slack]
            tab.ub = tab.ub[: ns + n_slack]
            tab.at_upper = tab.at_upper[: ns + n_slack]
            tab.is_basic = tab.is_basic[: ns + n_slack]
            A_full = A_full[keep_rows][:, : ns + n_slack]
            b_full = b_full[keep_rows]
        cost2 = np.zeros(tab.T.shape[1])
        cost2[:ns] = cost_s
        tab.run(cost2, pivot_rule, max_iter)
    except _Unbounded:
        return LPResult("unbounded", None, math.inf, tab.iterations)
    except _IterationLimit:
        return LPResult("iteration_limit", None, math.nan, tab.iterations)

    _refine(tab, A_full, b_full)
    xs = tab.x[:ns]
    x = offset.copy()
    for j, entries in enumerate(cols):
        for k, sign in entries:
            x[j] += sign * xs[k]
    return LPResult("optimal", x, float(c @ x), tab.iterations)


def _drive_out_artificials(tab: SimplexTableau, first_art: int) -> np.ndarray:
    keep = np.ones(tab.T.shape[0], dtype=bool)
    for r in range(tab.T.shape[0]):
        if tab.basis[r] < first_art:
            continue
        row = tab.T[r, :first_art]
        cand = np.flatnonzero((np.abs(row) > PIVOT_TOL) & ~tab.is_basic[:first_art])
        if cand.size:
            j = int(cand[0])
            value = tab.x[j]
            tab.pivot(r, j)
            tab.x[j] = value
        else:
            keep[r] = False  # redundant row
    return np.flatnonzero(keep)


def _refine(tab: SimplexTableau, A: np.ndarray, b: np.ndarray) -> None:
    """Recompute basic values from the original columns to shed pivot drift."""
    if tab.T.shape[0] == 0:
        return
    nonbasic = ~tab.is_basic
    rhs = b - A[:, nonbasic] @ tab.x[nonbasic]
    try:
        xb = np.linalg.solve(A[:, tab.basis], rhs)
    except np.linalg.LinAlgError:
        return
    if np.all(np.isfinite(xb)) and np.allclose(xb, tab.x[tab.basis], atol=1e-6):
        tab.x[tab.basis] = np.maximum(xb, 0.0)


def lp_solve(
    model: Model,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
    pivot_rule: str = "bland",
) -> LPResult:
    """LP relaxation of ``model``; optional bound overrides indexed by var id."""
    return solve_lp_arrays(to_arrays(model), lower, upper, pivot_rule)
