"""Reference solver: enumerate every integer assignment.

Rows that mention only integer variables are checked vectorized; for models
with continuous variables, each surviving integer assignment is completed by
an LP over the continuous part.
"""

from __future__ import annotations

import math

import numpy as np

from logic2ilp.ilpcore import FEAS_TOL, Model, Solution, to_arrays
from logic2ilp.solver.simplex import solve_lp_arrays

MAX_INT_VARS = 25
CHUNK = 1 << 16


class TooLargeError(ValueError):
    pass


def _row_ok(vals: np.ndarray, senses, b: np.ndarray, tol: float) -> np.ndarray:
    ok = np.ones(vals.shape[0], dtype=bool)
    for i, s in enumerate(senses):
        if s == "<=":
            ok &= vals[:, i] <= b[i] + tol
        elif s == ">=":
            ok &= vals[:, i] >= b[i] - tol
        else:
            ok &= np.abs(vals[:, i] - b[i]) <= tol
    return ok


def solve_bruteforce(model: Model, max_int_vars: int = MAX_INT_VARS) -> Solution:
    arrays = to_arrays(model)
    A, b, c = arrays.A, arrays.b, arrays.c
    ints = np.flatnonzero(arrays.integral)
    conts = np.flatnonzero(~arrays.integral)
    if ints.size > max_int_vars:
        raise TooLargeError(f"{ints.size} integer variables exceed the cap of {max_int_vars}")
    lows = np.ceil(arrays.lower[ints] - 1e-9)
    highs = np.floor(arrays.upper[ints] + 1e-9)
    if not (np.all(np.isfinite(lows)) and np.all(np.isfinite(highs))):
        raise TooLargeError("integer variables need finite bounds for enumeration")
    radix = (highs - lows + 1).astype(np.int64)
    if np.any(radix <= 0):
        return Solution("infeasible")
    total = int(np.prod(radix, dtype=object)) if radix.size else 1
    if total > 1 << max_int_vars:
        raise TooLargeError(f"{total} integer assignments exceed the enumeration cap")

    pure = np.flatnonzero(~np.any(A[:, conts] != 0, axis=1)) if conts.size else np.arange(len(b))
    senses_pure = arrays.senses[pure]
    best_val, best_x = -math.inf, None

    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        X = np.empty((idx.size, ints.size))
        rem = idx.copy()
        for k in range(ints.size - 1, -1, -1):
            X[:, k] = lows[k] + rem % radix[k]
            rem //= radix[k]
        vals = X @ A[pure][:, ints].T
        ok = _row_ok(vals, senses_pure, b[pure], FEAS_TOL)
        if not ok.any():
            continue
        if conts.size == 0:
            obj = X[ok] @ c[ints]
            k = int(np.argmax(obj))
            if obj[k] > best_val + 1e-12:
                best_val = float(obj[k])
                best_x = np.zeros(len(c))
                best_x[ints] = X[ok][k]
            continue
        lo, hi = arrays.lower.copy(), arrays.upper.copy()
        for row in X[ok]:
            lo[ints] = row
            hi[ints] = row
            res = solve_lp_arrays(arrays, lo, hi)
            if res.status == "unbounded":
                return Solution("unbounded", objective=math.inf)
            if res.optimal and res.value > best_val + 1e-12:
                best_val, best_x = res.value, res.x

    if best_x is None:
        return Solution("infeasible")
    assignment = {mv.id: float(v) for mv, v in zip(model.vars, best_x)}
    return Solution("optimal", assignment, model.objective_value(assignment))
