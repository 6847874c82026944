"""Reference implementations used to check encodings and solver output.

Nothing here touches the encoders or the simplex code: model enumeration
evaluates formulas directly, :func:`rows_projection` reasons about linear
rows over 0-1 variables by bound propagation and case splitting, and the
Viterbi and Kruskal routines solve their problems combinatorially.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from logic2ilp.boolexpr import BoolExpr, VarId, evaluate_many, variables
from logic2ilp.ilpcore import LinearConstraint

MAX_ENUM_VARS = 20
TOL = 1e-9


def assignment_matrix(k: int) -> np.ndarray:
    """All ``2**k`` 0-1 rows in lexicographic order (first column most significant)."""
    idx = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def model_mask(expr: BoolExpr, vars: Sequence[VarId] | None = None) -> np.ndarray:
    """Truth value of ``expr`` for every row of ``assignment_matrix(len(vars))``."""
    vars = list(variables(expr) if vars is None else vars)
    if len(vars) > MAX_ENUM_VARS:
        raise ValueError(f"{len(vars)} variables exceed the enumeration cap of {MAX_ENUM_VARS}")
    X = assignment_matrix(len(vars))
    cols = {v: X[:, k] for k, v in enumerate(vars)}
    out = evaluate_many(expr, cols)
    return np.broadcast_to(out, (X.shape[0],)).copy()


def enumerate_models(expr: BoolExpr, vars: Sequence[VarId] | None = None) -> list[dict[VarId, int]]:
    vars = list(variables(expr) if vars is None else vars)
    mask = model_mask(expr, vars)
    X = assignment_matrix(len(vars))[mask]
    return [dict(zip(vars, map(int, row))) for row in X]


# -- 0-1 feasibility of linear rows -------------------------------------------


def _propagate(A, lo_sense, hi_sense, b, V):
    """Fix forced 0-1 values in V (nan = unknown); returns (V, conflict mask)."""
    conflict = np.zeros(V.shape[0], dtype=bool)
    supports = [np.flatnonzero(A[r]) for r in range(A.shape[0])]
    changed = True
    while changed and not conflict.all():
        changed = False
        for r, nz in enumerate(supports):
            a = A[r, nz]
            sub = V[:, nz]
            U = np.isnan(sub)
            known = np.where(U, 0.0, sub) @ a
            checks = []
            if lo_sense[r]:  # lhs >= b
                hi = known + U @ np.maximum(a, 0.0)
                conflict |= hi < b[r] - TOL
                checks.append((U & (hi[:, None] - np.abs(a) < b[r] - TOL), (a > 0)))
            if hi_sense[r]:  # lhs <= b
                lo = known + U @ np.minimum(a, 0.0)
                conflict |= lo > b[r] + TOL
                checks.append((U & (lo[:, None] + np.abs(a) > b[r] + TOL), (a < 0)))
            for force, value in checks:
                if force.any():
                    sub = np.where(force, value.astype(float), sub)
                    changed = True
            if checks and changed:
                V[:, nz] = sub
    return V, conflict


def _search(A, lo_sense, hi_sense, b, V) -> np.ndarray:
    V, conflict = _propagate(A, lo_sense, hi_sense, b, V)
    result = np.zeros(V.shape[0], dtype=bool)
    unknown = np.isnan(V)
    done = ~conflict & ~unknown.any(axis=1)
    if done.any():
        lhs = V[done] @ A.T
        ok = np.all(~lo_sense | (lhs >= b - TOL), axis=1) & np.all(~hi_sense | (lhs <= b + TOL), axis=1)
        result[done] = ok
    pending = np.flatnonzero(~conflict & unknown.any(axis=1))
    if pending.size:
        sub = V[pending]
        col = np.argmax(np.isnan(sub), axis=1)
        rows = np.arange(pending.size)
        zero, one = sub.copy(), sub.copy()
        zero[rows, col] = 0.0
        one[rows, col] = 1.0
        r0 = _search(A, lo_sense, hi_sense, b, zero)
        r1 = np.ones_like(r0)
        todo = ~r0
        if todo.any():
            r1 = np.zeros_like(r0)
            r1[todo] = _search(A, lo_sense, hi_sense, b, one[todo])
        result[pending] = r0 | r1
    return result


def rows_projection(
    constraints: Sequence[LinearConstraint], original: Sequence[VarId]
) -> np.ndarray:
    """Which 0-1 assignments of ``original`` extend to a 0-1 solution of the rows.

    Every variable mentioned by ``constraints`` that is not in ``original`` is
    treated as an existentially quantified 0-1 variable.  The result is a mask
    over ``assignment_matrix(len(original))``.
    """
    original = list(original)
    if len(original) > MAX_ENUM_VARS:
        raise ValueError(f"{len(original)} variables exceed the enumeration cap of {MAX_ENUM_VARS}")
    extra = sorted({v for c in constraints for _, v in c.terms} - set(original))
    cols = {v: k for k, v in enumerate(original + extra)}
    A = np.zeros((len(constraints), len(cols)))
    b = np.zeros(len(constraints))
    for r, c in enumerate(constraints):
        for coef, v in c.terms:
            A[r, cols[v]] += coef
        b[r] = c.rhs
    senses = [c.sense for c in constraints]
    lo_sense = np.array([s in (">=", "=") for s in senses], dtype=bool)
    hi_sense = np.array([s in ("<=", "=") for s in senses], dtype=bool)
    X = assignment_matrix(len(original)).astype(float)
    V = np.full((X.shape[0], len(cols)), np.nan)
    V[:, : len(original)] = X
    return _search(A, lo_sense, hi_sense, b, V)


# -- sequence decoding --------------------------------------------------------


def viterbi(emission, transition) -> tuple[list[int], float]:
    """Best label sequence under emission (n x L) and transition (L x L) scores.

    Ties go to the lowest label index, both at each back-pointer and at the end.
    """
    E = np.asarray(emission, dtype=float)
    T = np.asarray(transition, dtype=float)
    n, L = E.shape
    if n < 1:
        raise ValueError("need at least one position")
    score = E[0].copy()
    back = np.zeros((n, L), dtype=np.int64)
    for i in range(1, n):
        cand = score[:, None] + T  # cand[prev, cur]
        back[i] = np.argmax(cand, axis=0)
        score = cand[back[i], np.arange(L)] + E[i]
    last = int(np.argmax(score))
    best = float(score[last])
    seq = [last]
    for i in range(n - 1, 0, -1):
        seq.append(int(back[i, seq[-1]]))
    return seq[::-1], best


# -- spanning trees -----------------------------------------------------------


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n + 1))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def kruskal_max(graph) -> tuple[list[tuple[int, int]], float]:
    """Maximum-weight spanning tree; ties prefer the lexicographically smaller edge."""
    if graph.directed:
        raise ValueError("kruskal_max needs an undirected graph")
    dsu = _DSU(graph.n)
    chosen, total = [], 0.0
    for i, j, w in sorted(graph.edges, key=lambda e: (-e[2], e[0], e[1])):
        if dsu.union(i, j):
            chosen.append((i, j))
            total += w
    if len(chosen) != graph.n - 1:
        raise ValueError("graph is disconnected")
    return sorted(chosen), total


def is_connected(n: int, edges) -> bool:
    """Whether the undirected support of ``edges`` connects vertices ``1..n``."""
    dsu = _DSU(n)
    parts = n
    for e in edges:
        if dsu.union(e[0], e[1]):
            parts -= 1
    return parts <= 1


def is_spanning_tree(n: int, edges) -> bool:
    edges = [tuple(sorted(e[:2])) for e in edges]
    return len(set(edges)) == len(edges) == n - 1 and is_connected(n, edges)


def brute_force_sequence(emission, transition, required_label: int | None = None):
    """Exhaustive best sequence; returns (sequence, score, optimum_is_unique)."""
    E = np.asarray(emission, dtype=float)
    T = np.asarray(transition, dtype=float)
    n, L = E.shape
    if L**n > 2_000_000:
        raise ValueError("too many sequences to enumerate")
    idx = np.arange(L**n)
    seqs = np.stack([(idx // L ** (n - 1 - i)) % L for i in range(n)], axis=1)
    score = E[np.arange(n), seqs].sum(axis=1)
    if n > 1:
        score = score + T[seqs[:, :-1], seqs[:, 1:]].sum(axis=1)
    if required_label is not None:
        score = np.where((seqs == required_label).any(axis=1), score, -math.inf)
    k = int(np.argmax(score))
    best = score[k]
    unique = int(np.sum(score >= best - 1e-9)) == 1
    return [int(s) for s in seqs[k]], float(best), unique
