"""Random instance generators shared by the test modules."""

from __future__ import annotations

import numpy as np

from logic2ilp.boolexpr import And, Count, Iff, Implies, Literal, Not, Or, VarRegistry
from logic2ilp.ilpcore import Model

OPS = ("and", "or", "not", "implies", "iff", "count")


def random_expr(rng: np.random.Generator, vars, depth: int, counts: bool = True, leaf_p: float = 0.1):
    """A random formula over ``vars`` with AST depth at most ``depth``."""
    if depth <= 1 or rng.random() < leaf_p:
        return Literal(vars[int(rng.integers(len(vars)))], bool(rng.random() < 0.5))
    ops = OPS if counts else OPS[:-1]
    op = ops[int(rng.integers(len(ops)))]
    sub = lambda: random_expr(rng, vars, depth - 1, counts, leaf_p + 0.05)  # noqa: E731
    if op == "not":
        return Not(sub())
    if op in ("and", "or"):
        args = tuple(sub() for _ in range(int(rng.integers(1, 4)) if rng.random() < 0.2 else int(rng.integers(2, 4))))
        return And(args) if op == "and" else Or(args)
    if op == "implies":
        return Implies(sub(), sub())
    if op == "iff":
        return Iff(sub(), sub())
    k = int(rng.integers(1, min(5, len(vars)) + 1))
    idx = rng.choice(len(vars), size=k, replace=False)
    lits = tuple(Literal(vars[int(i)], bool(rng.random() < 0.5)) for i in idx)
    cmp = (">=", "<=", "=")[int(rng.integers(3))]
    return Count(lits, cmp, int(rng.integers(0, k + 2)))


def expr_case(seed: int, max_vars: int = 12, max_depth: int = 6, counts: bool = True):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_vars + 1))
    model = Model()
    vars = [model.binary(f"y{i + 1}", float(np.round(rng.uniform(-1, 1), 3))) for i in range(n)]
    expr = random_expr(rng, vars, int(rng.integers(3, max_depth + 1)), counts)
    return model, vars, expr


def registry_case(seed: int, max_vars: int = 10, max_depth: int = 6):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_vars + 1))
    reg = VarRegistry()
    vars = [reg.var(f"y{i + 1}") for i in range(n)]
    return reg, vars, random_expr(rng, vars, int(rng.integers(2, max_depth + 1)), counts=False)


def random_binary_model(rng: np.random.Generator, max_vars: int = 18, max_rows: int = 30) -> Model:
    """Small 0-1 program with integer data and mixed senses."""
    m = Model()
    n = int(rng.integers(1, max_vars + 1))
    v = [m.binary(f"x{i}", float(rng.integers(-6, 7))) for i in range(n)]
    for _ in range(int(rng.integers(0, max_rows + 1))):
        size = int(rng.integers(1, min(n, 6) + 1))
        idx = rng.choice(n, size=size, replace=False)
        terms = [(int(rng.integers(-3, 4)), v[int(i)]) for i in idx]
        sense = ("<=", ">=", "=")[int(rng.choice(3, p=[0.45, 0.45, 0.1]))]
        m.add_constraint(terms, sense, int(rng.integers(-2, 4)), "random")
    return m


def random_connected_graph(rng: np.random.Generator, n: int, p: float = 0.5, integer: bool = True):
    """Random spanning tree plus extra edges, so the graph is connected."""
    from logic2ilp.graphs import LabeledGraph

    edges = {}
    order = rng.permutation(np.arange(1, n + 1))
    for k in range(1, n):
        a, b = int(order[k]), int(order[int(rng.integers(k))])
        edges[(min(a, b), max(a, b))] = None
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if rng.random() < p:
                edges[(i, j)] = None
    wt = lambda: float(rng.integers(-20, 21)) if integer else float(np.round(rng.uniform(-1, 1), 3))  # noqa: E731
    return LabeledGraph(n, tuple((i, j, wt()) for i, j in sorted(edges)))


def row_view(model, start: int = 0):
    """Rows as ``({name: coef}, sense, rhs)`` for readable assertions."""
    out = []
    for c in model.constraints[start:]:
        out.append(({v.name: coef for coef, v in c.terms}, c.sense, c.rhs))
    return out


def flow_feasibility_table(graph, root: int = 1, shortcut: bool = True):
    """For every 0-1 edge assignment: (selected edges, flow system feasible).

    With ``shortcut`` the edge-count row is evaluated directly and only
    assignments passing it go through an LP with the edge variables fixed.
    """
    import itertools

    from logic2ilp.graphs import edge_variables, spanning_tree
    from logic2ilp.ilpcore import Model, to_arrays
    from logic2ilp.solver.simplex import solve_lp_arrays

    m = Model()
    y = edge_variables(m, graph)
    spanning_tree(m, graph, y, root=root)
    arrays = to_arrays(m)
    pairs = graph.pairs()
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        chosen = [p for p, b in zip(pairs, bits) if b]
        if shortcut and graph.n > 1 and len(chosen) != graph.n - 1:
            out.append((chosen, False))
            continue
        lo, hi = arrays.lower.copy(), arrays.upper.copy()
        for p, b in zip(pairs, bits):
            lo[y[p].id] = hi[y[p].id] = b
        out.append((chosen, solve_lp_arrays(arrays, lo, hi).optimal))
    return out


def soft_case(seed: int, max_vars: int = 10, max_soft: int = 4):
    """Random model with hard and soft constraints, plus its brute-force optimum.

    Returns ``(model, vars, softs, best)`` where ``best`` is the maximum over
    all hard-feasible 0-1 assignments of score minus violated penalties
    (``-inf`` when no assignment satisfies the hard constraints).
    """
    from logic2ilp import oracles, recipes
    from logic2ilp.soft import add_soft

    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_vars + 1))
    m = Model()
    vars = [m.binary(f"y{i + 1}", float(np.round(rng.uniform(-2, 2), 3))) for i in range(n)]
    hard = [random_expr(rng, vars, int(rng.integers(1, 4))) for _ in range(int(rng.integers(0, 3)))]
    for e in hard:
        recipes.encode_expr(m, e, ("naive", "compact")[int(rng.integers(2))])
    softs = []
    for _ in range(int(rng.integers(1, max_soft + 1))):
        e = random_expr(rng, vars, int(rng.integers(1, 5)))
        softs.append(add_soft(m, e, float(np.round(rng.uniform(0, 3), 3))))
    X = oracles.assignment_matrix(n).astype(float)
    c = np.array([m.info(v).objective_coeff for v in vars])
    value = X @ c
    ok = np.ones(X.shape[0], dtype=bool)
    for e in hard:
        ok &= oracles.model_mask(e, vars)
    for s in softs:
        value -= s.penalty * ~oracles.model_mask(s.expr, vars)
    best = float(value[ok].max()) if ok.any() else -np.inf
    return m, vars, softs, best
