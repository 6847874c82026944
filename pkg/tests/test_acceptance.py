"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as
they happen; the pytest terminal summary also lists all of them.
"""

import time

import numpy as np
import pytest

from helpers import expr_case, flow_feasibility_table, random_binary_model, random_connected_graph, soft_case
from logic2ilp import bench, demos, oracles, recipes
from logic2ilp.boolexpr import And, Iff, Implies, Literal, Or, evaluate
from logic2ilp.graphs import FIGURE_GRAPH, edge_variables, spanning_tree
from logic2ilp.ilpcore import Model, check_feasible
from logic2ilp.solver import solve, solve_bruteforce

RESULTS: dict[int, str] = {}


def report(num, title, ok, detail):
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[num] = line
    print(line)
    assert ok, line


def rows_of(model, start=0):
    return [
        ({model.info(v).name: k for k, v in c.terms}, c.sense, c.rhs) for c in model.constraints[start:]
    ]


def bits(mask, n):
    X = oracles.assignment_matrix(n)
    return {"".join(map(str, X[i])) for i in np.flatnonzero(mask)}


def test_criterion_01_recipe_soundness():
    t0 = time.perf_counter()
    bad = []
    for seed in range(1000):
        for strategy in ("naive", "compact"):
            m, vars, expr = expr_case(seed, max_vars=12, max_depth=6)
            recipes.encode_expr(m, expr, strategy)
            if not (oracles.rows_projection(m.constraints, vars) == oracles.model_mask(expr, vars)).all():
                bad.append((seed, strategy))
    wall = time.perf_counter() - t0
    report(1, "recipe soundness", not bad and wall < 60,
           f"2000 encodings, {len(bad)} mismatches, {wall:.1f} s (limit 60 s)")


def test_criterion_02_worked_conversions():
    checks = {}
    # (y1 & !y2) | (y1 & !y3) becomes y1 = 1 and y2 + y3 <= 1
    m = Model()
    y1, y2, y3 = (Literal(m.binary(f"y{i}")) for i in (1, 2, 3))
    recipes.encode_expr(m, Or((And((y1, ~y2)), And((y1, ~y3)))), "naive")
    checks["cnf example"] = rows_of(m) == [({"y1": 1}, ">=", 1), ({"y2": 1, "y3": 1}, "<=", 1)]

    # all three equal: six pairwise rows yi - yj >= 0
    m = Model()
    y1, y2, y3 = (Literal(m.binary(f"y{i}")) for i in (1, 2, 3))
    recipes.encode_expr(m, Or((And((y1, y2, y3)), And((~y1, ~y2, ~y3)))), "naive")
    got = {(tuple(sorted(t.items())), s, r) for t, s, r in rows_of(m)}
    want = {
        (tuple(sorted({f"y{a}": 1, f"y{b}": -1}.items())), ">=", 0)
        for a in (1, 2, 3) for b in (1, 2, 3) if a != b
    }
    checks["all-equal six rows"] = len(m.constraints) == 6 and got == want

    # slot/label biconditionals: 4 compact rows, 8 naive, same feasible set
    def slots(model):
        v = {f"S{s}_l{l}": Literal(model.binary(f"S{s}_l{l}")) for s in (1, 2, 4) for l in range(1, 5)}
        cons = [
            Iff(Or((v["S1_l1"], v["S1_l2"])), Or((v["S2_l3"], v["S2_l4"]))),
            Iff(Or((v["S4_l1"], v["S4_l2"])), Or((v["S1_l3"], v["S1_l4"]))),
        ]
        return [l.var for l in v.values()], cons

    mc, mn = Model(), Model()
    vc, cons = slots(mc)
    vn, cons_n = slots(mn)
    for c, cn in zip(cons, cons_n):
        recipes.encode_expr(mc, c, "compact")
        recipes.encode_expr(mn, cn, "naive")
    coeffs_ok = all(
        sorted(t.values()) == [-1, -1, 2, 2] and s == ">=" and r == 0 for t, s, r in rows_of(mc)
    )
    same = (
        bits(oracles.rows_projection(mc.constraints, vc), 12)
        == bits(oracles.rows_projection(mn.constraints, vn), 12)
        == bits(oracles.model_mask(And(tuple(cons)), vc), 12)
    )
    checks["slot example"] = len(mc.constraints) == 4 and len(mn.constraints) == 8 and coeffs_ok and same
    failed = [k for k, ok in checks.items() if not ok]
    report(2, "worked conversions", not failed, f"{len(checks) - len(failed)}/{len(checks)} exact" +
           (f", failed {failed}" if failed else ""))


def test_criterion_03_row_counts():
    def lits(m, prefix, k):
        return tuple(Literal(m.binary(f"{prefix}{i}")) for i in range(k))

    cases = [
        ("disjunctive-implication", lambda m, n: Implies(Or(lits(m, "l", n)), Or(lits(m, "r", 3))), 1, lambda n: n),
        ("conjunctive-implication", lambda m, n: Implies(And(lits(m, "l", 3)), And(lits(m, "r", n))), 1, lambda n: n),
        ("iff-conj", lambda m, n: Iff(And(lits(m, "a", n)), lits(m, "c", 1)[0]), 2, lambda n: n + 1),
    ]
    bad = []
    for tag, build, compact_rows, naive_rows in cases:
        for n in (2, 3, 5, 8):
            got = {}
            for strategy in ("compact", "naive"):
                m = Model()
                recipes.encode_expr(m, build(m, n), strategy)
                got[strategy] = m.tag_counts()
            if got["compact"] != {tag: compact_rows} or got["naive"] != {"cnf-naive": naive_rows(n)}:
                bad.append((tag, n, got))
    report(3, "row counts", not bad, "12 constructions; compact 1, 1, 2 rows vs naive n, m, n+1 rows"
           + (f"; mismatches {bad}" if bad else ""))


def test_criterion_04_figure_tree():
    t0 = time.perf_counter()
    m = Model()
    y = edge_variables(m, FIGURE_GRAPH)
    spanning_tree(m, FIGURE_GRAPH, y)
    sol = solve(m)
    first = (sol.objective, sorted(p for p, v in y.items() if sol.is_true(v)))
    best = [(1, 3), (2, 3), (2, 5), (3, 4)]
    recipes.disjunction(m, [~Literal(y[p]) for p in best], tag="exclude-tree")
    sol = solve(m)
    second = (sol.objective, sorted(p for p, v in y.items() if sol.is_true(v)))
    wall = time.perf_counter() - t0
    ok = first == (67, best) and second == (66, [(1, 2), (1, 3), (2, 5), (3, 4)]) and wall < 1
    report(4, "figure spanning tree", ok, f"best {first}, after exclusion {second}, {wall:.2f} s")


def test_criterion_05_flow_characterization():
    t0 = time.perf_counter()
    total, bad = 0, 0
    for seed in range(100):
        rng = np.random.default_rng([5, seed])
        n = int(rng.integers(1, 7))
        g = random_connected_graph(rng, n)
        for edges, feasible in flow_feasibility_table(g, shortcut=False):
            total += 1
            bad += feasible != oracles.is_spanning_tree(n, edges)
    wall = time.perf_counter() - t0
    report(5, "tree/flow characterization", bad == 0 and wall < 120,
           f"100 graphs, {total} edge assignments, {bad} mismatches, {wall:.1f} s (limit 120 s)")


def test_criterion_06_mst():
    bad = []
    for seed in range(100):
        rng = np.random.default_rng([6, seed])
        g = random_connected_graph(rng, int(rng.integers(1, 8)))
        m = Model()
        y = edge_variables(m, g)
        spanning_tree(m, g, y)
        sol = solve(m)
        chosen = [p for p, v in y.items() if sol.is_true(v)]
        if not (sol.optimal and sol.objective == oracles.kruskal_max(g)[1] and oracles.is_spanning_tree(g.n, chosen)):
            bad.append(seed)
    report(6, "MST equivalence", not bad, f"100 graphs (n <= 7), {len(bad)} mismatches")


def seq_instance(rng, n):
    return demos.random_scores(rng, (n, 3)), demos.random_scores(rng, (3, 3))


def test_criterion_07_sequence_labeling():
    t0 = time.perf_counter()
    bad_free, bad_verb = [], []
    for seed in range(200):
        rng = np.random.default_rng([7, seed])
        E, T = seq_instance(rng, int(rng.integers(1, 9)))
        sol = solve(demos.build_sequence_model(E, T).model)
        if not (sol.optimal and abs(sol.objective - oracles.viterbi(E, T)[1]) <= 1e-9):
            bad_free.append(seed)
    for seed in range(50):
        rng = np.random.default_rng([70, seed])
        E, T = seq_instance(rng, int(rng.integers(1, 8)))
        sm = demos.build_sequence_model(E, T, "at-least-one-verb")
        sol = solve(sm.model)
        _, ref, _ = oracles.brute_force_sequence(E, T, required_label=demos.VERB)
        if not (sol.optimal and abs(sol.objective - ref) <= 1e-9 and demos.VERB in demos.decode_sequence(sm, sol)):
            bad_verb.append(seed)
    wall = time.perf_counter() - t0
    report(7, "sequence labeling", not bad_free and not bad_verb,
           f"200 Viterbi instances ({len(bad_free)} mismatches), 50 verb instances "
           f"({len(bad_verb)} mismatches), {wall:.0f} s")


def test_criterion_08_events():
    t0 = time.perf_counter()
    bad = []
    for seed in range(20):
        S = demos.random_scores(np.random.default_rng(seed), (4, 4, len(demos.RELATIONS)))
        em = demos.build_events_model(S)
        sol = solve(em.model)
        _, ref = demos.brute_force_events(S)
        labels = demos.decode_events(em, sol) if sol.optimal else {}
        if not (sol.optimal and abs(sol.objective - ref) <= 1e-9 and not demos.validate_events(4, labels)):
            bad.append(seed)
    wall = time.perf_counter() - t0
    report(8, "event demo", not bad and wall < 120, f"20 seeds, {len(bad)} mismatches, {wall:.1f} s (limit 120 s)")


def test_criterion_09_soft_constraints():
    bad = []
    for seed in range(200):
        m, vars, softs, best = soft_case(seed)
        sol = solve(m)
        if best == -np.inf:
            ok = sol.status == "infeasible"
        else:
            ok = sol.optimal and abs(sol.objective - best) <= 1e-6
            assignment = {v: int(round(sol.value(v))) for v in vars}
            for s in softs:
                ok = ok and sol.value(s.z) == 1 - evaluate(s.expr, assignment)
        if not ok:
            bad.append(seed)
    report(9, "soft constraints", not bad, f"200 models, {len(bad)} mismatches (tol 1e-6)")


def test_criterion_10_solver_self_consistency():
    bad = []
    for seed in range(500):
        m = random_binary_model(np.random.default_rng([10, seed]), max_vars=18)
        a, b = solve(m), solve_bruteforce(m)
        ok = a.status == b.status
        if ok and a.optimal:
            ok = abs(a.objective - b.objective) <= 1e-6 and bool(check_feasible(m, a.assignment))
        if not ok:
            bad.append(seed)
    report(10, "solver self-consistency", not bad, f"500 models, {len(bad)} mismatches (tol 1e-6)")


def test_criterion_11_benchmark_harness():
    details, bad = [], []
    for kind in bench.KINDS:
        cfg = bench.BenchConfig(kind=kind, trials=100, seed=11)
        rows = bench.run_bench(cfg, workers=4)
        for naive, compact in zip(rows[::2], rows[1::2]):
            if not (naive["status"] == compact["status"] == "optimal"
                    and abs(float(naive["objective"]) - float(compact["objective"])) <= 1e-6):
                bad.append((kind, naive["trial"]))
        csv_a = bench.to_csv([dict(r, wall_ms="") for r in rows])
        csv_b = bench.to_csv(bench.run_bench(cfg, workers=1, timing=False))
        if csv_a != csv_b:
            bad.append((kind, "csv"))
        s = bench.summarize(rows)
        details.append(
            f"{kind}: rows {s['naive']['median_rows']:g} vs {s['compact']['median_rows']:g}, "
            f"median {s['naive']['median_wall_ms']:.1f} vs {s['compact']['median_wall_ms']:.1f} ms"
        )
    report(11, "benchmark harness", not bad,
           f"2x100 trials, {len(bad)} problems, CSV reproducible; naive vs compact " + "; ".join(details))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
