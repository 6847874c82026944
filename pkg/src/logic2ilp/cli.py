"""Command-line entry point: ``logic2ilp {solve,demo-seq,demo-events,bench-implications}``.

Exit codes for ``solve``: 0 optimal, 2 infeasible, 3 node/time limit,
4 unbounded.  Demos exit 1 if the ILP answer disagrees with the reference
or fails validation.  Usage and input errors exit 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from logic2ilp import bench, demos, oracles, recipes
from logic2ilp.ilpcore import Model, Solution, check_feasible, read_json, write_json, write_lp
from logic2ilp.soft import add_soft
from logic2ilp.solver import SolverConfig, solve
from logic2ilp.syntax import parse_constraint_file

EXIT_CODES = {"optimal": 0, "infeasible": 2, "node_limit": 3, "time_limit": 3, "unbounded": 4}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # keep exit code 2 free for "infeasible"
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def load_model(path: Path, encoding: str = "compact") -> Model:
    """A model from JSON, or built from a constraint file."""
    text = path.read_text()
    if text.lstrip().startswith("{"):
        return read_json(text)
    model = Model()
    spec = parse_constraint_file(text, model)
    for name, score in spec.scores.items():
        model.set_objective(model.var(name), score)
    for expr in spec.hard:
        recipes.encode_expr(model, expr, encoding)
    for penalty, expr in spec.soft:
        add_soft(model, expr, penalty)
    return model


def solution_report(model: Model, sol: Solution) -> dict:
    assignment = {}
    if sol.assignment:
        for mv in model.vars:
            v = sol.assignment[mv.id]
            if abs(v) > 1e-9:
                assignment[mv.name] = v
    return {
        "status": sol.status,
        "objective": sol.objective,
        "nodes": sol.nodes,
        "wall_s": round(sol.wall_s, 6),
        "assignment": assignment,
        "rows_by_recipe": dict(sorted(model.tag_counts().items())),
    }


def _print_report(rep: dict, out) -> None:
    print(f"status: {rep['status']}", file=out)
    if rep["objective"] is not None:
        print(f"objective: {_fmt(rep['objective'])}", file=out)
    print(f"nodes: {rep['nodes']}", file=out)
    if rep["assignment"]:
        print("assignment:", file=out)
        for name, v in rep["assignment"].items():
            print(f"  {name} = {_fmt(v)}", file=out)
    print("rows by recipe:", file=out)
    for tag, n in rep["rows_by_recipe"].items():
        print(f"  {tag}: {n}", file=out)


def _config(args) -> SolverConfig:
    return SolverConfig(node_limit=args.node_limit, time_limit_s=args.time_limit_s, seed=args.seed)


def cmd_solve(args, out=None) -> int:
    out = out or sys.stdout
    model = load_model(Path(args.model), args.encoding)
    if args.export_lp:
        Path(args.export_lp).write_text(write_lp(model))
    if args.export_json:
        Path(args.export_json).write_text(write_json(model))
    sol = solve(model, _config(args))
    if sol.optimal:
        report = check_feasible(model, sol.assignment)
        if not report:
            print(f"internal error: reported optimum is infeasible\n{report}", file=sys.stderr)
            return 1
    rep = solution_report(model, sol)
    if args.json:
        json.dump(rep, out, indent=1)
        print(file=out)
    else:
        _print_report(rep, out)
    return EXIT_CODES[sol.status]


def cmd_demo_seq(args, out=None) -> int:
    out = out or sys.stdout
    if args.labels < 2 and args.extra != "none":
        print("at-least-one-verb needs at least 2 labels", file=sys.stderr)
        return 1
    rng = np.random.default_rng(args.seed)
    E = demos.random_scores(rng, (args.n, args.labels))
    T = demos.random_scores(rng, (args.labels, args.labels))
    sm = demos.build_sequence_model(E, T, args.extra)
    sol = solve(sm.model, _config(args))
    if not sol.optimal:
        print(f"status: {sol.status}", file=out)
        return EXIT_CODES[sol.status]
    names = list(demos.SEQ_LABELS) + [f"L{k}" for k in range(3, args.labels)]
    seq = demos.decode_sequence(sm, sol)
    problems = demos.validate_sequence(sm, sol) + [str(v) for v in check_feasible(sm.model, sol.assignment).violations]
    if args.extra == "none":
        ref_seq, ref_score = oracles.viterbi(E, T)
        ref_name = "viterbi"
    else:
        ref_seq, ref_score, _ = oracles.brute_force_sequence(E, T, required_label=demos.VERB)
        ref_name = "brute force"
    agree = abs(sol.objective - ref_score) <= 1e-6
    counts = sm.model.tag_counts()
    print(f"slots: {args.n}  labels: {args.labels}  seed: {args.seed}  extra: {args.extra}", file=out)
    print(f"rows: uniqueness {counts['exactly-one']}, consistency {counts['consistency']}", file=out)
    print(f"ilp:  {' '.join(names[l] for l in seq)}  score {_fmt(sol.objective)}", file=out)
    print(f"{ref_name}: {' '.join(names[l] for l in ref_seq)}  score {_fmt(ref_score)}", file=out)
    print(f"nodes: {sol.nodes}", file=out)
    for p in problems:
        print(f"problem: {p}", file=out)
    print("match" if agree and not problems else "MISMATCH", file=out)
    return 0 if agree and not problems else 1


def cmd_demo_events(args, out=None) -> int:
    out = out or sys.stdout
    n = args.n_events
    if n < 1:
        print("need at least one event", file=sys.stderr)
        return 1
    rng = np.random.default_rng(args.seed)
    S = demos.random_scores(rng, (n, n, len(demos.RELATIONS)))
    em = demos.build_events_model(S)
    sol = solve(em.model, _config(args))
    if not sol.optimal:
        print(f"status: {sol.status}", file=out)
        return EXIT_CODES[sol.status]
    labels = demos.decode_events(em, sol)
    problems = demos.validate_events(n, labels)
    problems += [str(v) for v in check_feasible(em.model, sol.assignment).violations]
    print(f"events: {n}  seed: {args.seed}", file=out)
    for (i, j), r in labels.items():
        if r != demos.NONE:
            print(f"  e{i} {demos.RELATIONS[r]} e{j}", file=out)
    print(f"ilp score: {_fmt(sol.objective)}  nodes: {sol.nodes}", file=out)
    agree = True
    if n * (n - 1) <= 12:
        _, ref = demos.brute_force_events(S)
        agree = abs(ref - sol.objective) <= 1e-6
        print(f"brute force score: {_fmt(ref)}", file=out)
    for p in problems:
        print(f"problem: {p}", file=out)
    print("match" if agree and not problems else "MISMATCH", file=out)
    return 0 if agree and not problems else 1


def cmd_bench(args, out=None) -> int:
    out = out or sys.stdout
    cfg = bench.BenchConfig(
        kind=args.kind,
        n_categoricals=args.n_categoricals,
        n_labels=args.n_labels,
        density=args.density,
        n_constraints=args.n_constraints,
        trials=args.trials,
        seed=args.seed,
        time_limit_s=args.time_limit_s,
        node_limit=args.node_limit,
    )
    encodings = bench.ENCODINGS if args.encoding == "both" else (args.encoding,)
    if args.export_lp:
        target = Path(args.export_lp)
        target.mkdir(parents=True, exist_ok=True)
        for t in range(cfg.trials):
            for enc in encodings:
                inst, model = bench.generate_instance(cfg, t)
                for expr in inst.constraints:
                    recipes.encode_expr(model, expr, enc)
                (target / f"trial{t:04d}_{enc}.lp").write_text(write_lp(model))
        return 0
    rows = bench.run_bench(cfg, encodings, workers=args.workers, timing=not args.no_timing)
    text = bench.to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    mismatched = []
    if len(encodings) == 2:
        by_trial: dict[int, list] = {}
        for r in rows:
            by_trial.setdefault(r["trial"], []).append(r)
        for t, pair in by_trial.items():
            if all(r["status"] == "optimal" for r in pair):
                a, b = (float(r["objective"]) for r in pair)
                if not math.isclose(a, b, rel_tol=0, abs_tol=1e-6):
                    mismatched.append(t)
    for enc, s in bench.summarize(rows).items():
        wall = "n/a" if math.isnan(s["median_wall_ms"]) else f"{s['median_wall_ms']:.2f} ms"
        print(f"# {enc}: trials {s['trials']}, median rows {s['median_rows']:g}, median wall {wall}", file=sys.stderr)
    if mismatched:
        print(f"# objective mismatch between encodings in trials {mismatched}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="logic2ilp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(sp):
        sp.add_argument("--node-limit", type=int, default=None)
        sp.add_argument("--time-limit-s", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("solve", help="solve a model JSON or a constraint file")
    s.add_argument("model", help="model JSON or constraint file")
    s.add_argument("--encoding", choices=("naive", "compact"), default="compact")
    s.add_argument("--export-lp", metavar="PATH")
    s.add_argument("--export-json", metavar="PATH")
    s.add_argument("--json", action="store_true", help="print the report as JSON")
    solver_flags(s)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("demo-seq", help="sequence labeling vs Viterbi")
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--labels", type=int, default=3)
    s.add_argument("--extra", choices=("none", "at-least-one-verb"), default="none")
    solver_flags(s)
    s.set_defaults(func=cmd_demo_seq)

    s = sub.add_parser("demo-events", help="event relations with connectivity")
    s.add_argument("--n-events", type=int, default=4)
    solver_flags(s)
    s.set_defaults(func=cmd_demo_events)

    s = sub.add_parser("bench-implications", help="naive vs compact encodings on random implications")
    s.add_argument("--kind", choices=bench.KINDS, default="disjunctive")
    s.add_argument("--n-categoricals", type=int, default=20)
    s.add_argument("--n-labels", type=int, default=8)
    s.add_argument("--density", type=float, default=0.2)
    s.add_argument("--n-constraints", type=int, default=10)
    s.add_argument("--encoding", choices=("naive", "compact", "both"), default="both")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--no-timing", action="store_true", help="leave wall_ms empty for reproducible CSVs")
    s.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")
    s.add_argument("--export-lp", metavar="DIR", help="write LP files instead of solving")
    s.add_argument("--node-limit", type=int, default=None)
    s.add_argument("--time-limit-s", type=float, default=60.0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
