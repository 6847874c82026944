"""Random categorical-implication instances for the naive vs compact comparison.

Every trial draws its own generator from ``np.random.default_rng([seed, trial])``
(PCG64, portable across platforms), so trials are independent of each other
and of the order in which worker threads finish.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from logic2ilp import recipes
from logic2ilp.boolexpr import And, BoolExpr, Implies, Literal, Or
from logic2ilp.ilpcore import Model
from logic2ilp.solver import SolverConfig, solve

KINDS = ("conjunctive", "disjunctive")
ENCODINGS = ("naive", "compact")
CSV_COLUMNS = ("trial", "encoding", "n_rows", "wall_ms", "objective", "status")


@dataclass(frozen=True)
class BenchConfig:
    kind: str = "disjunctive"
    n_categoricals: int = 20
    n_labels: int = 8
    density: float = 0.2
    n_constraints: int = 10
    trials: int = 10
    seed: int = 0
    time_limit_s: float | None = 60.0
    node_limit: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n_labels < 1 or self.n_constraints < 0 or self.trials < 0:
            raise ValueError("n_labels >= 1, n_constraints >= 0 and trials >= 0 are required")
        if self.per_constraint < 2:
            raise ValueError(
                f"density {self.density} gives {self.per_constraint} categoricals per "
                "constraint; at least 2 are needed"
            )

    @property
    def per_constraint(self) -> int:
        return min(int(self.density * self.n_categoricals), self.n_categoricals)


@dataclass
class Instance:
    scores: np.ndarray  # n_categoricals x n_labels
    constraints: list[BoolExpr]


def generate_instance(cfg: BenchConfig, trial: int) -> tuple[Instance, Model]:
    """Scores and constraints for one trial, plus a model with the label blocks only."""
    rng = np.random.default_rng([cfg.seed, trial])
    scores = rng.uniform(-1.0, 1.0, size=(cfg.n_categoricals, cfg.n_labels))
    model = Model()
    blocks = [
        recipes.multiclass_block(model, scores[c], prefix=f"x_{c}") for c in range(cfg.n_categoricals)
    ]
    k = cfg.per_constraint
    half = k // 2
    constraints = []
    for _ in range(cfg.n_constraints):
        cats = rng.choice(cfg.n_categoricals, size=k, replace=False)
        labels = rng.integers(0, cfg.n_labels, size=k)
        negate = np.zeros(k, dtype=bool)
        negate[rng.choice(k, size=k // 2, replace=False)] = True
        lits = [Literal(blocks[c][l], bool(neg)) for c, l, neg in zip(cats, labels, negate)]
        left, right = lits[:half], lits[half:]
        if cfg.kind == "disjunctive":
            constraints.append(Implies(Or(tuple(left)), Or(tuple(right))))
        else:
            constraints.append(Implies(And(tuple(left)), And(tuple(right))))
    return Instance(scores, constraints), model


def run_trial(cfg: BenchConfig, trial: int, encoding: str, timing: bool = True) -> dict:
    inst, model = generate_instance(cfg, trial)
    start = len(model.constraints)
    for expr in inst.constraints:
        recipes.encode_expr(model, expr, encoding)
    n_rows = len(model.constraints) - start
    t0 = time.perf_counter()
    sol = solve(model, SolverConfig(node_limit=cfg.node_limit, time_limit_s=cfg.time_limit_s, seed=cfg.seed))
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return {
        "trial": trial,
        "encoding": encoding,
        "n_rows": n_rows,
        "wall_ms": f"{wall_ms:.3f}" if timing else "",
        "objective": repr(sol.objective) if sol.objective is not None else "",
        "status": sol.status,
    }


def run_bench(
    cfg: BenchConfig,
    encodings=ENCODINGS,
    workers: int = 1,
    timing: bool = True,
) -> list[dict]:
    """All (trial, encoding) results, ordered by trial then encoding."""
    jobs = [(t, e) for t in range(cfg.trials) for e in encodings]
    if workers <= 1:
        return [run_trial(cfg, t, e, timing) for t, e in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: run_trial(cfg, job[0], job[1], timing), jobs))


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def summarize(rows: list[dict]) -> dict[str, dict[str, float]]:
    """Median rows and wall time per encoding (timings are reported, never asserted)."""
    out = {}
    for enc in sorted({r["encoding"] for r in rows}):
        sub = [r for r in rows if r["encoding"] == enc]
        walls = [float(r["wall_ms"]) for r in sub if r["wall_ms"] != ""]
        out[enc] = {
            "trials": len(sub),
            "median_rows": float(np.median([r["n_rows"] for r in sub])) if sub else 0.0,
            "median_wall_ms": float(np.median(walls)) if walls else float("nan"),
        }
    return out
