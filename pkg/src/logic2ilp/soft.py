"""Soft constraints: pay a fixed penalty instead of forbidding a violation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from logic2ilp.boolexpr import BoolExpr, Literal, VarId
from logic2ilp.ilpcore import Model
from logic2ilp.recipes import define_literal, equivalence


@dataclass(frozen=True)
class SoftConstraint:
    expr: BoolExpr
    penalty: float
    z: VarId  # 1 exactly when expr is violated
    holds: Literal  # literal equivalent to expr


def add_soft(model: Model, expr: BoolExpr, penalty: float, name: str | None = None) -> SoftConstraint:
    """Add ``z <-> not expr`` with ``-penalty * z`` in the objective."""
    if not math.isfinite(penalty) or penalty < 0:
        raise ValueError(f"penalty must be finite and non-negative, got {penalty}")
    z = model.binary(name, -penalty) if name else model.fresh("_soft")
    if not name:
        model.set_objective(z, -penalty)
    holds = define_literal(model, expr, tag="soft-def")
    equivalence(model, z, ~holds, tag="soft")
    return SoftConstraint(expr, float(penalty), z, holds)
