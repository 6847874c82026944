"""Linear encodings of logical constraints over 0-1 variables.

Each recipe appends rows to a :class:`~logic2ilp.ilpcore.Model` and returns
the indices of the rows it added.  Negated literals are handled by
substituting ``1 - y`` for ``y``: a literal contributes the term ``(+w, y)``
and a negated one contributes ``(-w, y)`` with ``+w`` moved to the
right-hand side.  A row whose coefficients come out all negative is
multiplied by -1 (so ``-y1 - y2 >= -1`` is stored as ``y1 + y2 <= 1``).

All coefficients and right-hand sides emitted here are integers.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from logic2ilp.boolexpr import (
    And,
    BoolExpr,
    ClauseBudgetExceeded,
    Cnf,
    Count,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    VarId,
    has_count,
    to_cnf_distributive,
    to_cnf_tseitin,
    tseitin_define,
)
from logic2ilp.ilpcore import Model

_FLIP = {"<=": ">=", ">=": "<=", "=": "="}

#: clause budget for the distributive route inside :func:`encode_expr`;
#: larger expansions switch to the Tseitin route.
NAIVE_CLAUSE_BUDGET = 4096


def _as_lit(x) -> Literal:
    if isinstance(x, Literal):
        return x
    if isinstance(x, VarId):
        return Literal(x)
    raise TypeError(f"expected a Literal or VarId, got {x!r}")


def linear_terms(lits: Iterable, weight: int = 1) -> tuple[list[tuple[int, VarId]], int]:
    """Terms of ``weight * sum(lits)`` and the constant produced by negations."""
    terms, const = [], 0
    for l in lits:
        l = _as_lit(l)
        if l.negated:
            terms.append((-weight, l.var))
            const += weight
        else:
            terms.append((weight, l.var))
    return terms, const


def _emit(model: Model, terms, sense: str, rhs: int, tag: str) -> int:
    coeffs = {}
    for c, v in terms:
        coeffs[v] = coeffs.get(v, 0) + c
    nonzero = [c for c in coeffs.values() if c != 0]
    if nonzero and all(c < 0 for c in nonzero):
        terms = [(-c, v) for c, v in terms]
        sense, rhs = _FLIP[sense], -rhs
    return model.add_constraint(terms, sense, rhs, tag)


def _row(model: Model, parts, sense: str, rhs: int, tag: str) -> int:
    """``sum(weight * lits for weight, lits in parts) sense rhs`` with substitution."""
    terms, const = [], 0
    for weight, lits in parts:
        t, k = linear_terms(lits, weight)
        terms += t
        const += k
    return _emit(model, terms, sense, rhs - const, tag)


def force_all(model: Model, lits: Sequence, tag: str = "force-all") -> list[int]:
    lits = list(lits)
    if not lits:
        raise ValueError("force_all needs at least one literal")
    return [_row(model, [(1, lits)], "=", len(lits), tag)]


def forbid_all(model: Model, lits: Sequence, tag: str = "forbid-all") -> list[int]:
    lits = list(lits)
    if not lits:
        raise ValueError("forbid_all needs at least one literal")
    return [_row(model, [(1, lits)], "=", 0, tag)]


def disjunction(model: Model, lits: Sequence, tag: str = "disjunction") -> list[int]:
    return [_row(model, [(1, list(lits))], ">=", 1, tag)]


def count(model: Model, lits: Sequence, comparator: str, k: int, tag: str = "count") -> list[int]:
    if k < 0:
        raise ValueError("count bound must be non-negative")
    if comparator not in ("<=", ">=", "="):
        raise ValueError(f"unknown comparator {comparator!r}")
    return [_row(model, [(1, list(lits))], comparator, k, tag)]


def exactly_one(model: Model, lits: Sequence, tag: str = "exactly-one") -> list[int]:
    return [_row(model, [(1, list(lits))], "=", 1, tag)]


def multiclass_block(
    model: Model, scores: Sequence[float], prefix: str = "label", tag: str = "exactly-one"
) -> list[VarId]:
    """One binary per label scored in the objective, plus an exactly-one row."""
    if not len(scores):
        raise ValueError("multiclass block needs at least one label")
    ids = [model.binary(f"{prefix}_{i}", s) for i, s in enumerate(scores)]
    exactly_one(model, ids, tag=tag)
    return ids


def equivalence(model: Model, a, b, tag: str = "equivalence") -> list[int]:
    return [_row(model, [(1, [a]), (-1, [b])], "=", 0, tag)]


def implication(
    model: Model, antecedent: Sequence, consequent: Sequence, tag: str = "implication"
) -> list[int]:
    """``and(antecedent) -> or(consequent)`` as ``-sum(L) + sum(R) >= 1 - m``."""
    ante, cons = list(antecedent), list(consequent)
    return [_row(model, [(-1, ante), (1, cons)], ">=", 1 - len(ante), tag)]


def disjunctive_implication(
    model: Model, lhs: Sequence, rhs: Sequence, tag: str = "disjunctive-implication"
) -> list[int]:
    """``or(lhs) -> or(rhs)`` as ``-sum(L) + n * sum(R) >= 0`` with ``n = |L|``."""
    lhs, rhs = list(lhs), list(rhs)
    if not lhs:
        raise ValueError("disjunctive implication needs a non-empty left side")
    return [_row(model, [(-1, lhs), (len(lhs), rhs)], ">=", 0, tag)]


def conjunctive_implication(
    model: Model, lhs: Sequence, rhs: Sequence, tag: str = "conjunctive-implication"
) -> list[int]:
    """``and(lhs) -> and(rhs)`` as ``-m * sum(L) + sum(R) >= m (1 - n)``."""
    lhs, rhs = list(lhs), list(rhs)
    if not rhs:
        raise ValueError("conjunctive implication needs a non-empty right side")
    n, m = len(lhs), len(rhs)
    return [_row(model, [(-m, lhs), (1, rhs)], ">=", m * (1 - n), tag)]


def iff_conj(model: Model, antecedents: Sequence, c, tag: str = "iff-conj") -> list[int]:
    """``and(antecedents) <-> c`` in two rows."""
    antecedents = list(antecedents)
    return implication(model, antecedents, [c], tag=tag) + conjunctive_implication(
        model, [c], antecedents, tag=tag
    )


def encode_cnf_naive(model: Model, cnf: Cnf, tag: str = "cnf-naive") -> list[int]:
    """One disjunction row per clause."""
    out = []
    for clause in cnf.clauses:
        out += disjunction(model, clause.sorted(), tag=tag)
    return out


# -- reified counts -----------------------------------------------------------


def reify_count(model: Model, c: Count, tag: str = "count-reified") -> Literal:
    """A fresh binary ``d`` with ``d <-> c``, in linear rows."""
    n = len(c.lits)
    if c.cmp == "=":
        ge = reify_count(model, Count(c.lits, ">=", c.k), tag)
        le = reify_count(model, Count(c.lits, "<=", c.k), tag)
        d = Literal(model.fresh("_c"))
        iff_conj(model, [ge, le], d, tag=tag)
        return d
    if c.cmp == "<=":
        # sum(l) <= k  <=>  sum(~l) >= n - k
        return reify_count(model, Count(tuple(~l for l in c.lits), ">=", max(n - c.k, 0)), tag)
    d = Literal(model.fresh("_c"))
    # d -> sum >= k:    sum - k d >= 0
    _row(model, [(1, c.lits), (-c.k, [d])], ">=", 0, tag)
    # ~d -> sum <= k-1: sum - (n - k + 1) d <= k - 1
    _row(model, [(1, c.lits), (-(n - c.k + 1), [d])], "<=", c.k - 1, tag)
    return d


def _replace_counts(model: Model, e: BoolExpr) -> BoolExpr:
    if isinstance(e, Count):
        return reify_count(model, e)
    if isinstance(e, Literal):
        return e
    if isinstance(e, Not):
        return Not(_replace_counts(model, e.arg))
    if isinstance(e, And):
        return And(tuple(_replace_counts(model, a) for a in e.args))
    if isinstance(e, Or):
        return Or(tuple(_replace_counts(model, a) for a in e.args))
    if isinstance(e, Implies):
        return Implies(_replace_counts(model, e.lhs), _replace_counts(model, e.rhs))
    if isinstance(e, Iff):
        return Iff(_replace_counts(model, e.lhs), _replace_counts(model, e.rhs))
    raise TypeError(f"not a BoolExpr: {e!r}")


# -- whole expressions --------------------------------------------------------


def literal_of(e: BoolExpr) -> Literal | None:
    """``e`` as a literal if it is one (through any number of Not wrappers)."""
    neg = False
    while isinstance(e, Not):
        e, neg = e.arg, not neg
    if isinstance(e, Literal):
        return ~e if neg else e
    return None


def literals_of(e: BoolExpr, kind) -> list[Literal] | None:
    """Operands of ``e`` if it is a ``kind`` node over literals; a lone literal counts."""
    lit = literal_of(e)
    if lit is not None:
        return [lit]
    if isinstance(e, kind):
        lits = [literal_of(a) for a in e.args]
        if all(l is not None for l in lits):
            return lits
    return None


def encode_naive(model: Model, expr: BoolExpr, budget: int = NAIVE_CLAUSE_BUDGET) -> list[int]:
    """CNF then one row per clause; Tseitin takes over past the clause budget."""
    if has_count(expr):
        expr = _replace_counts(model, expr)
    try:
        cnf = to_cnf_distributive(expr, max_clauses=budget)
        return encode_cnf_naive(model, cnf)
    except ClauseBudgetExceeded:
        cnf = to_cnf_tseitin(expr, model)
        return encode_cnf_naive(model, cnf, tag="cnf-tseitin")


def encode_compact(model: Model, expr: BoolExpr) -> list[int] | None:
    """Single-pattern compact encoding, or None when ``expr`` matches no pattern."""
    if isinstance(expr, Count):
        return count(model, expr.lits, expr.cmp, expr.k)
    if isinstance(expr, Iff):
        a, b = literal_of(expr.lhs), literal_of(expr.rhs)
        if a is not None and b is not None:
            return equivalence(model, a, b)
        for conj, single in ((expr.lhs, expr.rhs), (expr.rhs, expr.lhs)):
            ants, c = literals_of(conj, And), literal_of(single)
            if ants is not None and c is not None:
                return iff_conj(model, ants, c)
        left, right = literals_of(expr.lhs, Or), literals_of(expr.rhs, Or)
        if left is not None and right is not None:
            return disjunctive_implication(model, left, right) + disjunctive_implication(
                model, right, left
            )
        return None
    if isinstance(expr, Implies):
        l_and, r_or = literals_of(expr.lhs, And), literals_of(expr.rhs, Or)
        if l_and is not None and r_or is not None:
            return implication(model, l_and, r_or)
        l_or = literals_of(expr.lhs, Or)
        if l_or is not None and r_or is not None:
            return disjunctive_implication(model, l_or, r_or)
        r_and = literals_of(expr.rhs, And)
        if l_and is not None and r_and is not None:
            return conjunctive_implication(model, l_and, r_and)
    return None


def encode_expr(model: Model, expr: BoolExpr, strategy: str = "compact") -> list[int]:
    """Encode a hard constraint.

    Top-level conjunctions are split and each conjunct is encoded on its own;
    counts always become a single linear row.  ``compact`` tries the dense
    single-row patterns first and falls back to ``naive`` for anything else.
    """
    if strategy not in ("naive", "compact"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(expr, And):
        out = []
        for a in expr.args:
            out += encode_expr(model, a, strategy)
        return out
    if isinstance(expr, Count):
        return count(model, expr.lits, expr.cmp, expr.k)
    if strategy == "compact":
        rows = encode_compact(model, expr)
        if rows is not None:
            return rows
    return encode_naive(model, expr)


def define_literal(model: Model, expr: BoolExpr, tag: str = "definition") -> Literal:
    """A literal equivalent to ``expr`` under the rows added here."""
    lit = literal_of(expr)
    if lit is not None:
        return lit
    if isinstance(expr, Count):
        return reify_count(model, expr, tag)
    if has_count(expr):
        expr = _replace_counts(model, expr)
    root, cnf = tseitin_define(expr, model, prefix="_d")
    encode_cnf_naive(model, cnf, tag=tag)
    return root
