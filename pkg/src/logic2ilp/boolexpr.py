"""Boolean formulas over named 0-1 decision variables.

Expressions are immutable trees built from :class:`Literal`, :class:`Not`,
:class:`And`, :class:`Or`, :class:`Implies`, :class:`Iff` and :class:`Count`.
Two routes to conjunctive normal form are provided:

* :func:`to_cnf_distributive` produces a logically equivalent CNF by pushing
  negations to the literals and distributing disjunctions over conjunctions.
* :func:`to_cnf_tseitin` introduces one auxiliary variable per compound
  sub-formula and emits the two-sided definition clauses, so the size of the
  output is linear in the size of the input and the projection of its models
  onto the original variables is exact.

Counting nodes have no clausal expansion here; they are encoded as linear rows
by :mod:`logic2ilp.recipes`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

COMPARATORS = (">=", "<=", "=")


class MissingVariableError(KeyError):
    """Raised when an assignment does not cover a variable of the expression."""

    def __init__(self, var: "VarId"):
        super().__init__(f"no value assigned to variable {var.name!r} (id {var.id})")
        self.var = var

    def __str__(self) -> str:
        return self.args[0]


class ClauseBudgetExceeded(ValueError):
    pass


class CountNotSupported(ValueError):
    pass


class RegistryExhausted(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class VarId:
    id: int
    name: str

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"variable id must be non-negative, got {self.id}")
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __str__(self) -> str:
        return self.name


class BoolExpr:
    """Base class; provides operator sugar (``&``, ``|``, ``~``)."""

    __slots__ = ()

    def __and__(self, other: "BoolExpr") -> "And":
        return And(_flatten(And, (self, other)))

    def __or__(self, other: "BoolExpr") -> "Or":
        return Or(_flatten(Or, (self, other)))

    def __invert__(self) -> "BoolExpr":
        return Not(self)

    def implies(self, other: "BoolExpr") -> "Implies":
        return Implies(self, other)

    def iff(self, other: "BoolExpr") -> "Iff":
        return Iff(self, other)

    def __str__(self) -> str:
        from logic2ilp.syntax import format_expr

        return format_expr(self)


def _flatten(kind, parts):
    out = []
    for p in parts:
        if isinstance(p, kind):
            out.extend(p.args)
        else:
            out.append(p)
    return tuple(out)


@dataclass(frozen=True)
class Literal(BoolExpr):
    var: VarId
    negated: bool = False

    def __invert__(self) -> "Literal":
        return Literal(self.var, not self.negated)

    @property
    def sort_key(self) -> tuple[int, bool]:
        return (self.var.id, self.negated)


Lit = Literal


@dataclass(frozen=True)
class Not(BoolExpr):
    arg: BoolExpr


@dataclass(frozen=True)
class And(BoolExpr):
    args: tuple[BoolExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("And needs at least one operand")


@dataclass(frozen=True)
class Or(BoolExpr):
    args: tuple[BoolExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("Or needs at least one operand")


@dataclass(frozen=True)
class Implies(BoolExpr):
    lhs: BoolExpr
    rhs: BoolExpr


@dataclass(frozen=True)
class Iff(BoolExpr):
    lhs: BoolExpr
    rhs: BoolExpr


@dataclass(frozen=True)
class Count(BoolExpr):
    """``|{true literals}| cmp k``; an unsatisfiable bound is legal input."""

    lits: tuple[Literal, ...]
    cmp: str
    k: int

    def __post_init__(self):
        object.__setattr__(self, "lits", tuple(self.lits))
        if self.cmp not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.cmp!r}")
        if self.k < 0:
            raise ValueError("count bound must be non-negative")
        if not all(isinstance(l, Literal) for l in self.lits):
            raise TypeError("Count operands must be literals")


def exactly_one(lits: Iterable[Literal]) -> Count:
    return Count(tuple(lits), "=", 1)


def at_least(k: int, lits: Iterable[Literal]) -> Count:
    return Count(tuple(lits), ">=", k)


def at_most(k: int, lits: Iterable[Literal]) -> Count:
    return Count(tuple(lits), "<=", k)


# -- variable registry --------------------------------------------------------


class VarRegistry:
    """Hands out dense ids; the only mutable object in this module."""

    def __init__(self, max_vars: int = 1_000_000):
        self.max_vars = max_vars
        self._vars: list[VarId] = []
        self._by_name: dict[str, VarId] = {}
        self._fresh = 0

    def var(self, name: str) -> VarId:
        v = self._by_name.get(name)
        if v is None:
            if len(self._vars) >= self.max_vars:
                raise RegistryExhausted(f"registry is capped at {self.max_vars} variables")
            v = VarId(len(self._vars), name)
            self._vars.append(v)
            self._by_name[name] = v
        return v

    def lit(self, name: str, negated: bool = False) -> Literal:
        return Literal(self.var(name), negated)

    def fresh(self, prefix: str = "_t") -> VarId:
        while f"{prefix}{self._fresh}" in self._by_name:
            self._fresh += 1
        name = f"{prefix}{self._fresh}"
        self._fresh += 1
        return self.var(name)

    def __getitem__(self, name: str) -> VarId:
        return self._by_name[name]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._vars)

    def __iter__(self) -> Iterator[VarId]:
        return iter(self._vars)


# -- traversal and evaluation -------------------------------------------------


def children(expr: BoolExpr) -> tuple[BoolExpr, ...]:
    if isinstance(expr, Literal):
        return ()
    if isinstance(expr, Not):
        return (expr.arg,)
    if isinstance(expr, (And, Or)):
        return expr.args
    if isinstance(expr, (Implies, Iff)):
        return (expr.lhs, expr.rhs)
    if isinstance(expr, Count):
        return expr.lits
    raise TypeError(f"not a BoolExpr: {expr!r}")


def walk(expr: BoolExpr) -> Iterator[BoolExpr]:
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        stack.extend(reversed(children(e)))


def variables(expr: BoolExpr) -> list[VarId]:
    """Variables of ``expr`` sorted by id."""
    return sorted({e.var for e in walk(expr) if isinstance(e, Literal)})


def has_count(expr: BoolExpr) -> bool:
    return any(isinstance(e, Count) for e in walk(expr))


def size(expr: BoolExpr) -> int:
    return sum(1 for _ in walk(expr))


def _compare(total, cmp: str, k: int):
    if cmp == ">=":
        return total >= k
    if cmp == "<=":
        return total <= k
    return total == k


def _eval(expr: BoolExpr, value: Callable[[VarId], object]):
    if isinstance(expr, Literal):
        v = value(expr.var)
        return np.logical_not(v) if expr.negated else np.asarray(v, dtype=bool)
    if isinstance(expr, Not):
        return np.logical_not(_eval(expr.arg, value))
    if isinstance(expr, And):
        out = _eval(expr.args[0], value)
        for a in expr.args[1:]:
            out = np.logical_and(out, _eval(a, value))
        return out
    if isinstance(expr, Or):
        out = _eval(expr.args[0], value)
        for a in expr.args[1:]:
            out = np.logical_or(out, _eval(a, value))
        return out
    if isinstance(expr, Implies):
        return np.logical_or(np.logical_not(_eval(expr.lhs, value)), _eval(expr.rhs, value))
    if isinstance(expr, Iff):
        return np.equal(_eval(expr.lhs, value), _eval(expr.rhs, value))
    if isinstance(expr, Count):
        total = 0
        for l in expr.lits:
            total = total + _eval(l, value).astype(np.int64)
        return np.asarray(_compare(total, expr.cmp, expr.k), dtype=bool)
    raise TypeError(f"not a BoolExpr: {expr!r}")


def _lookup(assignment: Mapping):
    def value(var: VarId):
        try:
            return assignment[var]
        except KeyError:
            raise MissingVariableError(var) from None

    return value


def evaluate(expr: BoolExpr, assignment: Mapping[VarId, int]) -> bool:
    """Truth value of ``expr`` under a total 0-1 assignment."""
    return bool(_eval(expr, _lookup(assignment)))


def evaluate_many(expr: BoolExpr, columns: Mapping[VarId, np.ndarray]) -> np.ndarray:
    """Vectorized :func:`evaluate`: ``columns`` maps each variable to a 0-1 array."""
    return np.asarray(_eval(expr, _lookup(columns)), dtype=bool)


# -- negation normal form -----------------------------------------------------


def to_nnf(expr: BoolExpr, negate: bool = False) -> BoolExpr:
    """Rewrite Implies/Iff and push negations down to the literals.

    Counts survive as leaves; a negated count is re-expressed as a count
    (over negated literals where needed) so ``k`` stays non-negative.
    """
    if isinstance(expr, Literal):
        return ~expr if negate else expr
    if isinstance(expr, Not):
        return to_nnf(expr.arg, not negate)
    if isinstance(expr, (And, Or)):
        args = tuple(to_nnf(a, negate) for a in expr.args)
        flip = isinstance(expr, And) == negate
        kind = Or if flip else And
        return kind(_flatten(kind, args))
    if isinstance(expr, Implies):
        return to_nnf(Or((Not(expr.lhs), expr.rhs)), negate)
    if isinstance(expr, Iff):
        both = And((Or((Not(expr.lhs), expr.rhs)), Or((expr.lhs, Not(expr.rhs)))))
        return to_nnf(both, negate)
    if isinstance(expr, Count):
        return _negate_count(expr) if negate else expr
    raise TypeError(f"not a BoolExpr: {expr!r}")


def _negate_count(c: Count) -> BoolExpr:
    n = len(c.lits)
    flipped = tuple(~l for l in c.lits)
    if c.cmp == ">=":
        # sum < k  <=>  sum(~l) >= n - k + 1
        return Count(flipped, ">=", n - c.k + 1)
    if c.cmp == "<=":
        return Count(c.lits, ">=", c.k + 1)
    return Or((Count(c.lits, ">=", c.k + 1), Count(flipped, ">=", n - c.k + 1)))


# -- clauses ------------------------------------------------------------------


@dataclass(frozen=True)
class Clause:
    literals: frozenset[Literal]

    def __post_init__(self):
        object.__setattr__(self, "literals", frozenset(self.literals))

    @property
    def tautological(self) -> bool:
        return any(~l in self.literals for l in self.literals)

    def sorted(self) -> list[Literal]:
        return sorted(self.literals, key=lambda l: l.sort_key)

    @property
    def sort_key(self) -> tuple:
        return tuple(l.sort_key for l in self.sorted())

    def satisfied_by(self, assignment: Mapping[VarId, int]) -> bool:
        value = _lookup(assignment)
        return any(bool(value(l.var)) != l.negated for l in self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.sorted())


@dataclass(frozen=True)
class Cnf:
    clauses: tuple[Clause, ...]
    aux_vars: tuple[VarId, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "aux_vars", tuple(self.aux_vars))

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def variables(self) -> list[VarId]:
        return sorted({l.var for c in self.clauses for l in c.literals})

    def satisfied_by(self, assignment: Mapping[VarId, int]) -> bool:
        return all(c.satisfied_by(assignment) for c in self.clauses)

    def to_expr(self) -> BoolExpr:
        """Back to an And-of-Or expression (an empty CNF has no expression)."""
        if not self.clauses:
            raise ValueError("empty CNF has no BoolExpr form")
        parts = []
        for c in self.clauses:
            lits = c.sorted()
            parts.append(lits[0] if len(lits) == 1 else Or(tuple(lits)))
        return parts[0] if len(parts) == 1 else And(tuple(parts))


def canonical_clauses(clauses: Iterable[Iterable[Literal]]) -> tuple[Clause, ...]:
    """Drop tautologies and duplicates; order literals and clauses canonically."""
    seen = set()
    out = []
    for c in clauses:
        c = c if isinstance(c, Clause) else Clause(frozenset(c))
        if c.tautological or c.literals in seen:
            continue
        seen.add(c.literals)
        out.append(c)
    out.sort(key=lambda c: c.sort_key)
    return tuple(out)


def _absorb(clauses: Iterable[frozenset]) -> list[frozenset]:
    # Tautology removal plus absorption (a clause implied by a shorter one goes).
    kept: list[frozenset] = []
    for c in sorted(set(clauses), key=len):
        if any(~l in c for l in c):
            continue
        if any(k <= c for k in kept):
            continue
        kept.append(c)
    return kept


def to_cnf_distributive(expr: BoolExpr, max_clauses: int = 10**6) -> Cnf:
    """Equivalent CNF via negation pushing and distribution of Or over And."""
    if has_count(expr):
        raise CountNotSupported("Count nodes have no clausal expansion; encode them linearly")
    return Cnf(canonical_clauses(_distribute(to_nnf(expr), max_clauses)))


def _distribute(e: BoolExpr, budget: int) -> list[frozenset]:
    if isinstance(e, Literal):
        return [frozenset((e,))]
    if isinstance(e, And):
        out: list[frozenset] = []
        for a in e.args:
            out.extend(_distribute(a, budget))
            if len(out) > budget:
                raise ClauseBudgetExceeded(f"CNF expansion exceeds {budget} clauses")
        return _absorb(out)
    if isinstance(e, Or):
        acc = [frozenset()]
        for a in e.args:
            part = _distribute(a, budget)
            if len(acc) * len(part) > budget:
                raise ClauseBudgetExceeded(f"CNF expansion exceeds {budget} clauses")
            acc = _absorb(x | y for x in acc for y in part)
        return acc
    raise TypeError(f"unexpected node in NNF: {e!r}")


# -- Tseitin ------------------------------------------------------------------


class _Tseitin:
    def __init__(self, registry, prefix: str):
        self.registry = registry
        self.prefix = prefix
        self.clauses: list[frozenset] = []
        self.aux: list[VarId] = []
        self._memo: dict[BoolExpr, Literal] = {}

    def _new(self) -> Literal:
        v = self.registry.fresh(self.prefix)
        self.aux.append(v)
        return Literal(v)

    def define(self, e: BoolExpr) -> Literal:
        if isinstance(e, Literal):
            return e
        if isinstance(e, Not):
            return ~self.define(e.arg)
        hit = self._memo.get(e)
        if hit is not None:
            return hit
        if isinstance(e, Count):
            raise CountNotSupported("Count nodes have no clausal expansion; encode them linearly")
        add = self.clauses.append
        if isinstance(e, (And, Or)):
            parts = [self.define(a) for a in e.args]
            if len(parts) == 1:
                return parts[0]
            d = self._new()
            if isinstance(e, And):
                for p in parts:
                    add(frozenset((~d, p)))
                add(frozenset([d] + [~p for p in parts]))
            else:
                for p in parts:
                    add(frozenset((d, ~p)))
                add(frozenset([~d] + parts))
        elif isinstance(e, Implies):
            a, b = self.define(e.lhs), self.define(e.rhs)
            d = self._new()
            add(frozenset((d, a)))
            add(frozenset((d, ~b)))
            add(frozenset((~d, ~a, b)))
        elif isinstance(e, Iff):
            a, b = self.define(e.lhs), self.define(e.rhs)
            d = self._new()
            add(frozenset((~d, ~a, b)))
            add(frozenset((~d, a, ~b)))
            add(frozenset((d, a, b)))
            add(frozenset((d, ~a, ~b)))
        else:
            raise TypeError(f"not a BoolExpr: {e!r}")
        self._memo[e] = d
        return d


def tseitin_define(expr: BoolExpr, registry, prefix: str = "_t") -> tuple[Literal, Cnf]:
    """A literal equivalent to ``expr`` plus the clauses defining its aux vars.

    Every auxiliary variable is pinned by a two-sided definition, so once the
    original variables are fixed the auxiliaries are determined.
    """
    t = _Tseitin(registry, prefix)
    root = t.define(expr)
    return root, Cnf(canonical_clauses(t.clauses), tuple(t.aux))


def to_cnf_tseitin(expr: BoolExpr, registry, prefix: str = "_t") -> Cnf:
    """Equisatisfiable CNF whose models project exactly onto those of ``expr``."""
    t = _Tseitin(registry, prefix)
    top: list[frozenset] = []

    def assert_(e: BoolExpr):
        if isinstance(e, And):
            for a in e.args:
                assert_(a)
        elif isinstance(e, Or):
            top.append(frozenset(t.define(a) for a in e.args))
        else:
            top.append(frozenset((t.define(e),)))

    assert_(expr)
    return Cnf(canonical_clauses(top + t.clauses), tuple(t.aux))


def all_assignments(vars: Sequence[VarId]) -> Iterator[dict[VarId, int]]:
    for bits in itertools.product((0, 1), repeat=len(vars)):
        yield dict(zip(vars, bits))
