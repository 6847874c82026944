"""Text syntax for constraints, and the constraint-file format used by the CLI.

Expression grammar (lowest precedence first)::

    expr     := implies ( '<->' implies )?
    implies  := or ( '->' implies )?            # right associative
    or       := and ( '|' and )*
    and      := unary ( '&' unary )*
    unary    := '!' NAME                        # negated literal
              | '!' unary                       # Not node
              | atom
    atom     := NAME
              | '(' expr ')'
              | 'count' '(' CMP ',' INT ';' lits ')'
              | 'exactly1' '(' lits ')'
    lits     := lit ( ',' lit )*
    lit      := '!'? NAME
    CMP      := '>=' | '<=' | '='
    NAME     := [A-Za-z_][A-Za-z0-9_]*

``format_expr`` prints an expression back in this syntax so that
``parse_expr(format_expr(e))`` rebuilds ``e`` (single-operand And/Or nodes
print as their operand and are the one exception).

Constraint files hold one statement per line; ``#`` starts a comment::

    score <name> <number>          objective coefficient of a binary variable
    soft <penalty> : <expr>        penalized constraint
    <expr>                         hard constraint
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Union

from logic2ilp.boolexpr import (
    And,
    BoolExpr,
    Count,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    VarId,
)


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at column {pos + 1}: {text!r}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|>=|<=|[&|!(),;=])|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*))"
)

Resolver = Union[Callable[[str], VarId], object]


def _resolver(resolve) -> Callable[[str], VarId]:
    if hasattr(resolve, "var"):
        return resolve.var
    return resolve


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text_end = len(text.rstrip())
    while pos < text_end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, resolve: Callable[[str], VarId]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.resolve = resolve

    def peek(self, ahead: int = 0):
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        k, v, pos = self.peek()
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {v or 'end of input'!r}", self.text, pos)
        self.i += 1
        return v

    def at(self, value: str) -> bool:
        k, v, _ = self.peek()
        return k == "op" and v == value

    def parse(self) -> BoolExpr:
        e = self.expr()
        self.take(kind="end")
        return e

    def expr(self) -> BoolExpr:
        lhs = self.implies()
        if self.at("<->"):
            self.take()
            return Iff(lhs, self.implies())
        return lhs

    def implies(self) -> BoolExpr:
        lhs = self.disj()
        if self.at("->"):
            self.take()
            return Implies(lhs, self.implies())
        return lhs

    def disj(self) -> BoolExpr:
        parts = [self.conj()]
        while self.at("|"):
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> BoolExpr:
        parts = [self.unary()]
        while self.at("&"):
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> BoolExpr:
        if self.at("!"):
            self.take()
            k, v, _ = self.peek()
            if k == "name" and not self._is_call(v):
                self.take()
                return Literal(self.resolve(v), True)
            return Not(self.unary())
        return self.atom()

    def _is_call(self, name: str) -> bool:
        nk, nv, _ = self.peek(1)
        return name in ("count", "exactly1") and nk == "op" and nv == "("

    def atom(self) -> BoolExpr:
        k, v, pos = self.peek()
        if k == "op" and v == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if k == "name":
            if self._is_call(v):
                self.take()
                self.take("(")
                if v == "count":
                    cmp = self.take(kind="op")
                    if cmp not in (">=", "<=", "="):
                        raise ParseError(f"bad comparator {cmp!r}", self.text, pos)
                    self.take(",")
                    kk = int(self.take(kind="num"))
                    self.take(";")
                    lits = self.lits()
                    self.take(")")
                    return Count(lits, cmp, kk)
                lits = self.lits()
                self.take(")")
                return Count(lits, "=", 1)
            self.take()
            return Literal(self.resolve(v))
        raise ParseError(f"unexpected {v or 'end of input'!r}", self.text, pos)

    def lits(self) -> tuple[Literal, ...]:
        out = [self.lit()]
        while self.at(","):
            self.take()
            out.append(self.lit())
        return tuple(out)

    def lit(self) -> Literal:
        neg = False
        if self.at("!"):
            self.take()
            neg = True
        return Literal(self.resolve(self.take(kind="name")), neg)


def parse_expr(text: str, resolve: Resolver) -> BoolExpr:
    """Parse ``text``; ``resolve`` maps names to VarIds (a registry also works)."""
    return _Parser(text, _resolver(resolve)).parse()


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _prec(e: BoolExpr) -> int:
    return _PREC.get(type(e), 5)


def format_expr(e: BoolExpr) -> str:
    if isinstance(e, Literal):
        return ("!" if e.negated else "") + e.var.name
    if isinstance(e, Not):
        inner = e.arg
        if isinstance(inner, Not):
            return "!" + format_expr(inner)
        return f"!({format_expr(inner)})"
    if isinstance(e, Count):
        lits = ", ".join(format_expr(l) for l in e.lits)
        if e.cmp == "=" and e.k == 1:
            return f"exactly1({lits})"
        return f"count({e.cmp}, {e.k}; {lits})"

    def sub(child: BoolExpr, strict: bool) -> str:
        p, own = _prec(child), _prec(e)
        wrap = p < own or (strict and p == own)
        s = format_expr(child)
        return f"({s})" if wrap else s

    if isinstance(e, (And, Or)):
        sep = " & " if isinstance(e, And) else " | "
        return sep.join(sub(a, True) for a in e.args)
    if isinstance(e, Implies):
        return f"{sub(e.lhs, True)} -> {sub(e.rhs, False)}"
    if isinstance(e, Iff):
        return f"{sub(e.lhs, True)} <-> {sub(e.rhs, True)}"
    raise TypeError(f"not a BoolExpr: {e!r}")


@dataclass
class ConstraintFile:
    scores: dict[str, float] = field(default_factory=dict)
    hard: list[BoolExpr] = field(default_factory=list)
    soft: list[tuple[float, BoolExpr]] = field(default_factory=list)


def parse_constraint_file(text: str, resolve: Resolver) -> ConstraintFile:
    resolve = _resolver(resolve)
    out = ConstraintFile()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head = line.split(None, 1)[0]
            if head == "score":
                parts = line.split()
                if len(parts) != 3:
                    raise ValueError("expected 'score <name> <number>'")
                resolve(parts[1])
                out.scores[parts[1]] = float(parts[2])
            elif head == "soft" and ":" in line:
                penalty, body = line[len("soft"):].split(":", 1)
                out.soft.append((float(penalty), parse_expr(body, resolve)))
            else:
                out.hard.append(parse_expr(line, resolve))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out
