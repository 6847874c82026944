"""Integer linear program data model.

A :class:`Model` always maximizes ``sum_i c_i * x_i``; minimization callers
negate their coefficients.  Every constraint carries a provenance tag naming
the recipe that emitted it.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from logic2ilp.boolexpr import Literal, RegistryExhausted, VarId

KINDS = ("binary", "integer", "continuous")
SENSES = ("<=", ">=", "=")
FEAS_TOL = 1e-6
SCHEMA_VERSION = 1


class ModelError(ValueError):
    pass


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class ModelVar:
    id: VarId
    kind: str
    lower: float
    upper: float
    objective_coeff: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown variable kind {self.kind!r}")
        if self.kind == "binary" and (self.lower, self.upper) != (0, 1):
            raise ModelError(f"binary variable {self.id.name!r} must have bounds [0, 1]")
        if math.isnan(self.lower) or math.isnan(self.upper) or self.lower > self.upper:
            raise ModelError(f"invalid bounds [{self.lower}, {self.upper}] for {self.id.name!r}")
        if not math.isfinite(self.objective_coeff):
            raise ModelError(f"objective coefficient of {self.id.name!r} must be finite")

    @property
    def name(self) -> str:
        return self.id.name

    @property
    def is_integral(self) -> bool:
        return self.kind != "continuous"


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[float, VarId], ...]
    sense: str
    rhs: float
    tag: str

    def lhs(self, assignment: Mapping[VarId, float]) -> float:
        return sum(c * assignment[v] for c, v in self.terms)

    def slack(self, assignment: Mapping[VarId, float]) -> float:
        """Signed satisfaction margin; negative means violated."""
        diff = self.lhs(assignment) - self.rhs
        if self.sense == "<=":
            return -diff
        if self.sense == ">=":
            return diff
        return -abs(diff)

    def __str__(self) -> str:
        return f"{_format_terms(self.terms) or '0'} {self.sense} {_num(self.rhs)}"


def coalesce(terms: Iterable[tuple[float, VarId]]) -> tuple[tuple[float, VarId], ...]:
    """Merge repeated variables; zero coefficients are dropped; order by id."""
    acc: dict[VarId, float] = {}
    for c, v in terms:
        acc[v] = acc.get(v, 0) + c
    return tuple((c, v) for v, c in sorted(acc.items()) if c != 0)


@dataclass
class Solution:
    status: str
    assignment: dict[VarId, float] = field(default_factory=dict)
    objective: float = float("nan")
    nodes: int = 0
    wall_s: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def value(self, var: VarId | Literal) -> float:
        if isinstance(var, Literal):
            x = self.assignment[var.var]
            return 1 - x if var.negated else x
        return self.assignment[var]

    def is_true(self, var: VarId | Literal) -> bool:
        return self.value(var) > 0.5

    def by_name(self) -> dict[str, float]:
        return {v.name: x for v, x in self.assignment.items()}


class Model:
    """Variables, linear rows and a maximization objective.

    Also acts as a variable registry (``fresh``) for the CNF machinery, so
    auxiliary variables land directly in the model as zero-cost binaries.
    """

    def __init__(self, max_vars: int = 1_000_000):
        self.vars: list[ModelVar] = []
        self.constraints: list[LinearConstraint] = []
        self._by_name: dict[str, ModelVar] = {}
        self._fresh = 0
        self.max_vars = max_vars

    # -- variables --------------------------------------------------------
    def add_var(
        self,
        kind: str,
        name: str,
        lower: float | None = None,
        upper: float | None = None,
        objective_coeff: float = 0.0,
    ) -> VarId:
        if name in self._by_name:
            raise ModelError(f"duplicate variable name {name!r}")
        if len(self.vars) >= self.max_vars:
            raise RegistryExhausted(f"model is capped at {self.max_vars} variables")
        if kind == "binary":
            lower = 0 if lower is None else lower
            upper = 1 if upper is None else upper
        else:
            lower = 0.0 if lower is None else lower
            upper = math.inf if upper is None else upper
        vid = VarId(len(self.vars), name)
        mv = ModelVar(vid, kind, lower, upper, float(objective_coeff))
        self.vars.append(mv)
        self._by_name[name] = mv
        return vid

    def binary(self, name: str, objective_coeff: float = 0.0) -> VarId:
        return self.add_var("binary", name, 0, 1, objective_coeff)

    def var(self, name: str) -> VarId:
        """Get-or-create a zero-cost binary (the registry protocol)."""
        mv = self._by_name.get(name)
        return mv.id if mv is not None else self.binary(name)

    def fresh(self, prefix: str = "_t") -> VarId:
        while f"{prefix}{self._fresh}" in self._by_name:
            self._fresh += 1
        name = f"{prefix}{self._fresh}"
        self._fresh += 1
        return self.binary(name)

    def __getitem__(self, name: str) -> VarId:
        return self._by_name[name].id

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def info(self, var: VarId) -> ModelVar:
        return self.vars[var.id]

    def set_objective(self, var: VarId, coeff: float) -> None:
        mv = self.vars[var.id]
        self._replace(mv, objective_coeff=float(coeff))

    def add_objective(self, var: VarId, coeff: float) -> None:
        mv = self.vars[var.id]
        self._replace(mv, objective_coeff=mv.objective_coeff + float(coeff))

    def _replace(self, mv: ModelVar, **changes) -> None:
        new = ModelVar(**{**mv.__dict__, **changes})
        self.vars[mv.id.id] = new
        self._by_name[mv.name] = new

    @property
    def num_vars(self) -> int:
        return len(self.vars)

    # -- constraints ------------------------------------------------------
    def add_constraint(
        self, terms: Iterable[tuple[float, VarId]], sense: str, rhs: float, tag: str
    ) -> int:
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        if not tag:
            raise ModelError("constraint tag must be non-empty")
        terms = list(terms)
        for c, v in terms:
            if not (0 <= v.id < len(self.vars)) or self.vars[v.id].id != v:
                raise ModelError(f"unknown variable {v!r}")
            if not math.isfinite(c):
                raise ModelError(f"non-finite coefficient {c} on {v.name!r}")
        if not math.isfinite(rhs):
            raise ModelError(f"non-finite right-hand side {rhs}")
        self.constraints.append(LinearConstraint(coalesce(terms), sense, rhs, tag))
        return len(self.constraints) - 1

    def tag_counts(self) -> Counter:
        return Counter(c.tag for c in self.constraints)

    def rows_since(self, start: int) -> list[LinearConstraint]:
        return self.constraints[start:]

    def objective_value(self, assignment: Mapping[VarId, float]) -> float:
        return sum(mv.objective_coeff * assignment.get(mv.id, 0.0) for mv in self.vars)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return self.vars == other.vars and self.constraints == other.constraints

    def __repr__(self) -> str:
        return f"Model({len(self.vars)} vars, {len(self.constraints)} constraints)"


# -- feasibility --------------------------------------------------------------


@dataclass
class Violation:
    index: int
    constraint: LinearConstraint
    slack: float

    def __str__(self) -> str:
        return f"row {self.index} [{self.constraint.tag}] {self.constraint}: slack {self.slack:g}"


@dataclass
class FeasibilityReport:
    violations: list[Violation] = field(default_factory=list)
    bound_violations: list[tuple[VarId, float]] = field(default_factory=list)
    integrality_violations: list[tuple[VarId, float]] = field(default_factory=list)
    missing: list[VarId] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not (
            self.violations or self.bound_violations or self.integrality_violations or self.missing
        )

    def __bool__(self) -> bool:
        return self.feasible

    def __str__(self) -> str:
        if self.feasible:
            return "feasible"
        lines = [str(v) for v in self.violations]
        lines += [f"bound violated: {v.name} = {x:g}" for v, x in self.bound_violations]
        lines += [f"not integral: {v.name} = {x:g}" for v, x in self.integrality_violations]
        lines += [f"unassigned: {v.name}" for v in self.missing]
        return "\n".join(lines)


def check_feasible(
    model: Model, assignment: Mapping[VarId, float], tol: float = FEAS_TOL
) -> FeasibilityReport:
    report = FeasibilityReport()
    for mv in model.vars:
        if mv.id not in assignment:
            report.missing.append(mv.id)
            continue
        x = assignment[mv.id]
        if x < mv.lower - tol or x > mv.upper + tol:
            report.bound_violations.append((mv.id, x))
        if mv.is_integral and abs(x - round(x)) > tol:
            report.integrality_violations.append((mv.id, x))
    if report.missing:
        return report
    for i, con in enumerate(model.constraints):
        s = con.slack(assignment)
        if s < -tol:
            report.violations.append(Violation(i, con, s))
    return report


# -- dense arrays -------------------------------------------------------------


@dataclass
class ModelArrays:
    """Dense matrix view used by the solvers."""

    A: np.ndarray
    senses: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integral: np.ndarray


def to_arrays(model: Model) -> ModelArrays:
    n, m = len(model.vars), len(model.constraints)
    A = np.zeros((m, n))
    for i, con in enumerate(model.constraints):
        for coef, v in con.terms:
            A[i, v.id] += coef
    return ModelArrays(
        A=A,
        senses=np.array([c.sense for c in model.constraints], dtype=object),
        b=np.array([c.rhs for c in model.constraints], dtype=float),
        c=np.array([mv.objective_coeff for mv in model.vars], dtype=float),
        lower=np.array([mv.lower for mv in model.vars], dtype=float),
        upper=np.array([mv.upper for mv in model.vars], dtype=float),
        integral=np.array([mv.is_integral for mv in model.vars], dtype=bool),
    )


# -- LP text format -----------------------------------------------------------


def _num(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _format_terms(terms: Sequence[tuple[float, VarId]]) -> str:
    parts = []
    for c, v in terms:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v.name if mag == 1 else f"{_num(mag)} {v.name}"
        if not parts:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def write_lp(model: Model) -> str:
    """Serialize in the common LP text format read by CPLEX, Gurobi, HiGHS, etc."""
    out = ["\\ generated by logic2ilp", "Maximize"]
    obj = [(mv.objective_coeff, mv.id) for mv in model.vars if mv.objective_coeff != 0]
    if not obj and model.vars:
        obj_text = f"0 {model.vars[0].name}"
    else:
        obj_text = _format_terms(obj)
    out.append(f"obj: {obj_text}".rstrip())
    out.append("Subject To")
    for i, con in enumerate(model.constraints):
        lhs = _format_terms(con.terms)
        if not lhs:
            lhs = f"0 {model.vars[0].name}" if model.vars else "0"
        out.append(f"c{i}: {lhs} {con.sense} {_num(con.rhs)}")
    out.append("Bounds")
    for mv in model.vars:
        if mv.kind == "binary":
            continue
        if mv.lower == -math.inf and mv.upper == math.inf:
            out.append(f"{mv.name} free")
        elif mv.lower == 0 and mv.upper == math.inf:
            continue
        elif mv.upper == math.inf:
            out.append(f"{mv.name} >= {_num(mv.lower)}")
        else:
            out.append(f"{_num(mv.lower)} <= {mv.name} <= {_num(mv.upper)}")
    binaries = [mv.name for mv in model.vars if mv.kind == "binary"]
    generals = [mv.name for mv in model.vars if mv.kind == "integer"]
    if binaries:
        out.append("Binary")
        out.extend(binaries)
    if generals:
        out.append("General")
        out.extend(generals)
    out.append("End")
    return "\n".join(out) + "\n"


# -- JSON ---------------------------------------------------------------------


def _bound_out(x: float):
    return None if math.isinf(x) else x


def model_to_dict(model: Model) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "sense": "maximize",
        "vars": [
            {
                "name": mv.name,
                "kind": mv.kind,
                "lower": _bound_out(mv.lower),
                "upper": _bound_out(mv.upper),
                "objective": mv.objective_coeff,
            }
            for mv in model.vars
        ],
        "constraints": [
            {
                "terms": [[c, v.name] for c, v in con.terms],
                "sense": con.sense,
                "rhs": con.rhs,
                "tag": con.tag,
            }
            for con in model.constraints
        ],
    }


def write_json(model: Model, indent: int | None = 1) -> str:
    return json.dumps(model_to_dict(model), indent=indent)


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise SchemaError(path, message)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def model_from_dict(data) -> Model:
    _require(isinstance(data, dict), "$", "expected an object")
    _require(data.get("schema") == SCHEMA_VERSION, "$.schema", f"expected {SCHEMA_VERSION}")
    _require(data.get("sense", "maximize") == "maximize", "$.sense", "only 'maximize' is supported")
    vars_ = data.get("vars")
    _require(isinstance(vars_, list), "$.vars", "expected a list")
    cons = data.get("constraints", [])
    _require(isinstance(cons, list), "$.constraints", "expected a list")

    model = Model()
    for i, v in enumerate(vars_):
        path = f"$.vars[{i}]"
        _require(isinstance(v, dict), path, "expected an object")
        name = v.get("name")
        _require(isinstance(name, str) and name != "", f"{path}.name", "expected a non-empty string")
        kind = v.get("kind")
        _require(kind in KINDS, f"{path}.kind", f"unknown kind {kind!r}")
        lo, hi = v.get("lower"), v.get("upper")
        _require(lo is None or _is_num(lo), f"{path}.lower", "expected a number or null")
        _require(hi is None or _is_num(hi), f"{path}.upper", "expected a number or null")
        obj = v.get("objective", 0.0)
        _require(_is_num(obj), f"{path}.objective", "expected a number")
        lo = -math.inf if lo is None else lo
        hi = math.inf if hi is None else hi
        if kind == "binary":
            lo, hi = int(lo), int(hi)
        try:
            model.add_var(kind, name, lo, hi, obj)
        except ModelError as exc:
            raise SchemaError(path, str(exc)) from None
    for i, c in enumerate(cons):
        path = f"$.constraints[{i}]"
        _require(isinstance(c, dict), path, "expected an object")
        terms = c.get("terms")
        _require(isinstance(terms, list), f"{path}.terms", "expected a list")
        parsed = []
        for j, t in enumerate(terms):
            tp = f"{path}.terms[{j}]"
            _require(isinstance(t, list) and len(t) == 2, tp, "expected [coeff, name]")
            _require(_is_num(t[0]), f"{tp}[0]", "expected a number")
            _require(t[1] in model, f"{tp}[1]", f"unknown variable {t[1]!r}")
            parsed.append((t[0], model[t[1]]))
        _require(c.get("sense") in SENSES, f"{path}.sense", f"unknown sense {c.get('sense')!r}")
        _require(_is_num(c.get("rhs")), f"{path}.rhs", "expected a number")
        tag = c.get("tag")
        _require(isinstance(tag, str) and tag != "", f"{path}.tag", "expected a non-empty string")
        model.add_constraint(parsed, c["sense"], c["rhs"], tag)
    return model


def read_json(text: str) -> Model:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return model_from_dict(data)
