import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import registry_case
from logic2ilp import oracles
from logic2ilp.boolexpr import (
    And,
    Clause,
    ClauseBudgetExceeded,
    Count,
    CountNotSupported,
    Iff,
    Implies,
    Literal,
    MissingVariableError,
    Not,
    Or,
    RegistryExhausted,
    VarRegistry,
    at_least,
    at_most,
    evaluate,
    evaluate_many,
    exactly_one,
    to_cnf_distributive,
    to_cnf_tseitin,
    to_nnf,
    variables,
)
from logic2ilp.syntax import ParseError, format_expr, parse_constraint_file, parse_expr


@pytest.fixture
def reg():
    return VarRegistry()


@pytest.fixture
def ys(reg):
    return [reg.var(f"y{i}") for i in range(1, 5)]


def lit(v, neg=False):
    return Literal(v, neg)


def clause_names(cnf):
    return {tuple(("!" if l.negated else "") + l.var.name for l in c.sorted()) for c in cnf.clauses}


def bits(expr, vs):
    return {"".join(str(a[v]) for v in vs) for a in oracles.enumerate_models(expr, vs)}


def cnf_mask(cnf, vs):
    """Satisfaction of ``cnf`` over ``assignment_matrix(len(vs))``."""
    X = oracles.assignment_matrix(len(vs)).astype(bool)
    col = {v: k for k, v in enumerate(vs)}
    ok = np.ones(X.shape[0], dtype=bool)
    for c in cnf.clauses:
        sat = np.zeros(X.shape[0], dtype=bool)
        for l in c.literals:
            sat |= ~X[:, col[l.var]] if l.negated else X[:, col[l.var]]
        ok &= sat
    return ok


def mask_bits(mask, k):
    X = oracles.assignment_matrix(k)
    return {"".join(map(str, X[i])) for i in np.flatnonzero(mask)}


def tseitin_projection(cnf, vs):
    aux = list(cnf.aux_vars)
    mask = cnf_mask(cnf, list(vs) + aux).reshape(1 << len(vs), 1 << len(aux)).any(axis=1)
    return mask_bits(mask, len(vs))


class TestRegistry:
    def test_dense_ids_and_lookup(self, reg):
        a, b = reg.var("a"), reg.var("b")
        assert (a.id, b.id) == (0, 1)
        assert reg.var("a") is a and reg["b"] == b and "a" in reg and len(reg) == 2

    def test_fresh_names_do_not_collide(self, reg):
        reg.var("_t0")
        t = reg.fresh()
        assert t.name != "_t0" and t in list(reg)

    def test_cap(self):
        r = VarRegistry(max_vars=2)
        r.var("a"), r.var("b")
        with pytest.raises(RegistryExhausted):
            r.fresh()

    def test_empty_name_rejected(self, reg):
        with pytest.raises(ValueError):
            reg.var("")


class TestEvaluate:
    def test_conjunction_with_negation(self, ys):
        y1, y2 = ys[:2]
        assert evaluate(lit(y1) & ~lit(y2), {y1: 1, y2: 0}) is True

    def test_exactly_two_of_three_excludes_all_true(self, ys):
        y1, y2, y3 = ys[:3]
        assert not evaluate(Count((lit(y1), lit(y2), lit(y3)), "=", 2), {y1: 1, y2: 1, y3: 1})

    def test_iff_truth_table(self, ys):
        y1, y2, y3 = ys[:3]
        assert not evaluate(Iff(lit(y1) & lit(y2), lit(y3)), {y1: 1, y2: 1, y3: 0})

    def test_missing_variable_names_it(self, ys):
        y1, y2 = ys[:2]
        with pytest.raises(MissingVariableError) as info:
            evaluate(lit(y1) | lit(y2), {y1: 0})
        assert info.value.var == y2 and "y2" in str(info.value)

    def test_unsatisfiable_count_is_legal(self, ys):
        c = Count((lit(ys[0]),), ">=", 3)
        assert bits(c, ys[:1]) == set()

    def test_constructors(self, ys):
        a = [lit(v) for v in ys[:3]]
        assert exactly_one(a).cmp == "=" and at_least(2, a).k == 2 and at_most(1, a).cmp == "<="

    def test_vectorized_matches_scalar(self, ys):
        e = Implies(lit(ys[0]) | ~lit(ys[1]), Count(tuple(lit(v) for v in ys), ">=", 2))
        X = oracles.assignment_matrix(4)
        vec = evaluate_many(e, {v: X[:, k] for k, v in enumerate(ys)})
        scal = [evaluate(e, dict(zip(ys, map(int, row)))) for row in X]
        assert list(vec) == scal

    def test_operator_sugar(self, ys):
        a, b = lit(ys[0]), lit(ys[1])
        assert isinstance(a.implies(b), Implies) and isinstance(a.iff(b), Iff)
        assert isinstance(~(a & b), Not)


class TestNnf:
    def test_pushes_negation_to_literals(self, ys):
        e = to_nnf(Not(And((lit(ys[0]), Or((lit(ys[1]), Not(lit(ys[2]))))))))
        assert format_expr(e) == "!y1 | !y2 & y3"

    def test_negated_count_stays_nonnegative(self, ys):
        c = Count(tuple(lit(v) for v in ys[:3]), ">=", 0)
        n = to_nnf(Not(c))
        assert bits(n, ys[:3]) == set()
        assert all(getattr(x, "k", 0) >= 0 for x in [n] if isinstance(n, Count))


class TestDistributive:
    def test_first_worked_example(self, ys):
        y1, y2, y3 = ys[:3]
        cnf = to_cnf_distributive((lit(y1) & ~lit(y2)) | (lit(y1) & ~lit(y3)))
        assert clause_names(cnf) == {("y1",), ("!y2", "!y3")}
        assert cnf.aux_vars == ()

    def test_all_equal_example_has_six_clauses(self, ys):
        y1, y2, y3 = (lit(v) for v in ys[:3])
        cnf = to_cnf_distributive((y1 & y2 & y3) | (~y1 & ~y2 & ~y3))
        assert clause_names(cnf) == {
            ("y1", "!y2"), ("y1", "!y3"), ("!y1", "y2"), ("y2", "!y3"), ("!y1", "y3"), ("!y2", "y3"),
        }

    def test_single_literal(self, ys):
        assert clause_names(to_cnf_distributive(~lit(ys[0]))) == {("!y1",)}

    def test_tautology_dropped(self, ys):
        assert to_cnf_distributive(lit(ys[0]) | ~lit(ys[0])).clauses == ()

    def test_clause_flags_tautology(self, ys):
        assert Clause(frozenset({lit(ys[0]), ~lit(ys[0])})).tautological

    def test_rejects_count(self, ys):
        with pytest.raises(CountNotSupported):
            to_cnf_distributive(lit(ys[0]) | Count((lit(ys[1]),), ">=", 1))

    def test_clause_budget(self, reg):
        pairs = [(reg.var(f"a{i}"), reg.var(f"b{i}")) for i in range(12)]
        e = Or(tuple(lit(a) & lit(b) for a, b in pairs))
        with pytest.raises(ClauseBudgetExceeded):
            to_cnf_distributive(e, max_clauses=1000)

    def test_canonical_order_is_deterministic(self, ys):
        e = Iff(lit(ys[2]) | lit(ys[0]), lit(ys[1]))
        a, b = to_cnf_distributive(e), to_cnf_distributive(e)
        assert a == b
        keys = [c.sort_key for c in a.clauses]
        assert keys == sorted(keys)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**6))
    def test_equivalent_to_expr(self, seed):
        _, vs, e = registry_case(seed, max_vars=12)
        cnf = to_cnf_distributive(e)
        assert mask_bits(cnf_mask(cnf, vs), len(vs)) == bits(e, vs)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**6))
    def test_idempotent(self, seed):
        _, _, e = registry_case(seed, max_vars=8)
        once = to_cnf_distributive(e)
        if not once.clauses:
            return
        twice = to_cnf_distributive(once.to_expr())
        assert set(once.clauses) == set(twice.clauses)


class TestTseitin:
    def test_worked_example_projection(self, reg, ys):
        y1, y2, y3 = ys[:3]
        cnf = to_cnf_tseitin((lit(y1) & ~lit(y2)) | (lit(y1) & ~lit(y3)), reg)
        assert len(cnf.aux_vars) == 2
        assert tseitin_projection(cnf, [y1, y2, y3]) == {"100", "101", "110"}

    def test_leaf(self, reg, ys):
        cnf = to_cnf_tseitin(lit(ys[0]), reg)
        assert clause_names(cnf) == {("y1",)} and cnf.aux_vars == ()

    def test_iff_projection(self, reg, ys):
        cnf = to_cnf_tseitin(Iff(lit(ys[0]), lit(ys[1])), reg)
        assert tseitin_projection(cnf, ys[:2]) == {"00", "11"}

    def test_aux_disjoint_from_originals(self, reg, ys):
        cnf = to_cnf_tseitin(Or((lit(ys[0]) & lit(ys[1]), Iff(lit(ys[2]), lit(ys[3])))), reg)
        assert not set(cnf.aux_vars) & set(ys)

    def test_rejects_count(self, reg, ys):
        with pytest.raises(CountNotSupported):
            to_cnf_tseitin(Count((lit(ys[0]),), "=", 1), reg)

    def test_linear_size(self, reg):
        pairs = [(reg.var(f"a{i}"), reg.var(f"b{i}")) for i in range(30)]
        cnf = to_cnf_tseitin(Or(tuple(lit(a) & lit(b) for a, b in pairs)), reg)
        assert len(cnf.clauses) <= 3 * 30 + 1

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**6))
    def test_projection_equals_models(self, seed):
        reg, vs, e = registry_case(seed, max_vars=10)
        cnf = to_cnf_tseitin(e, reg)
        if len(vs) + len(cnf.aux_vars) <= 22:
            assert tseitin_projection(cnf, vs) == bits(e, vs)


class TestSyntax:
    def test_precedence(self, reg):
        e = parse_expr("a & b | !c -> d <-> e", reg)
        assert isinstance(e, Iff) and isinstance(e.lhs, Implies)
        assert format_expr(e) == "a & b | !c -> d <-> e"

    def test_implication_is_right_associative(self, reg):
        e = parse_expr("a -> b -> c", reg)
        assert isinstance(e, Implies) and isinstance(e.rhs, Implies)

    def test_count_and_exactly1(self, reg):
        e = parse_expr("count(>=, 2; a, !b, c) & exactly1(a, b)", reg)
        assert isinstance(e.args[0], Count) and e.args[0].k == 2
        assert e.args[1] == Count((lit(reg["a"]), lit(reg["b"])), "=", 1)

    def test_not_over_group(self, reg):
        e = parse_expr("!(a | b)", reg)
        assert isinstance(e, Not)

    @pytest.mark.parametrize("text", ["a &", "(a | b", "count(>, 1; a)", "a <-> b <-> c", "1a", "a $ b"])
    def test_errors(self, reg, text):
        with pytest.raises(ParseError):
            parse_expr(text, reg)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**6))
    def test_round_trip(self, seed):
        reg, vs, e = registry_case(seed)
        back = parse_expr(format_expr(e), reg)
        assert bits(back, vs) == bits(e, vs)
        # printing is a fixpoint after one parse (single-operand And/Or vanish)
        assert format_expr(parse_expr(format_expr(back), reg)) == format_expr(back)

    def test_constraint_file(self, reg):
        spec = parse_constraint_file(
            "# demo\nscore a 2.5\nscore b -1\na -> b   # trailing comment\nsoft 3 : !a\n", reg
        )
        assert spec.scores == {"a": 2.5, "b": -1.0}
        assert len(spec.hard) == 1 and spec.soft[0][0] == 3.0

    def test_constraint_file_error_has_line(self, reg):
        with pytest.raises(ValueError, match="line 2"):
            parse_constraint_file("a\nscore a x\n", reg)

    def test_variables_sorted(self, reg):
        e = parse_expr("c | a | b", reg)
        assert [v.name for v in variables(e)] == ["c", "a", "b"]
