import pytest
from hypothesis import given, settings, strategies as st

from provkit.syntax import (
    Add, And, Eq, Exists, ExtAtom, Forall, Not, Or, ParseError, Succ, Truth, Var, Zero,
    count_logical_symbols, count_negations, evaluate, free_vars, from_json, nnf, numeral, parse,
    substitute, term_complexity, to_json, to_text, to_unicode,
)

from strategies import VARS, formulas

X, Y = Var("x"), Var("y")


def test_parse_literals():
    assert parse("0 = 0") == Eq(Zero(), Zero())
    assert parse("!A x (x = x)") == Forall("x", Eq(X, X))


def test_parse_precedence_and_atoms():
    phi = parse("~x = 0 & y = 0 -> Atom[le](x, s(y))")
    assert isinstance(phi.left, And)
    assert phi.right == ExtAtom("le", (X, Succ(Y)))


def test_unicode_aliases():
    assert parse("∀x (x = x) ∧ ¬(0 = s(0))") == parse("!A x (x = x) & ~(0 = s(0))")


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("x = = 0")
    assert "line 1, column 5" in str(err.value)
    with pytest.raises(ParseError):
        parse("Atom[nosuch](x)")


def test_substitute_examples():
    assert substitute(Eq(X, Zero()), "x", Succ(Zero())) == Eq(Succ(Zero()), Zero())
    renamed = substitute(Forall("x", Eq(X, Y)), "y", X)
    assert renamed == Forall("x'", Eq(Var("x'"), X))


def test_substitute_leaves_bound_occurrences():
    phi = Exists("x", Eq(X, Y))
    assert substitute(phi, "x", Zero()) == phi


def test_nnf_examples():
    zz = Eq(Zero(), Zero())
    assert nnf(Not(Not(zz))) == zz
    a, b = Eq(X, Zero()), Eq(Y, Zero())
    assert nnf(Not(And(a, b))) == Or(Not(a), Not(b))


def test_measures():
    assert term_complexity(X) == 0
    assert term_complexity(Add(X, Y)) == 1
    assert term_complexity(numeral(3)) == 4
    assert count_negations(Not(Not(Eq(Zero(), Zero())))) == 2
    assert count_logical_symbols(parse("!A x <= y . (x = 0 | ~x = y)")) == 3


def test_evaluate_examples():
    assert evaluate(parse("0 = 0"), {}, 0) is Truth.TRUE
    assert evaluate(parse("!E z (s(z) = s(s(0)))"), {}, 5) is Truth.TRUE
    # false, but a bounded search may only say unknown
    assert evaluate(parse("!E z (z + s(z) = z)"), {}, 50) is Truth.UNKNOWN


def test_bounded_quantifiers_are_exact():
    assert evaluate(parse("!E z <= 3 . (z * z = 9)")) is Truth.TRUE
    assert evaluate(parse("!A z <= 3 . ~(z * z = 5)")) is Truth.TRUE
    assert evaluate(parse("!E z <= 2 . (z * z = 9)")) is Truth.FALSE


def test_long_successor_runs_print_compactly():
    t = numeral(40)
    assert to_text(t) == "s^40(0)"
    assert parse(f"x = {to_text(t)}") == Eq(X, t)


@settings(max_examples=300)
@given(formulas())
def test_round_trip_text(phi):
    assert parse(to_text(phi)) == phi


@settings(max_examples=100)
@given(formulas())
def test_round_trip_unicode_and_json(phi):
    assert parse(to_unicode(phi)) == phi
    assert from_json(to_json(phi)) == phi


@settings(max_examples=300)
@given(formulas())
def test_nnf_idempotent(phi):
    once = nnf(phi)
    assert nnf(once) == once
    assert nnf(Not(Not(phi))) == once


@settings(max_examples=200)
@given(formulas(bounded_only=True), st.sampled_from(VARS), st.integers(0, 4),
       st.fixed_dictionaries({v: st.integers(0, 3) for v in VARS}))
def test_substitution_commutes_with_evaluation(phi, v, n, env):
    lhs = evaluate(substitute(phi, v, numeral(n)), env)
    assert lhs == evaluate(phi, {**env, v: n})


@settings(max_examples=100)
@given(formulas(max_depth=2), st.fixed_dictionaries({v: st.integers(0, 2) for v in VARS}))
def test_evaluate_monotone_in_bound(phi, env):
    seen = None
    for k in range(4):
        val = evaluate(phi, env, k)
        if seen is not None:
            assert val is seen
        if val is not Truth.UNKNOWN:
            seen = val


@given(formulas(max_depth=2))
def test_free_vars_survive_round_trip(phi):
    assert free_vars(parse(to_text(phi))) == free_vars(phi)
