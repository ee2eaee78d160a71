import random

import pytest
from hypothesis import given, settings, strategies as st

from provkit.coding import (
    SCHEME, BigPair, DecodeError, Tower, decode, dotted_instance, gn, num_value, numeral, pair, sub_eval,
    to_int, unpair,
)
from provkit.syntax import (
    Add, And, BExists, BForall, Eq, Exists, ExtAtom, FnApp, Forall, Imp, Mul, Not, Or, Succ, Var, Zero,
    free_vars, parse, substitute, substitute_all,
)

from strategies import formulas, terms


def terms_by_depth(leaves, depth):
    """Every term whose longest root-to-leaf path has at most ``depth`` nodes."""
    levels = [list(leaves)]
    for _ in range(1, depth):
        below = [t for lv in levels for t in lv]
        top = levels[-1]
        older = below[: len(below) - len(top)]
        new = [Succ(a) for a in top]
        for op in (Add, Mul):
            new += [op(a, b) for a in top for b in below] + [op(a, b) for a in older for b in top]
        levels.append(new)
    return [t for lv in levels for t in lv]


def test_pair_small_values():
    assert pair(0, 0) == 0
    assert pair(0, 1) == 2
    assert pair(1, 0) == 1
    assert [pair(a, b) for a, b in [(2, 0), (1, 1), (0, 2)]] == [3, 4, 5]


def test_unpair_inverts_pair_on_random_pairs():
    rng = random.Random(7)
    for _ in range(10_000):
        a, b = rng.randrange(10**12), rng.randrange(10**12)
        assert unpair(pair(a, b)) == (a, b)


@given(st.integers(0, 10**6))
def test_pair_is_onto(c):
    assert pair(*unpair(c)) == c


def test_succ_tag_is_zero():
    assert SCHEME.tags["Succ"] == 0
    assert gn(Succ(Zero())) == pair(0, gn(Zero()))


@settings(max_examples=200)
@given(terms())
def test_succ_recurrence(t):
    assert gn(Succ(t)) == pair(0, gn(t))


def test_known_codes():
    # gn(0) = <1, 0> = 1;  gn(0 = 0) = <6, <1, 1>> = <6, 4> = 59
    assert gn(Zero()) == 1
    assert gn(Eq(Zero(), Zero())) == 59


def test_numerals():
    assert numeral(0) == Zero()
    assert numeral(2) == Succ(Succ(Zero()))
    assert gn(numeral(3)) == num_value(3)
    assert num_value(0) == gn(Zero())
    for n in range(21):
        assert num_value(n + 1) == pair(0, num_value(n))


def test_big_codes_stay_exact():
    big = num_value(40)
    assert isinstance(big, Tower)
    assert big == pair(0, num_value(39))
    assert isinstance(big.base, int) and big.count < 40  # lower layers stay plain ints
    assert decode(big) == numeral(40)


def test_gn_injective_on_small_terms():
    corpus = terms_by_depth([Var("x"), Var("y")], 4)
    assert len(corpus) == 182_712
    assert len({gn(t) for t in corpus}) == len(corpus)
    with_zero = terms_by_depth([Zero(), Var("x"), Var("y")], 3)
    assert len({gn(t) for t in with_zero}) == len(with_zero) == 1179


@settings(max_examples=300)
@given(formulas())
def test_decode_inverts_gn(phi):
    assert decode(gn(phi)) == phi


def test_decode_rejects_junk():
    with pytest.raises(DecodeError):
        decode(pair(99, 0))
    with pytest.raises(DecodeError):
        sub_eval(gn(Zero()), 0)


# an independent second path for dotted codes: walk the formula and put num_value(n)
# in place of each free occurrence, pairing by hand

_TAG = dict(SCHEME.tags)


def _name(s):
    return int.from_bytes(s.encode(), "big")


def _code(node, env):
    if isinstance(node, Var):
        return num_value(env[node.name]) if node.name in env else pair(_TAG["Var"], _name(node.name))
    if isinstance(node, Zero):
        return pair(_TAG["Zero"], 0)
    if isinstance(node, Succ):
        c = _code(node.arg, env)
        for _ in range(node.times):
            c = pair(0, c)
        return c
    if isinstance(node, (Add, Mul, Eq, And, Or, Imp)):
        return pair(_TAG[type(node).__name__], pair(_code(node.left, env), _code(node.right, env)))
    if isinstance(node, (ExtAtom, FnApp)):
        seq = 0
        for a in reversed(node.args):
            seq = pair(_code(a, env), seq)
        return pair(_TAG[type(node).__name__], pair(_name(node.symbol), pair(len(node.args), seq)))
    if isinstance(node, Not):
        return pair(_TAG["Not"], _code(node.body, env))
    inner_env = {k: v for k, v in env.items() if k != node.var}
    body = _code(node.body, inner_env)
    if isinstance(node, (BForall, BExists)):
        body = pair(_code(node.bound, env), body)
    return pair(_TAG[type(node).__name__], pair(_name(node.var), body))


@settings(max_examples=500)
@given(formulas(), st.fixed_dictionaries({v: st.integers(0, 5) for v in "xyz"}))
def test_dotted_instance_two_paths(phi, env):
    env = {v: env[v] for v in free_vars(phi)}
    assert dotted_instance(phi, env) == _code(phi, env)
    assert dotted_instance(phi, env) == gn(substitute_all(phi, {v: numeral(n) for v, n in env.items()}))


def test_dotted_instance_example():
    assert dotted_instance(parse("x = x"), {"x": 0}) == gn(parse("0 = 0"))


@settings(max_examples=100)
@given(formulas(), st.integers(0, 10), st.integers(0, 4))
def test_successor_substitution_identity(phi, n, m):
    # the code of phi(y, v) with v := s(u), instantiated at u = n, is the code of phi(y, s(u)) at u = n;
    # u is fresh for phi, as the identity presupposes
    phi = substitute(phi, "z", Var("v"))
    env = {v: m for v in free_vars(phi) - {"v"}}
    shifted = substitute(phi, "v", Succ(Var("u")))
    lhs = dotted_instance(phi, {**env, "v": n + 1})
    rhs = dotted_instance(shifted, {**env, "u": n})
    assert lhs == rhs


def test_sub_eval_examples():
    x_eq_x = parse("x = x")
    assert sub_eval(gn(x_eq_x), 0) == gn(parse("0 = 0"))
    for theta in (parse("~Atom[Phi](x)"), parse("!E y (x = y + y)"), parse("x = s(0) | Atom[le](x, x)")):
        code = gn(theta)
        assert sub_eval(code, code) == gn(substitute(theta, "x", numeral(to_int(code))))


def test_bigpair_used_for_wide_codes():
    phi = Eq(numeral(30), numeral(30))
    c = gn(phi)
    assert isinstance(c, BigPair) or isinstance(c, int)
    assert decode(c) == phi
