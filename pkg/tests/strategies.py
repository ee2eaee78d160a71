"""Hypothesis generators shared by the test modules."""
from hypothesis import strategies as st

from provkit import modal as md
from provkit.syntax import (
    Add, And, BExists, BForall, Eq, Exists, ExtAtom, Forall, Imp, Mul, Not, Or, Succ, Var, Zero,
)

VARS = ("x", "y", "z")


def terms(max_depth=3, names=VARS):
    leaves = st.one_of(st.just(Zero()), st.sampled_from(names).map(Var))
    if max_depth == 0:
        return leaves
    sub = terms(max_depth - 1, names)
    return st.one_of(
        leaves,
        sub.map(Succ),
        st.builds(Add, sub, sub),
        st.builds(Mul, sub, sub),
    )


def qf_formulas(max_depth=3, term_depth=2, names=VARS):
    """Quantifier-free formulas over the core signature."""
    atom = st.builds(Eq, terms(term_depth, names), terms(term_depth, names))
    if max_depth == 0:
        return atom
    sub = qf_formulas(max_depth - 1, term_depth, names)
    return st.one_of(
        atom,
        sub.map(Not),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Imp, sub, sub),
    )


def formulas(max_depth=3, term_depth=2, bounded_only=False):
    """Arithmetic formulas, optionally with bounded quantifiers only (decidable)."""
    small = terms(term_depth)
    atom = st.one_of(
        st.builds(Eq, small, small),
        st.builds(lambda a, b: ExtAtom("le", (a, b)), small, small),
    )
    if max_depth == 0:
        return atom
    sub = formulas(max_depth - 1, term_depth, bounded_only)
    var = st.sampled_from(VARS)
    bound = terms(1)
    options = [
        atom,
        sub.map(Not),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Imp, sub, sub),
        st.builds(BForall, var, bound, sub),
        st.builds(BExists, var, bound, sub),
    ]
    if not bounded_only:
        options += [st.builds(Forall, var, sub), st.builds(Exists, var, sub)]
    return st.one_of(*options)


def modal_formulas(max_depth=3, indices=(0,), names=("p", "q")):
    leaves = st.one_of(st.sampled_from(names).map(md.PropVar), st.just(md.BOT))
    if max_depth == 0:
        return leaves
    sub = modal_formulas(max_depth - 1, indices, names)
    return st.one_of(
        leaves,
        sub.map(md.MNot),
        st.builds(md.MAnd, sub, sub),
        st.builds(md.MOr, sub, sub),
        st.builds(md.MImp, sub, sub),
        st.builds(md.Box, st.sampled_from(indices), sub),
    )


@st.composite
def cs2_models(draw, max_worlds=5, names=("p", "q")):
    """Random valid CS2 models: a random strict order is a sub-relation of a random linear order."""
    n = draw(st.integers(1, max_worlds))
    worlds = ["b"] + [f"w{i}" for i in range(1, n)]
    rank = draw(st.permutations(range(1, n))) if n > 1 else []
    pos = {w: r for w, r in zip(worlds[1:], rank)}
    order = {("b", w) for w in worlds[1:]}
    for a in worlds[1:]:
        for b in worlds[1:]:
            if pos[a] < pos[b] and draw(st.booleans()):
                order.add((a, b))
    # transitive closure
    changed = True
    while changed:
        changed = False
        for a, b in list(order):
            for c, d in list(order):
                if b == c and (a, d) not in order:
                    order.add((a, d))
                    changed = True
    k0, k1 = {"b"}, {"b"}
    for w in worlds[1:]:
        which = draw(st.sampled_from(("0", "1", "01")))
        if "0" in which:
            k0.add(w)
        if "1" in which:
            k1.add(w)
    val = {w: frozenset(v for v in names if draw(st.booleans())) for w in worlds}
    return md.CS2Model(tuple(worlds), frozenset(k0), frozenset(k1), frozenset(order), "b", val)
