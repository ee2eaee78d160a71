import json
import time

import pytest
from hypothesis import given, settings, strategies as st

from provkit import modal as md
from provkit.modal import (
    BOT, Box, CS2Model, DerivationCertificate, DerivationError, DerivationLine, Justification, MImp, MNot,
    PropVar, check_cs2_model, cs2_check_derivation, cs2_countermodel_search, gl_decide, mc_cs2, mformat,
    mparse,
)

from strategies import cs2_models, modal_formulas

P = PropVar("p")


def extension(m, a):
    """Set of worlds forcing a, computed bottom-up over subformulas (independent of mc_cs2)."""
    W = set(m.worlds)
    if isinstance(a, md.PropVar):
        return {w for w in W if a.name in m.valuation.get(w, ())}
    if isinstance(a, md.Bottom):
        return set()
    if isinstance(a, md.MNot):
        return W - extension(m, a.body)
    if isinstance(a, md.MAnd):
        return extension(m, a.left) & extension(m, a.right)
    if isinstance(a, md.MOr):
        return extension(m, a.left) | extension(m, a.right)
    if isinstance(a, md.MImp):
        return (W - extension(m, a.left)) | extension(m, a.right)
    inner = extension(m, a.body)
    k = m.k0 if a.index == 0 else m.k1
    return {x for x in W if all(y in inner for (u, y) in m.order if u == x and y in k)}


def one_line(text, **why):
    return DerivationCertificate((DerivationLine(mparse(text), Justification(**why)),))


# ------------------------------------------------------------------ syntax


def test_parse_and_print():
    a = mparse("[0]p & [1]~p -> [0]F | [1]F")
    assert a == MImp(md.MAnd(Box(0, P), Box(1, MNot(P))), md.MOr(Box(0, BOT), Box(1, BOT)))
    assert mformat(a) == "[0]p & [1]~p -> [0]F | [1]F"
    assert mparse("□(□p → p) → □p") == mparse("[]([]p -> p) -> []p")
    assert mparse("<>p") == MNot(Box(0, MNot(P)))


def test_parse_errors():
    with pytest.raises(md.ModalParseError):
        mparse("[2]p")
    with pytest.raises(md.ModalParseError):
        mparse("p &")


@settings(max_examples=300)
@given(modal_formulas(4, indices=(0, 1)))
def test_print_parse_round_trip(a):
    assert mparse(mformat(a)) == a
    assert md.mfrom_json(json.loads(json.dumps(md.mto_json(a)))) == a


# ------------------------------------------------------------------ models


def test_mt2_model():
    m = md.mt2_model()
    assert check_cs2_model(m) == []
    assert mc_cs2(m, "b", mparse(md.MT2_ROOT_FACT))
    assert not mc_cs2(m, "b", mparse(md.MT2_FORMULA))


def test_leaves_force_boxed_falsum():
    m = md.mt2_model()
    for leaf in ("x0", "x1"):
        assert mc_cs2(m, leaf, mparse("[0]F & [1]F"))


def test_model_violations():
    m = md.mt2_model()
    reflexive = CS2Model(m.worlds, m.k0, m.k1, m.order | {("x0", "x0")}, m.root, m.valuation)
    assert any(v.startswith("strictness") for v in check_cs2_model(reflexive))
    no_root = CS2Model(m.worlds, m.k0, m.k1 - {"b"}, m.order, m.root, m.valuation)
    assert any(v.startswith("root membership") for v in check_cs2_model(no_root))
    loose = CS2Model(m.worlds + ("y",), m.k0, m.k1, m.order, m.root, m.valuation)
    found = check_cs2_model(loose)
    assert any(v.startswith("cover") for v in found) and any(v.startswith("root order") for v in found)
    with pytest.raises(md.ModelError):
        mc_cs2(reflexive, "b", P)
    with pytest.raises(md.ModelError):
        mc_cs2(m, "nowhere", P)


def test_model_json_round_trip():
    m = md.mt2_model()
    assert CS2Model.from_json(json.loads(json.dumps(m.to_json()))) == m


@settings(max_examples=1000, deadline=None)
@given(cs2_models(5), modal_formulas(4, indices=(0, 1)))
def test_mc_matches_set_semantics(m, a):
    assert check_cs2_model(m) == []
    ext = extension(m, a)
    assert all(mc_cs2(m, w, a, validate=False) == (w in ext) for w in m.worlds)


# ------------------------------------------------------------------ GL


def test_gl_examples():
    assert gl_decide(mparse("[]([]p -> p) -> []p")).theorem
    assert gl_decide(mparse("[]~[]F -> []F")).theorem
    res = gl_decide(mparse("[]p -> p"))
    assert not res.theorem
    assert check_cs2_model(res.countermodel) == []
    assert not mc_cs2(res.countermodel, "b", mparse("[]p -> p"))


def test_gl_known_verdicts():
    theorems = ["[]p -> [][]p", "[](p -> q) -> ([]p -> []q)", "[](p <-> ~[]p) -> [](p <-> ~[]F)", "~[]F -> ~[]~[]F"]
    non_theorems = ["~[]F", "[][]F -> []F", "<>T -> <><>T", "[](p | q) -> []p | []q"]
    for t in theorems:
        assert gl_decide(mparse(t)).theorem, t
    for t in non_theorems:
        res = gl_decide(mparse(t))
        assert not res.theorem and not mc_cs2(res.countermodel, "b", mparse(t)), t


def test_gl_needs_unimodal():
    with pytest.raises(ValueError):
        gl_decide(mparse("[1]p -> p"))


def test_gl_verdicts_backed_by_certificates():
    assert cs2_check_derivation(md.lob_certificate(), mparse("[]([]p -> p) -> []p"))
    assert cs2_check_derivation(md.second_incompleteness_certificate(), mparse("[]~[]F -> []F"))


@settings(max_examples=100, deadline=None)
@given(modal_formulas(3))
def test_gl_agrees_with_brute_force(a):
    res = gl_decide(a)
    found = md.gl_model_search(a, 4)
    assert res.theorem == (found is None)
    if found is not None:
        assert not mc_cs2(found, found.root, a)


# ------------------------------------------------------------------ derivations


def test_derivation_examples():
    assert cs2_check_derivation(one_line("p | ~p", kind="taut"), mparse("p | ~p"))
    assert cs2_check_derivation(one_line("[0]p -> [1][0]p", kind="axiom", axiom="4"), mparse("[0]p -> [1][0]p"))
    broken = DerivationCertificate((
        DerivationLine(mparse("p"), Justification("taut")),
    ))
    assert not cs2_check_derivation(broken, mparse("p"))


def test_broken_mp_reference():
    cert = DerivationCertificate((
        DerivationLine(mparse("[0]p -> [1][0]p"), Justification("axiom")),
        DerivationLine(mparse("p | ~p"), Justification("taut")),
        DerivationLine(mparse("[1][0]p"), Justification("mp", (1, 0))),
    ))
    assert not cs2_check_derivation(cert, mparse("[1][0]p"))
    bad_index = DerivationCertificate(cert.lines[:2] + (DerivationLine(mparse("q"), Justification("mp", (0, 7))),))
    with pytest.raises(DerivationError):
        cs2_check_derivation(bad_index, mparse("q"))


def test_subst_and_nec():
    q_and_r = mparse("q & r")
    cert = DerivationCertificate((
        DerivationLine(mparse("[1]([1]p -> p) -> [1]p"), Justification("axiom", axiom="L")),
        DerivationLine(md.msubstitute(mparse("[1]([1]p -> p) -> [1]p"), {"p": q_and_r}),
                       Justification("subst", (0,), subst={"p": q_and_r})),
        DerivationLine(mparse("[0]([1]([1](q & r) -> q & r) -> [1](q & r))"), Justification("nec", (1,), box=0)),
    ))
    assert cs2_check_derivation(cert, cert.lines[-1].formula)
    wrong = DerivationCertificate(cert.lines[:2] + (
        DerivationLine(mparse("[1]([1]([1](q & r) -> q & r) -> [1](q & r))"), Justification("nec", (1,), box=0)),))
    assert not cs2_check_derivation(wrong, wrong.lines[-1].formula)


def test_certificate_json_round_trip():
    cert = md.second_incompleteness_certificate()
    doc = json.loads(json.dumps(cert.to_json()))
    assert DerivationCertificate.from_json(doc) == cert


def test_axiom_recognition():
    assert md.axiom_kind(mparse("[1](p -> q) -> ([1]p -> [1]q)")) == "K"
    assert md.axiom_kind(mparse("[1]p -> [0][1]p")) == "4"
    assert md.axiom_kind(mparse("[0]([0]p -> p) -> [0]p")) == "L"
    assert md.axiom_kind(mparse("[0]([1]p -> p) -> [0]p")) is None
    assert md.axiom_kind(mparse("[0](p -> q) -> ([1]p -> [1]q)")) is None


SOUND_CERTS = [
    md.lob_certificate(0), md.lob_certificate(1), md.second_incompleteness_certificate(),
    one_line("[0]p -> [1][0]p", kind="axiom"), one_line("[1]p -> [0][1]p", kind="axiom"),
    one_line("[1](p -> [0]p) -> ([1]p -> [1][0]p)", kind="axiom"),
]


def test_certified_formulas_hold_on_small_models():
    for cert in SOUND_CERTS:
        assert cs2_check_derivation(cert, cert.lines[-1].formula)
        for line in cert.lines:
            for m in md.enumerate_cs2_models(md.prop_vars(line.formula), 4):
                assert mc_cs2(m, m.root, line.formula, validate=False), mformat(line.formula)


@settings(max_examples=40, deadline=None)
@given(modal_formulas(2, indices=(0, 1), names=("p",)), st.sampled_from([0, 1]), st.sampled_from([0, 1]))
def test_generated_axiom_instances_sound(a, i, j):
    for text in (f"[{i}]A -> [{j}][{i}]A", f"[{i}]([{i}]A -> A) -> [{i}]A"):
        inst = md.msubstitute(mparse(text.replace("A", "a")), {"a": a})
        assert md.axiom_kind(inst) is not None
        for m in md.enumerate_cs2_models(md.prop_vars(inst), 3):
            assert mc_cs2(m, m.root, inst, validate=False)


# ------------------------------------------------------------------ CS2 search


def test_search_finds_mt2_model():
    start = time.perf_counter()
    m = cs2_countermodel_search(mparse(md.MT2_FORMULA), 3)
    assert time.perf_counter() - start < 1
    assert md.isomorphic(m, md.mt2_model())


def test_search_finds_nothing_for_tautology():
    assert cs2_countermodel_search(mparse("p -> p | q"), 3) is None
    with pytest.raises(ValueError):
        cs2_countermodel_search(P, 0)


@settings(max_examples=100, deadline=None)
@given(modal_formulas(3, indices=(0, 1)))
def test_search_results_verify(a):
    m = cs2_countermodel_search(a, 3)
    if m is not None:
        assert check_cs2_model(m) == []
        assert not mc_cs2(m, m.root, a)


def test_isomorphism_respects_structure():
    m = md.mt2_model()
    chained = CS2Model(m.worlds, m.k0, m.k1, m.order | {("x0", "x1")}, m.root, m.valuation)
    assert not md.isomorphic(m, chained)
    renamed = CS2Model(("r", "a", "c"), frozenset({"r", "c"}), frozenset({"r", "a"}),
                       frozenset({("r", "a"), ("r", "c")}), "r", {"c": frozenset({"p"})})
    assert md.isomorphic(m, renamed)
