import json

import pytest
from hypothesis import given, settings, strategies as st

from provkit import lattice as L

from mutations import MUTATIONS

KB = L.default_kb()
S1 = L.phi_in("Sigma1")
PLAIN_ATOMS = sorted(a for a in L.PLAIN if a != "Ax") + [
    L.gamma_c("Sigma1"), L.gamma_c("Delta0"), L.gamma_cu("Sigma1"), L.gamma_cu("Delta0"), L.gamma_cg("Sigma1"),
    L.bm(2), L.bm(3), L.bum(2), L.bum(3),
]
QUERIES = PLAIN_ATOMS + [L.not_proves(v) for v in L.VARIANTS]
FLAG_SETS = [frozenset(), frozenset({S1}), frozenset({L.phi_in("Sigma2")}), frozenset({L.phi_in("Delta0")})]


def test_atom_parsing():
    assert L.parse_atom("SC") == "GammaC(Sigma1)"
    assert L.parse_atom("DCU") == "GammaCU(Delta0)"
    assert L.parse_atom("BU2") == "BUm(2)"
    assert L.parse_atom("~ConL") == "NotProves(L)"
    assert L.parse_atom("sigma1") == S1
    assert L.parse_atoms("D1, BU2") == {"D1", "BUm(2)"}
    with pytest.raises(ValueError):
        L.parse_atom("D9")


def test_closure_examples():
    assert {L.bm(m) for m in range(1, 7)} <= L.closure((), {"D1", "D2"}).derived
    cl = L.closure({S1}, {"D1", L.bum(2)})
    assert {L.gamma_cu("Sigma1"), "PCU", "CB", "DU1", "D3", L.gamma_c("Sigma1"), "PC"} <= cl.derived
    assert L.closure((), ()).derived == frozenset()


def test_entails_examples():
    v = L.entails({S1}, {"D1", "D2", "D3"}, L.gamma_c("Sigma1"))
    assert (v.answer, v.witness) == ("no", "PR^IV")
    v = L.entails({S1}, {"D1", L.bum(2)}, L.not_proves("L"))
    assert v.answer == "unknown" and v.problem.id == "Problem-UC3"
    v = L.entails((), {"D1", "D2", "D3"}, L.not_proves("L"))
    assert v.answer == "yes" and v.certificate.chain[-1] == "G2"


def test_mt_certificate():
    v = L.entails({S1}, {"D1", L.bum(2)}, L.gamma_cu("Sigma1"))
    assert v.answer == "yes" and "MT" in v.certificate.chain
    assert any(c == "Theorem MT" for c, _ in v.citations)


def test_unprovability_examples():
    assert set(L.unprovability({S1}, {L.bm(2), "CB", L.gamma_cu("Delta0")})) == {L.not_proves("H")}
    facts = L.unprovability({S1}, {"D1", "DG2", "PCG"})
    assert set(facts) == {L.not_proves(v) for v in L.VARIANTS}
    assert L.unprovability((), ()) == {}


def test_separation_examples():
    assert L.separation({S1, "D1", "D2", L.gamma_c("Sigma1")}, L.not_proves("Sigma1")) == "PR^II"
    assert L.separation({S1, "DU1", "DG2", L.gamma_cg("Sigma1")}, L.not_proves("G")) == "PR^III"
    assert L.separation({"D1"}, "D1") is None


def test_shipped_kb_passes_audit():
    assert L.kb_sanity(KB) == []


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_mutations_are_caught(name):
    assert L.kb_sanity(MUTATIONS[name](KB)), name


def test_json_round_trip():
    doc = json.loads(KB.dumps())
    assert {"atoms", "rules", "witnesses", "problems"} <= doc.keys()
    assert all(r["citation"] and r["quote"] for r in doc["rules"] + doc["witnesses"])
    assert L.KnowledgeBase.from_json(doc) == KB
    assert L.shipped_kb() == KB


def test_bad_version_rejected():
    doc = KB.to_json()
    doc["version"] = 99
    with pytest.raises(ValueError):
        L.KnowledgeBase.from_json(doc)


def test_intro_figure():
    checks = L.check_figure(KB)
    assert len(checks) == len(L.FIGURE_ARROWS)
    assert [c for c in checks if not c.ok] == []
    flags, base = L.FIGURE_CONTEXT
    for c in checks:
        back = L.closure(flags, base | L.FIGURE_NODES[c.target])
        assert not L.FIGURE_NODES[c.source] <= back.derived


def test_con_chain_order():
    # G-unprovability propagates down the chain; H needs D1
    cl = L.closure((), {L.not_proves("G")})
    assert {L.not_proves("Sigma1"), L.not_proves("L")} <= cl.derived
    assert L.not_proves("H") not in cl.derived
    assert L.not_proves("H") in L.closure((), {L.not_proves("G"), "D1"}).derived


def test_cap_configurable():
    small = L.build_kb(cap=3)
    assert L.bm(4) not in L.closure((), {"D1", "D2"}, small).derived
    with pytest.raises(ValueError):
        L.build_kb(cap=2)


def test_verdict_json_shape():
    v = L.entails({S1}, {"D1", "D2", "D3"}, L.gamma_c("Sigma1"))
    doc = v.to_json()
    assert doc["answer"] == "no" and doc["citations"][0]["quote"]


condition_sets = st.sets(st.sampled_from(PLAIN_ATOMS), max_size=5)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FLAG_SETS), condition_sets, condition_sets)
def test_closure_monotone_and_idempotent(flags, a, b):
    ca = L.closure(flags, a)
    cab = L.closure(flags, a | b)
    assert ca.derived <= cab.derived
    assert L.closure(flags, ca.derived).derived == ca.derived


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FLAG_SETS), condition_sets)
def test_certificates_replay(flags, conds):
    cl = L.closure(flags, conds)
    for atom in cl.derived - cl.given:
        assert atom in L.replay(cl.chain(atom), flags, conds)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FLAG_SETS), condition_sets, st.sampled_from(QUERIES))
def test_trichotomy(flags, conds, query):
    v = L.entails(flags, conds, query)
    assert v.answer in ("yes", "no", "unknown")
    if v.answer == "yes":
        assert L.separation(flags | conds, query) is None
    if v.answer == "unknown":
        assert v.citations
