import pytest

from provkit.coding import gn, to_int
from provkit.gallery import (
    FALSUM, GENERIC_PHI, ConsistencyVariant, MetadataOnly, PredicateTemplate, TemplateError, UnknownWitness,
    catalog, gallery, make_con, parity_normalize, pr_delta, strictly_below,
)
from provkit.hierarchy import classify
from provkit.levels import DELTA0, pi, sigma
from provkit.syntax import (
    And, Eq, Exists, ExtAtom, FnApp, Imp, Not, Truth, Var, Zero, count_logical_symbols, evaluate, numeral,
    parse, subterms, to_text,
)

X, Y, Z = Var("x"), Var("y"), Var("z")
FALSUM_NUMERAL = numeral(to_int(gn(parse("~(0 = 0)"))))


def atoms_in(phi):
    text = to_text(phi)
    return {name for name in ("Prf_T", "Even", "Sigma_z", "le") if f"Atom[{name}]" in text} | (
        {"n"} if "Fn[n]" in text else set())


def test_con_variants():
    phi = ExtAtom("Phi", (X,))
    assert make_con("L") == Not(ExtAtom("Phi", (FALSUM_NUMERAL,)))
    assert make_con(ConsistencyVariant.G) == Exists("x", And(ExtAtom("Fml", (X,)), Not(phi)))
    h = make_con("H")
    assert to_text(h) == "!A x (Atom[Fml](x) & Atom[Phi](x) -> ~Atom[Phi](Fn[neg](x)))"
    assert classify(make_con("L")) == pi(1)
    assert ConsistencyVariant.parse("σ1") is ConsistencyVariant.SIGMA1


def test_falsum_code():
    assert gn(FALSUM) == gn(parse("~(0 = 0)"))


def test_mostowski_shape():
    m = gallery("Mostowski")
    expected = Exists("y", And(ExtAtom("Prf_T", (X, Y)), Not(ExtAtom("Prf_T", (FALSUM_NUMERAL, Y)))))
    assert m.formula == expected
    assert classify(m.formula) == sigma(1)


def test_psi_rejects_small_numerals():
    psi = gallery("Psi")
    assert psi.formula == parse("~(x = x)")
    assert all(evaluate(psi.at(numeral(n))) is Truth.FALSE for n in range(21))


def test_pr_delta_guard_shape():
    delta = parse("Atom[le](x, z) | Atom[Even](x)")
    t = pr_delta(delta)
    guard = strictly_below("z", Y, Imp(ExtAtom("Prf_T", (FALSUM_NUMERAL, Z)), delta))
    assert t.formula == Exists("y", And(ExtAtom("Prf_T", (X, Y)), guard))
    assert t.level_matches()


def test_pr_delta_rejects_unbounded_delta():
    with pytest.raises(TemplateError):
        pr_delta(parse("!E w (x = w)"))
    with pytest.raises(TemplateError):
        pr_delta(parse("x = y"))


def test_witness_templates():
    assert atoms_in(gallery("PR_I").formula) >= {"le", "Even"}
    assert "n" in atoms_in(gallery("PR_II").formula)
    assert "Sigma_z" in atoms_in(gallery("PR_III").formula)
    assert count_logical_symbols(gallery("PR_I").formula) % 2 == 1


def test_every_template_classifies_as_declared():
    for name, entry in catalog().items():
        if isinstance(entry, PredicateTemplate):
            assert entry.level_matches(), name


def test_sigma1_templates():
    sigma1 = [n for n, e in catalog().items() if isinstance(e, PredicateTemplate) and e.declared_level == sigma(1)]
    assert {"PR_T", "Mostowski", "PR_I", "PR_II", "PR_III", "PR_VI", "PR_star"} <= set(sigma1)
    assert gallery("numeration_Q").declared_level == DELTA0


def test_parity_normalize():
    even = PredicateTemplate("e", parse("x = 0 & x = x"), DELTA0, "")
    assert count_logical_symbols(even.formula) == 1
    two = PredicateTemplate("t", parse("x = 0 & ~(x = 0)"), DELTA0, "")
    fixed = parity_normalize(two)
    assert fixed.formula == And(two.formula, Eq(Zero(), Zero()))
    assert count_logical_symbols(fixed.formula) % 2 == 1
    assert parity_normalize(fixed) == fixed
    assert parity_normalize(even) == even


def test_metadata_entries():
    for name in ("Feferman", "Arai_A1", "Arai_A2", "Kurahashi_R1", "Kurahashi_R2", "Kurahashi_R3", "PR_IV", "PR_V"):
        assert isinstance(gallery(name), MetadataOnly)


def test_lookup_aliases():
    assert gallery("PR^III") is gallery("PR_III")
    assert gallery("PR*") is gallery("PR_star")
    with pytest.raises(UnknownWitness):
        gallery("nope")


def test_pr_vi_excludes_one_code():
    f = gallery("PR_VI").formula
    assert isinstance(f, And) and isinstance(f.right, Not)


def test_fdt_uses_imp_function():
    f = gallery("FDT").formula
    assert any(isinstance(t, FnApp) and t.symbol == "imp" for t in subterms(f.left.right.args[0]))
