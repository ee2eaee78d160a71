"""Consistency statements and the catalog of example provability predicates.

Every template has free variable ``x`` and is built over the uninterpreted
proof atom ``Prf_T``.  Predicates whose definitions need simultaneous fixed
points or outside constructions are catalogued as metadata only.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cache

from .coding import gn, to_int
from .hierarchy import classify, is_in
from .levels import DELTA0, Level, pi, sigma
from .syntax import (
    AtomSpec, And, BForall, Eq, Exists, ExtAtom, FnApp, Forall, Formula, Imp, Not, Or,
    Succ, Term, Var, Zero, conj, count_logical_symbols, disj, free_vars, iff, neq, numeral,
    register_atom, substitute,
)

X = Var("x")

register_atom(AtomSpec("Pr_T0", 1, sigma(1), doc="provability from the finite numeration [T0]"))
# the sentence parameter xi is a Pi1 sentence undecidable in T (Rosser's sentence, say)
register_atom(AtomSpec("xi", 0, pi(1), doc="a Pi1 sentence undecidable in T"))


class ConsistencyVariant(str, Enum):
    H = "H"
    L = "L"
    G = "G"
    SIGMA1 = "Sigma1"

    @classmethod
    def parse(cls, text: str) -> ConsistencyVariant:
        key = text.strip().lower().replace("σ", "sigma").replace("_", "")
        for v in cls:
            if v.value.lower() == key:
                return v
        if key in ("s1", "sigma"):
            return cls.SIGMA1
        raise ValueError(f"unknown consistency variant {text!r}")


@dataclass(frozen=True)
class PredicateTemplate:
    name: str
    formula: Formula
    declared_level: Level
    provenance: str

    def at(self, t: Term) -> Formula:
        """The predicate applied to the term t."""
        return substitute(self.formula, "x", t)

    def level_matches(self) -> bool:
        return classify(self.formula) == self.declared_level


@dataclass(frozen=True)
class MetadataOnly:
    name: str
    description: str
    provenance: str
    reason: str


def code_numeral(phi: Formula) -> Term:
    """The numeral of phi's Goedel number."""
    return numeral(to_int(gn(phi)))


FALSUM = Not(Eq(Zero(), Zero()))  # the sentence 0 != 0


def proves_falsum_at(z: Term, proof_atom: str = "Prf_T") -> Formula:
    return ExtAtom(proof_atom, (code_numeral(FALSUM), z))


def standard_pr(proof_atom: str = "Prf_T") -> Formula:
    return Exists("y", ExtAtom(proof_atom, (X, Var("y"))))


GENERIC_PHI = PredicateTemplate("Phi", ExtAtom("Phi", (X,)), sigma(1), "an arbitrary Sigma1 predicate")


def make_con(variant: ConsistencyVariant | str, phi: PredicateTemplate = GENERIC_PHI) -> Formula:
    """One of the four consistency statements built from phi."""
    variant = ConsistencyVariant.parse(variant) if isinstance(variant, str) else variant
    fml = ExtAtom("Fml", (X,))
    if variant is ConsistencyVariant.H:
        return Forall("x", Imp(And(fml, phi.at(X)), Not(phi.at(FnApp("neg", (X,))))))
    if variant is ConsistencyVariant.L:
        return Not(phi.at(code_numeral(FALSUM)))
    if variant is ConsistencyVariant.G:
        return Exists("x", And(fml, Not(phi.at(X))))
    sigma1 = ExtAtom("Sigma_z", (X, numeral(1)))
    return Exists("x", conj([sigma1, ExtAtom("Sent", (X,)), Not(phi.at(X))]))


class TemplateError(ValueError):
    pass


def strictly_below(var: str, bound: Term, body: Formula) -> Formula:
    # "for all z < y" written with the primitive <= quantifier
    return BForall(var, bound, Imp(Not(Eq(Var(var), bound)), body))


def pr_delta(delta: Formula, name: str = "PR_T[delta]", provenance: str = "") -> PredicateTemplate:
    """PR_T[delta](x) := Ey (Prf_T(x, y) & Az < y (Prf_T(<0 != 0>, z) -> delta(x, z)))."""
    extra = free_vars(delta) - {"x", "z"}
    if extra:
        raise TemplateError(f"delta may only mention x and z, not {sorted(extra)}")
    if not is_in(delta, DELTA0):
        raise TemplateError(f"delta is {classify(delta)}, not bounded; the result would not be Sigma1")
    y, z = Var("y"), Var("z")
    guard = strictly_below("z", y, Imp(proves_falsum_at(z), delta))
    body = Exists("y", And(ExtAtom("Prf_T", (X, y)), guard))
    return PredicateTemplate(name, body, sigma(1), provenance or "Lemma WL1 definition")


def parity_normalize(t: PredicateTemplate) -> PredicateTemplate:
    """Append '& 0 = 0' when the number of logical symbols is even."""
    if count_logical_symbols(t.formula) % 2 == 1:
        return t
    return PredicateTemplate(t.name, And(t.formula, Eq(Zero(), Zero())), t.declared_level, t.provenance)


# --------------------------------------------------------- Robinson's Q


def _q_axioms() -> list[Formula]:
    x, y = Var("x"), Var("y")
    s = Succ
    from .syntax import Add, Mul

    return [
        Forall("x", neq(s(x), Zero())),
        Forall("x", Forall("y", Imp(Eq(s(x), s(y)), Eq(x, y)))),
        Forall("x", Or(Eq(x, Zero()), Exists("y", Eq(x, s(y))))),
        Forall("x", Eq(Add(x, Zero()), x)),
        Forall("x", Forall("y", Eq(Add(x, s(y)), s(Add(x, y))))),
        Forall("x", Eq(Mul(x, Zero()), Zero())),
        Forall("x", Forall("y", Eq(Mul(x, s(y)), Add(Mul(x, y), x)))),
    ]


Q_AXIOMS = _q_axioms()


def finite_numeration(axioms: list[Formula], name: str = "[T0]") -> PredicateTemplate:
    """[T0](x) := the disjunction of x = <phi> over the axioms phi."""
    body = disj([Eq(X, code_numeral(a)) for a in axioms])
    return PredicateTemplate(name, body, DELTA0, "finite numeration of a finitely axiomatized theory")


def fdt_shape(axioms: list[Formula]) -> PredicateTemplate:
    """PR_[T0](x) <-> PrL(<AND T0> ->. x), the formalized deduction theorem."""
    big_and = conj(list(axioms))
    right = ExtAtom("PrL", (FnApp("imp", (code_numeral(big_and), X)),))
    body = iff(ExtAtom("Pr_T0", (X,)), right)
    return PredicateTemplate("FDT", body, sigma(2), "Lemma FDT (formalized deduction theorem)")


def _xi_prime() -> Formula:
    return Or(ExtAtom("xi", ()), Eq(Zero(), Succ(Zero())))


def _build_catalog() -> dict[str, PredicateTemplate | MetadataOnly]:
    x, z = X, Var("z")
    even = ExtAtom("Even", (x,))
    cat: dict[str, PredicateTemplate | MetadataOnly] = {}

    def add(entry):
        cat[entry.name] = entry

    add(PredicateTemplate("PR_T", standard_pr(), sigma(1), "standard provability predicate built on Prf_T"))
    add(finite_numeration(Q_AXIOMS, "numeration_Q"))
    add(PredicateTemplate("Psi", neq(x, x), DELTA0, "Proposition exN: Psi(x) := x != x"))
    mostowski = Exists("y", And(ExtAtom("Prf_T", (x, Var("y"))), Not(proves_falsum_at(Var("y")))))
    add(PredicateTemplate("Mostowski", mostowski, sigma(1), "Mostowski's predicate, Proposition exMos"))
    add(parity_normalize(pr_delta(Or(ExtAtom("le", (x, z)), even), "PR_I", "Proposition WP1")))
    add(pr_delta(Or(ExtAtom("le", (FnApp("n", (x,)), z)), even), "PR_II", "Proposition WP2"))
    add(pr_delta(ExtAtom("Sigma_z", (x, z)), "PR_III", "Proposition WP3"))
    pr_vi = And(standard_pr(), neq(x, code_numeral(Not(_xi_prime()))))
    add(PredicateTemplate("PR_VI", pr_vi, sigma(1), "Proposition WP6: PR_T(x) and x differs from <not xi'>"))
    add(PredicateTemplate("PR_star", Or(standard_pr("Prf_a0"), standard_pr("Prf_a1")), sigma(1),
                          "Theorem MT2: PR_alpha0(x) or PR_alpha1(x)"))
    # two short axioms keep <AND T0> small enough to write as a numeral
    add(fdt_shape([Q_AXIOMS[0], Q_AXIOMS[3]]))
    for name, desc, prov in (
        ("PR_Q", "provability predicate of Robinson's Q (built on numeration_Q)", "Proposition exQ"),
        ("Feferman", "Sigma2 predicate from a Pi1 numeration of T", "Fact exFef"),
        ("Arai_A1", "Arai's Sigma1 predicate satisfying D1 and DG2", "Fact exAra"),
        ("Arai_A2", "Arai's Sigma1 predicate satisfying D1 and DG3", "Fact exAra"),
        ("Kurahashi_R1", "Kurahashi's Rosser-type predicate 1", "Fact exKur"),
        ("Kurahashi_R2", "Kurahashi's Rosser-type predicate 2", "Fact exKur"),
        ("Kurahashi_R3", "Kurahashi's Rosser-type predicate 3", "Fact exKur"),
        ("PR_IV", "predicate built from simultaneous fixed points", "Proposition WP4"),
        ("PR_V", "Rosser-style witness comparison predicate", "Proposition WP5"),
    ):
        reason = "needs a construction imported from elsewhere or simultaneous fixed points"
        add(MetadataOnly(name, desc, prov, reason))
    return cat


@cache
def catalog() -> dict[str, PredicateTemplate | MetadataOnly]:
    return _build_catalog()


class UnknownWitness(KeyError):
    pass


def gallery(name: str) -> PredicateTemplate | MetadataOnly:
    key = name.replace("^", "_").replace("*", "_star")
    cat = catalog()
    for cand in (name, key):
        if cand in cat:
            return cat[cand]
    lowered = {k.lower(): v for k, v in cat.items()}
    if key.lower() in lowered:
        return lowered[key.lower()]
    raise UnknownWitness(name)
