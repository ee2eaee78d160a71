"""Knowledge base of derivability conditions with forward chaining.

Atoms are plain strings such as ``D1``, ``GammaC(Sigma1)``, ``BUm(2)`` and
``NotProves(H)``; context flags are ``PhiIn(Sigma1)`` or ``SEqualsT``.  Every
rule and witness carries a citation and a verbatim quote of the statement it
transcribes.  Parametric families (the Bm/BUm conditions and the level
argument of GammaC and friends) are instantiated up to a cap.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from functools import cache
from itertools import combinations
from typing import Iterable, Mapping

from .levels import Level

LEVELS = ("Delta0", "Sigma1", "Pi1", "Sigma2", "Pi2")
DEFAULT_CAP = 6
VARIANTS = ("H", "L", "Sigma1", "G")
CON_STATUSES = ("T-proves", "T-not-proves", "unknown")
KB_VERSION = 1

_FAMILY = re.compile(r"^(GammaC|GammaCU|GammaCG|Bm|BUm|NotProves|PhiIn)\((\w+)\)$")
PLAIN = ("D1", "D2", "D3", "PC", "SCminus", "DU1", "DU2", "DU3", "CB", "PCU", "DG2", "DG3", "PCG", "Ax")

_DISPLAY = {
    "D1": "D1", "D2": "D2", "D3": "D3", "PC": "PC", "SCminus": "ΣC⁻", "DU1": "D1^U", "DU2": "D2^U",
    "DU3": "D3^U", "CB": "CB", "PCU": "PC^U", "DG2": "D2^G", "DG3": "D3^G", "PCG": "PC^G", "Ax": "Ax",
}
_LEVEL_GLYPH = {"Delta0": "Δ0", "Sigma1": "Σ", "Pi1": "Π1", "Sigma2": "Σ2", "Pi2": "Π2"}
_LOCAL_DEF = "Definition of local derivability conditions"
_UNIFORM_DEF = "Definition of uniform derivability conditions"
_GLOBAL_DEF = "Definition of global derivability conditions"
_ATOM_CITATION = {
    "D1": _LOCAL_DEF, "D2": _LOCAL_DEF, "D3": _LOCAL_DEF, "PC": _LOCAL_DEF, "SCminus": "Remark after Theorem G2-3",
    "DU1": _UNIFORM_DEF, "DU2": _UNIFORM_DEF, "DU3": _UNIFORM_DEF, "CB": _UNIFORM_DEF, "PCU": _UNIFORM_DEF,
    "DG2": _GLOBAL_DEF, "DG3": _GLOBAL_DEF, "PCG": _GLOBAL_DEF, "Ax": "Definition of Ax (Montagna)",
}

_ATOM_QUOTE = {
    "D1": r"If $T \vdash \varphi$, then $S \vdash \Phi(\gdl{\varphi})$ for any formula $\varphi$.",
    "D2": r"$S \vdash \Phi(\gdl{\varphi \to \psi}) \to (\Phi(\gdl{\varphi}) \to \Phi(\gdl{\psi}))$ for any formulas $\varphi$ and $\psi$.",
    "D3": r"$S \vdash \Phi(\gdl{\varphi}) \to \Phi(\gdl{\Phi(\gdl{\varphi})})$ for any formula $\varphi$.",
    "GammaC": r"$S \vdash \varphi \to \Phi(\gdl{\varphi})$ for any $\Gamma$ sentence $\varphi$.",
    "Bm": r"If $\displaystyle T \vdash \bigwedge_{0 < i < m} \varphi_i \to \varphi_m$, then $\displaystyle S \vdash \bigwedge_{0 < i < m} \Phi(\gdl{\varphi_i}) \to \Phi(\gdl{\varphi_m})$ for any formulas $\varphi_1, \ldots, \varphi_m$.",
    "PC": r"$S \vdash \PRL(\gdl{\varphi}) \to \Phi(\gdl{\varphi})$ for any formula $\varphi$.",
    "SCminus": r"There exists a finite subtheory $T_0$ of $T$ such that for any $\Sigma_1$ sentence $\varphi$, $S \vdash \varphi \to \Phi(\gdl{\bigwedge T_0 \to \varphi})$.",
    "DU1": r"If $T \vdash \forall \vec{x}\,\varphi(\vec{x})$, then $S \vdash \forall \vec{x}\, \Phi(\gdl{\varphi(\vec{\dot{x}})})$ for any formula $\varphi(\vec{x})$.",
    "DU2": r"$S \vdash \forall \vec{x}\, (\Phi(\gdl{\varphi(\vec{\dot{x}}) \to \psi(\vec{\dot{x}})}) \to (\Phi(\gdl{\varphi(\vec{\dot{x}})}) \to \Phi(\gdl{\psi(\vec{\dot{x}})})))$ for any formulas $\varphi(\vec{x})$ and $\psi(\vec{x})$.",
    "DU3": r"$S \vdash \forall \vec{x}\, (\Phi(\gdl{\varphi(\vec{\dot{x}})}) \to \Phi(\gdl{ \Phi(\gdl{\varphi(\vec{\dot{x}})})}))$ for any formula $\varphi(\vec{x})$.",
    "GammaCU": r"$S \vdash \forall \vec{x}\, (\varphi(\vec{x}) \to \Phi(\gdl{\varphi(\vec{\dot{x}})}))$ for any $\Gamma$ formula $\varphi(\vec{x})$.",
    "BUm": r"If $\displaystyle T \vdash \forall \vec{x}\left(\bigwedge_{0 < i < m} \varphi_i(\vec{x}) \to \varphi_m(\vec{x}) \right)$,",
    "CB": r"$S \vdash \Phi(\gdl{\forall \vec{x}\, \varphi(\vec{x})}) \to \forall \vec{x}\, \Phi(\gdl{\varphi(\vec{\dot{x}})})$ for any formula $\varphi(\vec{x})$.",
    "PCU": r"$S \vdash \forall \vec{x} (\PRL(\gdl{\varphi(\vec{\dot{x}})}) \to \Phi(\gdl{\varphi(\vec{\dot{x}})}))$ for any formula $\varphi(\vec{x})$.",
    "DG2": r"$S \vdash \forall x \forall y(\Fml(x) \land \Fml(y) \to (\Phi(x \dot{\to} y) \to (\Phi(x) \to \Phi(y))))$.",
    "DG3": r"$S \vdash \forall x (\Fml(x) \to (\Phi(x) \to \Phi(\gdl{\Phi(\dot{x})})))$.",
    "GammaCG": r"$S \vdash \forall x(\mathsf{True}_\Gamma(x) \to \Phi(x))$.",
    "PCG": r"$S \vdash \forall x(\Fml(x) \to (\PRL(x) \to \Phi(x)))$.",
    "Ax": r"$S \vdash \forall x(\mathsf{LogAx}(x) \to \Phi(x))$.",
    "NotProves": r"$\Con^H : \equiv \forall x (\Fml(x) \land \Phi(x) \to \neg \Phi(\dot{\neg} x))$",
    "PhiIn": r"If $\Phi(x)$ is a $\Gamma$ formula",
    "SEqualsT": r"Suppose $S = T$.",
}


class AtomError(ValueError):
    pass


# ------------------------------------------------------------------ atoms


def level_name(text: str) -> str:
    return str(Level.parse(text))


def gamma_c(level: str) -> str:
    return f"GammaC({level})"


def gamma_cu(level: str) -> str:
    return f"GammaCU({level})"


def gamma_cg(level: str) -> str:
    return f"GammaCG({level})"


def bm(m: int) -> str:
    return f"Bm({m})"


def bum(m: int) -> str:
    return f"BUm({m})"


def not_proves(variant: str) -> str:
    return f"NotProves({variant})"


def phi_in(level: str) -> str:
    return f"PhiIn({level})"


SEQUALST = "SEqualsT"

_ALIASES = {
    "SC": gamma_c("Sigma1"), "SCU": gamma_cu("Sigma1"), "SCG": gamma_cg("Sigma1"),
    "DC": gamma_c("Delta0"), "D0C": gamma_c("Delta0"), "DCU": gamma_cu("Delta0"), "D0CU": gamma_cu("Delta0"),
    "DCG": gamma_cg("Delta0"), "D0CG": gamma_cg("Delta0"), "SC-": "SCminus", "SCMINUS": "SCminus",
    "D1U": "DU1", "D2U": "DU2", "D3U": "DU3", "D2G": "DG2", "D3G": "DG3",
}
_VARIANT_ALIASES = {"h": "H", "l": "L", "g": "G", "sigma1": "Sigma1", "s1": "Sigma1", "sigma": "Sigma1"}


def _variant(text: str) -> str:
    key = text.strip().lower().replace("σ", "sigma").replace("_", "")
    if key in _VARIANT_ALIASES:
        return _VARIANT_ALIASES[key]
    raise AtomError(f"unknown consistency variant {text!r}")


def parse_atom(text: str) -> str:
    """Canonical id of a condition, unprovability fact or flag.

    Accepts the canonical spelling plus shorthands: ``SC``/``SCU``/``SCG``
    for the Sigma1 completeness family, ``DCU`` for the Delta0 one, ``B2``
    and ``BU2`` for Bm(2)/BUm(2), ``~ConH`` or ``NotCon^L`` for unprovability
    facts and ``sigma1`` for the flag PhiIn(Sigma1).
    """
    t = text.strip().replace(" ", "")
    if not t:
        raise AtomError("empty atom")
    if t in PLAIN or t == SEQUALST:
        return t
    upper = t.upper()
    for key, val in _ALIASES.items():
        if upper == key:
            return val
    m = _FAMILY.match(t)
    if m:
        head, arg = m.groups()
        if head in ("Bm", "BUm"):
            if not arg.isdigit() or int(arg) < 1:
                raise AtomError(f"{head} needs a parameter m >= 1, got {arg!r}")
            return f"{head}({int(arg)})"
        if head == "NotProves":
            return not_proves(_variant(arg))
        try:
            return f"{head}({level_name(arg)})"
        except ValueError as exc:
            raise AtomError(str(exc)) from None
    m = re.fullmatch(r"(?i)(BU|B)(\d+)", t)
    if m:
        return (bum if m.group(1).upper() == "BU" else bm)(int(m.group(2)))
    m = re.fullmatch(r"(?i)(?:~|not|¬|⊬)?(?:T)?(?:\|-/|⊬)?Con\^?_?\{?(\w+?)\}?", t)
    if m and (t[0] in "~¬⊬" or t.lower().startswith("not")):
        return not_proves(_variant(m.group(1)))
    m = re.fullmatch(r"(?i)(Gamma)?(C|CU|CG)\((\w+)\)", t)
    if m:
        return {"C": gamma_c, "CU": gamma_cu, "CG": gamma_cg}[m.group(2).upper()](level_name(m.group(3)))
    if upper == "SEQUALST" or upper == "S=T":
        return SEQUALST
    try:
        return phi_in(level_name(t))
    except ValueError:
        pass
    raise AtomError(f"unrecognised condition {text!r}")


def parse_atoms(items: Iterable[str] | str) -> frozenset[str]:
    if isinstance(items, str):
        items = [p for p in re.split(r"[,\s]+", items) if p]
    return frozenset(parse_atom(p) for p in items)


def is_flag(atom: str) -> bool:
    return atom == SEQUALST or atom.startswith("PhiIn(")


def split_flags(atoms: Iterable[str]) -> tuple[frozenset[str], frozenset[str]]:
    atoms = list(atoms)
    return frozenset(a for a in atoms if is_flag(a)), frozenset(a for a in atoms if not is_flag(a))


def display(atom: str) -> str:
    if atom in _DISPLAY:
        return _DISPLAY[atom]
    m = _FAMILY.match(atom)
    if not m:
        return atom
    head, arg = m.groups()
    if head == "Bm":
        return f"B{arg}"
    if head == "BUm":
        return f"B{arg}^U"
    if head == "NotProves":
        return f"T ⊬ Con^{'Σ1' if arg == 'Sigma1' else arg}"
    if head == "PhiIn":
        return "Φ ∈ " + ("Σ1" if arg == "Sigma1" else _LEVEL_GLYPH.get(arg, arg))
    suffix = {"GammaC": "", "GammaCU": "^U", "GammaCG": "^G"}[head]
    return f"{_LEVEL_GLYPH.get(arg, arg)}C{suffix}"


@dataclass(frozen=True)
class ConditionAtom:
    id: str
    display: str
    citation: str
    quote: str = ""


def atom_info(atom: str) -> ConditionAtom:
    if atom in _ATOM_CITATION:
        return ConditionAtom(atom, display(atom), _ATOM_CITATION[atom], _ATOM_QUOTE.get(atom, ""))
    head = atom.split("(", 1)[0]
    cite = {
        "GammaC": _LOCAL_DEF, "Bm": _LOCAL_DEF, "GammaCU": _UNIFORM_DEF, "BUm": _UNIFORM_DEF,
        "GammaCG": _GLOBAL_DEF, "NotProves": "Definition of the consistency statements",
        "PhiIn": "Proposition LP1.5 side condition", "SEqualsT": "Fact exFef side condition",
    }.get(head, "")
    return ConditionAtom(atom, display(atom), cite, _ATOM_QUOTE.get(head, ""))


def _flag_level(flag: str) -> Level | None:
    if flag.startswith("PhiIn("):
        return Level.parse(flag[6:-1])
    return None


def flags_satisfy(have: Iterable[str], need: str) -> bool:
    """Does the flag set ``have`` meet the flag requirement ``need``?

    PhiIn(G) is met by any PhiIn(G') with G' contained in G.  SEqualsT only
    narrows the setting, so every flag set meets it.
    """
    if need == SEQUALST:
        return True
    target = _flag_level(need)
    return any((lv := _flag_level(f)) is not None and lv <= target for f in have)


# ------------------------------------------------------------------ records


@dataclass(frozen=True)
class Rule:
    id: str
    premises: frozenset[str]
    conclusion: str
    citation: str
    quote: str
    uses: tuple[str, ...] = ()

    @property
    def base(self) -> str:
        return self.id.split("[", 1)[0]

    def to_json(self) -> dict:
        return {"id": self.id, "premises": sorted(self.premises), "conclusion": self.conclusion,
                "citation": self.citation, "quote": self.quote, "uses": list(self.uses)}


@dataclass(frozen=True)
class DerivedViolation:
    atom: str
    via: tuple[str, ...]
    citation: str

    def to_json(self) -> dict:
        return {"atom": self.atom, "via": list(self.via), "citation": self.citation}


@dataclass(frozen=True)
class WitnessRecord:
    name: str
    display: str
    satisfies: frozenset[str]
    violates: frozenset[str]
    con_facts: Mapping[str, str]
    citation: str
    quote: str
    derived: tuple[DerivedViolation, ...] = ()

    def con_status(self, variant: str) -> str:
        return self.con_facts.get(variant, "unknown")

    def to_json(self) -> dict:
        return {"name": self.name, "display": self.display, "satisfies": sorted(self.satisfies),
                "violates": sorted(self.violates), "con_facts": {v: self.con_status(v) for v in VARIANTS},
                "citation": self.citation, "quote": self.quote, "derived": [d.to_json() for d in self.derived]}


@dataclass(frozen=True)
class OpenProblem:
    id: str
    conditions: frozenset[str]
    query: str | None
    citation: str
    quote: str

    def to_json(self) -> dict:
        return {"id": self.id, "conditions": sorted(self.conditions), "query": self.query,
                "citation": self.citation, "quote": self.quote}


@dataclass(frozen=True)
class KnowledgeBase:
    rules: tuple[Rule, ...]
    witnesses: tuple[WitnessRecord, ...]
    problems: tuple[OpenProblem, ...]
    cap: int = DEFAULT_CAP
    levels: tuple[str, ...] = LEVELS

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def witness(self, name: str) -> WitnessRecord:
        key = name.replace("^", "_").replace("*", "_star").lower()
        for w in self.witnesses:
            if key in (w.name.lower(), w.display.replace("^", "_").replace("*", "_star").lower()):
                return w
        raise KeyError(name)

    def without_rules(self, base: str) -> KnowledgeBase:
        return replace(self, rules=tuple(r for r in self.rules if r.base != base))

    def with_witness(self, w: WitnessRecord) -> KnowledgeBase:
        return replace(self, witnesses=tuple(w if x.name == w.name else x for x in self.witnesses))

    def to_json(self) -> dict:
        atoms = sorted({a for r in self.rules for a in (*r.premises, r.conclusion)})
        return {
            "version": KB_VERSION,
            "cap": self.cap,
            "levels": list(self.levels),
            "atoms": [{"id": a.id, "display": a.display, "citation": a.citation, "quote": a.quote}
                      for a in map(atom_info, atoms)],
            "rules": [r.to_json() for r in self.rules],
            "witnesses": [w.to_json() for w in self.witnesses],
            "problems": [p.to_json() for p in self.problems],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, doc: Mapping) -> KnowledgeBase:
        if doc.get("version") != KB_VERSION:
            raise ValueError(f"unsupported KB version {doc.get('version')!r}")
        rules = tuple(Rule(r["id"], frozenset(r["premises"]), r["conclusion"], r.get("citation", ""),
                           r.get("quote", ""), tuple(r.get("uses", ()))) for r in doc["rules"])
        witnesses = tuple(
            WitnessRecord(w["name"], w.get("display", w["name"]), frozenset(w["satisfies"]), frozenset(w["violates"]),
                          {v: st for v, st in w.get("con_facts", {}).items() if st != "unknown"}, w.get("citation", ""), w.get("quote", ""),
                          tuple(DerivedViolation(d["atom"], tuple(d["via"]), d.get("citation", ""))
                                for d in w.get("derived", ())))
            for w in doc["witnesses"])
        problems = tuple(OpenProblem(p["id"], frozenset(p["conditions"]), p.get("query"), p.get("citation", ""),
                                     p.get("quote", "")) for p in doc.get("problems", ()))
        return cls(rules, witnesses, problems, doc.get("cap", DEFAULT_CAP), tuple(doc.get("levels", LEVELS)))

    @classmethod
    def load(cls, path: str) -> KnowledgeBase:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


# ------------------------------------------------------------------ rule base


def _level_pairs(levels: Iterable[str]) -> list[tuple[str, str]]:
    """(smaller, larger) pairs of distinct levels under class inclusion."""
    parsed = [(name, Level.parse(name)) for name in levels]
    return [(a, b) for a, la in parsed for b, lb in parsed if a != b and la <= lb]


def build_rules(cap: int = DEFAULT_CAP, levels: Iterable[str] = LEVELS) -> tuple[Rule, ...]:
    levels = tuple(levels)
    out: list[Rule] = []

    def rule(rid, premises, conclusion, citation, quote, uses=()):
        out.append(Rule(rid, frozenset(premises), conclusion, citation, quote, tuple(uses)))

    ms = range(1, cap + 1)
    s1 = "Sigma1"
    # local conditions
    rule("LP1.1", ["D1"], gamma_c("Delta0"), "Proposition LP1.1", r"$\D{1} \Rightarrow \DC$")
    for m in ms:
        rule(f"LP1.2[m={m}]", [gamma_c("Delta0"), bm(m)], "D1", "Proposition LP1.2",
             r"$\DC$ and $\BD{m}$ for some $m \geq 1 \Rightarrow \D{1}$")
    rule("LP1.3", [bm(3)], "D2", "Proposition LP1.3", r"$\BD{3} \Rightarrow \D{2}$")
    for m in ms:
        rule(f"LP1.4ab[m={m}]", ["D1", "D2"], bm(m), "Proposition LP1.4 (a) => (b)",
             r"$(a) \Rightarrow (b)$ is well-known in the context of modal logic", uses=())
    for m in ms:
        if m >= 3:
            rule(f"LP1.4ca[m={m}]", ["D1", bm(m)], "D2", "Proposition LP1.4 (c) => (a)",
                 r"We prove $(c) \Rightarrow (a)$", uses=("LP1.3",))
    rule("B1-is-D1", [bm(1)], "D1", "Definition of local derivability conditions",
         r"The condition $\BD{1}$ is precisely $\D{1}$")
    rule("D1-is-B1", ["D1"], bm(1), "Definition of local derivability conditions",
         r"The condition $\BD{1}$ is precisely $\D{1}$")
    for g in levels:
        rule(f"LP1.5[{g}]", [phi_in(g), gamma_c(g)], "D3", "Proposition LP1.5",
             r"If $\Phi(x)$ is a $\Gamma$ formula, then $\GC \Rightarrow \D{3}$")
    rule("LP1.6=>", [bm(2), "PC"], gamma_c(s1), "Proposition LP1.6",
         r"$\BD{2}$ and $\PC \iff \BD{2}$ and $\SC$")
    rule("LP1.6<=", [bm(2), gamma_c(s1)], "PC", "Proposition LP1.6",
         r"$\BD{2}$ and $\PC \iff \BD{2}$ and $\SC$")
    rule("LP1.7", [bm(2), "PC"], "D1", "Proposition LP1.7", r"$\BD{2}$ and $\PC \Rightarrow \D{1}$",
         uses=("LP1.2", "LP1.6=>"))
    rule("LP1.8=>", ["D1", "D2", "PC"], gamma_c(s1), "Proposition LP1.8",
         r"$\D{1}$, $\D{2}$ and $\PC \iff \D{1}$, $\D{2}$ and $\SC$", uses=("LP1.4ab", "LP1.6=>"))
    rule("LP1.8<=", ["D1", "D2", gamma_c(s1)], "PC", "Proposition LP1.8",
         r"$\D{1}$, $\D{2}$ and $\PC \iff \D{1}$, $\D{2}$ and $\SC$", uses=("LP1.4ab", "LP1.6<="))
    rule("SCminus.1", ["PC"], "SCminus", "Remark after Theorem G2-3",
         r"``$\PC \Rightarrow \SC^-$''")
    rule("SCminus.2", [bm(2), "SCminus"], gamma_c(s1), "Remark after Theorem G2-3",
         r"``$\{\BD{2}, \SC^-\} \Rightarrow \SC$''")
    rule("SCminus.0", [gamma_c(s1)], "SCminus", "Remark after Theorem G2-3",
         r"The following makeshift condition $\SC^-$ is of course weaker than $\SC$")

    # uniform conditions
    for m in ms:
        rule(f"UP1.1[m={m}]", [gamma_c("Delta0"), bum(m)], "DU1", "Proposition UP1.1",
             r"$\DC$ and $\BDU{m}$ for some $m \geq 1 \Rightarrow \DU{1}$")
    rule("UP1.2", [bum(3)], "DU2", "Proposition UP1.2", r"$\BDU{3} \Rightarrow \DU{2}$")
    for m in ms:
        rule(f"UP1.3ab[m={m}]", ["DU1", "DU2"], bum(m), "Proposition UP1.3 (a) => (b)",
             r"$\DU{1}$ and $\DU{2}$.")
    for m in ms:
        if m >= 3:
            rule(f"UP1.3ca[m={m}]", ["DU1", bum(m)], "DU2", "Proposition UP1.3 (c) => (a)",
                 r"$\DU{1}$ and $\BDU{m}$ for some $m \geq 3$.")
    rule("BU1-is-DU1", [bum(1)], "DU1", "Remarks after the uniform definitions",
         r"$\BDU{1}$ is precisely $\DU{1}$")
    rule("DU1-is-BU1", ["DU1"], bum(1), "Remarks after the uniform definitions",
         r"$\BDU{1}$ is precisely $\DU{1}$")
    for g in levels:
        rule(f"UP1.4[{g}]", [phi_in(g), gamma_cu(g)], "DU3", "Proposition UP1.4",
             r"If $\Phi(x)$ is a $\Gamma$ formula, then $\GCU \Rightarrow \DU{3}$")
    rule("UP1.5=>", [bum(2), "PCU"], gamma_cu(s1), "Proposition UP1.5",
         r"$\BDU{2}$ and $\PCU \iff \BDU{2}$ and $\SCU$")
    rule("UP1.5<=", [bum(2), gamma_cu(s1)], "PCU", "Proposition UP1.5",
         r"$\BDU{2}$ and $\PCU \iff \BDU{2}$ and $\SCU$")
    rule("UP1.6", [bum(2), "PCU"], "DU1", "Proposition UP1.6", r"$\BDU{2}$ and $\PCU \Rightarrow \DU{1}$")
    rule("UP1.7=>", ["DU1", "DU2", "PCU"], gamma_cu(s1), "Proposition UP1.7",
         r"$\DU{1}$, $\DU{2}$ and $\PCU \iff \DU{1}$, $\DU{2}$ and $\SCU$")
    rule("UP1.7<=", ["DU1", "DU2", gamma_cu(s1)], "PCU", "Proposition UP1.7",
         r"$\DU{1}$, $\DU{2}$ and $\PCU \iff \DU{1}$, $\DU{2}$ and $\SCU$")
    rule("UP2.1", ["D1", "CB"], "DU1", "Proposition UP2.1", r"$\D{1}$ and $\CB \Rightarrow \DU{1}$")
    rule("UP2.2", [bum(2)], "CB", "Proposition UP2.2",
         r"Since $T \vdash \forall \vec{x}\, \varphi(\vec{x}) \to \varphi(\vec{x})$")
    rule("UP2.3", ["DU2", "PCU"], "CB", "Proposition UP2.3", r"$\DU{2}$ and $\PCU \Rightarrow \CB$")
    rule("UC1.1", ["D1", bum(2)], "DU1", "Corollary UC1.1", r"$\D{1}$ and $\BDU{2} \Rightarrow \DU{1}$",
         uses=("UP2.1", "UP2.2"))
    rule("UC1.2", ["D1", "DU2", "PCU"], "DU1", "Corollary UC1.2",
         r"$\D{1}$, $\DU{2}$ and $\PCU \Rightarrow \DU{1}$", uses=("UP2.1", "UP2.3"))
    rule("UBuc", ["DU1", "DU2"], gamma_cu(s1), "Theorem UBuc (Buchholz)", r"$\DU{1}$ and $\DU{2} \Rightarrow \SCU$")
    rule("MT", ["D1", bum(2)], gamma_cu(s1), "Theorem MT",
         r"The following theorem improves Buchholz's Theorem \ref{UBuc}")
    rule("PCU-cor", ["D1", bum(2)], "PCU", "Corollary after the problem following Corollary UC3",
         r"$\D{1}$ and $\BDU{2} \Rightarrow \PCU$", uses=("MT", "UP1.5<="))

    # global conditions
    for g in levels:
        rule(f"GP1.1[{g}]", [phi_in(g), gamma_cu(g)], "DG3", "Proposition GP1.1",
             r"If $\Phi(x)$ is a $\Gamma$ formula, then $\GCU \Rightarrow \DG{3}$")
    rule("GP1.2", ["D1", "DG2", "PCG"], gamma_cg(s1), "Proposition GP1.2",
         r"$\D{1}$, $\DG{2}$ and $\PCG \Rightarrow \SCG$")
    rule("GP3.1", ["PCG"], "Ax", "Proposition GP3.1", r"$\PCG \Rightarrow \Ax$")
    rule("GP3.2", ["DG2", "Ax"], "PCG", "Proposition GP3.2", r"by induction inside $S$")
    rule("Mon2.1a", ["D1", "DG2", "Ax"], "DU1", "Corollary Mon2.1 (Montagna)",
         r"$\D{1}$, $\DG{2}$ and $\Ax \Rightarrow \DU{1}$ and $\SCG$", uses=("GP1.2", "GP3.2", "UC1.2"))
    rule("Mon2.1b", ["D1", "DG2", "Ax"], gamma_cg(s1), "Corollary Mon2.1 (Montagna)",
         r"$\D{1}$, $\DG{2}$ and $\Ax \Rightarrow \DU{1}$ and $\SCG$", uses=("GP1.2", "GP3.2"))

    # strength order between versions
    uniform_note = r"each of uniform derivability conditions is stronger than the corresponding local version"
    global_note = r"Global derivability conditions are strictly stronger than uniform derivability conditions"
    for u, l in (("DU1", "D1"), ("DU2", "D2"), ("DU3", "D3"), ("PCU", "PC")):
        rule(f"U>L[{u}]", [u], l, "Remarks after the uniform definitions", uniform_note)
    for g in levels:
        rule(f"U>L[{gamma_cu(g)}]", [gamma_cu(g)], gamma_c(g), "Remarks after the uniform definitions", uniform_note)
    for m in ms:
        rule(f"U>L[{bum(m)}]", [bum(m)], bm(m), "Remarks after the uniform definitions", uniform_note)
    for gl, u in (("DG2", "DU2"), ("DG3", "DU3"), ("PCG", "PCU")):
        rule(f"G>U[{gl}]", [gl], u, "Remarks after the global definitions", global_note)
    for g in levels:
        rule(f"G>U[{gamma_cg(g)}]", [gamma_cg(g)], gamma_cu(g), "Remarks after the global definitions", global_note)

    # a larger class gives a stronger completeness condition
    mono = r"$\Sigma_n \cup \Pi_n \subseteq \Sigma_{n+1} \cap \Pi_{n+1}$"
    for lo, hi in _level_pairs(levels):
        for make in (gamma_c, gamma_cu, gamma_cg):
            rule(f"mono[{make(hi)}>{make(lo)}]", [make(hi)], make(lo), "Preliminaries on the hierarchy", mono)

    # consistency statements
    rule("LP2.1", ["D1", not_proves("L")], not_proves("H"), "Proposition LP2.1",
         r"If $\Phi(x)$ satisfies $\D{1}$, then $S \vdash \Con^H \to \Con^L$")
    rule("LP2.2", [not_proves("Sigma1")], not_proves("L"), "Proposition LP2.2",
         r"$\PA \vdash \Con^L \to \Con^{\Sigma_1}$")
    rule("LP2.3", [not_proves("G")], not_proves("Sigma1"), "Proposition LP2.3",
         r"$\PA \vdash \Con^{\Sigma_1} \to \Con^G$")
    rule("GP2.1", ["DG2", "PCG", not_proves("H")], not_proves("G"), "Proposition GP2.1",
         r"If $\Phi(x)$ satisfies $\DG{2}$ and $\PCG$, then $S \vdash \Con^G \to \Con^H$")
    rule("GP2.3", ["DG2", gamma_cg(s1), not_proves("L")], not_proves("Sigma1"), "Proposition GP2.3",
         r"If $\Phi(x)$ satisfies $\DG{2}$ and $\SCG$, then $\Con^L$ and $\Con^{\Sigma_1}$ are equivalent in $S$")

    # sufficient conditions for unprovability
    rule("G2", ["D1", "D2", "D3"], not_proves("L"), "Theorem G2 (Loeb)",
         r"If $\Phi(x)$ satisfies $\D{1}$, $\D{2}$ and $\D{3}$, then $T \nvdash \Con^L$")
    rule("G2-2", ["D1", bm(2), "D3"], not_proves("H"), "Theorem G2-2",
         r"If $\Phi(x)$ satisfies $\D{1}$, $\BD{2}$ and $\D{3}$, then $T \nvdash \Con^H$")
    for g in levels:
        rule(f"Jer[{g}]", [phi_in(g), "D1", gamma_c(g)], not_proves("H"), "Theorem Jer (Jeroslow; Kreisel and Takeuti)",
             r"If $\Phi(x)$ is a $\Gamma$ formula satisfying $\D{1}$ and $\GC$, then $T \nvdash \Con^H$")
    rule("G2-3", [phi_in(s1), "D1", "PC"], not_proves("H"), "Theorem G2-3",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\D{1}$ and $\PC$, then $T \nvdash \Con^H$")
    rule("SCminus.3", [phi_in(s1), "D1", "SCminus"], not_proves("H"), "Remark after Theorem G2-3",
         r"if $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\D{1}$ and $\SC^-$, then $T \nvdash \Con^H$")
    rule("UHB", [phi_in(s1), bm(2), "CB", gamma_cu("Delta0")], not_proves("H"), "Theorem UHB (Hilbert and Bernays)",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\BD{2}$, $\CB$ and $\DCU$, then $T \nvdash \Con^H$")
    rule("UC2", [phi_in(s1), "DU1", "DU2"], not_proves("L"), "Corollary UC2",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\DU{1}$ and $\DU{2}$, then $T \nvdash \Con^L$",
         uses=("UBuc",))
    rule("UC3", [phi_in(s1), "D1", bum(2)], not_proves("H"), "Corollary UC3",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\D{1}$ and $\BDU{2}$, then $T \nvdash \Con^H$",
         uses=("MT",))
    rule("GC1.1", [phi_in(s1), "D1", "DG2", "PCG"], not_proves("G"), "Corollary GC1.1",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\D{1}$, $\DG{2}$ and $\PCG$, then $T \nvdash \Con^G$",
         uses=("G2-3", "GP2.1"))
    rule("GC1.2", [phi_in(s1), "D1", "DG2", gamma_cg(s1)], not_proves("Sigma1"), "Corollary GC1.2",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\D{1}$, $\DG{2}$ and $\SCG$, then $T \nvdash \Con^{\Sigma_1}$",
         uses=("G2", "GP2.3"))
    rule("Mon2.2", [phi_in(s1), "D1", "DG2", "Ax"], not_proves("G"), "Corollary Mon2.2 (Montagna)",
         r"If $\Phi(x)$ is a $\Sigma_1$ formula satisfying $\D{1}$, $\DG{2}$ and $\Ax$, then $T \nvdash \Con^G$",
         uses=("GP3.2", "GC1.1"))
    return tuple(out)


# ------------------------------------------------------------------ witnesses


def _w(name, disp, satisfies, violates, con, citation, quote, derived=()):
    return WitnessRecord(name, disp, parse_atoms(satisfies), parse_atoms(violates), dict(con), citation, quote,
                         tuple(DerivedViolation(parse_atom(a), tuple(via), cite) for a, via, cite in derived))


_PROVES, _NOT = "T-proves", "T-not-proves"
_ARAI_NOTE = "Commentary after Fact exAra"
_KUR_NOTE = "Commentary after Fact exKur"


def build_witnesses() -> tuple[WitnessRecord, ...]:
    # D1 is listed for every provability predicate of T: "The condition D1 is
    # automatically satisfied by all provability predicates of T".
    return (
        _w("PR_Q", "PR_Q", "sigma1 DG2 SCG CB PCG", "D1 B2", {"H": _PROVES}, "Proposition exQ",
           r"$\PR_\mathsf{Q}(x)$ satisfies $\DG{2}$, $\SCG$, $\CB$ and $\PCG$"),
        _w("Psi", "Ψ", ["delta0", "DG2", "DG3", "BU2", "CB"] + [f"B{m}" for m in range(2, DEFAULT_CAP + 1)],
           "D1 DC PC", {"H": _PROVES}, "Proposition exN",
           r"$\Psi(x)$ satisfies $\DG{2}$, $\DG{3}$, $\BDU{2}$ and $\CB$"),
        _w("Feferman", "PR_π", "sigma2 SEqualsT DU1 DG2 BU2 SCG CB PCG", "D3", {"H": _PROVES}, "Fact exFef (Feferman)",
           r"$\PR_{\pi}(x)$ is a $\Sigma_2$ provability predicate satisfying $\DU{1}$, $\DG{2}$, $\BDU{2}$, $\SCG$, $\CB$ and $\PCG$"),
        _w("Mostowski", "PR^M", "sigma1 DU1 SCG PCG", "D2 B2 CB", {"L": _PROVES, "H": _NOT}, "Proposition exMos",
           r"$\PR_T^M(x)$ is a $\Sigma_1$ provability predicate satisfying $\DU{1}$, $\SCG$ and $\PCG$"),
        _w("Arai_A1", "PR^A_1", "sigma1 D1 DG2", "", {"H": _PROVES}, "Fact exAra.1 (Arai)",
           r"$\PR^A_1(x)$ satisfies $\D{1}$, $\DG{2}$ and $\PA \vdash \mathsf{Con}_{\PR^A_1}^H$",
           [(a, ("G2", "MT", "LP1", "UP1", "UP2"), _ARAI_NOTE) for a in ("DU1", "CB", "BU2", "D3", "PC")]),
        _w("Arai_A2", "PR^A_2", "sigma1 D1 DG3", "", {"H": _PROVES}, "Fact exAra.2 (Arai)",
           r"$\PR^A_2(x)$ satisfies $\D{1}$, $\DG{3}$ and $\PA \vdash \mathsf{Con}_{\PR^A_2}^H$",
           [(a, ("G2-2", "Jer", "G2-3", "LP1.4ab"), _ARAI_NOTE) for a in ("D2", "B2", "SC", "PC")]),
        _w("Kurahashi_R1", "PR_1^R", "sigma1 SEqualsT D1 DG2 DCG", "", {"H": _PROVES}, "Fact exKur.1 (Kurahashi)",
           r"$\PR_1^R(x)$ satisfies $\D{1}$, $\DG{2}$, $\DCG$ and $\PA \vdash \mathsf{Con}_{\PR_1^R}^H$",
           [(a, ("G2", "MT", "LP1", "UP1", "UP2"), _KUR_NOTE) for a in ("DU1", "CB", "BU2", "D3", "PC")]),
        _w("Kurahashi_R2", "PR_2^R", "sigma1 SEqualsT DU1 CB D2 DCG", "", {"L": _PROVES}, "Fact exKur.2 (Kurahashi)",
           r"$\PR_2^R(x)$ satisfies $\DU{1}$, $\CB$, $\D{2}$, $\DCG$ and $\PA \vdash \mathsf{Con}_{\PR_2^R}^L$",
           [(a, ("G2", "MT", "LP1.6", "UP1.3"), _KUR_NOTE) for a in ("DU2", "D3", "BU2", "PC")]),
        _w("Kurahashi_R3", "PR_3^R", "sigma1 SEqualsT DU1 CB B2 DG3 DCG", "SC", {"L": _PROVES},
           "Fact exKur.3 (Kurahashi)",
           r"$\PR_3^R(x)$ satisfies $\DU{1}$, $\CB$, $\BD{2}$, $\DG{3}$, $\DCG$ and $\PA \vdash \mathsf{Con}_{\PR_3^R}^L$, but does not satisfy $\SC$",
           [(a, ("G2", "MT", "LP1"), _KUR_NOTE) for a in ("D2", "BU2", "PC")]),
        _w("PR_I", "PR^I", "sigma1 D1 D2 SC", "DU1 DU2 DU3 DCU PCU", {}, "Proposition WP1",
           r"$\PR_T^\mathrm{I}(x)$ does not satisfy any of $\DU{1}$, $\DU{2}$, $\DU{3}$, $\DCU$ and $\PCU$",
           [(a, ("UP1.1", "UP2.1"), "Proof of Proposition WP1") for a in ("BU2", "CB")]),
        _w("PR_II", "PR^II", "sigma1 DU1 DU2 SCU", "DG2 DCG PCG", {"Sigma1": _PROVES}, "Proposition WP2",
           r"$\PA \vdash \mathsf{Con}_{\PR_T^\mathrm{II}}^{\Sigma_1}$"),
        _w("PR_III", "PR^III", "sigma1 DU1 DG2 SCG", "", {"G": _PROVES}, "Proposition WP3",
           r"$\PA \vdash \mathsf{Con}_{\PR_T^\mathrm{III}}^G$",
           [("PCG", ("GC1.1",), "Discussion after Corollary GC1")]),
        _w("PR_IV", "PR^IV", "sigma1 D1 DG2 DG3", "SC", {}, "Proposition WP4",
           r"satisfies $\D{1}$, $\DG{2}$ and $\DG{3}$, but does not satisfy $\SC$",
           [("PC", ("LP1.8<=",), "Non-implication list after the remark on SC-")]),
        _w("PR_V", "PR^V", "sigma1 D1 SCG", "DU1 PC", {}, "Proposition WP5",
           r"which satisfies $\SCG$, but does not satisfy any of $\DU{1}$ and $\PC$"),
        _w("PR_VI", "PR^VI", "sigma1 DU1 DG3 DCG PCG", "SC CB", {}, "Proposition WP6",
           r"$\PR_T^\mathrm{VI}(x)$ satisfies neither $\SC$ nor $\CB$",
           [(a, ("LP1",), "Remark after Proposition WP6") for a in ("D2", "B2")]),
        _w("PR_star", "PR^*", "sigma1 DU1 BU2 SCG PCG", "D2", {}, "Theorem MT2",
           r"which satisfies $\DU{1}$, $\BDU{2}$, $\SCG$ and $\PCG$ but does not satisfy $\D{2}$"),
    )


def build_problems() -> tuple[OpenProblem, ...]:
    return (
        OpenProblem("Problem-UHB.1", parse_atoms("sigma1 D1 CB DCU"), not_proves("H"), "Problem after Theorem UHB, item 1",
                    r"Is there a $\Sigma_1$ provability predicate satisfying $\D{1}$, $\CB$ and $\DCU$ such that $T \vdash \Con^H$?"),
        OpenProblem("Problem-UHB.2", parse_atoms("sigma1 D1 B2 CB"), not_proves("H"), "Problem after Theorem UHB, item 2",
                    r"Is there a $\Sigma_1$ provability predicate satisfying $\D{1}$, $\BD{2}$ and $\CB$ such that $T \vdash \Con^H$?"),
        OpenProblem("Problem-UC3", parse_atoms("sigma1 D1 BU2"), not_proves("L"), "Problem after Corollary UC3",
                    r"Is there a $\Sigma_1$ formula $\Phi(x)$ satisfying $\D{1}$ and $\BDU{2}$ such that $T \vdash \Con^L$?"),
        OpenProblem("Problem-final", frozenset(), None, "Closing problem",
                    r"Study further non-implications between derivability conditions."),
    )


def build_kb(cap: int = DEFAULT_CAP, levels: Iterable[str] = LEVELS) -> KnowledgeBase:
    if cap < 3:
        raise ValueError("the Bm cap must be at least 3 so that the B3 rules exist")
    return KnowledgeBase(build_rules(cap, levels), build_witnesses(), build_problems(), cap, tuple(levels))


@cache
def default_kb() -> KnowledgeBase:
    return build_kb()


def shipped_kb() -> KnowledgeBase:
    """The JSON export packaged as kb.json (regenerate with ``provkit lattice export``)."""
    from importlib.resources import files

    return KnowledgeBase.from_json(json.loads(files(__package__).joinpath("kb.json").read_text("utf-8")))


# ------------------------------------------------------------------ closure


@dataclass(frozen=True)
class Certificate:
    atom: str
    rule: str | None  # None for an assumption
    chain: tuple[str, ...]
    citations: tuple[tuple[str, str], ...] = ()

    def to_json(self) -> dict:
        return {"atom": self.atom, "rule": self.rule, "chain": list(self.chain),
                "citations": [{"citation": c, "quote": q} for c, q in self.citations]}


@dataclass(frozen=True)
class ClosureResult:
    flags: frozenset[str]
    given: frozenset[str]
    derived: frozenset[str]
    origin: Mapping[str, str | None] = field(repr=False)
    kb: KnowledgeBase = field(repr=False)

    def __contains__(self, atom: str) -> bool:
        return atom in self.derived

    def chain(self, atom: str) -> tuple[str, ...]:
        """Rule ids, in firing order, that derive ``atom`` from the givens."""
        order: list[str] = []
        seen: set[str] = set()

        def visit(a: str) -> None:
            rid = self.origin.get(a)
            if rid is None or rid in seen:
                return
            for p in sorted(self.kb.rule(rid).premises):
                if not is_flag(p):
                    visit(p)
            seen.add(rid)
            order.append(rid)

        visit(atom)
        return tuple(order)

    def certificate(self, atom: str) -> Certificate:
        if atom not in self.derived:
            raise KeyError(atom)
        chain = self.chain(atom)
        cites = tuple((self.kb.rule(r).citation, self.kb.rule(r).quote) for r in chain)
        return Certificate(atom, self.origin.get(atom), chain, cites)

    @property
    def certificates(self) -> list[Certificate]:
        return [self.certificate(a) for a in sorted(self.derived)]

    def unprovability(self) -> frozenset[str]:
        return frozenset(a for a in self.derived if a.startswith("NotProves("))

    def to_json(self) -> dict:
        return {"flags": sorted(self.flags), "given": sorted(self.given), "derived": sorted(self.derived),
                "certificates": [c.to_json() for c in self.certificates]}


def _premise_ok(p: str, flags: frozenset[str], known) -> bool:
    return flags_satisfy(flags, p) if is_flag(p) else p in known


def closure(flags: Iterable[str] = (), conditions: Iterable[str] = (), kb: KnowledgeBase | None = None) -> ClosureResult:
    """Least set containing the conditions and closed under the rules.

    Rules fire in rounds so that each atom is attributed to a rule from the
    earliest round in which it became derivable, which keeps chains short.
    """
    kb = kb or default_kb()
    flags = frozenset(flags)
    given = frozenset(conditions)
    origin: dict[str, str | None] = {a: None for a in given}
    while True:
        fresh: dict[str, str] = {}
        for r in kb.rules:
            if r.conclusion in origin or r.conclusion in fresh:
                continue
            if all(_premise_ok(p, flags, origin) for p in r.premises):
                fresh[r.conclusion] = r.id
        if not fresh:
            break
        origin.update(fresh)
    return ClosureResult(flags, given, frozenset(origin), origin, kb)


def replay(chain: Iterable[str], flags: Iterable[str], conditions: Iterable[str],
           kb: KnowledgeBase | None = None) -> frozenset[str]:
    """Fire the rules of ``chain`` in order; raise if one does not apply."""
    kb = kb or default_kb()
    flags = frozenset(flags)
    have = set(conditions)
    for rid in chain:
        r = kb.rule(rid)
        missing = [p for p in r.premises if not _premise_ok(p, flags, have)]
        if missing:
            raise ValueError(f"rule {rid} cannot fire; missing {sorted(missing)}")
        have.add(r.conclusion)
    return frozenset(have)


# ------------------------------------------------------------------ witnesses


@dataclass(frozen=True)
class WitnessProfile:
    """What the KB knows about one witness: closed satisfied and refuted sets."""
    witness: WitnessRecord
    satisfied: ClosureResult
    refuted: frozenset[str]

    @property
    def conflicts(self) -> frozenset[str]:
        return self.satisfied.derived & self.refuted


def _witness_flags(w: WitnessRecord) -> frozenset[str]:
    return frozenset(a for a in w.satisfies if is_flag(a))


def _witness_givens(w: WitnessRecord) -> frozenset[str]:
    base = {a for a in w.satisfies if not is_flag(a)}
    base |= {not_proves(v) for v, s in w.con_facts.items() if s == _NOT}
    return frozenset(base)


def _witness_refutes_base(w: WitnessRecord) -> set[str]:
    return set(w.violates) | {not_proves(v) for v, s in w.con_facts.items() if s == _PROVES}


def profile(w: WitnessRecord, kb: KnowledgeBase | None = None) -> WitnessProfile:
    """Close the satisfied set forward and the refuted set backward.

    Backward step: when a rule's conclusion is refuted and all premises but
    one are satisfied, the remaining premise must fail for this witness.
    """
    kb = kb or default_kb()
    flags = _witness_flags(w)
    sat = closure(flags, _witness_givens(w), kb)
    refuted = _witness_refutes_base(w)
    changed = True
    while changed:
        changed = False
        for r in kb.rules:
            if r.conclusion not in refuted:
                continue
            open_ = [p for p in r.premises if not _premise_ok(p, flags, sat.derived)]
            if len(open_) == 1 and not is_flag(open_[0]) and open_[0] not in refuted:
                refuted.add(open_[0])
                changed = True
    return WitnessProfile(w, sat, frozenset(refuted))


def _profiles(kb: KnowledgeBase) -> list[WitnessProfile]:
    return [profile(w, kb) for w in kb.witnesses]


_PROFILE_CACHE: dict[int, tuple[KnowledgeBase, list[WitnessProfile]]] = {}


def profiles(kb: KnowledgeBase | None = None) -> list[WitnessProfile]:
    kb = kb or default_kb()
    hit = _PROFILE_CACHE.get(id(kb))
    if hit is None or hit[0] is not kb:
        hit = (kb, _profiles(kb))
        _PROFILE_CACHE[id(kb)] = hit
    return hit[1]


def covers(p: WitnessProfile, flags: Iterable[str], conditions: Iterable[str]) -> bool:
    """Does the witness meet every assumption of the query?"""
    wflags = _witness_flags(p.witness)
    for f in flags:
        if f != SEQUALST and not flags_satisfy(wflags, f):
            return False
    return all(c in p.satisfied.derived for c in conditions)


# ------------------------------------------------------------------ queries


@dataclass(frozen=True)
class Verdict:
    answer: str  # "yes" | "no" | "unknown"
    query: str
    certificate: Certificate | None = None
    witness: str | None = None
    problem: OpenProblem | None = None
    citations: tuple[tuple[str, str], ...] = ()

    def __str__(self) -> str:
        if self.answer == "yes":
            return f"yes ({' -> '.join(self.certificate.chain) or 'assumed'})"
        if self.answer == "no":
            return f"no ({self.witness})"
        return f"unknown ({self.problem.id if self.problem else 'no data'})"

    def to_json(self) -> dict:
        out: dict = {"answer": self.answer, "query": self.query}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.witness is not None:
            out["witness"] = self.witness
        if self.problem is not None:
            out["problem"] = self.problem.to_json()
        out["citations"] = [{"citation": c, "quote": q} for c, q in self.citations]
        return out


def _problem_for(query: str, cl: ClosureResult, kb: KnowledgeBase) -> OpenProblem | None:
    general = None
    for p in kb.problems:
        if p.query is None:
            general = general or p
            continue
        if p.query != query:
            continue
        pflags, pconds = split_flags(p.conditions)
        pcl = closure(pflags, pconds, kb)
        flags_ok = all(f == SEQUALST or flags_satisfy(pflags, f) for f in cl.flags) if cl.flags else True
        if flags_ok and (cl.derived - pcl.derived) == frozenset():
            return p
    return general


def entails(flags: Iterable[str], conditions: Iterable[str], query: str, kb: KnowledgeBase | None = None) -> Verdict:
    """yes with a certificate, no with a witness, or unknown with a problem."""
    kb = kb or default_kb()
    flags, conditions = frozenset(flags), frozenset(conditions)
    cl = closure(flags, conditions, kb)
    if query in cl.derived:
        cert = cl.certificate(query)
        return Verdict("yes", query, certificate=cert, citations=cert.citations)
    name = _separating(flags, conditions, query, kb)
    if name is not None:
        w = kb.witness(name)
        return Verdict("no", query, witness=w.display, citations=((w.citation, w.quote),))
    prob = _problem_for(query, cl, kb)
    cites = ((prob.citation, prob.quote),) if prob else ()
    return Verdict("unknown", query, problem=prob, citations=cites)


def _separating(flags: frozenset[str], conditions: frozenset[str], target: str, kb: KnowledgeBase) -> str | None:
    for p in profiles(kb):
        if target in p.refuted and covers(p, flags, conditions):
            return p.witness.name
    return None


def separation(set_a: Iterable[str], cond_b: str, kb: KnowledgeBase | None = None) -> str | None:
    """A recorded witness satisfying everything in set_a and refuting cond_b."""
    kb = kb or default_kb()
    flags, conds = split_flags(set_a)
    name = _separating(flags, conds, cond_b, kb)
    return kb.witness(name).display if name else None


def unprovability(flags: Iterable[str], conditions: Iterable[str], kb: KnowledgeBase | None = None) -> dict[str, Certificate]:
    cl = closure(flags, conditions, kb)
    return {a: cl.certificate(a) for a in sorted(cl.unprovability())}


# ------------------------------------------------------------------ audit


def _cited(name: str, bases: set[str]) -> bool:
    """Does a citation such as ``LP1``, ``LP1.6`` or ``MT`` name rules in the base?

    Directed halves and sub-items (``LP1.6=>``, ``LP1.4ab``, ``Mon2.1a``)
    count as instances of the statement they come from.
    """
    for b in bases:
        core = re.sub(r"(ab|ca|=>|<=|[ab])$", "", b)
        if core == name or b == name or core.startswith(name + "."):
            return True
    return False


def kb_sanity(kb: KnowledgeBase | None = None) -> list[str]:
    """Consistency audit; an empty list means the KB passes."""
    kb = kb or default_kb()
    report: list[str] = []
    bases = {r.base for r in kb.rules}
    for r in kb.rules:
        if not r.citation.strip() or not r.quote.strip():
            report.append(f"rule {r.id}: missing citation or quote")
        for u in r.uses:
            if not _cited(u, bases):
                report.append(f"rule {r.id}: depends on {u}, which is not in the rule base")
    for p in _profiles(kb):
        w = p.witness
        if not w.citation.strip() or not w.quote.strip():
            report.append(f"witness {w.name}: missing citation or quote")
        for v, status in w.con_facts.items():
            if v not in VARIANTS or status not in CON_STATUSES:
                report.append(f"witness {w.name}: malformed consistency fact {v}={status}")
        for atom in sorted(p.conflicts):
            if atom.startswith("NotProves("):
                variant = atom[len("NotProves("):-1]
                cert = p.satisfied.certificate(atom)
                report.append(f"witness {w.name}: derives T ⊬ Con^{variant} via {' -> '.join(cert.chain)}, "
                              f"but Con^{variant} is recorded or implied as provable")
            else:
                cert = p.satisfied.certificate(atom)
                report.append(f"witness {w.name}: {atom} is both satisfied (via {' -> '.join(cert.chain) or 'record'}) "
                              f"and violated")
        for d in w.derived:
            for base in d.via:
                if not _cited(base, bases):
                    report.append(f"witness {w.name}: derived violation of {d.atom} cites {base}, "
                                  f"which is not in the rule base")
            if d.atom not in p.refuted:
                report.append(f"witness {w.name}: derived violation of {d.atom} does not follow from the KB")
    for prob in kb.problems:
        if not prob.citation.strip() or not prob.quote.strip():
            report.append(f"problem {prob.id}: missing citation or quote")
        if prob.query is None:
            continue
        pflags, pconds = split_flags(prob.conditions)
        if prob.query in closure(pflags, pconds, kb).derived:
            report.append(f"problem {prob.id}: the KB already derives {prob.query}")
        elif _separating(pflags, pconds, prob.query, kb):
            report.append(f"problem {prob.id}: a recorded witness already answers it")
    return report


# ------------------------------------------------------------------ intro figure


FIGURE_CONTEXT = (frozenset({phi_in("Sigma1")}), frozenset({"D1"}))

FIGURE_NODES: dict[str, frozenset[str]] = {
    "Con2": frozenset({not_proves("G")}),
    "ConS": frozenset({not_proves("Sigma1")}),
    "Con1": frozenset({not_proves("L")}),
    "Con0": frozenset({not_proves("H")}),
    "G2-2": parse_atoms("B2 D3"),
    "Jeroslow": parse_atoms("SC"),
    "G2-3": parse_atoms("PC"),
    "HB": parse_atoms("B2 CB DCU"),
    "Lob": parse_atoms("D2 D3"),
    "BS": parse_atoms("B2 SC"),
    "HBL": parse_atoms("D2 SC"),
    "Kurahashi": parse_atoms("BU2"),
    "Buchholz": parse_atoms("DU1 DU2"),
    "Global1": parse_atoms("DU1 DG2 SCG"),
    "Global2": parse_atoms("DG2 SCG"),
    "Montagna": parse_atoms("DG2 PCG"),
}

FIGURE_ARROWS: tuple[tuple[str, str], ...] = (
    ("Con2", "ConS"), ("ConS", "Con1"), ("Con1", "Con0"), ("G2-2", "Con0"), ("Jeroslow", "Con0"),
    ("G2-3", "Con0"), ("HB", "Con0"), ("Lob", "Con1"), ("Lob", "G2-2"), ("BS", "G2-2"), ("BS", "Jeroslow"),
    ("BS", "G2-3"), ("HBL", "Lob"), ("HBL", "BS"), ("Kurahashi", "BS"), ("Kurahashi", "HB"),
    ("Buchholz", "HBL"), ("Buchholz", "Kurahashi"), ("Montagna", "Global1"), ("Global1", "Buchholz"),
    ("Global1", "Global2"), ("Global2", "HBL"), ("Global2", "ConS"), ("Montagna", "Con2"),
)


@dataclass(frozen=True)
class ArrowCheck:
    source: str
    target: str
    forward: bool
    certificates: tuple[Certificate, ...]
    reverse: Verdict | None  # verdict for the first target atom the reverse direction misses

    @property
    def ok(self) -> bool:
        if not self.forward or self.reverse is None:
            return False
        if self.reverse.answer == "no":
            return True
        return self.reverse.answer == "unknown" and self.reverse.problem is not None


def check_figure(kb: KnowledgeBase | None = None) -> list[ArrowCheck]:
    """Every arrow forward by closure; every reverse arrow refuted or open."""
    kb = kb or default_kb()
    flags, base = FIGURE_CONTEXT
    out = []
    for src, dst in FIGURE_ARROWS:
        forward = closure(flags, base | FIGURE_NODES[src], kb)
        fwd_ok = FIGURE_NODES[dst] <= forward.derived
        certs = tuple(forward.certificate(a) for a in sorted(FIGURE_NODES[dst]) if a in forward.derived)
        back = closure(flags, base | FIGURE_NODES[dst], kb)
        missing = sorted(FIGURE_NODES[src] - back.derived)
        reverse = None
        if missing:
            verdicts = [entails(flags, base | FIGURE_NODES[dst], m, kb) for m in missing]
            reverse = next((v for v in verdicts if v.answer == "no"), verdicts[0])
        out.append(ArrowCheck(src, dst, fwd_ok, certs, reverse))
    return out


def implied_pairs(atoms: Iterable[str], flags: Iterable[str] = (), kb: KnowledgeBase | None = None):
    """(a, b) pairs among ``atoms`` with closure({a}) containing b; handy for tables."""
    atoms = list(atoms)
    for a, b in combinations(atoms, 2):
        if b in closure(flags, {a}, kb):
            yield a, b
        if a in closure(flags, {b}, kb):
            yield b, a
