"""Single-fact corruptions of the shipped knowledge base; the audit must catch each one."""
from dataclasses import replace

from provkit import lattice as L


def _witness_plus(kb, name, atom):
    w = kb.witness(name)
    return kb.with_witness(replace(w, satisfies=w.satisfies | {atom}))


def _flag_swap(kb, name, old, new):
    w = kb.witness(name)
    return kb.with_witness(replace(w, satisfies=(w.satisfies - {old}) | {new}))


def _blank_citation(kb, rule_id):
    rules = tuple(replace(r, citation="") if r.id == rule_id else r for r in kb.rules)
    return replace(kb, rules=rules)


MUTATIONS = {
    "PR^III gains PCG": lambda kb: _witness_plus(kb, "PR_III", "PCG"),
    "MT rule removed": lambda kb: kb.without_rules("MT"),
    "A1 gains D3": lambda kb: _witness_plus(kb, "Arai_A1", "D3"),
    "Feferman predicate moved to Sigma1": lambda kb: _flag_swap(kb, "Feferman", L.phi_in("Sigma2"), L.phi_in("Sigma1")),
    "G2 citation blanked": lambda kb: _blank_citation(kb, "G2"),
}
