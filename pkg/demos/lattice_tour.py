"""Walk the derivability-condition lattice: closure, entailment, separation.

    python3 demos/lattice_tour.py
"""
from provkit import lattice as L

sigma1 = {L.phi_in("Sigma1")}
cl = L.closure(sigma1, {"D1", L.bum(2)})
print("from D1 and BU2 over a Sigma1 predicate:")
for atom in sorted(cl.derived - cl.given):
    cert = cl.certificate(atom)
    print(f"  {L.display(atom):<14} via {' -> '.join(cert.chain)}")

for query in (L.not_proves("H"), L.not_proves("L")):
    print(f"{L.display(query)}: {L.entails(sigma1, {'D1', L.bum(2)}, query)}")

# which catalogued predicate keeps D1 + D2 but loses provable Sigma1-completeness?
print("separating D1, D2 from Sigma1-C:", L.separation({"D1", "D2"}, L.gamma_c("Sigma1")))

bad = [c for c in L.check_figure() if not c.ok]
print(f"figure arrows checked: {len(L.FIGURE_ARROWS)}, problems: {len(bad)}")
print("audit of the shipped knowledge base:", L.kb_sanity(L.shipped_kb()) or "clean")
