"""Two provability predicates, one boxed each: why [0]p & [1]~p need not be contradictory.

    python3 demos/two_predicates.py
"""
from provkit import modal as md

goal = md.mparse(md.MT2_FORMULA)
print("looking for a countermodel to", md.mformat(goal))
m = md.cs2_countermodel_search(goal, 3)
print("worlds:", m.worlds, "root:", m.root)
print("K0:", sorted(m.k0), "K1:", sorted(m.k1), "order:", sorted(m.order))
for w in m.worlds:
    print(f"  {w} forces p: {'p' in m.valuation.get(w, ())}")

fact = md.mparse(md.MT2_ROOT_FACT)
print(f"root forces {md.mformat(fact)}: {md.mc_cs2(m, m.root, fact)}")

# with a single predicate the same shape collapses: GL proves it
single = md.mparse("[]p & []~p -> []F")
print(f"GL on {md.mformat(single)}: {md.gl_decide(single)}")
