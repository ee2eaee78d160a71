"""Diagonal fixed points with their numeric certificates, then a flattened equation system.

    python3 demos/fixed_points.py
"""
from provkit.coding import code_str
from provkit.diagonal import fixed_point, goedel_context
from provkit.flatten import equivalence_oracle, mtl_normal_form
from provkit.syntax import parse, to_text

phi, cert = fixed_point(goedel_context())
print("context:", to_text(goedel_context()))
print("fixed point:", to_text(phi)[:100], "...")
print("sub(<theta>, <theta>) == <phi>:", cert.holds)
print("  code prefix:", code_str(cert.rhs)[:80], "...")

src = parse("~(x * x = y + s(0))")
nf = mtl_normal_form(src)
print("\n", to_text(src), "flattens to")
for i, d in enumerate(nf.disjuncts):
    print(f"  disjunct {i}:", ", ".join(f"{l} = {to_text(r)}" for l, r in d.equations))
print("same truth values on x, y in 0..4:", equivalence_oracle(src, nf, 4))
