"""Steiner and circular symmetrization across the fixture corpus.

Steiner symmetrization keeps area exactly and never lengthens the boundary.
Circular symmetrization is a polygonal approximation, so its area moves by a
small budget-dependent amount.  One SVG per fixture lands in ./out.
"""
import os
import sys

from steinersym import geom, symmetry, verify
from steinersym.cli import svg_panels

out = sys.argv[1] if len(sys.argv) > 1 else "out"
os.makedirs(out, exist_ok=True)

print(f"{'fixture':16s} {'area':>9s} {'perim':>9s} {'steiner':>9s} {'circular':>9s} {'circ dA':>9s}")
for fx in verify.corpus():
    p = fx.polygon
    S = symmetry.steiner_symmetrize(p)
    C = symmetry.circular_symmetrize(p, 256, 256)
    dA = (geom.area(C) - geom.area(p)) / geom.area(p)
    print(f"{fx.name:16s} {geom.area(p):9.4f} {geom.perimeter(p):9.4f} "
          f"{geom.perimeter(S):9.4f} {geom.perimeter(C):9.4f} {dA:+9.1e}")
    svg_panels([("input", p), ("steiner", S), ("circular", C)], os.path.join(out, f"{fx.name}.svg"))
print(f"SVGs in {out}/")
