"""
Unimodular toric surfaces
=========================

Enumerate complete toric surfaces whose ray matrix is unimodular, then
run the whole pipeline on each and print the quiver of its collection.
"""

from toricdiag.diagres import extract_collection, resolve_diagonal
from toricdiag.excol import find_exceptional_order, hom_table, quiver_arcs
from toricdiag.toric import classify_unimodular_surfaces

for S in classify_unimodular_surfaces():
    C = resolve_diagonal(S)
    coll = extract_collection(C)[1]
    rep = find_exceptional_order(hom_table(S, coll), S.name)
    print(S.name, S.rays.tolist())
    print("  ranks", C.ranks(), "verdict", rep.verdict)
    print("  order", rep.ordered_classes)
    print("  arrows", quiver_arcs(rep))
