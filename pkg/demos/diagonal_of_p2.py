"""
The resolution of the diagonal of P^2
=====================================

Build the cellular resolution of the diagonal of P^2, read off the line
bundles on the first factor, and check that they form a strong full
exceptional collection.
"""

from toricdiag.diagres import extract_collection, resolve_diagonal
from toricdiag.excol import find_exceptional_order, hom_table, quiver_dot
from toricdiag.toric import get_variety

# P^2 from the built-in database: three rays, class group Z
X = get_variety("P2")
print(X.rays.tolist(), X.grading.tolist())

# the complex lives over the Cox ring of P^2 x P^2
C = resolve_diagonal(X)
print("ranks", C.ranks())
for i, term in enumerate(C.terms):
    print(i, [C.split(t) for t in term])

# every summand is O(a) x O(b); the first factors give the collection
multi, coll = extract_collection(C)
print("collection", coll)

# Hom dimensions between members decide the order
rep = find_exceptional_order(hom_table(X, coll), "P2")
print(rep.verdict, rep.ordered_classes)
for row in rep.F:
    print(row)

print(quiver_dot(rep))
