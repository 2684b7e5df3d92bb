"""
Line bundle cohomology on a toric variety
=========================================

H^i(X, O(D)) splits over characters m of the torus.  For each m only the
rays where m is "too negative" matter, and the contribution is the reduced
cohomology of the subcomplex of the fan they span.  A Cech computation
over the maximal cones gives an independent check.
"""

from toricdiag.cohomology import cech_oracle, cohomology, cohomology_of_class, support_complex
from toricdiag.toric import get_variety

X = get_variety("F.3D.0001")
print(X.rays.tolist())
print(X.grading.tolist())

# O(0,3) has ten sections; O(0,-3) only has cohomology in degree 2,
# because it is pulled back from O(-3) on P^2
for cls in [(0, 3), (0, -3), (-1, -1), (1, 1)]:
    D = X.class_to_coeffs(cls)
    print(cls, cohomology(X, D), cech_oracle(X, D))

# one character and the rays it selects
D = X.class_to_coeffs((0, -3))
print(support_complex(X, D, (-1, -1, 0)))

# the same thing on P^2 itself
print(cohomology_of_class(get_variety("P2"), (-3,)))
