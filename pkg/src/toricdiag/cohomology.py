"""Cohomology of line bundles on smooth complete toric varieties.

For a torus invariant divisor D = sum a_rho D_rho and a character m let
I(m) = {rho : <m, u_rho> < -a_rho}.  Then

    H^i(X, O(D))_m  =  reduced H^{i-1}(Delta_{I(m)})

where Delta_I is the subcomplex of the fan made of cones all of whose rays
lie in I.  The empty complex has reduced H^{-1} = k, which accounts for
the lattice points of the polytope of D.  Summing over characters gives
the dimensions.  Characters are scanned on an integer box that is doubled
until two consecutive boxes agree.
"""

from itertools import combinations
import threading

import numpy as np

from .intlin import IntMatrix, inverse, sparse_rank
from .toric import require_smooth_complete


class CohomologyVector(tuple):
    """dims[i] = dim H^i."""

    def __new__(cls, dims):
        return super().__new__(cls, (int(d) for d in dims))

    @property
    def total(self):
        return sum(self)

    def concentrated_in(self, i):
        return all(d == 0 for j, d in enumerate(self) if j != i)

    def is_zero(self):
        return not any(self)


class _Context:
    """Per-variety data shared by all cohomology calls: cone faces and a memo of h~ by ray mask."""

    def __init__(self, v):
        require_smooth_complete(v)
        self.v = v
        self.n = v.dim
        self.nrays = v.nrays
        faces = set()
        for c in v.max_cones:
            for k in range(1, len(c) + 1):
                faces.update(combinations(c, k))
        self.faces = sorted(faces, key=lambda f: (len(f), f))
        self.max_cone_masks = [sum(1 << i for i in c) for c in v.max_cones]
        first = v.max_cones[0]
        U = IntMatrix([v.rays.row(i) for i in first])
        self.Uinv = IntMatrix(inverse(U).tolist())
        # <m, u_rho> for m = Uinv c is (B Uinv c)_rho
        self.Beff = np.array((v.rays @ self.Uinv).tolist(), dtype=np.int64)
        self.memo = {}
        self.lock = threading.Lock()

    def reduced(self, mask):
        """Reduced cohomology dims h~^{-1}, ..., h~^{n-1} of the support complex of ``mask``."""
        got = self.memo.get(mask)
        if got is None:
            got = support_complex_cohomology(self.faces, mask, self.n)
            with self.lock:
                self.memo[mask] = got
        return got


def support_complex(v, coeffs, m):
    """(I, faces): the negative rays at character m and the cones spanned by them."""
    I = [i for i in range(v.nrays) if sum(a * b for a, b in zip(m, v.rays.row(i))) < -coeffs[i]]
    S = set(I)
    faces = set()
    for c in v.max_cones:
        inside = [i for i in c if i in S]
        for k in range(1, len(inside) + 1):
            faces.update(combinations(inside, k))
    return I, sorted(faces, key=lambda f: (len(f), f))


def support_complex_cohomology(all_faces, mask, n):
    faces = [f for f in all_faces if all(mask >> i & 1 for i in f)]
    by_dim = {-1: [()]}
    for f in faces:
        by_dim.setdefault(len(f) - 1, []).append(f)
    index = {d: {f: j for j, f in enumerate(fs)} for d, fs in by_dim.items()}
    ranks = {}
    for d in range(0, n):
        if d not in by_dim:
            ranks[d] = 0
            continue
        rows = []
        for f in by_dim[d]:
            row = {}
            for k in range(len(f)):
                g = f[:k] + f[k + 1:]
                row[index[d - 1][g]] = (-1) ** k
            rows.append(row)
        ranks[d] = sparse_rank(rows)
    out = []
    for d in range(-1, n):
        fd = len(by_dim.get(d, []))
        out.append(fd - ranks.get(d, 0) - ranks.get(d + 1, 0))
    return out


_CTX = {}
_CTX_LOCK = threading.Lock()


def context(v):
    key = id(v)
    ctx = _CTX.get(key)
    if ctx is None or ctx.v is not v:
        ctx = _Context(v)
        with _CTX_LOCK:
            _CTX[key] = ctx
    return ctx


def _box_counts(ctx, coeffs, h):
    """Histogram of negative-ray masks over the box |c_i| <= h (c = U_sigma m)."""
    n = ctx.n
    rng = np.arange(-h, h + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * n), indexing="ij")
    C = np.stack([g.ravel() for g in grids], axis=1)
    vals = C @ ctx.Beff.T + np.asarray(coeffs, dtype=np.int64)
    neg = vals < 0
    weights = (np.int64(1) << np.arange(ctx.nrays, dtype=np.int64))
    masks = neg.astype(np.int64) @ weights
    uniq, counts = np.unique(masks, return_counts=True)
    return dict(zip(uniq.tolist(), counts.tolist()))


def _dims_from_counts(ctx, counts):
    n = ctx.n
    dims = [0] * (n + 1)
    for mask, cnt in counts.items():
        red = ctx.reduced(mask)
        for i in range(n + 1):
            if red[i]:
                dims[i] += cnt * red[i]
    return CohomologyVector(dims)


def seed_half_width(coeffs):
    return 1 + sum(abs(a) for a in coeffs)


def cohomology(v, coeffs, return_box=False):
    """dim H^i(X, O(sum a_rho D_rho)) for i = 0..dim X."""
    ctx = context(v)
    coeffs = tuple(int(a) for a in coeffs)
    if len(coeffs) != v.nrays:
        raise ValueError("divisor has the wrong number of coefficients")
    h = seed_half_width(coeffs)
    prev = _dims_from_counts(ctx, _box_counts(ctx, coeffs, h))
    while True:
        h2 = 2 * h
        cur = _dims_from_counts(ctx, _box_counts(ctx, coeffs, h2))
        if cur == prev:
            return (cur, h) if return_box else cur
        prev, h = cur, h2


def cohomology_in_box(v, coeffs, h):
    """Same sum restricted to the box |c_i| <= h in the dual basis of the first cone."""
    ctx = context(v)
    return _dims_from_counts(ctx, _box_counts(ctx, tuple(coeffs), h))


def cohomology_of_class(v, cls):
    return cohomology(v, v.class_to_coeffs(cls))


def hom_dims(v, a, b):
    """dim Hom(O(a), O(b)[l]) = dim H^l(O(b - a)) for classes a, b."""
    return cohomology_of_class(v, tuple(y - x for x, y in zip(a, b)))


def character_bound(v, coeffs):
    """A bound on |m_j| for every character that can contribute.

    A contributing character lies in a region {<m,u> <= -a-1 on I, >= -a off I}
    with finitely many lattice points; such a region is the hull of points
    solving n independent equations <m,u_rho> = b_rho with b_rho in
    {-a_rho, -a_rho - 1}.
    """
    return lattice_points_bound(v.rays.tolist(), coeffs)


# -- Cech oracle ------------------------------------------------------------------

def _cech_pattern(v, bad_mask, n):
    """Cech cohomology of the cover by maximal cones for one character.

    A section x^m exists on U_tau exactly when no ray of tau is bad, so
    C^p has one basis vector per (p+1)-set of maximal cones whose common
    face has no bad ray.
    """
    cones = [frozenset(c) for c in v.max_cones]
    bad = {i for i in range(v.nrays) if bad_mask >> i & 1}
    k = len(cones)
    good = {}
    for p in range(0, n + 2):
        good[p] = []
        for S in combinations(range(k), p + 1):
            tau = frozenset.intersection(*(cones[i] for i in S))
            if not (tau & bad):
                good[p].append(S)
    index = {p: {S: j for j, S in enumerate(good[p])} for p in good}
    ranks = {}
    for p in range(0, n + 1):
        rows = []
        # delta^p : C^p -> C^{p+1}; build as rows indexed by C^{p+1}
        for T in good[p + 1]:
            row = {}
            for j in range(len(T)):
                S = T[:j] + T[j + 1:]
                if S in index[p]:
                    row[index[p][S]] = (-1) ** j
            rows.append(row)
        ranks[p] = sparse_rank(rows)
    return [len(good[p]) - ranks[p] - (ranks[p - 1] if p > 0 else 0) for p in range(n + 1)]


def cech_oracle(v, coeffs, degree_box=None):
    """Brute-force Cech cohomology over the characters in a box (test oracle).

    ``degree_box`` is a half-width in the standard coordinates of M; by
    default the rigorous bound of ``character_bound``.
    """
    require_smooth_complete(v)
    coeffs = tuple(int(a) for a in coeffs)
    n = v.dim
    h = character_bound(v, coeffs) if degree_box is None else degree_box
    rng = np.arange(-h, h + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * n), indexing="ij")
    Mch = np.stack([g.ravel() for g in grids], axis=1)
    B = np.array(v.rays.tolist(), dtype=np.int64)
    vals = Mch @ B.T + np.asarray(coeffs, dtype=np.int64)
    masks = (vals < 0).astype(np.int64) @ (np.int64(1) << np.arange(v.nrays, dtype=np.int64))
    uniq, counts = np.unique(masks, return_counts=True)
    dims = [0] * (n + 1)
    cache = _cech_cache(v)
    for mask, cnt in zip(uniq.tolist(), counts.tolist()):
        if mask not in cache:
            cache[mask] = _cech_pattern(v, mask, n)
        for i, d in enumerate(cache[mask]):
            dims[i] += cnt * d
    return CohomologyVector(dims)


_CECH = {}


def _cech_cache(v):
    key = (tuple(map(tuple, v.rays.tolist())), tuple(v.max_cones))
    return _CECH.setdefault(key, {})


def lattice_points_bound(rays, coeffs):
    """Bound on |m_j| for the lattice points of {m : <m, u_rho> >= -a_rho}.

    Every bounded such polytope is the hull of vertices solving n of the
    equations, so the inverse of each nonsingular n x n ray minor gives a bound.
    """
    n = len(rays[0])
    amax = max((abs(a) for a in coeffs), default=0) + 1
    bound = 0
    for S in combinations(range(len(rays)), n):
        try:
            inv = inverse([rays[i] for i in S])
        except ValueError:
            continue
        bound = max(bound, max(sum(abs(x) for x in inv.row(i)) for i in range(n)) * amax)
    return int(bound) + 1
