"""Exact rational convex polyhedra of small dimension.

A polyhedron is stored by its H-representation ``A x <= b, E x = f``.
Vertices are found by intersecting every k-subset of inequalities inside
the affine hull of the equalities (k = dimension of that hull).  This is
cheap for the instances that occur here (ambient dimension at most 6,
a dozen or so facets per cell).
"""

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import ceil, factorial, floor
import threading

from .intlin import RatMatrix, _echelon


class DimensionMismatch(ValueError):
    pass


class Unbounded(ValueError):
    pass


class Empty(ValueError):
    pass


def _vec(v):
    return tuple(Fraction(x) for x in v)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _nullspace(rows, n):
    """Rational basis of {x : r.x = 0 for r in rows}."""
    ech = _echelon(rows) if rows else []
    pivots = [c for c, _ in ech]
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for fj in free:
        x = [Fraction(0)] * n
        x[fj] = Fraction(1)
        for c, r in ech:
            x[c] = -r[fj]
        basis.append(tuple(x))
    return basis


def _solve_square(rows, rhs):
    """Unique solution of a k x k system, or None if singular."""
    k = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(k):
        p = next((i for i in range(c, k) if aug[i][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        for i in range(k):
            if i != c and aug[i][c] != 0:
                f = aug[i][c] / pv
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return tuple(aug[i][k] / aug[i][i] for i in range(k))


def affine_rank(points):
    """Dimension of the affine hull of a list of points (-1 if empty)."""
    if not points:
        return -1
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    if not diffs:
        return 0
    return len(_echelon(diffs))


class Polyhedron:
    """Rational polyhedron {x : A x <= b, E x = f}.

    The V-representation is computed on first use and cached; the cache is
    filled under a lock so concurrent readers see a single computation.
    """

    def __init__(self, ambient_dim, ineqs=(), eqs=()):
        self.ambient_dim = ambient_dim
        self.ineqs = tuple((_vec(a), Fraction(b)) for a, b in ineqs)
        self.eqs = tuple((_vec(a), Fraction(b)) for a, b in eqs)
        for a, _ in self.ineqs + self.eqs:
            if len(a) != ambient_dim:
                raise DimensionMismatch(f"row of length {len(a)} in dimension {ambient_dim}")
        self._lock = threading.Lock()
        self._vcache = None

    def __repr__(self):
        return f"Polyhedron(dim={self.dim}, nverts={len(self.vertex_list)})"

    # affine hull of the equalities: x = x0 + sum t_i N_i
    @cached_property
    def _param(self):
        n = self.ambient_dim
        if not self.eqs:
            return tuple([Fraction(0)] * n), [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        rows = [list(a) + [b] for a, b in self.eqs]
        ech = _echelon(rows)
        if any(c == n for c, _ in ech):
            return None, []
        x0 = [Fraction(0)] * n
        for c, r in ech:
            x0[c] = r[n]
        return tuple(x0), _nullspace([list(a) for a, _ in self.eqs], n)

    def _reduced(self):
        """Inequalities rewritten in the hull coordinates t."""
        x0, N = self._param
        out = []
        for a, b in self.ineqs:
            out.append((tuple(_dot(a, v) for v in N), b - _dot(a, x0)))
        return out

    def _lift(self, t):
        x0, N = self._param
        return tuple(x0[i] + sum(tj * v[i] for tj, v in zip(t, N)) for i in range(self.ambient_dim))

    def _compute_vertices(self):
        x0, N = self._param
        if x0 is None:
            return []
        k = len(N)
        red = self._reduced()
        if k == 0:
            return [x0] if all(b >= 0 for _, b in red) else []
        # trivial rows carry no direction; an infeasible one empties P
        if any(all(c == 0 for c in a) and b < 0 for a, b in red):
            return []
        red = [(a, b) for a, b in red if any(c != 0 for c in a)]
        if len(_echelon([list(a) for a, _ in red]) if red else []) < k:
            return self._lineality_case(red, k)
        found = {}
        for sub in combinations(range(len(red)), k):
            t = _solve_square([red[i][0] for i in sub], [red[i][1] for i in sub])
            if t is None or t in found:
                continue
            if all(_dot(a, t) <= b for a, b in red):
                found[t] = True
        if found and self._has_recession(red, k):
            raise Unbounded("polyhedron has a recession direction")
        return sorted(self._lift(t) for t in found)

    def _lineality_case(self, red, k):
        # add orthogonality to the lineality space; nonempty then means unbounded
        lin = _nullspace([list(a) for a, _ in red], k)
        x0, N = self._param
        eqs = list(self.eqs)
        for d in lin:
            direction = self._lift(d)
            direction = tuple(a - b for a, b in zip(direction, x0))
            eqs.append((direction, _dot(direction, x0)))
        sub = Polyhedron(self.ambient_dim, self.ineqs, eqs)
        if sub.vertex_list:
            raise Unbounded("polyhedron contains a line")
        return []

    @staticmethod
    def _has_recession(red, k):
        rows = [a for a, _ in red]
        for sub in combinations(range(len(rows)), k - 1):
            ns = _nullspace([list(rows[i]) for i in sub], k) if k > 1 else [tuple([Fraction(1)])]
            if len(ns) != 1:
                continue
            d = ns[0]
            for s in (1, -1):
                if all(s * _dot(a, d) <= 0 for a in rows):
                    return True
        return False

    @property
    def vertex_list(self):
        if self._vcache is None:
            with self._lock:
                if self._vcache is None:
                    self._vcache = self._compute_vertices()
        return self._vcache

    def vertices(self):
        """Vertices as columns of a RatMatrix, lexicographically sorted."""
        vs = self.vertex_list
        return RatMatrix([[v[i] for v in vs] for i in range(self.ambient_dim)], len(vs))

    @property
    def is_empty(self):
        return not self.vertex_list

    @cached_property
    def dim(self):
        if not self.ineqs:
            # an affine subspace; E x = f is consistent iff the augmented rank agrees
            E = [list(a) for a, _ in self.eqs]
            Ef = [list(a) + [b] for a, b in self.eqs]
            r = len(_echelon(E)) if E else 0
            if E and len(_echelon(Ef)) > r:
                return -1
            return self.ambient_dim - r
        return affine_rank(self.vertex_list)

    def satisfies(self, x):
        return all(_dot(a, x) <= b for a, b in self.ineqs) and all(_dot(a, x) == b for a, b in self.eqs)

    def tight_sets(self):
        """For each inequality, the frozenset of vertex indices where it is tight."""
        vs = self.vertex_list
        return [frozenset(i for i, v in enumerate(vs) if _dot(a, v) == b) for a, b in self.ineqs]

    def pruned(self):
        """Same polytope with redundant inequalities removed (bounded case)."""
        vs = self.vertex_list
        if not vs:
            return self
        d = self.dim
        keep = []
        seen = set()
        eqs = list(self.eqs)
        for (a, b), tight in zip(self.ineqs, self.tight_sets()):
            if len(tight) == len(vs):
                eqs.append((a, b))
                continue
            if tight in seen or affine_rank([vs[i] for i in sorted(tight)]) != d - 1:
                continue
            seen.add(tight)
            keep.append((a, b))
        eqs = _independent_eqs(eqs, self.ambient_dim)
        out = Polyhedron(self.ambient_dim, keep, eqs)
        out._vcache = vs
        return out

    def facet_vertex_sets(self):
        vs = self.vertex_list
        d = self.dim
        out = []
        for tight in self.tight_sets():
            if len(tight) < len(vs) and tight not in out and affine_rank([vs[i] for i in sorted(tight)]) == d - 1:
                out.append(tight)
        return out

    def faces(self):
        """All nonempty faces as frozensets of local vertex indices, keyed by dimension."""
        vs = self.vertex_list
        if not vs:
            return {}
        top = frozenset(range(len(vs)))
        facets = self.facet_vertex_sets()
        allf = {top}
        frontier = [top]
        while frontier:
            new = []
            for f in frontier:
                for g in facets:
                    h = f & g
                    if h and h not in allf:
                        allf.add(h)
                        new.append(h)
            frontier = new
        out = {}
        for f in allf:
            out.setdefault(affine_rank([vs[i] for i in sorted(f)]), []).append(f)
        for d in out:
            out[d].sort(key=sorted)
        return out


def _independent_eqs(eqs, n):
    kept = []
    rows = []
    for a, b in eqs:
        trial = rows + [list(a) + [b]]
        if len(_echelon(trial)) > len(rows):
            rows = trial
            kept.append((a, b))
    return kept


def from_hdata(ineq_normals, ineq_offsets, eq_normals=(), eq_offsets=()):
    """Polyhedron {x : A x <= b, E x = f}."""
    A = [tuple(r) for r in ineq_normals]
    E = [tuple(r) for r in eq_normals]
    if len(A) != len(ineq_offsets) or len(E) != len(eq_offsets):
        raise DimensionMismatch("normals and offsets differ in length")
    dims = {len(r) for r in A + E}
    if len(dims) > 1:
        raise DimensionMismatch(f"rows of lengths {sorted(dims)}")
    if not dims:
        raise DimensionMismatch("no rows; ambient dimension unknown")
    n = dims.pop()
    return Polyhedron(n, zip(A, ineq_offsets), zip(E, eq_offsets))


def convex_hull(points):
    """Bounded polytope given by its vertices (computes an H-representation).

    Used for tests and round trips; the facet search is brute force.
    """
    pts = sorted(set(_vec(p) for p in points))
    if not pts:
        raise Empty("no points")
    n = len(pts[0])
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    normal_eqs = _nullspace(diffs, n) if diffs else [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    eqs = [(a, _dot(a, p0)) for a in normal_eqs]
    d = affine_rank(pts)
    ineqs = []
    seen = set()
    for sub in combinations(range(len(pts)), d):
        # hyperplane through the chosen points inside the affine hull
        rows = [[a - b for a, b in zip(pts[i], pts[sub[0]])] for i in sub[1:]] + [list(a) for a in normal_eqs]
        ns = _nullspace(rows, n)
        if len(ns) != 1:
            continue
        a = ns[0]
        b = _dot(a, pts[sub[0]])
        vals = [_dot(a, p) for p in pts]
        if all(v <= b for v in vals):
            pass
        elif all(v >= b for v in vals):
            a = tuple(-x for x in a)
            b = -b
        else:
            continue
        key = frozenset(i for i, p in enumerate(pts) if _dot(a, p) == b)
        if key in seen:
            continue
        seen.add(key)
        ineqs.append((a, b))
    if d == 0:
        ineqs = []
    P = Polyhedron(n, ineqs, eqs)
    return P


def intersection(P, Q):
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    R = Polyhedron(P.ambient_dim, P.ineqs + Q.ineqs, P.eqs + Q.eqs)
    return R.pruned() if R.vertex_list else R


def interior_point(P):
    """Vertex barycenter: a point in the relative interior."""
    vs = P.vertex_list
    if not vs:
        raise Empty("empty polyhedron")
    k = len(vs)
    return tuple(sum(v[i] for v in vs) / k for i in range(P.ambient_dim))


def contains(P, Q):
    """True iff every vertex of the bounded polyhedron Q lies in P."""
    if P.ambient_dim != Q.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    return all(P.satisfies(v) for v in Q.vertex_list)


def minkowski_translate(P, v):
    """P + v."""
    v = _vec(v)
    if len(v) != P.ambient_dim:
        raise DimensionMismatch("translation vector has wrong length")
    ineqs = [(a, b + _dot(a, v)) for a, b in P.ineqs]
    eqs = [(a, b + _dot(a, v)) for a, b in P.eqs]
    out = Polyhedron(P.ambient_dim, ineqs, eqs)
    if P._vcache is not None:
        out._vcache = sorted(tuple(x + y for x, y in zip(p, v)) for p in P._vcache)
    return out


def slab(v, i):
    """{x : i <= v.x <= i+1}."""
    v = _vec(v)
    return [(tuple(-x for x in v), -i), (v, i + 1)]


def slice_by_hyperplanes(P, rays):
    """Subdivide P by all integer level sets of v.x for each row v of ``rays``.

    Only cells of full dimension are kept.
    """
    d = P.dim
    cells = [P]
    for v in rays:
        v = _vec(v)
        new = []
        for c in cells:
            vals = [_dot(v, x) for x in c.vertex_list]
            lo, hi = floor(min(vals)), ceil(max(vals))
            if hi - lo <= 1:
                # the cell sits in a single slab already
                new.append(c)
                continue
            for i in range(lo, hi):
                piece = Polyhedron(c.ambient_dim, c.ineqs + tuple(slab(v, i)), c.eqs)
                if piece.vertex_list and piece.dim == d:
                    new.append(piece.pruned())
        cells = new
    return cells


class FaceTable:
    """Deduplicated vertices and faces (as sorted vertex-index tuples) of a cell complex."""

    def __init__(self, verts, faces_by_dim):
        self.verts = verts
        self.faces_by_dim = faces_by_dim

    def vertex_matrix(self):
        n = len(self.verts[0]) if self.verts else 0
        return RatMatrix([[v[i] for v in self.verts] for i in range(n)], len(self.verts))


def faces_by_dimension(cells):
    verts = sorted({v for c in cells for v in c.vertex_list})
    index = {v: i for i, v in enumerate(verts)}
    out = {}
    for c in cells:
        local = c.vertex_list
        for d, fs in c.faces().items():
            bucket = out.setdefault(d, set())
            for f in fs:
                bucket.add(tuple(sorted(index[local[i]] for i in f)))
    return FaceTable(verts, {d: sorted(fs) for d, fs in sorted(out.items())})


def _hull_coordinates(points):
    """Project points onto pivot coordinates of their affine hull directions."""
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    ech = _echelon(diffs) if diffs else []
    piv = [c for c, _ in ech]
    return [tuple(p[c] for c in piv) for p in points]


def volume(P, coords=None):
    """Relative volume of a bounded polytope.

    Measured in the coordinates ``coords`` (indices of ambient axes); by
    default the pivot axes of the affine hull, which depend only on the
    hull, so cells of one subdivision are measured consistently.
    """
    vs = P.vertex_list
    if not vs:
        return Fraction(0)
    d = P.dim
    if coords is None:
        p0 = vs[0]
        ech = _echelon([[a - b for a, b in zip(p, p0)] for p in vs[1:]]) if len(vs) > 1 else []
        coords = [c for c, _ in ech]
    faces = P.faces()
    total = Fraction(0)
    for simplex in _triangulate(frozenset(range(len(vs))), d, faces):
        pts = [tuple(vs[i][c] for c in coords) for i in simplex]
        rows = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
        total += abs(_square_det(rows)) / factorial(d)
    return total


def _square_det(rows):
    from .intlin import det
    return Fraction(det(RatMatrix(rows))) if rows else Fraction(1)


def _triangulate(face, d, faces):
    """Pulling triangulation of a face given as a vertex index set."""
    if d == 0:
        return [tuple(face)]
    apex = min(face)
    out = []
    for g in faces.get(d - 1, []):
        if g < face and apex not in g:
            for s in _triangulate(g, d - 1, faces):
                out.append(s + (apex,))
    return out
