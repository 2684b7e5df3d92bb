"""Cellular resolution of the diagonal of a toric variety.

The resolution is read off a periodic hyperplane arrangement.  Let Y be a
toric variety with ray matrix R and phi an injective map of lattices into
N_Y (for the diagonal, Y = X x X and phi = [I; I]).  On the subspace
K = {x : phi^T x = 0} the rays of Y cut out the hyperplanes
{x : <u, x> = k}.  A fundamental parallelepiped bounded by r of those
hyperplanes is subdivided by all the others; its cells modulo the lattice
L = K cap Z^N index the free summands, each labelled by the componentwise
ceiling of R x at an interior point.

Internally all cells live in the coordinates t with x = L t, in which the
parallelepiped is the unit cube.  The change of coordinates is linear and
invertible, so faces, labels and orientation signs are unchanged.
"""

from collections import defaultdict
from itertools import combinations
from math import ceil
import json

from .intlin import IntMatrix, RatMatrix, det, int_det, kernel_basis, leftmost_maxrank_columns, rank, snf, solve
from .polyhedra import (
    Polyhedron, faces_by_dimension, from_hdata, interior_point, slice_by_hyperplanes,
)
from .toric import diagonal_map, product


class NoUnimodularFrame(RuntimeError):
    pass


class NegativeExponent(AssertionError):
    pass


class DegenerateFrame(ValueError):
    pass


UNHANDLED = "Unhandled case, fundamental parallelogram not cut out by hyperplanes from Y"


# -- polynomials as {exponent tuple: coefficient} ------------------------------

def poly_mul(p, q):
    out = defaultdict(int)
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            out[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
    return {e: c for e, c in out.items() if c}


def poly_add(p, q):
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + c
        if out[e] == 0:
            del out[e]
    return out


# -- cells ----------------------------------------------------------------------

def kernel_subspace(phi):
    """{x : phi^T x = 0} as a polyhedron (a linear subspace)."""
    phi = IntMatrix(phi)
    m = phi.nrows
    rows = [phi.col(j) for j in range(phi.ncols)]
    return Polyhedron(m, (), [(r, 0) for r in rows])


class CellData:
    """Top cells of the subdivided parallelepiped, in lattice coordinates."""

    def __init__(self, cells, L, frame_rays, rays_t):
        self.cells = cells          # polyhedra in t-coordinates
        self.L = L                  # IntMatrix, columns a basis of K cap Z^N
        self.frame_rays = frame_rays  # indices of the rays bounding the parallelepiped
        self.rays_t = rays_t        # R L: rays of Y as functionals on t

    def lift(self, t):
        return self.L @ tuple(t)


def fundamental_frame(Y, phi):
    """First r-subset of rays whose images in coker(phi) have determinant +-1."""
    phi = IntMatrix(phi)
    res = snf(phi)
    k = len(res.invariant_factors)
    U = res.U
    psi = IntMatrix([U.row(i) for i in range(k, phi.nrows)], phi.nrows)
    arays = psi @ Y.rays.T
    r = rank(arays)
    if r != phi.nrows - rank(phi):
        raise NoUnimodularFrame("projected rays do not have full rank")
    for s in combinations(range(arays.ncols), r):
        if abs(int_det([[arays[i, j] for j in s] for i in range(arays.nrows)])) == 1:
            return list(s)
    raise NoUnimodularFrame(UNHANDLED)


def build_cells(Y, phi, frame=None):
    """Subdivide the fundamental parallelepiped by every ray hyperplane of Y.

    Returns a CellData whose cells are full-dimensional polytopes in the
    coordinates t of the lattice basis L (x = L t).
    """
    phi = IntMatrix(phi)
    if frame is None:
        frame = fundamental_frame(Y, phi)
    Kb = kernel_basis(phi.T)
    r = Kb.ncols
    if len(frame) != r:
        raise NoUnimodularFrame(UNHANDLED)
    Vf = IntMatrix([Y.rays.row(i) for i in frame], Y.rays.ncols)
    G = Vf @ Kb
    if abs(det(G)) != 1:
        raise NoUnimodularFrame(UNHANDLED)
    # columns of L are dual to the frame rays: <v_i, L_j> = delta_ij
    Ginv = solve(G, RatMatrix([[int(i == j) for j in range(r)] for i in range(r)]))
    L = IntMatrix(Kb @ Ginv)
    _check_lattice_basis(L, r)
    rays_t = Y.rays @ L
    cube = from_hdata([[-int(i == j) for j in range(r)] for i in range(r)]
                      + [[int(i == j) for j in range(r)] for i in range(r)],
                      [0] * r + [1] * r)
    cells = slice_by_hyperplanes(cube, rays_t.tolist())
    return CellData(cells, L, frame, rays_t)


def _check_lattice_basis(L, r):
    # the gcd of the maximal minors must be 1 (L spans a saturated lattice)
    from math import gcd
    g = 0
    for rows in combinations(range(L.nrows), r):
        g = gcd(g, int_det([list(L.row(i)) for i in rows]))
    if g != 1:
        raise NoUnimodularFrame(f"lattice basis is not saturated (gcd of minors {g})")


def parallelepiped(Y, phi, frame=None):
    """The fundamental parallelepiped as a polyhedron in the ambient space of K."""
    phi = IntMatrix(phi)
    if frame is None:
        frame = fundamental_frame(Y, phi)
    K = kernel_subspace(phi)
    ineqs = []
    for i in frame:
        v = Y.rays.row(i)
        ineqs.append(([-x for x in v], 0))
        ineqs.append((list(v), 1))
    return Polyhedron(K.ambient_dim, ineqs, K.eqs)


# -- lattice classes -------------------------------------------------------------

class CellClassTable:
    """Faces of the subdivision grouped into classes modulo L."""

    def __init__(self, verts, classes_by_dim, fine_degree, twist, dimension):
        self.verts = verts                    # list of vertex tuples (t-coordinates)
        self.classes_by_dim = classes_by_dim  # dim -> list of classes, each a list of faces
        self.fine_degree = fine_degree        # face -> tuple over rays of Y
        self.twist = twist                    # face -> tuple over Cl(Y)
        self.dimension = dimension

    def ranks(self):
        return [len(self.classes_by_dim.get(d, [])) for d in range(self.dimension + 1)]


def representative(vertices):
    """Translate a face into the lower corner: shift t_i by -1 while every vertex has t_i >= 1."""
    vs = [list(v) for v in vertices]
    r = len(vs[0])
    for i in range(r):
        if all(v[i] >= 1 for v in vs):
            for v in vs:
                v[i] -= 1
    return tuple(sorted(tuple(v) for v in vs))


def fine_degree_at(rays_t, point):
    return tuple(ceil(sum(a * b for a, b in zip(row, point))) for row in rays_t)


def group_by_lattice_class(Y, data, point_fn=interior_point):
    ft = faces_by_dimension(data.cells)
    verts = ft.verts
    d = max(ft.faces_by_dim)
    rays_t = data.rays_t.tolist()
    fine, twist = {}, {}
    classes_by_dim = {}
    for k, faces in ft.faces_by_dim.items():
        groups = defaultdict(list)
        for f in faces:
            P = Polyhedron(len(verts[0]), ())
            P._vcache = [verts[i] for i in f]
            pt = point_fn(P)
            fd = fine_degree_at(rays_t, pt)
            fine[f] = fd
            twist[f] = tuple(-x for x in Y.grading @ fd)
            groups[representative([verts[i] for i in f])].append(f)
        classes_by_dim[k] = [sorted(groups[key]) for key in sorted(groups)]
    return CellClassTable(verts, classes_by_dim, fine, twist, d)


# -- orientation ----------------------------------------------------------------

def frame(verts, p):
    """Edge vectors from the first vertex of p, leftmost independent subset (as columns)."""
    vp = [verts[i] for i in p]
    if len(vp) == 1:
        return RatMatrix([[] for _ in verts[0]], 0)
    cols = [[a - b for a, b in zip(v, vp[0])] for v in vp[1:]]
    M = RatMatrix([[c[i] for c in cols] for i in range(len(vp[0]))], len(cols))
    keep = leftmost_maxrank_columns(M)
    return M.columns(keep)


def _orient(fP, fP2):
    if fP.ncols != fP2.ncols:
        raise DegenerateFrame("frames of different dimension")
    if fP.ncols == 0:
        return 1
    M = solve(fP, fP2)
    return 1 if det(M) > 0 else -1


def boundary_sign(verts, q, p):
    """Orientation sign of the codimension one face q in p."""
    fP = frame(verts, p)
    fQ = frame(verts, q)
    extra = [i for i in p if i not in q]
    if not extra or fP.ncols != fQ.ncols + 1:
        raise DegenerateFrame(f"{q} is not a facet of {p}")
    q0 = verts[q[0]]
    w = [a - b for a, b in zip(verts[extra[0]], q0)]
    ext = RatMatrix([list(fQ.row(i)) + [w[i]] for i in range(fQ.nrows)], fQ.ncols + 1)
    return _orient(fP, ext)


def gluing_sign(verts, p, q):
    """Sign comparing the frames of two translates p and q."""
    return _orient(frame(verts, p), frame(verts, q))


# -- the complex ----------------------------------------------------------------

class GradedFreeComplex:
    """Free complex over the Cox ring of Y.

    ``terms[t]`` lists the twists (Cl(Y) vectors) of the summands in
    homological degree t; ``diffs[t]`` is the matrix of the differential
    from term t+1 to term t, entries polynomials {exponent: coefficient}.
    """

    def __init__(self, terms, diffs, nvars, factor_ranks=None):
        self.terms = [[tuple(t) for t in term] for term in terms]
        self.diffs = diffs
        self.nvars = nvars
        self.factor_ranks = factor_ranks

    def ranks(self):
        return [len(t) for t in self.terms]

    def split(self, twist):
        a = self.factor_ranks[0]
        return tuple(twist[:a]), tuple(twist[a:])

    def to_json(self):
        return {
            "terms": [[list(t) for t in term] for term in self.terms],
            "diffs": [[[[[c, list(e)] for e, c in sorted(entry.items())] for entry in row] for row in M]
                      for M in self.diffs],
        }

    @classmethod
    def from_json(cls, d, nvars, factor_ranks=None):
        diffs = [[[{tuple(e): c for c, e in entry} for entry in row] for row in M] for M in d["diffs"]]
        return cls(d["terms"], diffs, nvars, factor_ranks)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def composition_defects(self):
        """Indices t where diff_t * diff_{t+1} is not zero."""
        bad = []
        for t in range(len(self.diffs) - 1):
            A, B = self.diffs[t], self.diffs[t + 1]
            for i in range(len(A)):
                for j in range(len(B[0]) if B else 0):
                    acc = {}
                    for k in range(len(B)):
                        if A[i][k] and B[k][j]:
                            acc = poly_add(acc, poly_mul(A[i][k], B[k][j]))
                    if acc:
                        bad.append((t, i, j))
        return bad

    def is_complex(self):
        return not self.composition_defects()

    def homogeneity_defects(self, grading):
        bad = []
        for t, M in enumerate(self.diffs):
            for i, row in enumerate(M):
                for j, entry in enumerate(row):
                    want = tuple(a - b for a, b in zip(self.terms[t][i], self.terms[t + 1][j]))
                    for e in entry:
                        if any(x < 0 for x in e) or tuple(grading @ e) != want:
                            bad.append((t, i, j, e))
        return bad

    def minimality_defects(self):
        return [(t, i, j) for t, M in enumerate(self.diffs) for i, row in enumerate(M)
                for j, entry in enumerate(row) if any(not any(e) for e in entry)]


def assemble(Y, table):
    """Differentials from class incidences, with gluing and boundary signs."""
    verts = table.verts
    diffs = []
    for i in range(table.dimension):
        tgts = table.classes_by_dim.get(i, [])
        srcs = table.classes_by_dim.get(i + 1, [])
        M = []
        for tcls in tgts:
            row = []
            trep = tcls[0]
            for scls in srcs:
                src = scls[0]
                sset = set(src)
                entry = {}
                for tgt in tcls:
                    if not sset.issuperset(tgt):
                        continue
                    e = tuple(a - b for a, b in zip(table.fine_degree[src], table.fine_degree[tgt]))
                    if any(x < 0 for x in e):
                        raise NegativeExponent(f"negative exponent {e} between {tgt} and {src}")
                    c = gluing_sign(verts, trep, tgt) * boundary_sign(verts, tgt, src)
                    entry = poly_add(entry, {e: c})
                row.append(entry)
            M.append(row)
        diffs.append(M)
    terms = [[table.twist[cls[0]] for cls in table.classes_by_dim.get(d, [])]
             for d in range(table.dimension + 1)]
    return GradedFreeComplex(terms, diffs, Y.nrays)


def resolve_diagonal(X):
    """Cellular resolution of the diagonal of X, as a complex over Cox(X x X)."""
    Y = product(X, X)
    phi = diagonal_map(X)
    data = build_cells(Y, phi)
    table = group_by_lattice_class(Y, data)
    C = assemble(Y, table)
    C.factor_ranks = (X.cl_rank, X.cl_rank)
    return C


def resolve_embedding(Y, phi):
    """Resolution attached to a general injective phi into N_Y."""
    data = build_cells(Y, phi)
    table = group_by_lattice_class(Y, data)
    return assemble(Y, table)


def extract_collection(C, side="first"):
    """(multiset, set) of the chosen factor's twists over all summands."""
    k = 0 if side == "first" else 1
    multi = [C.split(t)[k] for term in C.terms for t in term]
    return multi, sorted(set(multi))


# -- Euler characteristic oracle -------------------------------------------------

class SampleTooLarge(ValueError):
    pass


def _factor_data(Y, phi, C):
    phi = IntMatrix(phi)
    n = phi.ncols
    if phi.tolist() != [[int(i == j) for j in range(n)] for i in range(n)] * 2:
        raise ValueError("euler_char_oracle handles the diagonal embedding only")
    nx = Y.nrays // 2
    k = C.factor_ranks[0]
    rays = [Y.rays.row(i)[:n] for i in range(nx)]
    grading = [Y.grading.row(i)[:nx] for i in range(k)]
    return rays, grading


def monomials_of_degree(rays, grading, cls, cap=None):
    """Exponent vectors e >= 0 with grading . e = cls, via the lattice points of P_D."""
    from .intlin import solve_integral
    from .cohomology import lattice_points_bound
    import numpy as np

    coeffs = solve_integral(IntMatrix(grading), tuple(cls))
    if coeffs is None:
        return []
    h = lattice_points_bound(rays, coeffs)
    n = len(rays[0])
    rng = np.arange(-h, h + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * n), indexing="ij")
    M = np.stack([g.ravel() for g in grids], axis=1)
    E = M @ np.array(rays, dtype=np.int64).T + np.asarray(coeffs, dtype=np.int64)
    E = E[(E >= 0).all(axis=1)]
    if cap is not None and len(E) > cap:
        raise SampleTooLarge(f"{len(E)} monomials in degree {tuple(cls)}")
    return sorted(tuple(int(x) for x in e) for e in E)


def complex_euler_char(C, counter, bidegree):
    """sum_t (-1)^t sum_j dim S(tw_j)_(a,b), with dim S_(a,b) = counter(a) * counter(b)."""
    a, b = bidegree
    chi = 0
    for t, term in enumerate(C.terms):
        for tw in term:
            tx, ty = C.split(tw)
            dx = tuple(p + q for p, q in zip(a, tx))
            dy = tuple(p + q for p, q in zip(b, ty))
            chi += (-1) ** t * counter(dx) * counter(dy)
    return chi


def fiber_graph_components(rays, grading, bidegree, cap=100000):
    """Connected components of the monomials x^p y^q of degree (a, b) under J_L moves.

    A move replaces x^(u+c) y^(v+d) by x^(v+c) y^(u+d) with u - v in L = im(B).
    Since Cl is torsion free, u - v lies in L exactly when grading.(u - v) = 0.
    """
    a, b = bidegree
    P = monomials_of_degree(rays, grading, a, cap)
    Q = monomials_of_degree(rays, grading, b, cap)
    if len(P) * len(Q) > cap:
        raise SampleTooLarge(f"{len(P) * len(Q)} monomials in bidegree {bidegree}")
    nodes = [(p, q) for p in P for q in Q]
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    buckets = defaultdict(list)
    for i, (p, q) in enumerate(nodes):
        buckets[tuple(x + y for x, y in zip(p, q))].append(i)
    for members in buckets.values():
        for i, j in combinations(members, 2):
            u = [x - y for x, y in zip(nodes[i][0], nodes[j][0])]
            if all(sum(g * w for g, w in zip(row, u)) == 0 for row in grading):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    return len({find(i) for i in range(len(nodes))})


def euler_char_oracle(Y, phi, C, degree_sample, cap=100000):
    """Compare the Euler characteristic of each graded piece with a fiber-graph count.

    Returns a list of dicts with keys bidegree, chi, components, ok.
    """
    rays, grading = _factor_data(Y, phi, C)
    memo = {}

    def counter(cls):
        if cls not in memo:
            memo[cls] = len(monomials_of_degree(rays, grading, cls, cap))
        return memo[cls]

    report = []
    for a, b in degree_sample:
        a, b = tuple(a), tuple(b)
        chi = complex_euler_char(C, counter, (a, b))
        comps = fiber_graph_components(rays, grading, (a, b), cap)
        report.append({"bidegree": (a, b), "chi": chi, "components": comps, "ok": chi == comps})
    return report
