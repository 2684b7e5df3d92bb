"""Smooth complete toric varieties given by fans.

Rays are stored as the rows of an integer matrix ``B``; the class group
grading ``pi`` is a matrix with ``pi @ B == 0`` whose columns are the
classes of the torus invariant divisors D_rho.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, cmp_to_key
from importlib import resources
from itertools import combinations
from math import gcd
import json
import random

from .intlin import (
    IntMatrix, cokernel_presentation, int_det, inverse, maximal_minors_in_unit_set,
    rank, solve_integral,
)
from .polyhedra import from_hdata


class MalformedFan(ValueError):
    pass


class NotReflexive(ValueError):
    pass


class NotSmooth(ValueError):
    pass


class NotComplete(ValueError):
    pass


@dataclass
class ValidationReport:
    smooth: bool
    complete: bool
    unimodular: bool
    fano_hint: bool

    def as_dict(self):
        return {"smooth": self.smooth, "complete": self.complete,
                "unimodular": self.unimodular, "fano_hint": self.fano_hint}


class ToricVariety:
    """Fan data plus a class group grading."""

    def __init__(self, name, rays, max_cones, grading=None):
        self.name = name
        self.rays = IntMatrix(rays)
        self.dim = self.rays.ncols
        self.max_cones = [tuple(sorted(c)) for c in max_cones]
        if grading is None:
            grading = cokernel_presentation(self.rays)
        self.grading = IntMatrix(grading, self.rays.nrows)

    def __repr__(self):
        return f"ToricVariety({self.name!r}, rays={self.nrays}, cones={len(self.max_cones)})"

    @property
    def nrays(self):
        return self.rays.nrows

    @property
    def B(self):
        return self.rays

    @property
    def cl_rank(self):
        return self.grading.nrows

    def line_bundle_class(self, coeffs):
        """Class of sum a_rho D_rho in the stored presentation."""
        if len(coeffs) != self.nrays:
            raise ValueError("divisor has the wrong number of coefficients")
        return self.grading @ tuple(coeffs)

    @cached_property
    def _class_solver(self):
        # a unimodular set of columns of the grading gives small representatives
        r = self.cl_rank
        for cols in combinations(range(self.nrays), r):
            if abs(int_det([[self.grading[i, j] for j in cols] for i in range(r)])) == 1:
                sub = [[self.grading[i, j] for j in cols] for i in range(r)]
                return cols, inverse(sub)
        return None

    def class_to_coeffs(self, cls):
        """An integral divisor representing the given class."""
        cls = tuple(int(c) for c in cls)
        if len(cls) != self.cl_rank:
            raise ValueError(f"class {cls} has wrong length, expected {self.cl_rank}")
        if self.cl_rank == 0:
            return (0,) * self.nrays
        solver = self._class_solver
        if solver is not None:
            cols, inv = solver
            vals = inv @ cls
            coeffs = [0] * self.nrays
            for j, v in zip(cols, vals):
                coeffs[j] = int(v)
            return tuple(coeffs)
        sol = solve_integral(self.grading, cls)
        if sol is None:
            raise ValueError(f"class {cls} is not in the image of the grading")
        return sol

    def cone_matrix(self, cone):
        return [self.rays.row(i) for i in cone]

    def anticanonical_coeffs(self):
        return (1,) * self.nrays

    def validate(self, probes=1000, seed=0):
        return validate(self, probes=probes, seed=seed)

    def to_dict(self):
        return {"name": self.name, "dim": self.dim, "rays": self.rays.tolist(),
                "max_cones": [list(c) for c in self.max_cones],
                "grading": self.grading.tolist()}


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


def _facet_pairing(v):
    n = v.dim
    count = {}
    for c in v.max_cones:
        for f in combinations(c, n - 1):
            count[f] = count.get(f, 0) + 1
    return all(k == 2 for k in count.values())


def _probe_coverage(v, probes, seed):
    rng = random.Random(seed)
    invs = [inverse([list(r) for r in zip(*v.cone_matrix(c))]) for c in v.max_cones]
    for _ in range(probes):
        x = tuple(rng.randint(-1000, 1000) for _ in range(v.dim))
        if not any(x):
            continue
        if not any(all(c >= 0 for c in inv @ x) for inv in invs):
            return False
    return True


def validate(v, probes=1000, seed=0):
    """Smoothness, completeness, unimodularity and a Fano hint for a simplicial fan."""
    n = v.dim
    for i in range(v.nrays):
        if not _primitive(v.rays.row(i)):
            raise MalformedFan(f"ray {v.rays.row(i)} is not primitive")
    full = True
    smooth = True
    for c in v.max_cones:
        M = v.cone_matrix(c)
        if rank(M) != len(c):
            raise MalformedFan(f"cone {c} has dependent rays")
        if len(c) != n:
            full = False
            smooth = False
            continue
        if abs(int_det(M)) != 1:
            smooth = False
    complete = full and bool(v.max_cones) and _facet_pairing(v) and _probe_coverage(v, probes, seed)
    unimodular = maximal_minors_in_unit_set(v.rays)
    return ValidationReport(smooth, complete, unimodular, _fano_hint(v) if full else False)


def _fano_hint(v):
    # -K = sum D_rho is ample iff its support function is strictly convex
    n = v.dim
    for c in v.max_cones:
        M = v.cone_matrix(c)
        inv = inverse(M)
        m = inv @ ((-1,) * n)
        for i in range(v.nrays):
            if i in c:
                continue
            if sum(a * b for a, b in zip(m, v.rays.row(i))) <= -1:
                return False
    return True


def require_smooth_complete(v):
    rep = validate(v, probes=200)
    if not rep.smooth:
        raise NotSmooth(v.name)
    if not rep.complete:
        raise NotComplete(v.name)
    return rep


def fan_from_reflexive_polytope(halfspaces, name="", grading=None, ray_order=None):
    """Normal fan of P = {x : h0 + h.x >= 0} given polymake style rows (h0, h).

    The rays are the rows h; one maximal cone per vertex of P, spanned by
    the facets through it.  ``ray_order`` lets the caller fix the order of
    the rays (it must be a permutation of the rows).
    """
    H = [list(map(int, r)) for r in halfspaces]
    if any(r[0] != 1 for r in H):
        raise NotReflexive("every offset must be 1")
    normals = [tuple(r[1:]) for r in H]
    n = len(normals[0])
    P = from_hdata([[-x for x in a] for a in normals], [1] * len(normals))
    verts = P.vertex_list
    if any(x.denominator != 1 for v in verts for x in v):
        raise NotReflexive("vertices are not integral")
    if ray_order is None:
        rays = [list(a) for a in normals]
    else:
        rays = [list(r) for r in ray_order]
        if sorted(map(tuple, rays)) != sorted(normals):
            raise ValueError("ray_order is not a permutation of the half-space normals")
    index = {tuple(r): i for i, r in enumerate(rays)}
    for r in rays:
        if not _primitive(r):
            raise NotReflexive(f"normal {r} is not primitive")
    cones = []
    for v in verts:
        tight = [index[a] for a in normals if 1 + sum(x * y for x, y in zip(a, v)) == 0]
        cones.append(tuple(sorted(tight)))
    cones.sort()
    return ToricVariety(name, rays, cones, grading)


def product(v, w, name=None):
    """X x Y: rays (u, 0) and (0, u'), cones all unions, grading block diagonal."""
    n, m = v.dim, w.dim
    rays = [list(r) + [0] * m for r in v.rays] + [[0] * n + list(r) for r in w.rays]
    off = v.nrays
    cones = [tuple(a) + tuple(off + j for j in b) for a in v.max_cones for b in w.max_cones]
    ga, gb = v.grading, w.grading
    grading = [list(r) + [0] * w.nrays for r in ga] + [[0] * v.nrays + list(r) for r in gb]
    return ToricVariety(name or f"{v.name}x{w.name}", rays, cones, IntMatrix(grading, off + w.nrays))


def diagonal_map(v):
    """The 2n x n matrix [I; I] of N -> N + N, x -> (x, x)."""
    n = v.dim
    return IntMatrix([[int(i == j) for j in range(n)] for i in range(n)] * 2, n)


def projective_space(n, name=None):
    rays = [[int(i == j) for j in range(n)] for i in range(n)] + [[-1] * n]
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return ToricVariety(name or f"P{n}", rays, cones, [[1] * (n + 1)])


# -- unimodular surfaces ---------------------------------------------------

def _angle_cmp(a, b):
    ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
    hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def _cyclic_sort(rays):
    """Counterclockwise order starting from the positive x axis (exact)."""
    return sorted((tuple(r) for r in rays), key=cmp_to_key(_angle_cmp))


def _complete_smooth_cycle(rays):
    """Rays in counterclockwise order form a complete smooth fan."""
    k = len(rays)
    if k < 3:
        return False
    for i in range(k):
        a, b = rays[i], rays[(i + 1) % k]
        if a[0] * b[1] - a[1] * b[0] != 1:
            return False
    return True


def _canonical_surface(rays):
    """Canonical form under GL(2, Z): minimum over adjacent pairs sent to (e1, e2)."""
    cyc = _cyclic_sort(rays)
    k = len(cyc)
    best = None
    for i in range(k):
        for step in (1, -1):
            u, w = cyc[i], cyc[(i + step) % k]
            d = u[0] * w[1] - u[1] * w[0]
            # inverse of the matrix with columns u, w
            g = ((w[1] * d, -w[0] * d), (-u[1] * d, u[0] * d))
            img = tuple(sorted((g[0][0] * r[0] + g[0][1] * r[1], g[1][0] * r[0] + g[1][1] * r[1]) for r in cyc))
            if best is None or img < best:
                best = img
    return best


def surface_from_rays(rays, name=""):
    cyc = [tuple(r) for r in _cyclic_sort(rays)]
    k = len(cyc)
    cones = [tuple(sorted((i, (i + 1) % k))) for i in range(k)]
    return ToricVariety(name, [list(r) for r in cyc], cones)


def classify_unimodular_surfaces():
    """All complete unimodular toric surfaces up to isomorphism.

    After moving one cone to (e1, e2), unimodularity forces every ray into
    {-1, 0, 1}^2, so it suffices to search subsets of the six remaining
    candidates.
    """
    cands = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if (a, b) not in ((0, 0), (1, 0), (0, 1))]
    classes = {}
    # depth-first over subsets of the candidates, pruning as soon as a minor leaves {0, +-1}
    stack = [(((1, 0), (0, 1)), 0)]
    while stack:
        rs, start = stack.pop()
        cyc = _cyclic_sort(rs)
        if _complete_smooth_cycle(cyc):
            classes.setdefault(_canonical_surface(cyc), cyc)
        for i in range(start, len(cands)):
            ext = rs + (cands[i],)
            if maximal_minors_in_unit_set([list(r) for r in ext]):
                stack.append((ext, i + 1))
    known = {_canonical_surface(surface_rays): nm for nm, surface_rays in _SURFACE_NAMES.items()}
    out = []
    for canon, cyc in sorted(classes.items(), key=lambda kv: (len(kv[0]), kv[0])):
        out.append(surface_from_rays(cyc, known.get(canon, "unnamed")))
    return out


_SURFACE_NAMES = {
    "P2": [(1, 0), (0, 1), (-1, -1)],
    "P1xP1": [(1, 0), (0, 1), (-1, 0), (0, -1)],
    "BlpP2": [(1, 0), (0, 1), (-1, -1), (1, 1)],
    "BlpqP2": [(1, 0), (0, 1), (-1, -1), (1, 1), (0, -1)],
    "BlpqrP2": [(1, 0), (0, 1), (-1, -1), (1, 1), (0, -1), (-1, 0)],
}


# -- database ----------------------------------------------------------------

@dataclass
class VarietyRecord:
    variety: ToricVariety
    halfspaces: list = None
    expected: dict = field(default_factory=dict)

    @property
    def name(self):
        return self.variety.name


def record_from_dict(d):
    for key in ("name", "rays", "max_cones", "grading"):
        if key not in d:
            raise ValueError(f"variety record lacks {key!r}")
    v = ToricVariety(d["name"], d["rays"], d["max_cones"], d["grading"])
    if "dim" in d and d["dim"] != v.dim:
        raise ValueError(f"{d['name']}: dim {d['dim']} does not match rays")
    gb = v.grading @ v.rays
    if any(gb.entries):
        raise ValueError(f"{d['name']}: grading does not annihilate the rays")
    return VarietyRecord(v, d.get("halfspaces"), d.get("expected", {}))


_DB = None


def load_database():
    """All built-in varieties, keyed by name (loaded once)."""
    global _DB
    if _DB is None:
        text = resources.files("toricdiag").joinpath("data/varieties.json").read_text()
        data = json.loads(text)
        _DB = {d["name"]: record_from_dict(d) for d in data["varieties"]}
    return _DB


def get_record(name):
    db = load_database()
    if name not in db:
        raise KeyError(f"unknown variety {name!r}")
    return db[name]


def get_variety(name):
    return get_record(name).variety


def threefold_names():
    return sorted(n for n in load_database() if n.startswith("F.3D."))


def surface_names():
    return ["P1xP1", "P2", "BlpP2", "BlpqP2", "BlpqrP2"]
