"""Exceptional collections of line bundles.

Given line bundle classes E_0, ..., E_{n-1} on X, decide whether some order
makes them a (strong) exceptional collection.  An order is admissible when
Hom^*(E_i, E_j) = 0 whenever E_i comes after E_j; self-Homs are always k in
degree 0 for line bundles on a complete variety.  Admissible orders are the
linear extensions of the digraph with an arc i -> j whenever Hom^*(E_i, E_j)
is nonzero, so a topological sort finds one or exhibits a cycle.
"""

from dataclasses import dataclass, field
import heapq
import json

from .cohomology import CohomologyVector, hom_dims

SCHEMA_VERSION = 1

STRONG = "strong_exceptional"
NOT_STRONG = "exceptional_not_strong"
NO_ORDER = "no_ordering_exists"


class NoOrdering(ValueError):
    pass


@dataclass
class HomTable:
    """hom[i, j] = H^*(O(classes[j] - classes[i])) = Hom^*(E_i, E_j)."""

    variety: object
    classes: list
    hom: dict

    def __len__(self):
        return len(self.classes)

    def total(self, i, j):
        return sum(self.hom[i, j])


def hom_table(v, classes):
    classes = [tuple(int(x) for x in c) for c in classes]
    hom = {}
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            hom[i, j] = hom_dims(v, a, b)
    n = v.dim
    for i in range(len(classes)):
        if tuple(hom[i, i]) != (1,) + (0,) * n:
            raise ArithmeticError(f"self-Hom of {classes[i]} is {hom[i, i]}")
    return HomTable(v, classes, hom)


@dataclass
class CollectionReport:
    verdict: str
    classes: list
    ordering: list = None
    F: list = None
    certificate: dict = None
    order_count: int = None
    non_strong_pairs: list = field(default_factory=list)
    name: str = None

    @property
    def ordered_classes(self):
        return [self.classes[i] for i in self.ordering] if self.ordering is not None else None

    def to_dict(self):
        d = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "verdict": self.verdict,
            "classes": [list(c) for c in self.classes],
            "ordering": self.ordering,
            "ordered_classes": [list(c) for c in self.ordered_classes] if self.ordering is not None else None,
            "F": self.F,
            "order_count": self.order_count,
            "certificate": self.certificate,
            "non_strong_pairs": self.non_strong_pairs,
        }
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _arcs(t):
    n = len(t)
    return {i: [j for j in range(n) if j != i and t.total(i, j)] for i in range(n)}


def topological_order(t):
    """Kahn's algorithm; among available vertices take the lexicographically largest class.

    Collections are conventionally listed from O downwards, and the largest
    class first reproduces that.  Returns None when the digraph has a cycle.
    """
    n = len(t)
    out = _arcs(t)
    indeg = [0] * n
    for i in range(n):
        for j in out[i]:
            indeg[j] += 1
    heap = [(_neg(t.classes[i]), i) for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(i)
        for j in out[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (_neg(t.classes[j]), j))
    return order if len(order) == n else None


def _neg(c):
    return tuple(-x for x in c)


def count_orders(t):
    """Number of admissible orders (linear extensions), by dynamic programming over subsets."""
    n = len(t)
    out = _arcs(t)
    pred = [0] * n
    for i in range(n):
        for j in out[i]:
            pred[j] |= 1 << i
    ways = [0] * (1 << n)
    ways[0] = 1
    for S in range(1 << n):
        if not ways[S]:
            continue
        for j in range(n):
            if not S >> j & 1 and pred[j] & S == pred[j]:
                ways[S | 1 << j] += ways[S]
    return ways[(1 << n) - 1]


def _cycle_certificate(t):
    n = len(t)
    for i in range(n):
        for j in range(i + 1, n):
            if t.total(i, j) and t.total(j, i):
                a, b = sorted((i, j), key=lambda k: _neg(t.classes[k]))
                return {
                    "pair": [list(t.classes[a]), list(t.classes[b])],
                    "forward": list(t.hom[a, b]),
                    "backward": list(t.hom[b, a]),
                }
    # no 2-cycle: report a longer cycle found by DFS
    out = _arcs(t)
    color = [0] * n
    stack = []

    def dfs(u):
        color[u] = 1
        stack.append(u)
        for w in out[u]:
            if color[w] == 1:
                return stack[stack.index(w):]
            if color[w] == 0:
                cyc = dfs(w)
                if cyc:
                    return cyc
        color[u] = 2
        stack.pop()
        return None

    for s in range(n):
        if color[s] == 0:
            cyc = dfs(s)
            if cyc:
                return {"cycle": [list(t.classes[k]) for k in cyc]}
    raise AssertionError("digraph has no cycle")


def f_matrix(t, ordering):
    """F[i][j] = dim Hom^0(E_j, E_i) in the given order."""
    return [[t.hom[ordering[j], ordering[i]][0] for j in range(len(ordering))] for i in range(len(ordering))]


def is_admissible(t, ordering):
    """No backward Homs: Hom^*(E_b, E_a) = 0 whenever a comes before b."""
    return all(t.total(ordering[b], ordering[a]) == 0
               for a in range(len(ordering)) for b in range(a + 1, len(ordering)))


def report_for_order(t, ordering, name=None):
    """Classify a fixed order (used for the stored order of a database record)."""
    if not is_admissible(t, ordering):
        raise NoOrdering("the given order has backward Homs")
    return _classify(t, list(ordering), name)


def _classify(t, order, name):
    non_strong = []
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            h = t.hom[order[a], order[b]]
            if not CohomologyVector(h).concentrated_in(0):
                non_strong.append({"from": list(t.classes[order[a]]), "to": list(t.classes[order[b]]),
                                   "hom": list(h)})
    return CollectionReport(
        verdict=STRONG if not non_strong else NOT_STRONG,
        classes=t.classes,
        ordering=order,
        F=f_matrix(t, order),
        order_count=count_orders(t),
        non_strong_pairs=non_strong,
        name=name,
    )


def find_exceptional_order(t, name=None):
    order = topological_order(t)
    if order is None:
        return CollectionReport(NO_ORDER, t.classes, certificate=_cycle_certificate(t), order_count=0, name=name)
    return _classify(t, order, name)


def surface_figure_checks(v, ordered_classes, labels=None):
    """Check every arrow label of an ordered collection.

    The label of the arrow from E_a to E_b is E_b - E_a.  Forward labels
    (a before b) must have cohomology concentrated in degree 0; backward
    labels must have no cohomology at all.  Extra labels given as
    {"forward": [...], "backward": [...]} are checked the same way.
    """
    from .cohomology import cohomology_of_class

    cl = [tuple(c) for c in ordered_classes]
    seen = {}
    for a in range(len(cl)):
        for b in range(len(cl)):
            if a == b:
                continue
            lab = tuple(y - x for x, y in zip(cl[a], cl[b]))
            seen[lab, "forward" if a < b else "backward"] = None
    for kind in ("forward", "backward"):
        for lab in (labels or {}).get(kind, []):
            seen[tuple(lab), kind] = None
    rows = []
    for lab, kind in seen:
        h = cohomology_of_class(v, lab)
        ok = h.concentrated_in(0) if kind == "forward" else h.is_zero()
        rows.append({"label": list(lab), "direction": kind, "cohomology": list(h), "ok": ok})
    rows.sort(key=lambda r: (r["direction"], r["label"]))
    return {"ok": all(r["ok"] for r in rows), "checks": rows}


def quiver_arcs(r):
    if r.verdict == NO_ORDER or r.F is None:
        raise NoOrdering("no admissible order, so no quiver")
    n = len(r.F)
    return [(j, i, r.F[i][j]) for j in range(n) for i in range(n) if i != j and r.F[i][j] > 0]


def quiver_dot(r):
    """DOT text of the quiver: vertices are order indices, arc j -> i labelled dim Hom^0(E_j, E_i)."""
    arcs = quiver_arcs(r)
    lines = ["digraph Q {", "  rankdir=LR;"]
    title = r.name or "collection"
    lines.append(f'  label="{title}";')
    for k, c in enumerate(r.ordered_classes):
        lines.append(f'  {k} [label="{k}", tooltip="{tuple(c)}"];')
    for j, i, m in arcs:
        lines.append(f'  {j} -> {i} [label="{m}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def check_collection(v, classes, name=None):
    return find_exceptional_order(hom_table(v, classes), name=name)
