from itertools import permutations
import json
import random

import pytest

from toricdiag.excol import (
    NO_ORDER, STRONG, NoOrdering, count_orders, f_matrix, find_exceptional_order, hom_table,
    is_admissible, quiver_arcs, quiver_dot, report_for_order, surface_figure_checks,
)
from toricdiag.toric import get_record, get_variety, projective_space, surface_names, threefold_names

POSITIVE = [n for n in threefold_names() if n not in ("F.3D.0000", "F.3D.0001")]


@pytest.fixture(scope="module")
def tables():
    out = {}
    for name in threefold_names() + surface_names():
        rec = get_record(name)
        out[name] = hom_table(rec.variety, rec.expected["collection"])
    return out


def test_p2_table():
    t = hom_table(get_variety("P2"), [(-2,), (-1,), (0,)])
    assert all(t.total(j, i) == 0 for i in range(3) for j in range(i + 1, 3))
    r = find_exceptional_order(t)
    assert r.verdict == STRONG
    assert r.ordered_classes == [(-2,), (-1,), (0,)]
    assert r.F == [[1, 0, 0], [3, 1, 0], [6, 3, 1]]


def test_diagonal_entries(tables):
    for t in tables.values():
        n = t.variety.dim
        assert all(tuple(t.hom[i, i]) == (1,) + (0,) * n for i in range(len(t)))


def test_singleton():
    r = find_exceptional_order(hom_table(projective_space(2), [(0,)]))
    assert r.verdict == STRONG and r.F == [[1]] and r.order_count == 1
    assert quiver_dot(r).count("->") == 0


def test_negative_certificates(tables):
    r = find_exceptional_order(tables["F.3D.0000"])
    assert r.verdict == NO_ORDER
    assert r.certificate == {"pair": [[0, -1, -1], [-1, 0, -2]], "forward": [0, 0, 1, 0], "backward": [6, 0, 0, 0]}
    r = find_exceptional_order(tables["F.3D.0001"])
    assert r.verdict == NO_ORDER
    assert r.certificate["pair"] == [[-1, -1], [-1, -4]]
    assert r.certificate["backward"] == [10, 0, 0, 0]
    # degree 2, not 1: the class (0,-3) is pulled back from O(-3) on P^2
    assert r.certificate["forward"] == [0, 0, 1, 0]
    with pytest.raises(NoOrdering):
        quiver_dot(r)


@pytest.mark.parametrize("name", POSITIVE + surface_names())
def test_strong_verdict_invariants(tables, name):
    t = tables[name]
    r = find_exceptional_order(t, name)
    assert r.verdict == STRONG
    n = len(t)
    F = r.F
    assert all(F[i][i] == 1 for i in range(n))
    assert all(F[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    o = r.ordering
    assert all(F[i][j] == t.hom[o[j], o[i]][0] for i in range(n) for j in range(n))
    arcs = quiver_arcs(r)
    assert all(j < i for j, i, _ in arcs)
    assert r.order_count >= 1


def test_verdict_count(tables):
    verdicts = [find_exceptional_order(tables[n]).verdict for n in threefold_names()]
    assert verdicts.count(STRONG) == 16


@pytest.mark.parametrize("name", ["F.3D.0002", "F.3D.0006", "BlpqrP2", "F.3D.0015"])
def test_order_invariance(tables, name):
    t = tables[name]
    base = find_exceptional_order(t)
    rng = random.Random(0)
    for _ in range(3):
        cl = list(t.classes)
        rng.shuffle(cl)
        r = find_exceptional_order(hom_table(t.variety, cl))
        assert r.verdict == base.verdict
        assert r.ordered_classes == base.ordered_classes
        assert r.F == base.F


@pytest.mark.parametrize("name", surface_names() + ["F.3D.0017", "F.3D.0014"])
def test_count_orders_brute_force(tables, name):
    t = tables[name]
    n = len(t)
    brute = sum(is_admissible(t, list(p)) for p in permutations(range(n)))
    assert count_orders(t) == brute


@pytest.mark.parametrize("name", POSITIVE)
def test_composition_lower_bound(tables, name):
    t = tables[name]
    r = find_exceptional_order(t)
    F, n = r.F, len(r.F)
    for i in range(n):
        for j in range(i):
            if any(F[k][j] and F[i][k] for k in range(j + 1, i)):
                assert F[i][j] >= 1


def test_f3d0002_printed_f(tables):
    t = tables["F.3D.0002"]
    r = report_for_order(t, list(range(len(t))))
    assert r.F[-1] == [12, 8, 7, 5, 5, 4, 3, 3, 2, 1]
    assert r.F == get_record("F.3D.0002").expected["F"]


def test_f3d0017_printed_f(tables):
    r = report_for_order(tables["F.3D.0017"], [0, 1, 2, 3])
    assert r.F == [[1, 0, 0, 0], [4, 1, 0, 0], [10, 4, 1, 0], [20, 10, 4, 1]]
    dot = quiver_dot(r)
    assert sorted(m for _, _, m in quiver_arcs(r)) == [4, 4, 4, 10, 10, 20]
    assert dot.count("[label=") == 4 + 6


def reflected(F):
    n = len(F)
    return [[F[n - 1 - j][n - 1 - i] for j in range(n)] for i in range(n)]


def matches(printed, F):
    return all(row is None or row == F[i] for i, row in enumerate(printed))


DIRECT = {"F.3D.0002", "F.3D.0005", "F.3D.0006", "F.3D.0012", "F.3D.0013", "F.3D.0014",
          "F.3D.0015", "F.3D.0016", "F.3D.0017"}


@pytest.mark.parametrize("name", POSITIVE)
def test_printed_f_conventions(tables, name):
    """Printed matrices are either F in the listed order or its anti-diagonal reflection."""
    t = tables[name]
    printed = get_record(name).expected["F"]
    F = f_matrix(t, list(range(len(t))))
    assert matches(printed, F) == (name in DIRECT)
    if name != "F.3D.0002":
        assert matches(printed, reflected(F))


def test_f3d0011_listed_order(tables):
    t = tables["F.3D.0011"]
    assert not is_admissible(t, list(range(8)))
    assert t.hom[5, 4] == (1, 0, 0, 0)
    assert is_admissible(t, [0, 1, 2, 3, 5, 4, 6, 7])
    with pytest.raises(NoOrdering):
        report_for_order(t, list(range(8)))


@pytest.mark.parametrize("name", [n for n in POSITIVE if n != "F.3D.0011"] + surface_names())
def test_listed_order_is_admissible(tables, name):
    t = tables[name]
    assert report_for_order(t, list(range(len(t)))).verdict == STRONG


@pytest.mark.parametrize("name", surface_names())
def test_surface_figures(name):
    rec = get_record(name)
    labels = {k: rec.expected[k] for k in ("forward", "backward") if k in rec.expected}
    rep = surface_figure_checks(rec.variety, rec.expected["collection"], labels)
    assert rep["ok"], [c for c in rep["checks"] if not c["ok"]]


def test_blp_backward_labels():
    v = get_variety("BlpP2")
    rep = surface_figure_checks(v, [(0, 0)], {"backward": [(-2, -1), (-1, -1), (-1, 0), (0, -1)]})
    assert rep["ok"] and len(rep["checks"]) == 4


def test_blpq_forward_label():
    rep = surface_figure_checks(get_variety("BlpqP2"), [(0, 0, 0)], {"forward": [(2, 1, 1)]})
    assert rep["ok"]


def test_p1_quiver():
    r = find_exceptional_order(hom_table(projective_space(1), [(0,), (-1,)]))
    assert r.ordered_classes == [(-1,), (0,)]
    assert quiver_arcs(r) == [(0, 1, 2)]
    dot = quiver_dot(r)
    assert '0 -> 1 [label="2"];' in dot
    assert dot == quiver_dot(r)


def test_report_json(tables):
    r = find_exceptional_order(tables["F.3D.0005"], "F.3D.0005")
    d = json.loads(r.to_json())
    assert d["schema_version"] == 1 and d["verdict"] == STRONG
    assert d["F"] == r.F and d["name"] == "F.3D.0005"
