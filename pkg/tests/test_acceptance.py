"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line.

Two criteria fail on the stored reference values and are marked strict
xfail, with a companion test pinning down what is computed instead:

  3  printed F matrices: 9 of 16 agree entry for entry in the listed order;
     the other 7 are the anti-diagonal reflection of F (all 15 non-F.3D.0002
     cases agree under that reflection).
  4  F.3D.0001: the forward Hom of the certificate pair is (0,0,1,0), not
     (0,1,0,0); the class (0,-3) is pulled back from O(-3) on P^2.
"""

import json
from pathlib import Path
import random
import time

import pytest

from conftest import record
from toricdiag.cohomology import cech_oracle, cohomology, cohomology_in_box
from toricdiag.diagres import euler_char_oracle, extract_collection, resolve_diagonal
from toricdiag.excol import (
    NO_ORDER, STRONG, f_matrix, find_exceptional_order, hom_table, surface_figure_checks,
)
from toricdiag.toric import (
    classify_unimodular_surfaces, diagonal_map, get_record, get_variety, product, surface_names,
    threefold_names,
)

GOLDEN = json.loads(Path(__file__).with_name("golden.json").read_text())
THREEFOLDS = threefold_names()
SURFACES = surface_names()
POSITIVE = [n for n in THREEFOLDS if n not in ("F.3D.0000", "F.3D.0001")]


@pytest.fixture(scope="module")
def resolutions():
    out = {}
    for name in THREEFOLDS + SURFACES:
        t0 = time.perf_counter()
        C = resolve_diagonal(get_variety(name))
        out[name] = (C, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def tables():
    return {n: hom_table(get_variety(n), get_record(n).expected["collection"]) for n in THREEFOLDS + SURFACES}


def test_criterion_1_ranks(resolutions):
    bad = [n for n in THREEFOLDS if resolutions[n][0].ranks() != get_record(n).expected["ranks"]]
    slow = max(resolutions[n][1] for n in THREEFOLDS)
    ok = not bad and slow < 10
    record(1, ok, f"{18 - len(bad)}/18 rank sequences exact, slowest {slow:.2f} s")
    assert ok, bad


def test_criterion_2_collections(resolutions):
    bad = []
    for n in THREEFOLDS + SURFACES:
        got = set(extract_collection(resolutions[n][0])[1])
        if got != {tuple(c) for c in get_record(n).expected["collection"]}:
            bad.append(n)
    record(2, not bad, f"{23 - len(bad)}/23 collections equal as sets")
    assert not bad, bad


def _printed_match(name, tables):
    t = tables[name]
    F = f_matrix(t, list(range(len(t))))
    printed = get_record(name).expected["F"]
    return all(row is None or row == F[i] for i, row in enumerate(printed))


@pytest.mark.xfail(strict=True, reason="7 printed matrices are the anti-diagonal reflection of F")
def test_criterion_3_f_matrices(tables):
    direct = [n for n in POSITIVE if _printed_match(n, tables)]
    ok = len(direct) == 16
    record(3, ok, f"{len(direct)}/16 printed F matrices equal F in the listed order "
                  f"(mismatches: {' '.join(n for n in POSITIVE if n not in direct)})")
    assert ok


def test_criterion_3_reflection(tables):
    for n in POSITIVE:
        t = tables[n]
        m = len(t)
        F = f_matrix(t, list(range(m)))
        R = [[F[m - 1 - j][m - 1 - i] for j in range(m)] for i in range(m)]
        printed = get_record(n).expected["F"]
        direct = _printed_match(n, tables)
        reflected = all(row is None or row == R[i] for i, row in enumerate(printed))
        assert direct or reflected, n


def _certificates(tables):
    return {n: find_exceptional_order(tables[n]) for n in ("F.3D.0000", "F.3D.0001")}


@pytest.mark.xfail(strict=True, reason="F.3D.0001 forward Hom is concentrated in degree 2")
def test_criterion_4_certificates(tables):
    want = {"F.3D.0000": ([0, 0, 1, 0], [6, 0, 0, 0]), "F.3D.0001": ([0, 1, 0, 0], [10, 0, 0, 0])}
    reps = _certificates(tables)
    got = {n: (r.certificate["forward"], r.certificate["backward"]) for n, r in reps.items()}
    ok = got == want and all(r.verdict == NO_ORDER for r in reps.values())
    record(4, ok, "certificates " + "; ".join(f"{n} forward {tuple(f)} backward {tuple(b)}"
                                              for n, (f, b) in sorted(got.items())))
    assert ok


def test_criterion_4_computed(tables):
    reps = _certificates(tables)
    assert all(r.verdict == NO_ORDER for r in reps.values())
    c0, c1 = reps["F.3D.0000"].certificate, reps["F.3D.0001"].certificate
    assert (c0["forward"], c0["backward"]) == ([0, 0, 1, 0], [6, 0, 0, 0])
    assert (c1["forward"], c1["backward"]) == ([0, 0, 1, 0], [10, 0, 0, 0])
    v = get_variety("F.3D.0001")
    D = v.class_to_coeffs((0, -3))
    assert cohomology(v, D) == cech_oracle(v, D) == (0, 0, 1, 0)


def test_criterion_5_headline():
    verdicts = [r["verdict"] for r in GOLDEN["reports"]]
    live = [find_exceptional_order(hom_table(get_variety(n), get_record(n).expected["collection"])).verdict
            for n in THREEFOLDS]
    ok = live == verdicts and live.count(STRONG) == 16 and len(live) == 18
    record(5, ok, f"{live.count(STRONG)} of 18 strong_exceptional")
    assert ok


def test_criterion_6_surfaces(tables):
    verdicts = {n: find_exceptional_order(tables[n]).verdict for n in SURFACES}
    nchecks, bad = 0, []
    for n in SURFACES:
        rec = get_record(n)
        labels = {k: rec.expected[k] for k in ("forward", "backward") if k in rec.expected}
        rep = surface_figure_checks(rec.variety, rec.expected["collection"], labels)
        nchecks += len(rep["checks"])
        bad += [(n, c["label"]) for c in rep["checks"] if not c["ok"]]
    ok = all(v == STRONG for v in verdicts.values()) and not bad
    record(6, ok, f"{sum(v == STRONG for v in verdicts.values())}/5 strong, {nchecks - len(bad)}/{nchecks} "
                  "arrow-label cohomology checks")
    assert ok, bad


def test_criterion_7_classification():
    t0 = time.perf_counter()
    found = classify_unimodular_surfaces()
    dt = time.perf_counter() - t0
    ok = sorted(s.name for s in found) == sorted(SURFACES) and dt < 60
    record(7, ok, f"{len(found)} isomorphism classes in {dt:.2f} s")
    assert ok


def _golden_pairs():
    for r in GOLDEN["reports"]:
        v = get_variety(r["name"])
        cl = [tuple(c) for c in r["collection"]]
        for a in cl:
            for b in cl:
                if a != b:
                    yield v, tuple(y - x for x, y in zip(a, b))


def test_criterion_8_properties(resolutions):
    parts = {}
    # (a) combinatorial cohomology against the Cech oracle
    n_pairs = bad = 0
    for v, cls in _golden_pairs():
        D = v.class_to_coeffs(cls)
        n_pairs += 1
        bad += cohomology(v, D) != cech_oracle(v, D)
    rng = random.Random(2024)
    for n in SURFACES:
        v = get_variety(n)
        for _ in range(200):
            D = tuple(rng.randint(-3, 3) for _ in range(v.nrays))
            n_pairs += 1
            bad += cohomology(v, D) != cech_oracle(v, D)
    parts["a"] = (bad == 0, f"cech {n_pairs - bad}/{n_pairs}")

    # (b) d^2 = 0 and minimality
    cx = [C for C, _ in resolutions.values()]
    ok_b = all(C.is_complex() and not C.minimality_defects() for C in cx)
    parts["b"] = (ok_b, f"complexes {len(cx)}")

    # (c) Serre duality
    ok_c = True
    for n in SURFACES + ["F.3D.0004", "F.3D.0015"]:
        v = get_variety(n)
        for _ in range(20):
            D = tuple(rng.randint(-3, 3) for _ in range(v.nrays))
            ok_c &= tuple(cohomology(v, D)) == tuple(reversed(cohomology(v, tuple(-1 - a for a in D))))
    parts["c"] = (ok_c, "serre")

    # (d) Euler characteristic against fibre graph components, 5 positive bidegrees per surface
    ok_d, count = True, 0
    for n in SURFACES:
        X = get_variety(n)
        k = X.cl_rank
        vecs = sorted({tuple(int(i == j) for i in range(k)) for j in range(k)} | {(c,) * k for c in (1, 2, 3)},
                      key=sum)
        sample = sorted(((a, b) for a in vecs for b in vecs), key=lambda p: sum(p[0]) + sum(p[1]))[:5]
        rep = euler_char_oracle(product(X, X), diagonal_map(X), resolutions[n][0], sample)
        ok_d &= len(rep) >= 5 and all(r["ok"] for r in rep)
        count += len(rep)
    parts["d"] = (ok_d, f"euler {count}")

    # (e) box stability
    ok_e = True
    for n in SURFACES + ["F.3D.0003"]:
        rec = get_record(n)
        cl = [tuple(c) for c in rec.expected["collection"]]
        for a in cl[:3]:
            for b in cl[-3:]:
                D = rec.variety.class_to_coeffs(tuple(y - x for x, y in zip(a, b)))
                h, half = cohomology(rec.variety, D, return_box=True)
                ok_e &= cohomology_in_box(rec.variety, D, 4 * half) == h
    parts["e"] = (ok_e, "box")

    ok = all(p[0] for p in parts.values())
    record(8, ok, ", ".join(f"({k}) {'ok' if p[0] else 'FAILED'} {p[1]}" for k, p in parts.items()))
    assert ok, parts
