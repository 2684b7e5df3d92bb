import json
from pathlib import Path

import pytest

from toricdiag.cli import main

GOLDEN = Path(__file__).with_name("golden.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert len(out.strip().splitlines()) == 23
    code, out, _ = run(capsys, "list", "--format", "json")
    d = json.loads(out)
    assert d["schema_version"] == 1 and len(d["varieties"]) == 23


@pytest.mark.parametrize("name,ranks", [("F.3D.0008", "1 4 5 2"), ("F.3D.0013", "1 6 9 4"), ("P2", "1 3 2")])
def test_resolve(capsys, name, ranks):
    code, out, _ = run(capsys, "resolve", name)
    assert code == 0
    assert out.splitlines()[0] == f"{name}: ranks {ranks}"


def test_resolve_json_with_complex(capsys):
    code, out, _ = run(capsys, "resolve", "P1xP1", "--emit-complex", "--format", "json", "--side", "second")
    d = json.loads(out)
    assert code == 0 and d["ranks"] == [1, 2, 1] and d["side"] == "second"
    assert "complex" in d


def test_check_positive_and_negative(capsys):
    code, out, _ = run(capsys, "check", "F.3D.0017")
    assert code == 0 and "strong_exceptional" in out
    code, out, _ = run(capsys, "check", "F.3D.0000")
    assert code == 3
    assert "Hom(O(0,-1,-1), O(-1,0,-2)) = (0,0,1,0)" in out
    assert "Hom(O(-1,0,-2), O(0,-1,-1)) = (6,0,0,0)" in out


def test_check_stored_order(capsys):
    code, out, _ = run(capsys, "check", "F.3D.0011", "--paper-order", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "strong_exceptional"
    assert d["paper_order_backward_homs"] == [{"from": [0, -1, -1], "to": [0, 0, -1], "hom": [1, 0, 0, 0]}]
    code, out, _ = run(capsys, "check", "F.3D.0002", "--paper-order", "--format", "json")
    assert "paper_order_backward_homs" not in json.loads(out)


def test_usage_errors(capsys):
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "check", "F.3D.0002", "--all")[0] == 2
    assert run(capsys, "resolve", "no-such-variety")[0] == 2
    assert run(capsys, "cohomology", "P2", "1,2")[0] == 2
    assert run(capsys, "cohomology", "P2", "x")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    capsys.readouterr()


def test_cohomology(capsys):
    code, out, _ = run(capsys, "cohomology", "F.3D.0000", "1,-1,1")
    assert code == 0 and out.strip() == "H^*(F.3D.0000, O(1,-1,1)) = h^0=6, h^1=0, h^2=0, h^3=0"
    code, out, _ = run(capsys, "cohomology", "P2", "-3", "--format", "json")
    assert json.loads(out)["dims"] == [0, 0, 1]
    code, out, _ = run(capsys, "cohomology", "F.3D.0001", "-1,-1,0", "--format", "json")
    assert code == 2
    code, out, _ = run(capsys, "cohomology", "F.3D.0001", "0,-3", "--format", "json")
    assert json.loads(out)["dims"] == [0, 0, 1, 0]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify-surfaces", "--format", "json")
    assert code == 0 and len(json.loads(out)["surfaces"]) == 5


def test_quiver(capsys, tmp_path):
    path = tmp_path / "q.dot"
    code, _, _ = run(capsys, "quiver", "F.3D.0017", "-o", str(path))
    text = path.read_text()
    assert code == 0 and text.startswith("digraph Q {")
    code, out, _ = run(capsys, "check", "F.3D.0017", "--format", "dot")
    assert out == text
    code, out, err = run(capsys, "quiver", "F.3D.0001")
    assert code == 3 and out == "" and "no_ordering" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "F.3D.0005", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["ok"]
    assert set(d["checks"]) == {"d_squared", "homogeneous", "minimal", "symmetric", "euler_char",
                                "cech_oracle", "box_stability"}


def test_custom_json_variety(capsys, tmp_path):
    path = tmp_path / "hirz1.json"
    path.write_text(json.dumps({"name": "F1", "rays": [[1, 0], [0, 1], [-1, 1], [0, -1]],
                                "max_cones": [[0, 1], [1, 2], [2, 3], [3, 0]]}))
    code, out, _ = run(capsys, "check", str(path), "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "strong_exceptional" and len(d["collection"]) == 4
    path.write_text(json.dumps({"halfspaces": [[1, -1, 0, 0], [1, 0, -1, 0], [1, 0, 0, -1], [1, 1, 1, 1]]}))
    code, out, _ = run(capsys, "resolve", str(path), "--format", "json")
    assert code == 0 and json.loads(out)["ranks"] == [1, 6, 8, 3]


def test_bad_json_record(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "nothing"}))
    code, _, err = run(capsys, "resolve", str(path))
    assert code == 2 and "rays" in err


def test_byte_identical(capsys):
    a = run(capsys, "check", "F.3D.0009", "--format", "json")[1]
    b = run(capsys, "check", "F.3D.0009", "--format", "json")[1]
    assert a == b


def test_golden(capsys):
    code, out, _ = run(capsys, "check", "--all", "--format", "json", "--jobs", "1")
    assert code == 3
    assert json.loads(out) == json.loads(GOLDEN.read_text())
    assert out == GOLDEN.read_text()
