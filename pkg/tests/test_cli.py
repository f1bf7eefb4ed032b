import json

import pytest

from zetaclt import cli
from zetaclt.coeffs import CoeffTable


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeffs_roundtrip(tmp_path, capsys):
    p = tmp_path / "d.json"
    code, _, _ = run(capsys, "coeffs", "--degree", "8", "--out", str(p))
    assert code == 0
    t = CoeffTable.load(p)
    assert t[(0, 0)] == 1.0 and t.degree == 8
    p2 = tmp_path / "d2.json"
    t.save(p2)
    assert CoeffTable.load(p2) == t


def test_coeffs_trivial(capsys):
    code, out, _ = run(capsys, "coeffs", "--degree", "2")
    doc = json.loads(out)
    assert code == 0
    assert {(e["k"], e["l"]): e["value"] for e in doc["entries"]} == {(0, 0): 1.0, (0, 1): 0.0, (0, 2): 0.0, (1, 0): 0.0, (1, 1): 0.0, (2, 0): 0.0}


def test_coeffs_families(capsys):
    for fam in ("a", "b"):
        code, out, _ = run(capsys, "coeffs", "--family", fam, "--degree", "4", "--order", "10")
        assert code == 0 and json.loads(out)
    for fam in ("b_prime", "b_tilde"):
        code, out, _ = run(capsys, "coeffs", "--family", fam, "--degree", "6")
        assert code == 0 and json.loads(out)["family"] == fam
    # a short q-series cannot meet the default tail tolerance
    assert run(capsys, "coeffs", "--family", "b_prime", "--degree", "6", "--order", "10")[0] == 3


def test_prob_examples(capsys):
    code, out, _ = run(capsys, "prob", "--rect", "-inf,inf,-inf,inf")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(1.0, abs=1e-15)
    code, out, _ = run(capsys, "prob", "--degree", "0", "--rect", "0,inf,0,inf")
    doc = json.loads(out)
    assert doc["value"] == 0.25 and doc["D"] == 0
    code, out, _ = run(capsys, "prob", "--rect", "-0.5,1,-inf,0.2")
    doc = json.loads(out)
    assert set(doc) >= {"rect", "D", "psi", "value", "gaussian_leading_term", "correction_bound", "flags"}
    assert abs(doc["value"] - doc["gaussian_leading_term"]) <= doc["correction_bound"]


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "prob")[0] == 2
    assert run(capsys, "prob", "--rect", "1,0,0,1")[0] == 2
    assert run(capsys, "prob", "--rect", "a,b,c,d")[0] == 2
    assert run(capsys, "prob", "--theta", "0.7", "--rect", "0,1,0,1")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_precision_exit(capsys, monkeypatch):
    from zetaclt.errors import PrecisionError

    def boom(*a, **k):
        raise PrecisionError("forced")

    monkeypatch.setattr(cli, "d_table", boom)
    assert run(capsys, "coeffs", "--degree", "8")[0] == 3


def test_internal_exit(capsys, monkeypatch):
    monkeypatch.setattr(cli, "d_table", lambda *a, **k: 1 / 0)
    assert run(capsys, "coeffs", "--degree", "8")[0] == 4


def test_verify_hermite(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--suite", "hermite", "--out", str(rep))
    assert code == 0 and "FAIL" not in out
    assert all(c["passed"] for c in json.loads(rep.read_text()))


def test_density_csv(capsys, tmp_path):
    p = tmp_path / "g.csv"
    assert run(capsys, "density", "--points", "5", "--x-range", "-1,1", "--y-range", "-1,1", "--out", str(p))[0] == 0
    lines = p.read_text().splitlines()
    assert lines[0] == "x,y,F" and len(lines) == 26


def test_mc_and_reload(capsys, tmp_path):
    from zetaclt.randmodel import EmpiricalMeasure

    p = str(tmp_path / "mc.csv")
    code, out, _ = run(capsys, "mc", "--samples", "300", "--prime-limit", "500", "--out", p)
    assert code == 0
    m = EmpiricalMeasure.load(p)
    assert m.count == 300 and json.loads(out)["seed"] == m.seed


def test_compare_degenerate_and_self_test(capsys):
    code, out, _ = run(capsys, "compare", "--samples", "20000", "--matched", "--self-test", "--rect", "0.3,0.3,-1,1", "--rect", "0,inf,0,inf")
    doc = json.loads(out)
    assert code == 0 and doc["disagreements"] == 0
    deg = doc["rows"][0]
    assert deg["expansion"] == 0 and deg["mc"] == 0 and deg["mc_seed2"] == 0
    assert doc["rows"][1]["pairs"]["mc-mc"]["ok"]


def test_compare_deterministic(capsys):
    a = run(capsys, "compare", "--samples", "5000", "--rect", "0,inf,0,inf")[1]
    b = run(capsys, "compare", "--samples", "5000", "--rect", "0,inf,0,inf")[1]
    assert a == b
