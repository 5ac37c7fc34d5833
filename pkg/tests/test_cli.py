import csv
import json

import pytest

from asdim.cli import main


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def ktree(tmp_path):
    gpath, tdpath = tmp_path / "g.gr", tmp_path / "g.td"
    assert run("gen", "--family", "ktree", "--n", 250, "--k", 3, "--seed", 7,
               "--out-graph", gpath, "--out-td", tdpath) == 0
    return gpath, tdpath


def test_verify_hand_written_cover(tmp_path):
    (tmp_path / "p.gr").write_text("p 4 3\ne 1 2\ne 2 3\ne 3 4\n")
    (tmp_path / "c.json").write_text(json.dumps(
        {"scale": 1, "bound": 1, "families": [[[0, 1]], [[2, 3]]]}))
    assert run("verify", "--graph", tmp_path / "p.gr", "--cover", tmp_path / "c.json") == 0
    (tmp_path / "bad.json").write_text(json.dumps(
        {"scale": 1, "bound": 1, "families": [[[0, 1], [2, 3]]]}))
    assert run("verify", "--graph", tmp_path / "p.gr", "--cover", tmp_path / "bad.json") == 1


def test_tw_sweep_rows(ktree, tmp_path):
    gpath, tdpath = ktree
    out = tmp_path / "tw.csv"
    cover = tmp_path / "tw-{scale}.json"
    assert run("tw", "--graph", gpath, "--td", tdpath, "--ell", "1,2,4", "--out-csv", out,
               "--out-cover", cover) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["r"] for r in rows] == ["1", "2", "4"]
    assert all(r["passed"] == "True" and r["families"] == "2" for r in rows)
    assert all(float(r["observed_bound"]) <= float(r["certified_bound"]) for r in rows)
    assert {"tau", "wall_time"} <= set(rows[0])
    for ell in (1, 2, 4):
        assert run("verify", "--graph", gpath, "--cover", tmp_path / f"tw-{ell}.json") == 0


def test_outputs_are_deterministic(ktree, tmp_path):
    gpath, tdpath = ktree
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run("tw", "--graph", gpath, "--td", tdpath, "--ell", 2, "--out-cover", path) == 0
    assert a.read_bytes() == b.read_bytes()
    g2 = tmp_path / "g2.gr"
    run("gen", "--family", "ktree", "--n", 250, "--k", 3, "--seed", 7, "--out-graph", g2)
    assert g2.read_bytes() == gpath.read_bytes()


def test_annulus_violation_emits_witness(tmp_path, capsys):
    gpath = tmp_path / "king.gr"
    run("gen", "--family", "king", "--dims", "60,60", "--out-graph", gpath)
    wit = tmp_path / "w.json"
    code = run("annulus", "--graph", gpath, "--p", 2, "--r", 1, "--q", 1, "--kappa", 1,
               "--out-witness", wit)
    assert code == 1
    assert "promise violated" in capsys.readouterr().err
    docs = json.loads(wit.read_text())
    assert docs and all(d["verified"] for d in docs)
    assert set(docs[0]["model"]["branch_sets"]) == {"A", "B", "Q1", "Q2"}


def test_other_pipelines(tmp_path):
    files = {k: tmp_path / f"grid.{k}" for k in ("gr", "td", "lay", "emb")}
    assert run("gen", "--family", "grid", "--dims", "12,12", "--out-graph", files["gr"],
               "--out-td", files["td"], "--out-layering", files["lay"],
               "--out-embedding", files["emb"]) == 0
    g = files["gr"]
    assert run("layered-tw", "--graph", g, "--td", files["td"], "--layering", files["lay"],
               "--ell", "1,2") == 0
    assert run("minor", "--graph", g, "--td", files["td"]) == 0
    assert run("embed", "--graph", g, "--embedding", files["emb"], "--C", 1) == 0
    assert run("k3p", "--graph", g, "--p", 3, "--r", "1,2") == 0
    assert run("genus", "--graph", g, "--genus", 1, "--r", 2, "--no-verify") == 0


def test_input_errors_exit_2(tmp_path, capsys):
    assert run("tw", "--graph", tmp_path / "missing.gr", "--td", tmp_path / "x.td") == 2
    (tmp_path / "bad.gr").write_text("p 3 2\ne 1 2\ne 2 x\n")
    assert run("k3p", "--graph", tmp_path / "bad.gr") == 2
    assert "line 3" in capsys.readouterr().err
    assert run("tw", "--graph", tmp_path / "bad.gr") == 2
    (tmp_path / "ok.gr").write_text("p 2 1\ne 1 2\n")
    assert run("k3p", "--graph", tmp_path / "ok.gr", "--r", "0") == 2
    assert run("annulus", "--graph", tmp_path / "ok.gr", "--root", 9) == 2
    (tmp_path / "bad.td").write_text("s td 1 2 2\nb 1 1\n")
    assert run("tw", "--graph", tmp_path / "ok.gr", "--td", tmp_path / "bad.td") == 2
    assert "lies in no bag" in capsys.readouterr().err
