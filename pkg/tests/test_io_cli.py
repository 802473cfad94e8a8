import io
import json

import pytest

from polyclosure import cli
from polyclosure.cfi import odd_cfi
from polyclosure.csp import XorSystem
from polyclosure.graphs import complete_graph, petersen_graph
from polyclosure.io import (dump_graph, dump_graph_edgelist, dump_structure, load_graph,
                            load_structure)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_structure_roundtrip():
    S = odd_cfi(complete_graph(4)).structure
    assert load_structure(dump_structure(S)) == S
    with pytest.raises(ValueError):
        load_structure('{"n": 2}')


def test_graph_formats_roundtrip():
    G = petersen_graph()
    assert load_graph(dump_graph(G)) == G
    text = dump_graph_edgelist(G)
    assert text.startswith("p 10 15\n") and "e 1 2" in text
    assert load_graph(text) == G
    assert load_graph('{"n": 3, "edges": [[0, 1], [1, 2]]}').edges == ((0, 1), (1, 2))
    with pytest.raises(ValueError):
        load_graph("e 1 2\n")
    with pytest.raises(ValueError):
        load_graph("p 2 1\nq 1 2\n")


@pytest.fixture
def k4_file(tmp_path):
    p = tmp_path / "k4.json"
    p.write_text(dump_graph(complete_graph(4)))
    return p


def test_gen_graph_named_and_generated(capsys):
    code, out, err = run(capsys, "gen-graph", "--named", "k4")
    assert code == 0 and load_graph(out) == complete_graph(4)
    manifest = json.loads(err)
    assert manifest["command"] == "gen-graph" and len(manifest["result_sha256"]) == 64
    code, out, _ = run(capsys, "gen-graph", "--ell", "3", "--vertices", "10", "--girth", "5",
                       "--seed", "2", "--format", "edgelist")
    assert code == 0 and out.startswith("p 10 15")


def test_gen_graph_is_deterministic(capsys):
    args = ("gen-graph", "--ell", "3", "--vertices", "12", "--girth", "4", "--seed", "9")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_gen_graph_errors(capsys):
    assert run(capsys, "gen-graph", "--ell", "3", "--vertices", "5")[0] == 2
    assert run(capsys, "gen-graph")[0] == 64
    assert run(capsys, "gen-graph", "--ell", "3", "--vertices", "4", "--girth", "4",
               "--budget", "500")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys)[0] == 64
    assert run(capsys, "no-such-command")[0] == 64
    assert run(capsys, "solve-cr", "--k", "x")[0] == 64


def test_cfi_pipeline(capsys, tmp_path, k4_file):
    out_ev = tmp_path / "ev.json"
    out_od = tmp_path / "od.json"
    assert run(capsys, "gen-cfi", "--graph", str(k4_file), "--parity", "even", "--out", str(out_ev))[0] == 0
    assert run(capsys, "gen-cfi", "--graph", str(k4_file), "--parity", "odd", "--out", str(out_od))[0] == 0
    assert (tmp_path / "od.json.manifest.json").exists()
    code, out, _ = run(capsys, "solve-csp", "--instance", str(out_ev), "--target", "c3")
    res = json.loads(out)
    assert code == 0 and res["verdict"] == "satisfiable" and len(res["homomorphism"]) == 12
    code, out, _ = run(capsys, "solve-csp", "--instance", str(out_od), "--target", "c3")
    assert json.loads(out)["verdict"] == "unsatisfiable"
    code, out, _ = run(capsys, "solve-pg", "--a", str(out_ev), "--b", str(out_od), "--k", "1",
                       "--family", "nu:3", "--bijections", "switchsets")
    assert code == 0 and json.loads(out)["winner"] in ("Duplicator", "Spoiler")


def test_solve_xor(capsys, tmp_path):
    p = tmp_path / "sys.txt"
    p.write_text(XorSystem.build(2, [([0], 1), ([0, 1], 0)]).to_text())
    code, out, _ = run(capsys, "solve-xor", str(p))
    assert code == 0 and json.loads(out)["solution"] == [1, 1]
    p.write_text("v0 = 0\nv0 = 1\n")
    assert json.loads(run(capsys, "solve-xor", str(p))[1])["verdict"] == "unsatisfiable"
    p.write_text("v0 == 1\n")
    assert run(capsys, "solve-xor", str(p))[0] == 2


def test_check_family_and_closure(capsys):
    code, out, _ = run(capsys, "check-family", "--family", "maltsev", "--max-n", "3")
    assert code == 0 and json.loads(out)["projective"] is True
    assert run(capsys, "check-family", "--family", "maltsev", "--max-n", "9")[0] == 2
    code, out, _ = run(capsys, "check-closure", "--class", "csp:h:2:2", "--family", "majority",
                       "--max-n", "2")
    assert code == 0 and json.loads(out)["holds"] is True
    code, out, _ = run(capsys, "check-closure", "--class", "csp:c2", "--property", "monotone",
                       "--mode", "random", "--count", "50", "--max-n", "4")
    assert json.loads(out)["census_size"] == 50


def test_solve_pg_strategy_file(capsys, tmp_path):
    from polyclosure.graphs import cycle_graph, disjoint_union, graph_structure
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(dump_structure(graph_structure(cycle_graph(6))))
    b.write_text(dump_structure(graph_structure(disjoint_union(cycle_graph(3), cycle_graph(3)))))
    strat = tmp_path / "strat.json"
    code, out, _ = run(capsys, "solve-pg", "--a", str(a), "--b", str(b), "--k", "3",
                       "--arities", "1", "--strategy-out", str(strat))
    assert code == 0 and json.loads(out)["winner"] == "Spoiler"
    data = json.loads(strat.read_text())
    assert data["spoiler_first_move"]["ys"]
    assert len(data["positions"]) == (1 + 36) ** 3


def test_solve_cr_and_verify(capsys, k4_file):
    code, out, _ = run(capsys, "solve-cr", "--graph", str(k4_file), "--k", "1", "--check")
    res = json.loads(out)
    assert code == 0 and res["cross_checked"] and 0 in res["safe_for_empty"]
    code, out, _ = run(capsys, "verify-duplicator", "--graph", str(k4_file), "--k", "1", "--rounds", "1")
    assert code == 0 and json.loads(out)["ok"] is True
    assert run(capsys, "verify-duplicator", "--graph", str(k4_file), "--k", "2", "--rounds", "1")[0] == 2


def test_play_pg_session(capsys, k4_file, monkeypatch):
    moves = "left 0 5 1\nright 0 0 2\nbogus\nquit\n"
    monkeypatch.setattr("sys.stdin", io.StringIO(moves))
    code, out, _ = run(capsys, "play-pg", "--graph", str(k4_file), "--k", "1")
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines() if x.startswith("{")]
    rounds = [x for x in lines if "round" in x]
    assert len(rounds) == 2 and all(r["invariant"] for r in rounds)
    assert any("error" in x for x in lines)
    assert lines[-1]["rounds_played"] == 2
