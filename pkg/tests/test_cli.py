import json
import os

import pytest

from hats import Game, build_strategy, complete_game, cycle_game
from hats.cli import EXIT_OF_VERDICT, run

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture()
def files(tmp_path):
    k2 = complete_game([2, 2])
    k23 = complete_game([2, 3])
    c4 = cycle_game([2, 4, 3, 4])
    paths = {}
    for name, g in (("k2", k2), ("k23", k23), ("c4", c4)):
        p = tmp_path / f"{name}.json"
        p.write_text(g.to_json())
        paths[name] = str(p)
    s = build_strategy(k2, lambda v, view: view["B"] if v == "A" else (1 - view["A"]) % 2)
    p = tmp_path / "k2_s.json"
    p.write_text(s.to_json())
    paths["k2_s"] = str(p)
    paths["dir"] = str(tmp_path)
    return paths


def test_exit_codes_total_function():
    # every verdict a report can carry maps to a code; unknown keys are usage
    for verdict, code in (("winning", 0), ("verified", 0), ("ok", 0),
                          ("losing", 1), ("refuted", 1), ("unknown", 2)):
        assert EXIT_OF_VERDICT[verdict] == code
    assert EXIT_OF_VERDICT.get("garbage", 3) == 3


def test_solve_exit_codes(files):
    assert run(["solve", files["k2"]])[0] == 0
    assert run(["solve", files["k23"]])[0] == 1
    assert run(["solve", files["c4"], "--method", "rook"])[0] == 1
    code, rep = run(["--json", "solve", files["c4"], "--method", "csp",
                     "--budget-nodes", "10"])
    assert code == 2 and rep["verdict"] == "unknown"


def test_verify_round_trip(files):
    code, rep = run(["--json", "verify", files["k2"], files["k2_s"]])
    assert code == 0 and rep["verdict"] == "verified"
    code, rep = run(["--json", "verify", files["k23"], files["k2_s"]])
    assert code == 3  # strategy does not fit the game shape


def test_verify_refuted(files, tmp_path):
    g = complete_game([2, 2])
    s = build_strategy(g, lambda v, view: 0)
    p = tmp_path / "zeros.json"
    p.write_text(s.to_json())
    code, rep = run(["--json", "verify", files["k2"], str(p)])
    assert code == 1 and rep["verdict"] == "refuted"
    assert rep["counterexample"] == [1, 1]


def test_bad_files_exit_3(files, tmp_path):
    assert run(["solve", str(tmp_path / "missing.json")])[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, rep = run(["--json", "solve", str(bad)])
    assert code == 3
    assert "format" in rep["summary"]


def test_rook_cli(files):
    assert run(["rook", "--left", "2x3", "--right", "4x4", "--solve"])[0] == 1
    assert run(["rook", "--left", "2x3", "--right", "3x4"])[0] == 0
    assert run(["rook", "--left", "3x6", "--right", "3x6", "--piece", "king"])[0] == 0
    assert run(["rook", "--left", "4x4", "--right", "4x4", "--piece", "king"])[0] == 1
    assert run(["rook", "--left", "2", "--right", "3x3"])[0] == 3


def test_rook_strategy_file_round_trip(files):
    out = os.path.join(files["dir"], "w4.json")
    code, _ = run(["rook", "--left", "2x3", "--right", "3x4",
                   "--catalogue", "--strategy-out", out])
    assert code == 0
    assert run(["rook", "--left", "2x3", "--right", "3x4", "--verify", out])[0] == 0
    assert run(["rook", "--left", "2x3", "--right", "3x4", "--verify", out,
                "--piece", "queen"])[0] == 0  # queens only attack more


def test_dimacs_cli(files):
    out = os.path.join(files["dir"], "k2.cnf")
    assert run(["dimacs", files["k2"], "-o", out])[0] == 0
    text = open(out).read()
    assert text.startswith("c hats/1 ")
    assert run(["rook", "--left", "4x5", "--right", "5x5",
                "--piece", "queen", "--dimacs",
                os.path.join(files["dir"], "q.cnf")])[0] == 0


def test_named_json_golden():
    for gid in ("triangle-244", "medium-bow"):
        code, rep = run(["--json", "named", gid])
        assert code == 0
        rep.pop("files", None)
        golden = json.load(open(os.path.join(GOLDEN_DIR, f"named_{gid}.json")))
        assert rep == golden


def test_named_verify_and_outputs(files):
    g_out = os.path.join(files["dir"], "tri.json")
    s_out = os.path.join(files["dir"], "tri_s.json")
    code, rep = run(["--json", "named", "triangle-244", "--verify",
                     "-o", g_out, "--strategy-out", s_out])
    assert code == 0 and rep["verified"] is True
    assert run(["verify", g_out, s_out])[0] == 0


def test_catalogue_cli(files):
    assert run(["catalogue", files["k23"]])[0] == 1
    code, rep = run(["--json", "catalogue", files["c4"]])
    assert code == 2 and rep["reason"] == "cycle-open"


def test_construct_cli(files, tmp_path):
    xm = Game([("X", 2), ("M", 2)], [("X", "M")])
    s1 = build_strategy(xm, lambda v, view: view["M"] if v == "X" else (1 - view["X"]) % 2)
    my = Game([("M", 2), ("Y", 2)], [("M", "Y")])
    s2 = build_strategy(my, lambda v, view: view["Y"] if v == "M" else (1 - view["M"]) % 2)
    for name, obj in (("xm", xm), ("xm_s", s1), ("my", my), ("my_s", s2)):
        (tmp_path / f"{name}.json").write_text(obj.to_json())
    out_g = str(tmp_path / "p.json")
    out_s = str(tmp_path / "p_s.json")
    code, rep = run(["--json", "construct", "product",
                     str(tmp_path / "xm.json"), str(tmp_path / "xm_s.json"),
                     str(tmp_path / "my.json"), str(tmp_path / "my_s.json"),
                     "--at", "M", "-o", out_g, "--strategy-out", out_s])
    assert code == 0 and rep["verified"] is True
    assert run(["verify", out_g, out_s])[0] == 0
    g = Game.from_json(open(out_g).read())
    assert g.hatness_of("M") == 4
    assert g.provenance["rule"] == "product"


def test_construct_losing_cli(files, tmp_path):
    code, rep = run(["--json", "construct", "pendant-losing", files["k23"],
                     "--at", "B", "-o", str(tmp_path / "out.json")])
    assert code == 1 and rep["reason"] == "pendant-2h-1"


def test_json_reports_are_valid_json(files, capsys):
    run(["--json", "solve", files["k2"]])
    out = capsys.readouterr().out
    rep = json.loads(out)
    assert set(rep) >= {"verdict", "reason", "summary"}


def test_named_big_bow_full_scan():
    code, rep = run(["--json", "named", "big-bow", "--verify"])
    assert code == 0
    assert rep["arrangements"] == 9_250_000
    assert rep["verified"] is True


def test_construct_attach2_cli(files, tmp_path):
    out_g = str(tmp_path / "a2.json")
    out_s = str(tmp_path / "a2_s.json")
    code, rep = run(["--json", "construct", "attach2",
                     files["k2"], files["k2_s"], "--to", "A,B",
                     "--name", "N", "-o", out_g, "--strategy-out", out_s])
    assert code == 0 and rep["verified"] is True
    assert run(["verify", out_g, out_s])[0] == 0
