from __future__ import annotations

import json
import subprocess
import sys

import pytest

from pgt import catalog
from pgt.cli import main
from pgt.game import game_to_dict


@pytest.fixture()
def files(tmp_path):
    out = {}
    games = {"cournot3": catalog.cournot(3), "cournot4": catalog.cournot(4),
             "cournot_pos": catalog.cournot(3, lo=0.0), "pennies": catalog.matching_pennies(),
             "coord": catalog.coordination(), "links": catalog.two_link_network(),
             "unit": catalog.two_player_power_game(1.0), "ten": catalog.two_player_power_game(10.0)}
    for name, g in games.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(game_to_dict(g)))
        out[name] = str(p)
    for name, cand in {"sqrt8": catalog.sqrt_candidate(8, 384), "sqrt1": catalog.sqrt_candidate(1, 384),
                       "scaled": catalog.scaled_power_candidate()}.items():
        p = tmp_path / f"{name}.cand.json"
        p.write_text(json.dumps(cand.to_dict()))
        out[name] = str(p)
    out["dir"] = tmp_path
    return out


def run(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def run_json(argv, capsys):
    code, out, _ = run(argv + ["--json"], capsys)
    return code, json.loads(out)


def test_check_pairwise_cournot(files, capsys):
    code, doc = run_json(["check", files["cournot3"], "--method", "pairwise", "--tol", "1e-9",
                          "--samples", "500", "--seed", "42"], capsys)
    assert code == 0 and doc["verdict"] == "pass (sampled)"
    for key in ("method", "verdict", "residual_max", "witness", "samples_used", "exhaustive",
                "abstentions", "timing"):
        assert key in doc


def test_check_cycle4_pennies_prints_cycle(files, capsys):
    code, out, _ = run(["check", files["pennies"], "--method", "cycle4"], capsys)
    assert code == 1 and '"I": -8.0' in out and "cycle" in out


def test_inapplicable_exit_code(files, capsys):
    assert run(["check", files["cournot_pos"], "--method", "pairwise"], capsys)[0] == 3
    assert run(["check", files["cournot3"], "--method", "oracle"], capsys)[0] == 3
    assert run(["construct", files["pennies"], "--method", "theorem8"], capsys)[0] == 3


def test_usage_and_schema_errors(files, capsys):
    assert run(["check", files["cournot3"]], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    bad = files["dir"] / "bad.json"
    bad.write_text(json.dumps({"players": 1, "spaces": [{"kind": "box", "lo": [0], "hi": [1]}],
                               "costs": {"kind": "expr", "exprs": ["x[1][1] +"]}}))
    code, _, err = run(["check", str(bad), "--method", "cycle4"], capsys)
    assert code == 2 and "offset" in err
    broken = files["dir"] / "broken.json"
    broken.write_text("{not json")
    assert run(["check", str(broken), "--method", "cycle4"], capsys)[0] == 2
    assert run(["check", str(files["dir"] / "missing.json"), "--method", "cycle4"], capsys)[0] == 2
    assert run(["ordinal", files["unit"], "--check", "theorem11"], capsys)[0] == 2


def test_construct_verify_and_export(files, capsys):
    out = files["dir"] / "phi.json"
    code, doc = run_json(["construct", files["cournot4"], "--method", "theorem8", "--verify",
                          "--out", str(out)], capsys)
    assert code == 0 and doc["verification"]["verdict"] == "pass (sampled)"
    exported = json.loads(out.read_text())
    assert exported["method"] == "theorem8" and "x[4][1]" in exported["expr"]
    for mode in ("exact", "gradient", "ordinal", "generalized"):
        assert run(["verify", files["cournot4"], "--potential", str(out), "--mode", mode], capsys)[0] == 0


def test_rosenthal_round_trip_through_files(files, capsys):
    out = files["dir"] / "ros.json"
    assert run(["construct", files["links"], "--method", "rosenthal", "--augmented", "--verify",
                "--out", str(out)], capsys)[0] == 0
    code, doc = run_json(["verify", files["links"], "--potential", str(out), "--mode", "exact"], capsys)
    assert code == 0 and doc["exhaustive"]


def test_ordinal_subcommand(files, capsys):
    assert run(["ordinal", files["unit"], "--check", "assumption1"], capsys)[0] == 0
    assert run(["ordinal", files["unit"], "--check", "crosssign"], capsys)[0] == 0
    assert run(["ordinal", files["unit"], "--check", "theorem11", "--candidate", files["sqrt8"]], capsys)[0] == 0
    assert run(["ordinal", files["unit"], "--check", "theorem11", "--candidate", files["sqrt1"]], capsys)[0] == 1
    assert run(["ordinal", files["ten"], "--check", "theorem12", "--candidate", files["scaled"]], capsys)[0] == 0
    assert run(["ordinal", files["ten"], "--check", "theorem12", "--candidate", files["sqrt8"]], capsys)[0] == 2
    code, doc = run_json(["ordinal", files["unit"], "--check", "theorem10", "--candidate", files["sqrt8"],
                          "--eta", "1", "--lipschitz", "5"], capsys)
    assert code == 1 and doc["details"]["condition_b"] == "fail"


def test_nash_and_dynamics(files, capsys):
    code, doc = run_json(["nash", files["coord"]], capsys)
    assert code == 0 and doc["profile"] == [[0.0], [0.0]]
    assert run(["nash", files["pennies"]], capsys)[0] == 1
    assert run(["nash", files["coord"], "--profile", "[[1],[1]]"], capsys)[0] == 0
    assert run(["nash", files["coord"], "--profile", "[[0],[1]]"], capsys)[0] == 1
    assert run(["nash", files["coord"], "--profile", "[[7],[1]]"], capsys)[0] == 2
    code, doc = run_json(["dynamics", files["pennies"], "--start", "[[0],[0]]"], capsys)
    assert code == 1 and doc["outcome"] == "cycle_detected" and len(doc["cycle"]) == 5
    code, doc = run_json(["dynamics", files["coord"], "--start", "[[0],[1]]", "--with-potential"], capsys)
    assert code == 0 and doc["trajectory"][1]["phi_delta"] < 0


def test_abnormal_subcommand(files, capsys):
    assert run(["abnormal", files["cournot3"]], capsys)[0] == 0


def test_json_reports_are_deterministic(files, capsys):
    argv = ["check", files["cournot3"], "--method", "hp", "--seed", "7", "--json"]
    outs = []
    for _ in range(2):
        _, out, _ = run(argv, capsys)
        doc = json.loads(out)
        doc.pop("timing")
        outs.append(json.dumps(doc, sort_keys=True))
    assert outs[0] == outs[1]


def test_console_script_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "pgt.cli", "check", files["pennies"], "--method", "oracle"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "fail" in proc.stdout
