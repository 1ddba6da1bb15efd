import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coste.cli import main, parse_presentation, run, space_from_json, space_to_json
from coste.finmodel import is_isomorphic, make_zmod, ring_product
from coste.spectrum import spec

DIAMOND = json.dumps({"diamond": True})


def _json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, json.loads(out.out if code == 0 else out.err)


def test_spec_zmod12(capsys):
    code, rep = _json(capsys, ["spec", "--context", "zariski", "--model", '{"zmod":12}'])
    assert code == 0
    assert len(rep["points"]) == 2
    assert sorted(s["size"] for s in rep["stalks"]) == [3, 4]
    assert rep["gamma"]["size"] == 12
    assert rep["standardness"]["standard"]


def test_pit_diamond(capsys):
    code, rep = _json(capsys, ["pit", "--context", "dl", "--model", DIAMOND])
    assert code == 0 and rep == {"pit": True}


def test_spec_trivial_ring(capsys):
    code, rep = _json(capsys, ["spec", "--model", '{"zmod":1}'])
    assert code == 0
    assert rep["points"] == []
    assert rep["gamma"]["size"] == 1


def test_presentation_loader():
    assert is_isomorphic(parse_presentation("Z/12"), make_zmod(12))
    assert is_isomorphic(parse_presentation("Z/2 x Z/3"), make_zmod(6))
    assert parse_presentation("Z/4 x Z/9").size == 36
    assert is_isomorphic(parse_presentation("Z/12 / (4)"), make_zmod(4))


def test_exit_codes(capsys):
    assert main(["spec", "--model", "{bad"]) == 1
    assert main(["spec", "--context", "dl", "--model", "Z/4"]) == 1
    assert main(["spec", "--model", "Z/100", "--max-carrier", "64"]) == 1
    assert main(["spec"]) == 1
    assert main(["standardness", "--context", "field", "--model", "Z/12", "--verify"]) == 2
    assert main(["standardness", "--context", "zariski", "--model", "Z/12", "--verify"]) == 0
    capsys.readouterr()


def test_admissible_and_factorize(capsys):
    code, rep = _json(capsys, ["admissible", "--source", "Z/6", "--target", "Z/2", "--verify"])
    assert code == 0 and rep == {"admissible": False, "by_lifting": False}
    code, rep = _json(capsys, ["factorize", "--source", "Z/12", "--target", "Z/2", "--verify"])
    assert code == 0
    assert rep["middle"]["size"] == 4 and rep["initial"] and rep["second_admissible"]


def test_reticulation_and_gamma(capsys):
    code, rep = _json(capsys, ["reticulation", "--model", "Z/12"])
    assert code == 0 and rep["size"] == 4
    code, rep = _json(capsys, ["gamma", "--context", "field", "--model", "Z/12"])
    assert code == 0 and rep["size"] == 6 and not rep["iso_to_model"]


def test_dot_output(tmp_path, capsys):
    code, rep = _json(capsys, ["spec", "--model", "Z/12", "--dot", str(tmp_path)])
    assert code == 0
    text = (tmp_path / "specialization.dot").read_text()
    assert text.startswith("digraph specialization {")
    assert (tmp_path / "compact_opens.dot").read_text().count("->") == 4


def test_output_is_stable(capsys):
    argv = ["spec", "--context", "dl", "--model", DIAMOND]
    main(argv)
    a = capsys.readouterr().out
    main(argv)
    b = capsys.readouterr().out
    assert a == b


def test_colim_coequalizer(tmp_path, capsys):
    diagram = {
        "spaces": {"X": {"point": {"zmod": 3}}, "Y": {"discrete": [{"zmod": 3}, {"zmod": 3}]}},
        "maps": {
            "f": {"from": "X", "to": "Y", "points": [0], "flat": [[0, 1, 2]]},
            "g": {"from": "X", "to": "Y", "points": [1], "flat": [[0, 1, 2]]},
        },
        "coequalizer": ["f", "g"],
    }
    path = tmp_path / "d.json"
    path.write_text(json.dumps(diagram))
    code, rep = _json(capsys, ["colim", "--diagram", f"@{path}", "--verify"])
    assert code == 0
    assert rep["universal"] and rep["T_modelled"]
    assert len(rep["apex"]["points"]) == 1


def test_colim_nonadmissible_fails_verification(capsys):
    diagram = {
        "spaces": {"X": {"point": {"chain": 2}}, "Y": {"discrete": [{"chain": 3}, {"chain": 3}]}},
        "maps": {
            "f": {"from": "X", "to": "Y", "points": [0], "flat": [[0, 1, 1]]},
            "g": {"from": "X", "to": "Y", "points": [1], "flat": [[0, 1, 1]]},
        },
        "coequalizer": ["f", "g"],
        "allow_nonadmissible": True,
    }
    code = main(["colim", "--context", "dl", "--diagram", json.dumps(diagram), "--verify"])
    capsys.readouterr()
    assert code == 2


def test_lim_and_relspec(capsys):
    diagram = {"spaces": {"A": {"spec": {"zmod": 4}}, "B": {"spec": {"zmod": 6}}}, "admissible_product": ["A", "B"]}
    code, rep = _json(capsys, ["lim", "--diagram", json.dumps(diagram), "--verify"])
    assert code == 0 and len(rep["apex"]["points"]) == 1
    diagram = {
        "spaces": {"Y": {"point": {"product": [2, 2]}}, "X": {"point": {"zmod": 4}}},
        "maps": {"f": {"from": "Y", "to": "X", "points": [0], "flat": [[0, 3, 0, 3]]}},
        "map": "f",
    }
    code, rep = _json(capsys, ["relspec", "--diagram", json.dumps(diagram), "--verify"])
    assert code == 0
    assert len(rep["space"]["points"]) == 2
    assert all(rep["verification"].values())


def test_adjunction_check_sampled(capsys):
    code, rep = _json(capsys, ["adjunction-check", "--sample", "5", "--seed", "3", "--verify"])
    assert code == 0 and rep["triangles"] == 5 and rep["ok"]


def test_budget_on_points(capsys):
    diagram = {"spaces": {"A": {"spec": {"zmod": 30}}}, "product": ["A"]}
    assert main(["lim", "--diagram", json.dumps(diagram), "--max-points", "2"]) == 1
    capsys.readouterr()


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "coste.cli", "pit", "--model", "Z/12"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"pit": True}


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([1, 2, 4, 6, 8, 12, 30]), st.sampled_from(["zariski", "pierce", "field"]))
def test_space_json_round_trip(n, ctx):
    X = spec(ctx, make_zmod(n))
    j = space_to_json(X)
    Y = space_from_json(json.loads(json.dumps(j)), ctx, 64)
    assert space_to_json(Y) == j


def test_round_trip_product_space():
    X = spec("zariski", ring_product([make_zmod(2), make_zmod(4)]))
    j = space_to_json(X)
    assert space_to_json(space_from_json(j, "zariski", 64)) == j


@pytest.mark.parametrize("cmd", ["spec", "gamma", "reticulation", "pit", "standardness"])
def test_every_model_command_runs(cmd):
    code, rep = run([cmd, "--context", "dl", "--model", DIAMOND])
    assert code == 0 and rep
