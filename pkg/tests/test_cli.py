import json
import subprocess
import sys

import pytest

from stratqctl.cli import main
from stratqctl.games import cgs_from_dict, cgs_to_dict

from conftest import loop, pennies, ping_pong


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_qctl_exists_globally(capsys, files):
    game = files("loop.json", cgs_to_dict(loop()))
    phi = files("phi.qctl", "exists q. A G q\n")
    code, out, _ = run(capsys, "check", "--engine", "qctl", "--budget", "1", "--game", game, "--state", "s", phi)
    assert code == 0
    assert out.startswith("verdict: TRUE")


def test_translate_atom(capsys, files):
    phi = files("phi.atlsc", "p\n")
    code, out, _ = run(capsys, "translate", "--mode", "sat-tb", phi)
    assert code == 0 and out == "A G turn_a0 & p\n"


def test_sat_contradiction(capsys, files):
    phi = files("contradiction.atlsc", "p & !p\n")
    code, out, _ = run(capsys, "sat", "--turn-based", "--max-states", "2", phi)
    assert code == 1
    assert "outcome: no-model-up-to-bound" in out


def test_sat_writes_model(capsys, files, tmp_path):
    phi = files("phi.atlsc", "<<a1>> G p\n")
    model = tmp_path / "model.json"
    code, _, _ = run(capsys, "sat", "--turn-based", "--model-out", str(model), phi)
    assert code == 0
    g = cgs_from_dict(json.loads(model.read_text()))
    assert len(g.states) == 1


def test_sat_alphabet_json(capsys, files):
    phi = files("phi.atlsc", "!<<a1>> X p & <<a1, a2>> X p\n")
    code, out, _ = run(capsys, "--output", "json", "sat", "--alphabet", "2", "--max-states", "3", phi)
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"] == "model" and doc["model"]["moves"] == ["1", "2"]


@pytest.mark.parametrize("engine,code", [("direct", 1), ("exact", 1), ("atl", 1)])
def test_check_engines_on_pennies(capsys, files, engine, code):
    game = files("mp.json", cgs_to_dict(pennies()))
    phi = files("phi.atlsc", "<<a1>> X win\n")
    assert run(capsys, "check", "--engine", engine, "--game", game, "--state", "q0", phi)[0] == code


def test_check_unknown_exit_code(capsys, files):
    game = files("gadget.json", cgs_to_dict(ping_pong()))
    phi = files("phi.atlsc", "<<a>>0 F (<<>>0 X at_s & <<>>0 X <<>>0 X r)\n")
    base = ("check", "--game", game, "--state", "s")
    assert run(capsys, *base, "--engine", "memoryless", phi)[0] == 1
    assert run(capsys, *base, "--engine", "direct", "--memory", "1", phi)[0] == 2
    code, out, _ = run(capsys, "--output", "json", *base, "--engine", "direct", "--memory", "2", phi)
    assert code == 0 and json.loads(out)["verdict"] == "TRUE"


def test_check_sl(capsys, files):
    game = files("mp.json", cgs_to_dict(pennies()))
    phi = files("phi.sl", "<x> (a1,x) (a2,x) X win\n")
    assert run(capsys, "check", "--engine", "direct", "--game", game, "--state", "q0", phi)[0] == 0


def test_translate_mc_with_context(capsys, files):
    game = files("mp.json", cgs_to_dict(pennies()))
    phi = files("phi.atlsc", "<<a1>> X win\n")
    code, out, _ = run(capsys, "translate", "--mode", "mc", "--game", game, "--context", "a2", phi)
    assert code == 0 and "mov_a2_1" in out


def test_parse_round_trip(capsys, files):
    phi = files("phi.atlsc", "<<a1>>   X (p&q)\n")
    code, out, _ = run(capsys, "parse", phi)
    assert code == 0 and out == "<<a1>> X (p & q)\n"


def test_tiling_gen(capsys, files, tmp_path):
    inst = files("inst.json", {"tiles": ["t"], "h": [["t", "t"]], "v": [["t", "t"]]})
    code, out, _ = run(capsys, "tiling-gen", inst)
    assert code == 0 and out.startswith("<<>>0 G (m & !c & !t")
    target = tmp_path / "tiling.atlsc"
    assert run(capsys, "tiling-gen", inst, "-o", str(target))[0] == 0
    assert target.read_text() == out


def test_usage_errors(capsys, files):
    assert run(capsys)[0] == 64
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "sat", "--turn-based", "--max-states", "0", "x.atlsc")[0] == 64
    phi = files("phi.atlsc", "<<a1>> X p\n")
    assert run(capsys, "translate", "--mode", "mc", phi)[0] == 64


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "parse", str(tmp_path / "absent.atlsc"))
    assert code == 66 and "absent.atlsc" in err


def test_malformed_inputs(capsys, files):
    bad = files("bad.atlsc", "<<a1>> X (p &\n")
    code, _, err = run(capsys, "parse", bad)
    assert code == 65 and "line 2, column 1" in err
    game = files("bad.json", "{not json")
    phi = files("phi.atlsc", "<<a1>> X p\n")
    assert run(capsys, "check", "--engine", "direct", "--game", game, "--state", "s", phi)[0] == 65
    doc = cgs_to_dict(pennies())
    del doc["edg"]["q0/1,2"]
    game = files("broken.json", doc)
    code, _, err = run(capsys, "check", "--engine", "direct", "--game", game, "--state", "q0", phi)
    assert code == 65 and "edg" in err


def test_unknown_state(capsys, files):
    game = files("mp.json", cgs_to_dict(pennies()))
    phi = files("phi.atlsc", "<<a1>> X win\n")
    assert run(capsys, "check", "--engine", "direct", "--game", game, "--state", "nowhere", phi)[0] == 65


def test_deterministic_output(files):
    phi = files("phi.atlsc", "<<a1>> X p & <<a1>> X !p\n")
    cmd = [sys.executable, "-m", "stratqctl.cli", "--output", "json", "sat", "--turn-based", phi]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout and first.stdout
