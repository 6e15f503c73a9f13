import json
import subprocess
import sys

import pytest

from multitypes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_table(capsys):
    code, out, _ = run(capsys, "reduce", "--strategy", "leftmost", "--fuel", "10", r"(\x.x x)(\z.z)")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[1] == r"1: (\z. z) \z. z  [redex @ root]"
    assert lines[2] == r"2: \z. z  [redex @ root]"
    assert lines[-1].startswith("normal after 2 step(s)")


def test_reduce_json_and_fuel(capsys):
    code, out, _ = run(capsys, "reduce", "--format", "json", r"(\x.x x)(\z.z)")
    obj = json.loads(out)
    assert code == 0 and obj["length"] == 2 and obj["final"] == r"\z. z"
    code, out, _ = run(capsys, "reduce", "--fuel", "5", r"(\x.x x)(\x.x x)")
    assert code == 1 and "fuel-exhausted" in out


def test_infer(capsys):
    code, out, _ = run(capsys, "infer", "--fuel", "10", "--format", "json", r"(\x.x x)(\z.z)")
    obj = json.loads(out)
    assert code == 0
    assert obj["size"] == 5 and obj["unitary_shrinking"] and obj["steps"] == 2
    assert obj["derivation"]["rule"] == "app"
    code, _, err = run(capsys, "infer", "--fuel", "10", r"(\x.x x)(\x.x x)")
    assert code == 1 and err


def test_infer_seed_supply(capsys):
    _, out, _ = run(capsys, "infer", "--format", "json", "--seed-supply", "7", r"\x. x")
    assert "X7" in out


def test_check_dry_onetype_roundtrip(tmp_path, capsys):
    f = tmp_path / "d.json"
    _, out, _ = run(capsys, "infer", "--format", "json", r"\x. x x")
    f.write_text(out)
    code, out, _ = run(capsys, "check", "--format", "json", "--in", str(f))
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "dry", "--format", "json", "--in", str(f))
    obj = json.loads(out)
    assert code == 0 and obj["two_occurrence"] and obj["minimality"]["equal"]
    g = tmp_path / "dry.json"
    g.write_text(json.dumps(obj["derivation"]))
    code, out, _ = run(capsys, "check", "--format", "json", "--in", str(g))
    assert code == 0 and json.loads(out)["system"] == "dry"
    code, out, _ = run(capsys, "onetype", "--format", "json", "--in", str(f))
    obj = json.loads(out)
    assert code == 0 and obj["size"] == 2 and obj["type_size"] == 2


def test_check_violation(tmp_path, capsys):
    _, out, _ = run(capsys, "infer", "--format", "json", r"\x. x")
    obj = json.loads(out)["derivation"]
    obj["rhs"] = {"var": "Q"}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(obj))
    code, out, _ = run(capsys, "check", "--in", str(f))
    assert code == 1 and "root" in out


def test_compose(tmp_path, capsys):
    from multitypes.derivations import derivation_to_json
    from multitypes.golden import delta_id_derivation
    d = delta_id_derivation()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(derivation_to_json(d.premises[0])))
    b.write_text(json.dumps(derivation_to_json(d.premises[1])))
    code, out, _ = run(capsys, "compose", "--format", "json", str(a), str(b))
    assert code == 0 and json.loads(out)["size"] == 5
    code, _, _ = run(capsys, "compose", str(a))
    assert code == 2


def test_pair(capsys):
    code, out, _ = run(capsys, "pair", "--format", "json", r"\x. x x", r"\y. y")
    obj = json.loads(out)
    assert code == 0 and obj["pair"]["size"] == 11 and obj["exact"]["pair_size"] == 5
    code, out, _ = run(capsys, "pair", "--format", "json", "--strategy", "head",
                       r"\x. \y. x y y", r"\z. z")
    obj = json.loads(out)
    assert code == 0 and obj["exact"]["theorem"] == "T28" and obj["exact"]["pass"]


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T9", "--max-nodes", "6")
    assert code == 0 and out.startswith("T9: PASS")
    code, out, _ = run(capsys, "verify", "--theorem", "T25", "--max-nodes", "4", "--format", "json")
    assert code == 0 and json.loads(out)["pass"]


def test_enumerate_and_golden(capsys):
    code, out, _ = run(capsys, "enumerate", "--max-nodes", "4", "--format", "json")
    assert code == 0 and len(json.loads(out)) == 7
    code, out, _ = run(capsys, "enumerate", "--max-nodes", "2", "--open")
    assert code == 0 and "a" in out.split()
    code, out, _ = run(capsys, "golden", "--format", "json")
    assert code == 0 and json.loads(out)["pass"]


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["verify", "--theorem", "T99"],
    ["parse", r"\x."],
    ["reduce"],
    ["check", "--in", "/nonexistent/file.json"],
    ["reduce", "--fuel", "-1", "x"],
    ["onetype", "--target", "[X", "--in", "/nonexistent.json"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as e:
        raise SystemExit(main(argv))
    assert e.value.code == 2
    assert capsys.readouterr().err


def test_json_output_is_byte_identical():
    cmd = [sys.executable, "-m", "multitypes", "infer", "--format", "json", r"(\x.x x)(\z.z)"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["size"] == 5
