import json

import pytest

from nipreg import bohr as bh
from nipreg.cli import main

Z12 = '{"preset":"cyclic","n":12}'
F4 = '{"values":[["0"],["3/10"],["1/2"],["3/4"]]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.lstrip().startswith("{") else out)


def test_vc(capsys):
    code, rep = run(capsys, "vc", "--group", Z12, "--set", '{"elements":[0,1,2,3]}')
    assert code == 0
    assert rep["verdict"] == "complete"
    assert rep["result"]["vc_dimension"] == 2
    assert rep["parameters"]["group"] == {"preset": "cyclic", "n": 12}


def test_vc_k_nip(capsys):
    _, rep = run(capsys, "vc", "--group", Z12, "--set", "[0,1,2,3]", "--k", "3")
    assert rep["result"]["k_nip"] is True


def test_stability_text(capsys):
    code, out = run(capsys, "stability", "--group", Z12, "--set", "[0,1,2,3]", "--format", "text")
    assert code == 0 and "stability_order: 4" in out


def test_bohr(capsys):
    code, rep = run(capsys, "bohr", "--group", Z12, "--characters", "[[1]]", "--delta", "1/4")
    assert code == 0
    assert rep["result"]["realized"]["elements"] == [0, 1, 2, 10, 11]
    assert rep["result"]["doubled"]["holds"]


def test_defect_and_correct(capsys):
    code, rep = run(capsys, "defect", "--group", '{"preset":"cyclic","n":4}', "--map", F4)
    assert code == 0 and rep["result"]["defect"] == "1/10"
    code, rep = run(capsys, "correct", "--group", '{"preset":"cyclic","n":4}', "--map", F4, "--delta", "1/8")
    assert code == 0
    assert rep["result"]["sup_dist"] == "1/20"
    assert rep["result"]["B"]["elements"] == [0] and rep["result"]["nested"] is True
    code, rep = run(capsys, "correct", "--group", '{"preset":"cyclic","n":4}', "--map", F4, "--delta", "1/10")
    assert code == 4 and rep["error"]["type"] == "NotApproxHom"


def test_correct_failure_exit_code(capsys, monkeypatch):
    def far(f):
        return [bh.characters(f.domain)[0]], bh.Fraction(1, 2)

    monkeypatch.setattr(bh, "nearest_homomorphism", far)
    code, rep = run(capsys, "correct", "--group", '{"preset":"cyclic","n":4}', "--map", F4, "--delta", "1/8")
    assert code == 2
    assert rep["verdict"] == "reject" and rep["result"]["error"] == "CorrectionFailed"
    assert rep["result"]["sup_dist"] == "1/2"


def test_decompose_and_verify_roundtrip(capsys, tmp_path):
    out = tmp_path / "w.json"
    code = main(["decompose", "--group", '{"preset":"cyclic","n":101}', "--set",
                 '{"generator":"arc","length":50}', "--eps", "2/5", "--max-index", "1", "--max-rank", "1",
                 "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    w = rep["result"]["witness"]
    assert w["kind"] == "bohr" and w["r"] == 1 and w["delta"] == "23/101"
    code, ver = run(capsys, "verify", "--witness", str(out))
    assert code == 0 and ver["verdict"] == "accept"
    # tamper with D: no longer a union of cover translates
    w["D"] = "0x1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(w))
    code, ver = run(capsys, "verify", "--witness", str(bad))
    assert code == 4 and ver["error"]["type"] == "MalformedWitness"
    w["group_hash"] = "0" * 64
    bad.write_text(json.dumps(w))
    code, _ = run(capsys, "verify", "--witness", str(bad))
    assert code == 4


def test_decompose_subgroup_and_exact(capsys):
    grp = '{"preset":"elementary_abelian","p":2,"k":4}'
    code, rep = run(capsys, "decompose", "--group", grp, "--set", "[0,1,2,3,12,13,14]", "--eps", "1/4",
                    "--mode", "subgroup", "--moreover")
    assert code == 0 and rep["result"]["witness"]["index"] == 2
    assert "moreover" in rep["result"]
    code, rep = run(capsys, "decompose", "--group", '{"preset":"cyclic","n":4}', "--set", "[0,1]", "--eps", "1/2",
                    "--mode", "exact", "--subgroup", "[0,2]", "--z", "[]")
    assert code == 2 and rep["verdict"] == "reject"
    assert rep["result"]["verification"]["margins"]["minimal_Z_size"] == 4
    code, rep = run(capsys, "decompose", "--group", '{"preset":"cyclic","n":4}', "--set", "[0,1]", "--eps", "1/2",
                    "--mode", "exact", "--subgroup", "[0,2]", "--z", "[0]")
    assert code == 4 and rep["error"]["type"] == "NotCosetUnion"


def test_decompose_budget(capsys):
    code, rep = run(capsys, "decompose", "--group", '{"preset":"cyclic","n":101}', "--set",
                    '{"generator":"arc","length":50}', "--eps", "2/5", "--max-index", "1", "--max-rank", "1",
                    "--budget", "10")
    assert code == 3 and rep["verdict"] == "budget_exceeded"
    assert "candidates_charged" in rep["error"]["stats"]


def test_cayley(capsys):
    code, rep = run(capsys, "cayley", "--group", '{"preset":"cyclic","n":4}', "--set", "[0,1]",
                    "--subgroup", "[0,2]", "--eps", "1/2", "--exhaustive")
    assert code == 0
    assert rep["result"]["exceptional_count"] == 2 and rep["result"]["sigma_count"] == 4


def test_exit_codes_for_bad_input(capsys):
    assert main(["vc", "--group", '{"preset":"nope"}', "--set", "[0]"]) == 4
    assert main(["vc", "--group"]) == 4
    assert main(["vc", "--group", Z12, "--set", "[99]"]) == 4
    assert main(["bohr", "--group", Z12, "--characters", "[[1]]", "--delta", "0"]) == 4
    assert main(["frobnicate"]) == 4
    capsys.readouterr()


def test_size_limit_exit_code(capsys):
    assert main(["vc", "--group", '{"preset":"symmetric","n":6}', "--set", "[0]"]) == 3
    capsys.readouterr()


def test_reports_are_deterministic(capsys):
    argv = ["decompose", "--group", Z12, "--set", '{"generator":"random","size":5}', "--eps", "1/3",
            "--seed", "7"]
    main(argv + ["--threads", "1"])
    a = capsys.readouterr().out
    main(argv + ["--threads", "3"])
    b = capsys.readouterr().out
    assert a == b
    rep = json.loads(a)
    assert "threads" not in rep["parameters"] and "timing_seconds" not in rep
    main(argv + ["--timing"])
    assert "timing_seconds" in json.loads(capsys.readouterr().out)


def test_batch(capsys, tmp_path):
    spec = {"entries": [
        {"name": "arc", "command": "vc", "group": {"preset": "cyclic", "n": 12}, "set": [0, 1, 2, 3]},
        {"name": "bad", "command": "vc", "group": {"preset": "cyclic", "n": 12}, "set": [40]},
        {"name": "noisy", "command": "decompose", "group": {"preset": "elementary_abelian", "p": 2, "k": 4},
         "set": {"generator": "coset_union_with_noise", "subgroup": {"elements": [0, 1, 2, 3]}, "count": 2,
                 "flips": 1}, "params": {"eps": "1/4", "mode": "subgroup"}, "seed": 3},
    ]}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, rep = run(capsys, "batch", "--spec", str(path), "--threads", "2")
    assert code == 4
    assert [e["exit_code"] for e in rep["entries"]] == [0, 4, 0]
    assert len(rep["reports"]) == 3
    outdir = tmp_path / "out"
    main(["batch", "--spec", str(path), "--out", str(outdir)])
    capsys.readouterr()
    assert sorted(p.name for p in outdir.iterdir()) == ["000_arc.json", "001_bad.json", "002_noisy.json",
                                                         "summary.json"]


@pytest.mark.parametrize("argv", [["--help"], ["vc", "--help"]])
def test_help_exits_zero(argv, capsys):
    assert main(argv) == 0
    capsys.readouterr()
