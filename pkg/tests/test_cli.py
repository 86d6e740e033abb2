import json
import math
import os

import pytest

from vexlab.cli import main
from vexlab.exponent import exponent_loads


def test_no_command_usage(capsys):
    assert main([]) == 64
    assert "vexlab" in capsys.readouterr().out


def test_exponent_build_and_eval(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert main(["exponent", "build", "--kind", "tilde-p", "--truncation", "5", "--out", str(out)]) == 0
    p = exponent_loads(out.read_text())
    assert p.truncation == 5

    assert main(["exponent", "eval", "--exponent", str(out), "--at", "0.9"]) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert doc["value"] == 2.0

    assert main(["exponent", "eval", "--exponent", str(out), "--at", "0.5"]) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert doc["divergent"] is True


def test_exponent_sample_csv(tmp_path, capsys):
    out = tmp_path / "p.json"
    main(["exponent", "build", "--truncation", "3", "--out", str(out)])
    csv_out = tmp_path / "samples.csv"
    assert main(["exponent", "sample", "--exponent", str(out), "--grid", "64", "--out", str(csv_out)]) == 0
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "x,p(x)"
    assert len(lines) == 64


def test_norm_round_trip(tmp_path, capsys):
    from vexlab.funcrep import characteristic, function_dumps

    p_path = tmp_path / "p.json"
    main(["exponent", "build", "--truncation", "0", "--out", str(p_path)])
    f_path = tmp_path / "f.json"
    f_path.write_text(function_dumps(characteristic(0.0, 0.25)))
    assert main(["norm", "--function", str(f_path), "--exponent", str(p_path)]) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert doc["lo"] <= 0.5 <= doc["hi"]


def test_norm_conjugate_flag(tmp_path, capsys):
    from vexlab.funcrep import characteristic, function_dumps

    p_path = tmp_path / "p.json"
    main(["exponent", "build", "--truncation", "5", "--out", str(p_path)])
    f_path = tmp_path / "f.json"
    f_path.write_text(function_dumps(characteristic(0.0, 0.25)))
    assert main(["norm", "--function", str(f_path), "--exponent", str(p_path), "--conjugate"]) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert doc["hi"] > 0.0


def test_phi_build_mass(tmp_path, capsys):
    out = tmp_path / "phi.json"
    assert main(["phi", "build", "--n", "25", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["mass"] == [2, 1]
    assert all(rec["k"] >= 2 for rec in doc["audit"])


def test_phi_scan_csv(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert main(["phi", "scan", "--n", "25", "--r-max", "400", "--grid", "64", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,max_abs_partial_sum,argmax_r"
    assert len(lines) == 65


def test_series_scan(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert (
        main(["series", "--kind", "marcinkiewicz", "--n-seq", "25", "--r-max", "500", "--grid", "32"])
        == 0
    )
    out = capsys.readouterr().out
    expected = 2.0 / math.log(25.0)
    assert repr(expected) in out
    assert os.path.exists(tmp_path / "marcinkiewicz_scan.csv")


def test_verify_single_experiment(tmp_path, capsys):
    code = main(
        [
            "verify",
            "--id",
            "thm3.2",
            "--seed",
            "7",
            "--trials",
            "5",
            "--truncation",
            "20",
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "seed = 7" in out
    assert "thm3.2: pass" in out
    assert os.path.exists(tmp_path / "summary.csv")


def test_verify_unknown_id_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--id", "bogus"])
    assert exc.value.code == 2  # argparse rejects the choice


def test_config_file_override(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("trials = 4\ntruncation = 15\nseed = 99\n")
    code = main(
        ["--config", str(cfg_file), "verify", "--id", "thm3.2", "--out-dir", str(tmp_path / "o")]
    )
    assert code == 0
    assert "seed = 99" in capsys.readouterr().out


def test_missing_function_file(tmp_path, capsys):
    p_path = tmp_path / "p.json"
    main(["exponent", "build", "--truncation", "0", "--out", str(p_path)])
    code = main(["norm", "--function", str(tmp_path / "missing.json"), "--exponent", str(p_path)])
    assert code == 64
