import json
import math

import pytest

from bpbmod.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_psi_range_rows(capsys):
    code, out = run(capsys, "psi", "--mu", "1", "--theta", "1",
                    "--delta", "0.1:0.5:0.1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "delta,psi,min_bound,lower_bound,note"
    assert len(lines) == 6  # header + 5 rows, both range ends included
    for line in lines[1:]:
        delta, value = line.split(",")[:2]
        assert float(value) == pytest.approx(math.sqrt(2 * float(delta)), abs=1e-12)


def test_psi_single_value(capsys):
    code, out = run(capsys, "psi", "--mu", "0.5", "--theta", "0.8",
                    "--delta", "1.25")
    assert code == 0
    assert float(out.strip().splitlines()[1].split(",")[1]) == pytest.approx(1.5, abs=1e-12)


def test_psi_regime_row_flagged_not_fatal(capsys):
    code, out = run(capsys, "psi", "--mu", "0.1", "--theta", "0.1",
                    "--delta", "0.2")
    assert code == 0
    row = out.strip().splitlines()[1]
    assert "regime" in row
    assert row.startswith("0.2,,")


def test_bound_includes_nonsquare_column(capsys):
    code, out = run(capsys, "bound", "--mu", "1", "--theta", "1",
                    "--delta", "0.2", "--alpha-tilde", "0.58")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert float(row[5]) == pytest.approx(
        math.sqrt(0.4) * math.sqrt(1 - 0.58 / 3), abs=1e-12)


def test_distance_json(capsys):
    code, out = run(capsys, "distance", "--space", "l2:2", "--x", "1,0",
                    "--f", "0,1", "--resolution", "200")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "bpb/1"
    assert doc["closed_form"] == pytest.approx(math.sqrt(2 - math.sqrt(2)), abs=1e-12)
    assert doc["discrepancy"] <= 1e-3


def test_distance_linf_case(capsys):
    code, out = run(capsys, "distance", "--space", "linf:2", "--x", "1,-0.5",
                    "--f", "0,0.5", "--resolution", "200")
    assert code == 0
    assert json.loads(out)["witness"]["distance"] == pytest.approx(1.5, abs=1e-6)


def test_distance_real_line(capsys):
    code, out = run(capsys, "distance", "--space", "r:1", "--x", "0.5",
                    "--f", "0.9")
    assert code == 0
    doc = json.loads(out)
    assert doc["witness"]["distance"] == pytest.approx(0.5, abs=1e-12)
    assert doc["closed_form"] == pytest.approx(0.5, abs=1e-12)


def test_modulus_csv(capsys):
    code, out = run(capsys, "modulus", "--space", "linf:2", "--mode", "sphere",
                    "--delta", "0.5", "--resolution", "160")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "delta,estimate,mesh_error,sqrt_2delta,closed_form,note"
    row = lines[1].split(",")
    assert float(row[1]) == pytest.approx(1.0, abs=5e-3)
    assert row[2] != ""  # mesh error always emitted alongside the estimate
    assert float(row[4]) == pytest.approx(1.0, abs=1e-12)


def test_modulus_mut_sum1(capsys):
    code, out = run(capsys, "modulus", "--space", "sum1(r:1,r:1)", "--mode", "mut",
                    "--mu", "0.9", "--theta", "0.9", "--delta", "0.4",
                    "--resolution", "200")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert float(row[1]) == pytest.approx(0.7480740698407862, abs=5e-3)
    assert float(row[4]) == pytest.approx(0.7480740698407862, abs=1e-12)


def test_alpha_command(capsys):
    code, out = run(capsys, "alpha", "--space", "l2:2", "--self-dual",
                    "--resolution", "160")
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert float(row[1]) == pytest.approx(2 - math.sqrt(2), abs=1e-3)


def test_convexity_command(capsys):
    code, out = run(capsys, "convexity", "--space", "l2:2", "--eps", "1.0:2.0:0.5",
                    "--resolution", "400")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    last = lines[-1].split(",")
    assert float(last[1]) == pytest.approx(1.0, abs=1e-9)


def test_corrector_command(capsys):
    code, out = run(capsys, "corrector", "--space", "l2:2", "--x", "1,0",
                    "--f", "1,0", "--delta", "0.1", "--alpha-tilde", "0.58",
                    "--resolution", "160")
    assert code == 0
    doc = json.loads(out)
    assert doc["witness"]["distance"] == pytest.approx(0.0, abs=1e-9)
    assert doc["slack_x"] >= 0 and doc["slack_f"] >= 0


def test_witness_command(capsys):
    code, out = run(capsys, "witness", "--family", "linf2", "--mu", "1",
                    "--theta", "1", "--delta", "0.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["x"] == [1.0, 0.0]
    assert doc["f"] == [0.5, 0.5]
    assert doc["predicted_distance"] == pytest.approx(1.0, abs=1e-12)


def test_verify_hilbert_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "hilbert")
    assert code == 0
    assert "OK" in out
    assert all(line.startswith(("PASS", "OK")) for line in out.strip().splitlines())


def test_poly_space_from_file(tmp_path, capsys):
    path = tmp_path / "diamond.json"
    path.write_text(json.dumps({"vertices": [[1, 0], [-1, 0], [0, 1], [0, -1]]}))
    code, out = run(capsys, "distance", "--space", f"poly:@{path}", "--x", "0.5,0",
                    "--f", "0.5,0", "--resolution", "64")
    assert code == 0
    assert json.loads(out)["witness"]["distance"] == pytest.approx(0.5, abs=1e-9)


def test_exit_code_usage_error(capsys):
    assert main(["distance", "--space", "bogus", "--x", "1", "--f", "1"]) == 2


def test_exit_code_regime_error(capsys):
    assert main(["witness", "--family", "linf2", "--mu", "0.1", "--theta", "0.1",
                 "--delta", "0.2"]) == 3
    assert main(["corrector", "--space", "l2:2", "--x", "1,0", "--f", "1,0",
                 "--delta", "0.1", "--k", "0.7", "--alpha-tilde", "0.58"]) == 3


def test_byte_identical_outputs(tmp_path):
    argv = ["modulus", "--space", "l2:2", "--mode", "sphere", "--delta",
            "0.2:0.6:0.2", "--resolution", "160", "--seed", "7"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--output", str(out1)]) == 0
    assert main(argv + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_byte_identical_json(tmp_path):
    argv = ["distance", "--space", "linf:2", "--x", "0.9,0.1", "--f", "0.7,0.2",
            "--resolution", "120", "--format", "json"]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--output", str(out1)]) == 0
    assert main(argv + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_seed_env_override(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("BPB_SEED", "99")
    code, _ = run(capsys, "alpha", "--space", "l2:2", "--resolution", "160")
    assert code == 0
    monkeypatch.setenv("BPB_THREADS", "2")
    code, _ = run(capsys, "alpha", "--space", "l2:2", "--resolution", "160")
    assert code == 0
