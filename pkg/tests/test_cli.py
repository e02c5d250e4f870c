import subprocess
import sys

import numpy as np
import pytest

from levinapprox.cli import main
from levinapprox.realset import single_gap, write_set


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_body(text):
    """Rows of a CSV with ``#`` header comments stripped."""
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def test_validate_key_value_lines(capsys, tmp_path):
    p = tmp_path / "e.txt"
    write_set(single_gap(), p)
    code, out, _ = run(capsys, "validate", "--set", str(p))
    assert code == 0
    values = dict(line.split("=", 1) for line in out.splitlines())
    assert float(values["c1"]) == 2.0
    assert values["n_gaps"] == "1"


def test_validate_threshold_violation_exits_2(capsys):
    code, out, err = run(capsys, "validate", "--set", "example1:-3,3", "--threshold-c2", "0.1")
    assert code == 2
    assert "check failed" in err


def test_structural_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "validate", "--set", str(tmp_path / "missing.txt"))[0] == 1
    assert run(capsys, "tau", "--set", "single:-1,1", "--x1", "0", "--x2", "2")[0] == 1
    assert run(capsys, "approx", "--set", "four-gap", "--fn", "nonsense:1")[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("-1 1\n")
    assert run(capsys, "validate", "--set", str(bad))[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["tau", "--x1", "1"])
    assert exc.value.code == 1


def test_tau_and_rho(capsys):
    code, out, _ = run(capsys, "tau", "--set", "single:-1,1", "--c", "0.4", "--x1", "1.2", "--x2", "1.3")
    assert code == 0 and float(out) == pytest.approx(0.316228, abs=1e-6)
    code, out, _ = run(capsys, "rho", "--set", "single:-1,1", "--x1", "-1", "--x2", "1")
    assert code == 0 and float(out) == pytest.approx(2 ** -0.5, abs=1e-10)


def test_solve_map_then_rho_from_file(capsys, tmp_path):
    m = tmp_path / "single.map"
    code, out, _ = run(capsys, "solve-map", "--set", "single:-1,1", "--out", str(m))
    assert code == 0 and m.exists()
    assert "gap 0:" in out
    code, out, _ = run(capsys, "rho", "--map", str(m), "--x1", "-2", "--x2", "2")
    assert float(out) == pytest.approx(2 * np.sqrt(1.5), abs=1e-10)


def test_approx_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "approx", "--set", "gapfree:-3,3", "--fn", "abs-pow:x0=0,alpha=0.5",
                       "--method", "kernel", "--sigmas", "4,8")
    assert code == 0
    assert out.startswith("# levinapprox approx v1")
    header, rows = csv_body(out)
    assert header == ["sigma", "error", "method"]
    assert [r[2] for r in rows] == ["kernel", "kernel"]
    assert float(rows[1][1]) < float(rows[0][1])


def test_omega_star_csv_to_out_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "--out", str(tmp_path), "omega-star", "--set", "single:-1,1",
                       "--fn", "tau-pow:x0=3,alpha=0.5", "--dist", "tau", "--deltas", "0.01,0.1")
    assert code == 0
    header, rows = csv_body((tmp_path / "omega_star.csv").read_text())
    assert header == ["delta", "omega_star"] and len(rows) == 2
    assert float(rows[0][1]) <= float(rows[1][1])


def test_theorem1_and_lemma36(capsys, tmp_path):
    code, out, _ = run(capsys, "theorem1", "--set", "single:-1,1", "--pairs", "200",
                       "--out", str(tmp_path))
    assert code == 0 and "PASS theorem1.bracket_finite" in out
    assert (tmp_path / "theorem1.csv").exists()
    code, out, _ = run(capsys, "lemma36", "--set", "single:-1,1")
    assert code == 0 and "regime ii" in out


def test_config_file_and_seed(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("set = single:-1,1\npairs = 100\n")
    code, out, _ = run(capsys, "--config", str(cfg), "--seed", "4", "theorem1")
    assert code == 0
    assert "pairs=" in out and "seed=4" in out


def test_rates_same_seed_byte_identical(capsys, tmp_path):
    args = ["rates", "--set", "four-gap", "--fn", "tau-pow:x0=0,alpha=0.5",
            "--sigmas", "4,8,16,32", "--no-kernel", "--seed", "3"]
    assert run(capsys, *args, "--out", str(tmp_path / "a"))[0] == 0
    assert run(capsys, *args, "--out", str(tmp_path / "b"))[0] == 0
    for name in ("rates.csv", "omega_star.csv", "theorem3.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "levinapprox", "tau", "--set", "single:-1,1",
                           "--x1", "-1", "--x2", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert float(proc.stdout) == 2.0
