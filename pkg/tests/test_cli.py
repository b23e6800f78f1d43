import json
import subprocess
import sys

import pytest

from quncertainty.cli import build_parser, main


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out


def test_sweep_tangle_exact_endpoint(tmp_path):
    code, out = run(tmp_path, "sweep-tangle", "--points", "41", "--fidelity", "1.0", "--exact")
    assert code == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 42
    last = dict(zip(rows[0].split(","), rows[-1].split(",")))
    assert last["x"] == "1.000000000" and last["lhs_tomo"] == "0.000000000"


def test_two_points(tmp_path):
    code, out = run(tmp_path, "sweep-tangle", "--points", "2", "--exact")
    assert code == 0 and len(out.read_text().splitlines()) == 3


def test_sweep_tangle_deterministic(tmp_path):
    args = ("sweep-tangle", "--points", "5", "--shots", "3000", "--seed", "7", "--resamples", "100")
    _, a = run(tmp_path, *args, name="a")
    _, b = run(tmp_path, *args, "--workers", "3", name="b")
    assert a.read_bytes() == b.read_bytes()


def test_sweep_omega_defaults(tmp_path):
    code, out = run(tmp_path, "sweep-omega", "--exact")
    assert code == 0 and len(out.read_text().splitlines()) == 47


def test_sweep_omega_fixed_angle_summary(tmp_path, capsys):
    code, out = run(tmp_path, "sweep-omega", "--fixed-omega-deg", "32.5", "--exact", "--points", "11")
    assert code == 0
    assert "non-tight" in capsys.readouterr().out


def test_sweep_omega_endpoint_matches_tangle_sweep(tmp_path):
    _, a = run(tmp_path, "sweep-omega", "--exact", "--points", "2", name="a")
    _, b = run(tmp_path, "sweep-tangle", "--exact", "--points", "101", name="b")
    end = a.read_text().splitlines()[-1].split(",")[1:7]
    ref = b.read_text().splitlines()[48].split(",")[1:7]
    assert end == ref


def test_json_format(tmp_path):
    code, out = run(tmp_path, "sweep-tangle", "--points", "3", "--exact", "--format", "json")
    data = json.loads(out.read_text())
    assert code == 0 and data["schema"] == 1 and data["x"] == "tangle"


def test_tomo_exact_bell(tmp_path):
    code, out = run(tmp_path, "tomo", "--exact", "--tangle", "1")
    data = json.loads(out.read_text())
    assert code == 0 and data["fidelity"] >= 0.999999 and data["converged"]


def test_tomo_counts_round_trip(tmp_path):
    counts = tmp_path / "c.csv"
    code, a = run(tmp_path, "tomo", "--tangle", "0.5", "--shots", "2000", "--counts-out", str(counts), name="a")
    assert code == 0
    code, b = run(tmp_path, "tomo", "--counts-in", str(counts), name="b")
    assert code == 0
    assert json.loads(a.read_text())["rho_hat"] == json.loads(b.read_text())["rho_hat"]


def test_tomo_malformed_counts(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("setting,alice_outcome,bob_outcome,count\nX+X+,0,0,1\nX+X+,0,1,oops\n")
    code, _ = run(tmp_path, "tomo", "--counts-in", str(bad))
    assert code != 0
    assert "line 3" in capsys.readouterr().err


def test_witness_ideal(tmp_path):
    code, out = run(tmp_path, "witness", "--fidelity", "1.0", "--estimator", "tomographic",
                    "--error-seeds", "0")
    data = json.loads(out.read_text())
    assert code == 0 and data["thresholds"]["tomographic"]["tau_star"] == pytest.approx(0, abs=1e-9)


def test_witness_noisy_ordering(tmp_path):
    code, out = run(tmp_path, "witness", "--error-seeds", "3")
    data = json.loads(out.read_text())
    t = data["thresholds"]
    assert code == 0 and data["strict_ordering"]
    assert t["tomographic"]["tau_star"] < t["measurement"]["tau_star"] < t["fano"]["tau_star"]
    assert t["fano"]["replicates"] == 3 and t["fano"]["reported_tau_star"] == 0.13


def test_game(tmp_path):
    code, out = run(tmp_path, "game", "--exact", "--tangle", "1", "--omega-deg", "45")
    data = json.loads(out.read_text())
    assert code == 0 and data["report"]["lhs_measurement"] == 0.0 and data["q_r"] == 0.0


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep-tangle", "--points", "1"],
        ["sweep-tangle", "--fidelity", "0.1"],
        ["sweep-tangle", "--shots", "0"],
        ["sweep-tangle", "--omega", "0.1", "--omega-deg", "5"],
        ["sweep-tangle", "--resamples", "10"],
        ["game", "--tangle", "0.5", "--zeta", "0.1"],
        ["game", "--tangle", "2"],
        ["tomo", "--format", "csv"],
        ["sweep-omega", "--tangle", "0.4", "--fixed-omega-deg", "30"],
        ["bogus"],
        ["sweep-tangle", "--points", "abc"],
    ],
)
def test_invalid_flags(argv, tmp_path):
    try:
        code = main(argv + ["--out", str(tmp_path / "x")])
    except SystemExit as exc:
        code = exc.code
    assert code == 2
    assert not (tmp_path / "x").exists()


def test_unwritable_path():
    assert main(["sweep-tangle", "--exact", "--points", "2", "--out", "/nonexistent/dir/x.csv"]) == 1


@pytest.mark.parametrize("cmd", ["sweep-tangle", "sweep-omega", "tomo", "witness", "game"])
def test_help_mentions_units(cmd):
    text = build_parser()._subparsers._group_actions[0].choices[cmd].format_help()
    for flag in ("--seed", "--shots", "--fidelity", "--exact", "--out", "--format"):
        assert flag in text
    if cmd in ("sweep-tangle", "game"):
        assert "--omega-deg" in text and "radians" in text and "degrees" in text


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "quncertainty", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "sweep-tangle" in out.stdout
