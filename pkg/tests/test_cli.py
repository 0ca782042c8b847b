"""CLI contract: subcommands, config handling, exit codes, determinism.

Most tests invoke cli.main in process (sharing the session caches); one
subprocess test checks the installed console script end to end.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from ladderlab import cli, quadrature

pytestmark = pytest.mark.usefixtures("engine", "phi_model")


def run(*argv):
    return cli.main([str(a) for a in argv])


# ---------------------------------------------------------------------------
# checkpoints

def test_checkpoints_writes_monotone_table(tmp_path):
    out = tmp_path / "ck.csv"
    assert run("checkpoints", "--t-max", 200, "-o", out) == 0
    table = quadrature.load_checkpoints_csv(out)
    assert table.t_max == 200.0
    assert np.all(np.diff(table.knots[:, 1]) >= 0)


def test_checkpoints_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("checkpoints", "--t-max", 150, "-o", a) == 0
    assert run("checkpoints", "--t-max", 150, "-o", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_checkpoints_rejects_negative_t_max(tmp_path, capsys):
    assert run("checkpoints", "--t-max", -5, "-o", tmp_path / "x.csv") == 2
    assert "error" in capsys.readouterr().err


def test_unknown_command_and_flag_are_usage_errors(capsys):
    assert run("frobnicate") == 2
    assert run("checkpoints", "--no-such-flag") == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# config files

def test_config_file_feeds_commands(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t_max = 150  # small table\n\nrel_tol = 1e-9\n")
    out = tmp_path / "ck.csv"
    assert run("--config", cfg, "checkpoints", "-o", out) == 0
    assert quadrature.load_checkpoints_csv(out).t_max == 150.0


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t_max = 150\n")
    out = tmp_path / "ck.csv"
    assert run("--config", cfg, "checkpoints", "--t-max", 200, "-o",
               out) == 0
    assert quadrature.load_checkpoints_csv(out).t_max == 200.0


def test_config_unknown_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t_macks = 100\n")
    assert run("--config", cfg, "checkpoints", "-o",
               tmp_path / "x.csv") == 2
    assert "unknown key" in capsys.readouterr().err


def test_config_bad_syntax_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("just some words\n")
    assert run("--config", cfg, "checkpoints", "-o",
               tmp_path / "x.csv") == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# zeros

def test_zeros_csv_matches_reference(tmp_path, oracles):
    out = tmp_path / "zeros.csv"
    assert run("zeros", "--t-lo", 10, "--t-hi", 30, "-o", out) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "index,gamma,bracket_width,z_residual"
    gammas = [float(r.split(",")[1]) for r in rows[1:]]
    for i, g in enumerate(gammas, start=1):
        assert abs(g - float(oracles["zeta_zeros"][str(i)])) <= 1e-8


# ---------------------------------------------------------------------------
# ladder and ladder-gap

LADDER_GRID = ("--t-grid-start", 100, "--t-grid-stop", 2000,
               "--t-grid-count", 8)


def test_ladder_emits_increasing_phi(tmp_path):
    out = tmp_path / "ladder.csv"
    assert run("ladder", *LADDER_GRID, "-o", out) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1, ndmin=2)
    assert rows.shape == (8, 3)
    assert np.all(np.diff(rows[:, 1]) > 0)
    assert np.all(rows[:, 1] < 2.0 * rows[:, 0])


def test_ladder_warns_and_omits_rows_below_t0(tmp_path, capsys):
    out = tmp_path / "ladder.csv"
    assert run("ladder", "--t-grid-start", 40, "--t-grid-stop", 400,
               "--t-grid-count", 6, "-o", out) == 0
    err = capsys.readouterr().err
    assert "omitted" in err and "T0" in err
    rows = np.loadtxt(out, delimiter=",", skiprows=1, ndmin=2)
    assert rows.shape[0] < 6
    assert np.all(rows[:, 0] >= 55.0)


def test_ladder_grid_must_fit_under_t_max(tmp_path, capsys):
    assert run("ladder", "--t-max", 500, "--t-grid-start", 100,
               "--t-grid-stop", 2000, "--t-grid-count", 5,
               "-o", tmp_path / "x.csv") == 2
    capsys.readouterr()


def test_ladder_gap_between_cutoffs(tmp_path, capsys):
    a, b = tmp_path / "k7.csv", tmp_path / "k9.csv"
    assert run("ladder", *LADDER_GRID, "-o", a) == 0
    assert run("ladder", *LADDER_GRID, "--mu-k", 9, "-o", b) == 0
    capsys.readouterr()
    assert run("ladder-gap", a, b, "--json") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rows"] == 8
    assert payload["max_gap_times_T"] <= 1.0


def test_ladder_gap_requires_shared_grid(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("ladder", *LADDER_GRID, "-o", a) == 0
    assert run("ladder", "--t-grid-start", 200, "--t-grid-stop", 2000,
               "--t-grid-count", 8, "-o", b) == 0
    assert run("ladder-gap", a, b) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# verify

def test_verify_series_passes_and_writes_report(tmp_path, capsys):
    assert run("verify", "series", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "series" in out and "PASS" in out
    report = json.loads((tmp_path / "report-series.json").read_text())
    assert report["pass"] is True
    assert report["sections"]["series"]["pass"] is True


def test_verify_tka_passes(tmp_path, capsys):
    assert run("verify", "tka", "--out", tmp_path) == 0
    report = json.loads((tmp_path / "report-tka.json").read_text())
    assert report["sections"]["tka"]["pass"] is True
    assert report["constants"]["c0"] is not None
    capsys.readouterr()


def test_verify_primes_fails_honestly(tmp_path, capsys):
    # the relative error is not monotone over {1e3, 3e3, 1e4} (the
    # T=1e3 ladder point runs low), so this suite reports FAIL
    assert run("verify", "primes", "--out", tmp_path) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
    report = json.loads((tmp_path / "report-primes.json").read_text())
    assert report["sections"]["primes"]["pass"] is False
    rows = report["sections"]["primes"]["outputs"]["rows"]
    assert rows[-1]["rel_err"] < 0.12


def test_verify_rejects_unknown_suite(tmp_path, capsys):
    assert run("verify", "weather", "--out", tmp_path) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# small reporting commands

def test_coeffs_prints_exact_entries(capsys):
    assert run("coeffs", "--n", 5) == 0
    out = capsys.readouterr().out
    assert "A_3 = 1/2 q^2" in out
    assert "A_5 = 1/2 q^3 + 1/12 q^4" in out
    assert "B_2 = a (q)" in out
    assert "B_3 = 1/2 q^2 + a^2 (q)" in out


def test_coeffs_json_payload(capsys):
    assert run("coeffs", "--n", 3, "--json") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["A"] == ["q", "0", "1/2 q^2"]
    assert payload["B"] == ["q", "a (q)", "1/2 q^2 + a^2 (q)"]


def test_pi_compare_table(tmp_path, capsys):
    assert run("pi-compare", "--out", tmp_path, "--json") == 0
    payload = json.loads(capsys.readouterr().out)
    rows = payload["rows"]
    assert [r["sieve"] for r in rows] == [168, 430, 1229]
    assert rows[-1]["rel_err"] < 0.12
    header = (tmp_path / "primes.csv").read_text().splitlines()[0]
    assert header == "T,sieve,approx,rel_err"


def test_tangent_reports_small_residual(tmp_path, capsys):
    assert run("tangent", "--T", 10000, "--U", 21.544, "--out", tmp_path,
               "--json") == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["residual_over_main"]) < 0.05
    assert payload["tan_alpha"] > 0


def test_beam_report_written(tmp_path, capsys):
    assert run("beam", "--out", tmp_path) == 0
    report = json.loads((tmp_path / "beam.json").read_text())
    assert len(report["members"]) == 3
    assert all(s >= 0 for s in report["spread"])
    capsys.readouterr()


def test_c0_fit_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run("c0-fit", "--out", out1) == 0
    assert run("c0-fit", "--out", out2) == 0
    capsys.readouterr()
    b1 = (out1 / "c0.json").read_bytes()
    assert b1 == (out2 / "c0.json").read_bytes()
    fit = json.loads(b1)
    assert fit["c0"] == pytest.approx(3.14145, abs=1e-4)
    assert 0 < fit["uncertainty"] < 1e-3


# ---------------------------------------------------------------------------
# plot scripts

def test_plot_scripts_contents_and_determinism(tmp_path, capsys):
    out1, out2 = tmp_path / "p1", tmp_path / "p2"
    assert run("plot-scripts", "--out", out1) == 0
    assert run("plot-scripts", "--out", out2) == 0
    capsys.readouterr()

    env = (out1 / "envelope.csv").read_text().splitlines()
    assert env[0] == "T,phi,lower,upper"
    first = [float(v) for v in env[1].split(",")]
    assert first[2] == pytest.approx(1.9 * first[0], rel=1e-15)
    assert first[3] == pytest.approx(2.0 * first[0], rel=1e-15)

    rem = (out1 / "remainder.csv").read_text().splitlines()
    assert rem[0] == "T,abs_remainder,fitted_envelope"
    script = (out1 / "plot_remainder.gnuplot").read_text()
    assert "fitted C ln(phi)/phi" in script

    for name in ("envelope.csv", "remainder.csv", "beam_spread.csv",
                 "primes.csv", "plot_envelope.gnuplot",
                 "plot_remainder.gnuplot", "plot_beam.gnuplot",
                 "plot_primes.gnuplot"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    # scripts reference only files the command itself emitted
    emitted = {p.name for p in out1.iterdir()}
    for script_name in ("plot_envelope.gnuplot", "plot_remainder.gnuplot",
                        "plot_beam.gnuplot", "plot_primes.gnuplot"):
        text = (out1 / script_name).read_text()
        refs = {tok.split("'")[1] for tok in text.split() if "'" in tok
                and ".csv" in tok}
        assert refs <= emitted, script_name


# ---------------------------------------------------------------------------
# console script

def test_console_script_end_to_end(tmp_path):
    out = tmp_path / "ck.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "ladderlab.cli", "checkpoints",
         "--t-max", "60", "-o", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and out.with_suffix(".csv.manifest").exists()
