"""Command-line surface: schemas, determinism, exit codes."""

import json
import math
import subprocess
import sys

import pytest

from lieb_spectra.cli import main, parse_flux
from lieb_spectra.spectra import read_bands_csv


def run_cli(args, tmp_path=None):
    proc = subprocess.run(
        [sys.executable, "-m", "lieb_spectra.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


def totient_sum(qmax):
    return sum(
        sum(1 for p in range(q) if math.gcd(p, q) == 1) for q in range(1, qmax + 1)
    )


def test_parse_flux_forms():
    assert parse_flux("1/3").describe() == "1/3"
    assert not parse_flux("golden").is_rational
    assert parse_flux("0.25").describe() == "1/4"
    assert parse_flux("golden", cf="1,2,3").cf.quotients[:3] == (1, 2, 3)


def test_butterfly_amo_row_counts(tmp_path):
    out = tmp_path / "amo.csv"
    assert main(["butterfly", "--model", "amo", "--lambda", "1", "--qmax", "10",
                 "-o", str(out)]) == 0
    rows = read_bands_csv(str(out))
    fractions = {(r["p"], r["q"]) for r in rows}
    assert len(fractions) == totient_sum(10)
    for p, q in fractions:
        n_bands = sum(1 for r in rows if (r["p"], r["q"]) == (p, q))
        assert n_bands <= q


def test_butterfly_lieb_flat_band_rows(tmp_path):
    out = tmp_path / "lieb.csv"
    assert main(["butterfly", "--model", "lieb", "--t", "1", "--qmax", "4",
                 "-o", str(out)]) == 0
    rows = read_bands_csv(str(out))
    half = [r for r in rows if (r["p"], r["q"]) == (1, 2)]
    assert any(r["e_lo"] == r["e_hi"] == 0.0 for r in half)
    # one flat row per fraction
    for pq in {(r["p"], r["q"]) for r in rows}:
        flat = [r for r in rows if (r["p"], r["q"]) == pq and r["e_lo"] == r["e_hi"] == 0.0]
        assert len(flat) == 1


def test_butterfly_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["butterfly", "--model", "amo", "--lambda", "0.8", "--qmax", "6", "-o", str(a)])
    main(["butterfly", "--model", "amo", "--lambda", "0.8", "--qmax", "6", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_bands_json_output(tmp_path):
    out = tmp_path / "bands.json"
    assert main(["bands", "--model", "lieb", "--p", "1", "--q", "2", "--t", "1",
                 "--format", "json", "-o", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload[0]["params"]["model"] == "lieb"
    assert len(payload[0]["bands"]) == 3


def test_verify_suite_exit_codes(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--suite", "reduction", "symmetry", "--t", "0.5",
                 "-o", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert all(entry["pass"] for entry in payload)
    assert {e["check"] for e in payload} == {"reduction_identity", "symmetry"}


def test_classify_command(capsys):
    assert main(["classify", "--alpha", "golden", "--theta", "0", "--t", "0.5"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "Localized"


def test_classify_general_coupling(capsys):
    assert main(["classify", "--alpha", "golden", "--t2", "0.7", "--t3", "1.3",
                 "--t4", "0.9"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "AbsolutelyContinuous"


def test_weyl_command(capsys):
    assert main(["weyl", "--k", "100", "--alpha", "golden", "--theta", "0"]) == 0
    out = capsys.readouterr().out
    assert "m = " in out and "residual" in out
    residual = float(out.split("residual = ")[1].split()[0])
    assert residual < 0.01


def test_lyapunov_command(tmp_path):
    out = tmp_path / "le.csv"
    assert main(["lyapunov", "--energy", "100", "--lambda", "1", "--alpha", "golden",
                 "--steps", "5000", "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "energy,lyapunov"
    assert float(lines[1].split(",")[1]) == pytest.approx(
        math.log((100 + math.sqrt(9996)) / 2), rel=0.01
    )


def test_localize_command(tmp_path):
    out = tmp_path / "loc.csv"
    assert main(["localize", "--alpha", "golden", "--theta", "0.1", "--t", "0.5",
                 "--N", "120", "--window", "1.2,1.5", "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("model,alpha_desc,theta,t,N,")
    assert len(lines) > 1


def test_unwritable_output_exits_2():
    proc = run_cli(["butterfly", "--model", "amo", "--qmax", "2",
                    "-o", "/nonexistent-dir/x.csv"])
    assert proc.returncode == 2


def test_bad_usage_exits_2():
    proc = run_cli(["bands", "--model", "lieb"])  # missing required --p/--q
    assert proc.returncode == 2
    proc = run_cli(["no-such-command"])
    assert proc.returncode == 2


def test_config_invariants_enforced():
    assert main(["butterfly", "--model", "amo", "--qmax", "501", "-o", "/dev/null"]) == 2
    assert main(["bands", "--model", "lieb", "--p", "1", "--q", "2", "--grid", "4",
                 "-o", "/dev/null"]) == 2


def test_seventeen_digit_floats(tmp_path):
    out = tmp_path / "x.csv"
    main(["bands", "--model", "lieb", "--p", "1", "--q", "3", "--t", "0.8", "-o", str(out)])
    rows = read_bands_csv(str(out))
    # round-tripping the printed values loses nothing
    text = out.read_text()
    for r in rows:
        assert format(r["e_lo"], ".17g") in text
