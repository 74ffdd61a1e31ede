import json
import math

import pytest

from rmtlab import cli


def test_predict_single_eigenvalue_mean(capsys):
    rc = cli.main(["predict", "single_eigenvalue_mean", "--param", "gamma=0.0"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(-math.pi / 2.0)


def test_predict_indicator_integrals(capsys):
    rc = cli.main(["predict", "indicator_integrals", "--param", "gamma=1.0"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["I_x"] == pytest.approx(-math.sqrt(3.0) / (2.0 * math.pi))


def test_predict_unknown_formula_fails(capsys):
    rc = cli.main(["predict", "nope"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_run_subcommand(tmp_path, capsys):
    cfgfile = tmp_path / "exp.toml"
    cfgfile.write_text(
        'kind = "mean_expansion"\nn = 60\ntrials = 60\nseed = 3\n'
        '[params]\nindex = 30\n')
    out = tmp_path / "report.json"
    rc = cli.main(["run", str(cfgfile), "--out", str(out), "--workers", "1"])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["kind"] == "mean_expansion"
    assert rep["trials_succeeded"] == 60


def test_sample_subcommand(tmp_path):
    out = tmp_path / "spec.csv"
    rc = cli.main(["sample", "goe", "--n", "20", "--seed", "1",
                   "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "i,lambda_i"
    assert len(lines) == 21
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert vals == sorted(vals)


def test_dbm_subcommand(tmp_path, capsys):
    cfgfile = tmp_path / "dbm.toml"
    cfgfile.write_text(
        'kind = "dbm_homogenization"\nn = 40\ntrials = 3\nseed = 2\n'
        '[params]\nindex = 20\ntau0 = 0.2\neps1 = 0.05\n')
    csv = tmp_path / "trials.csv"
    rc = cli.main(["dbm", str(cfgfile), "--csv", str(csv), "--workers", "1"])
    assert rc == 0
    lines = csv.read_text().strip().split("\n")
    assert lines[0] == "trial,i,x_i_t1,y_i_t1,zeta_x,zeta_y,residual"
    assert len(lines) == 4
    row = lines[1].split(",")
    gap = float(row[2]) - float(row[3])
    zeta = (float(row[4]) - float(row[5])) / 40.0
    assert float(row[6]) == pytest.approx(gap - zeta, abs=1e-12)


def test_dbm_subcommand_rejects_other_kinds(tmp_path, capsys):
    cfgfile = tmp_path / "exp.toml"
    cfgfile.write_text(
        'kind = "mean_expansion"\nn = 60\ntrials = 5\nseed = 0\n'
        '[params]\nindex = 30\n')
    rc = cli.main(["dbm", str(cfgfile), "--csv", str(tmp_path / "x.csv")])
    assert rc == 1
