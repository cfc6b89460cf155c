import csv
import json

import pytest

from mubchan.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_bound_entangled(capsys):
    code, out, _ = run(capsys, "classify", "--lambda", "0.27,0.27,-0.27,-0.27", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "BoundEntangled"
    assert doc["ppt"] is True


def test_noncp_is_a_usage_error(capsys):
    code, _, err = run(capsys, "classify", "--lambda=0.4,0.4,-0.4,-0.4")
    assert code == 2
    assert "not CP" in err


def test_bad_arguments(capsys):
    assert run(capsys, "classify", "--lambda", "a,b,c,d")[0] == 2
    assert run(capsys, "nope")[0] == 2
    assert run(capsys, "scan", "xxyy", "--grid", "1")[0] == 2
    assert run(capsys, "purity", "--lambda", "0.1,0.1,0.1,0.1", "--p", "0.5")[0] == 2


def test_mub(capsys, tmp_path):
    path = tmp_path / "fam.json"
    code, out, _ = run(capsys, "mub", "--d", "5", "--json", "--out", str(path))
    assert code == 0
    assert json.loads(out)["kappa"] == 6
    assert json.loads(path.read_text())["d"] == 5
    code, _, err = run(capsys, "mub", "--d", "4")
    assert code == 0 and "not prime" in err


def test_channel(capsys):
    code, out, _ = run(capsys, "channel", "--lambda=0.5,0,-0.5,-0.5", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["cp"] is True
    assert doc["s"] == pytest.approx(-0.5)


def test_choi_csv(capsys, tmp_path):
    path = tmp_path / "c.csv"
    assert run(capsys, "choi", "--lambda=1,1,1,1", "--out", str(path))[0] == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 81
    assert float(rows[0]["re"]) == pytest.approx(1 / 3)


def test_purity(capsys):
    code, out, _ = run(capsys, "purity", "--lambda=0.5,0,-0.5,-0.5", "--p", "2", "--restarts", "4", "--json")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.5**0.5, abs=1e-8)
    code, out, _ = run(capsys, "purity", "--lambda=0.5,0,-0.5,-0.5", "--p", "entropy", "--restarts", "4")
    assert code == 0 and out.startswith("quantity: S_min")


def test_scan_header(capsys, tmp_path):
    path = tmp_path / "r.csv"
    assert run(capsys, "scan", "xxyy", "--grid", "5", "--out", str(path))[0] == 0
    assert path.read_text().splitlines()[0] == "x,y,cp,ppt,ccn,verdict,slack1,slack2,slack3"
    code, out, _ = run(capsys, "scan", "one_axis", "--grid", "4", "--format", "json")
    assert code == 0 and json.loads(out)["family"] == "one_axis"


def test_experiment(capsys, tmp_path):
    path = tmp_path / "x.csv"
    code, _, err = run(
        capsys, "experiment", "crossing", "--from", "0.6", "--to", "0.62", "--step", "0.01", "--no-smin", "--out", str(path)
    )
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 3
    assert "crossing lambda1*" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "opt.conf"
    cfg.write_text("restarts = 2  # quick\nseed = 3\n")
    code, out, _ = run(capsys, "--config", str(cfg), "purity", "--lambda=0.5,0,-0.5,-0.5", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["restarts"] == 2 and doc["seed"] == 3
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "--config", str(cfg), "purity", "--lambda=0.5,0,-0.5,-0.5")[0] == 2
