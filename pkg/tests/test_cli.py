import csv
import json

import numpy as np
import pytest

from nhksea import cli


def _run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def test_parse_range_inclusive_rules():
    np.testing.assert_allclose(cli.parse_range("0:1:0.25"), [0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(cli.parse_range("0:1:0.3"), [0, 0.3, 0.6, 0.9])
    assert len(cli.parse_range("0:2:0.005")) == 401
    assert cli.parse_range("1.5").tolist() == [1.5]
    for bad in ("0:1", "a:b:c", "0:1:0", "1:0:0.1"):
        with pytest.raises(cli.UsageError):
            cli.parse_range(bad)


def test_parse_sites():
    assert cli.parse_sites("inf") == cli.THERMODYNAMIC
    assert cli.parse_sites("400") == 400
    with pytest.raises(cli.UsageError):
        cli.parse_sites("many")


def test_number_format():
    assert cli._fmt(0.1) == "0.10000000000000001"
    assert cli._fmt(float("inf")) == "inf"
    assert cli._fmt(np.bool_(True)) == "1"


def test_spectrum_outputs(tmp_path):
    code, out = _run(tmp_path, "spectrum", "--gamma", "1.0", "--ksea", "0.75", "--h", "0.6",
                     "--n", "16")
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["phi", "re_eps", "im_eps", "re_lower", "re_upper"]
    assert len(rows) == 9
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["features"]["region"] == "RegionI_Broken"
    assert meta["config"]["gamma"] == 1.0
    assert meta["version"]
    assert b"\r" not in out.read_bytes()


def test_ent_scan_example(tmp_path):
    code, out = _run(tmp_path, "ent-scan", "--gamma", "0.5", "--ksea", "0.75", "--n", "5000",
                     "--h", "0:2:0.005")
    assert code == 0
    assert _rows(out)[0] == ["h", "E", "dEdh"]
    kinks = [k["h"] for k in json.loads(out.with_suffix(".json").read_text())["features"]["kinks"]]
    assert any(abs(k - 0.829) < 0.01 for k in kinks)
    assert any(abs(k - 1.0) < 0.01 for k in kinks)


def test_quench_example(tmp_path):
    code, out = _run(tmp_path, "quench", "--gamma", "0.1", "--ksea", "0.2", "--h0", "0.4",
                     "--h1", "1.5", "--tmax", "50", "--dt", "0.01")
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["t", "LE", "lambda"]
    assert len(rows) == 5002
    cusps = json.loads(out.with_suffix(".json").read_text())["features"]["cusps"]
    assert len(cusps) >= 10 and all(c["family"] == 0 for c in cusps)


def test_thread_count_does_not_change_bytes(tmp_path):
    args = ["ent-scan", "--n", "400", "--h", "0.5:1.2:0.01"]
    _, a = _run(tmp_path, *args, "--threads", "1", name="a.csv")
    _, b = _run(tmp_path, *args, "--threads", "4", name="b.csv")
    _, c = _run(tmp_path, *args, "--threads", "4", name="c.csv")
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_env_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("NONHERM_THREADS", "3")
    code, out = _run(tmp_path, "dqpt-map", "--resolution", "4")
    assert code == 0
    assert json.loads(out.with_suffix(".json").read_text())["config"]["threads"] == 3


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# scan\ngamma = 1.0\nksea = 0.75\nn = 400\nh = 0.9:1.3:0.05\n")
    code, out = _run(tmp_path, "ent-scan", "--config", str(cfg), "--ksea", "0.5")
    assert code == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["config"]["gamma"] == 1.0 and meta["config"]["ksea"] == 0.5
    assert len(_rows(out)) == 10


def test_sidecar_round_trip(tmp_path):
    _, a = _run(tmp_path, "quench", "--n", "400", "--h1", "0.9", "--tmax", "5", "--dt", "0.05",
                "--entanglement", name="a.csv")
    code, b = _run(tmp_path, "quench", "--config", str(a.with_suffix(".json")), name="b.csv")
    assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_format(tmp_path):
    code, out = _run(tmp_path, "phase-diagram", "--gamma-range", "0:1:0.5", "--ksea-range",
                     "0.5", "--h-range", "0.5", "--format", "json", name="pd.json")
    assert code == 0
    recs = json.loads(out.read_text())
    assert len(recs) == 3 and set(recs[0]) >= {"gamma", "region"}
    assert (tmp_path / "pd.meta.json").exists()


def test_plot_stub(tmp_path):
    code, out = _run(tmp_path, "spectrum", "--n", "8", "--emit-plot-script")
    assert code == 0
    stub = (tmp_path / "out_plot.py").read_text()
    assert str(out) in stub
    compile(stub, "stub", "exec")


def test_usage_errors(tmp_path, capsys):
    assert cli.main(["nonsense"]) == 1
    assert _run(tmp_path, "ent-scan", "--h", "1:0:0.1")[0] == 1
    assert _run(tmp_path, "spectrum", "--n", "7")[0] == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert _run(tmp_path, "spectrum", "--config", str(bad))[0] == 1
    assert cli.main(["spectrum", "--n", "8", "--out", str(tmp_path / "no" / "dir.csv")]) == 1
    assert "usage error" in capsys.readouterr().err


def test_validate_exit_codes(tmp_path, monkeypatch):
    code, out = _run(tmp_path, "validate", "--n", "8")
    assert code == 0
    assert all(r[3] == "1" for r in _rows(out)[1:])
    monkeypatch.setattr(cli, "run_validation", lambda n: [("forced", 1.0, 0.5)])
    assert _run(tmp_path, "validate")[0] == 2


def test_sigma_scan_small(tmp_path):
    code, out = _run(tmp_path, "sigma-scan", "--n", "100", "--values", "0.8:1.2:0.1",
                     "--tavg", "20", "--tburn", "5", "--dt", "0.1")
    assert code == 0
    rows = _rows(out)
    assert rows[0][:2] == ["h1", "sigma"] and len(rows) == 6
    assert json.loads(out.with_suffix(".json").read_text())["features"]["curvature_peak"] in (
        0.9, 1.0, 1.1)
