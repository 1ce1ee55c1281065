import json

import pytest

from vortex_tunneling.cli import main
from vortex_tunneling.config import ConfigError, config_hash, parse_scenario

BASE = """{
  "sim": {"l_x": 3, "l_y": 30, "n_kx": 6, "n_ky": 3, "tol": 1e-10},
  "pulse": {"shape": "bipolar-derivative", "e_max": 0.1, "m_min": 0.6,
            "t_p": 3, "e_offset_ratio": 0.7071067811865476}
}
"""


def test_parse_defaults_and_hash():
    sc = parse_scenario(BASE)
    assert sc.sim.l_x == 3.0 and sc.sim.n_kx == 6
    assert sc.pulse.e_offset == pytest.approx(3 / 2**0.5)
    assert sc.hash == config_hash(json.loads(BASE)) and len(sc.hash) == 16
    assert len(list(sc.points())) == 1


@pytest.mark.parametrize("text, line", [
    (BASE.replace('"tol": 1e-10', '"tol": 1e-10, "bogus": 1'), 2),
    (BASE.replace('"t_p": 3', '"t_p": 3, "speed": 2'), 4),
    (BASE.replace('"n_kx": 6', '"n_kx": -6'), 2),
    (BASE.replace('"m_min": 0.6', '"m_min": 1.6'), 3),
    (BASE.replace('"sim"', '"simm"'), 2),
    (BASE.replace("0.6,", "0.6"), 4),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        parse_scenario(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_sweep_validation():
    ok = BASE.rstrip()[:-1] + ', "sweep": {"axis": "l_x", "values": [3, 2.5], "scale_l_y": true}}'
    pts = list(parse_scenario(ok).points())
    assert [p[1].l_x for p in pts] == [3.0, 2.5] and pts[1][1].l_y == 25.0
    bad = ok.replace("[3, 2.5]", "[3, 2, 2.5]")
    with pytest.raises(ConfigError, match="monotone"):
        parse_scenario(bad)
    with pytest.raises(ConfigError, match="axis"):
        parse_scenario(ok.replace('"l_x", "values"', '"c1", "values"'))
    with pytest.raises(ConfigError):
        parse_scenario(ok.replace("[3, 2.5]", "[]"))
    with pytest.raises(ConfigError, match="k_cut"):
        parse_scenario(ok.replace("[3, 2.5]", "[3, 4]"))


def test_cli_simulate_outputs_and_determinism(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(BASE.rstrip()[:-1] + ', "outputs": {"modes": true}}')
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    for name in ("summary.json", "timeseries.csv", "modes.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    doc = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert doc["config_hash"] == config_hash(json.loads(cfg.read_text()))
    assert doc["result"]["diagnostics"]["max_wronskian_drift"] < 1e-8
    head = (tmp_path / "a" / "timeseries.csv").read_text().splitlines()
    assert head[0].startswith("# version=")
    assert "t,j_x,n_total,e_tilde,m_of_t" in head


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(BASE.replace('"tol": 1e-10', '"tol": 1e-10, "bogus": 1'))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_cli_estimate_and_instanton(tmp_path):
    assert main(["estimate", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "estimate.json").read_text())["report"]
    assert rep["ratio_lx_lambda"] == pytest.approx(30, rel=0.1)
    assert main(["instanton", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "instanton.json").read_text())["saddles"]
    assert [r["ml"] for r in rows] == [100.0, 400.0, 1600.0]


def test_cli_fermions(tmp_path):
    assert main(["fermions", "--out", str(tmp_path)]) == 0
    rows = [r for r in (tmp_path / "boundary.csv").read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "phi,l_edge_analytic,l_edge_characteristics" and len(rows) == 65
    for r in rows[1:]:
        _, a, c = map(float, r.split(","))
        assert abs(a - c) < 1e-6


def test_cli_verify(tmp_path):
    assert main(["verify", "lattice-sum", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "verify_lattice-sum.json").read_text())
    assert doc["passed"] and doc["results"]
    with pytest.raises(SystemExit):
        main(["verify", "nonsense"])
