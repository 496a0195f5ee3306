import json
import math
import subprocess
import sys

import pytest

from kss.cli import ConfigError, main, parse_time

T_CL = 2 * math.pi * 45**3


def write_config(path, **over):
    doc = {"n_bar": 45, "l3": 30, "delta_l3": 2.5, "output_dir": str(path / "out")}
    doc.update(over)
    cfg = path / "run.json"
    cfg.write_text(json.dumps(doc))
    return str(cfg)


@pytest.mark.parametrize("text,expected", [
    (0, 0.0), (12.5, 12.5), ("1/3 Tcl", T_CL / 3), ("Tcl", T_CL), ("0.5 tcl", T_CL / 2), ("250", 250.0),
])
def test_parse_time(text, expected):
    assert parse_time(text, T_CL) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("bad", ["one third Tcl", "1/0 Tcl", None, True])
def test_parse_time_rejects(bad):
    with pytest.raises(ConfigError):
        parse_time(bad, T_CL)


def test_fit_report(tmp_path, capsys):
    assert main(["fit", "--config", write_config(tmp_path)]) == 0
    rep = json.loads((tmp_path / "out" / "fit.json").read_text())
    assert set(rep) == {"alpha", "beta", "gamma0", "gamma1", "delta", "r_out", "r_in", "t_cl_au", "l_sq", "energy"}
    assert rep["alpha"] == pytest.approx(62.846, abs=0.3)
    assert rep["beta"] == 30 and rep["gamma1"] == 0
    assert rep["t_cl_au"] == T_CL
    assert "alpha" in capsys.readouterr().out
    # the report survives a parse/emit cycle unchanged
    text = (tmp_path / "out" / "fit.json").read_text()
    assert json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n" == text


def test_fit_with_defects(tmp_path):
    d = tmp_path / "defects.json"
    d.write_text(json.dumps({"defects": {"30": 0.5}}))
    assert main(["fit", "--config", write_config(tmp_path), "--defects", str(d)]) == 0
    rep = json.loads((tmp_path / "out" / "fit.json").read_text())
    assert rep["n_star"] == 44.5
    assert rep["energy_star"] == pytest.approx(-0.5 / 44.5**2)
    assert rep["energy"] == pytest.approx(rep["energy_star"], abs=1e-12)


def test_missing_field_names_it(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"n_bar": 45, "l3": 30}))
    assert main(["fit", "--config", str(cfg)]) == 2
    assert "delta_l3" in capsys.readouterr().err


@pytest.mark.parametrize("over,word", [
    ({"format": "xml"}, "format"),
    ({"colour": "red"}, "colour"),
    ({"l3": 2.5}, "l3"),
    ({"planes": ["YZ"]}, "planes"),
    ({"window": {"preset": "huge"}}, "window"),
    ({"grid": {"extent": -1}}, "grid"),
])
def test_bad_fields_exit_2(tmp_path, capsys, over, word):
    assert main(["fit", "--config", write_config(tmp_path, **over)]) == 2
    assert word in capsys.readouterr().err


def test_unreadable_config_exit_2(tmp_path):
    assert main(["fit", "--config", str(tmp_path / "none.json")]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["fit", "--config", str(junk)]) == 2
    assert main(["nonsense"]) == 2
    assert main([]) == 2


def test_infeasible_exit_3(tmp_path, capsys):
    assert main(["fit", "--config", write_config(tmp_path, delta_l3=50.0)]) == 3
    assert "residual" in capsys.readouterr().err


def test_empty_times_exit_2(tmp_path):
    assert main(["slice", "--config", write_config(tmp_path, times=[])]) == 2
    assert main(["evolve", "--config", write_config(tmp_path, times=[])]) == 2


def test_expand_narrow_window(tmp_path):
    cfg = write_config(tmp_path, window={"preset": "narrow"})
    assert main(["expand", "--config", cfg]) == 0
    lines = (tmp_path / "out" / "coefficients.csv").read_text().splitlines()
    assert lines[0] == "n,l,m,re,im,energy"
    assert len(lines) == 485
    summary = json.loads((tmp_path / "out" / "expand_summary.json").read_text())
    assert summary["size"] == 484 and summary["parity_zeros"] == 242
    assert main(["expand", "--config", cfg, "--format", "json"]) == 0
    doc = json.loads((tmp_path / "out" / "coefficients.json").read_text())
    assert len(doc["coefficients"]) == 484


def test_evolve(tmp_path):
    cfg = write_config(tmp_path, window={"preset": "symmetric", "half": 6}, times=[0, "1/2 Tcl"], format="json")
    assert main(["evolve", "--config", cfg]) == 0
    rows = json.loads((tmp_path / "out" / "evolve.json").read_text())
    assert [r["t_over_tcl"] for r in rows] == [0.0, 0.5]
    assert rows[0]["norm"] == pytest.approx(rows[1]["norm"], abs=1e-12)
    assert rows[1]["r_mean"] < rows[0]["r_mean"]


def _slice_cfg(tmp_path, sub, **over):
    base = dict(window={"preset": "symmetric", "half": 5}, times=[0, "1/2 Tcl"], planes=["XY", "XZ"],
                grid={"x": [-4000, 4000, 9], "y": [-4000, 4000, 7]}, output_dir=str(tmp_path / sub))
    base.update(over)
    return write_config(tmp_path, **base)


def test_slice_csv_layout(tmp_path):
    assert main(["slice", "--config", _slice_cfg(tmp_path, "a")]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir() if p.name.startswith("slice"))
    assert files == ["slice_XY_00.csv", "slice_XY_01.csv", "slice_XZ_00.csv", "slice_XZ_01.csv"]
    lines = (tmp_path / "a" / "slice_XZ_01.csv").read_text().splitlines()
    assert lines[0].startswith("# plane=XZ t=")
    assert "x_min=-4000 x_max=4000 nx=9 z_min=-4000 z_max=4000 nz=7" in lines[0]
    assert float(lines[0].split()[2][2:]) == T_CL / 2
    assert lines[1] == "x,z,value"
    assert len(lines) == 2 + 9 * 7
    x, z, v = (float(s) for s in lines[2].split(","))
    assert (x, z) == (-4000.0, -4000.0) and v >= 0


def test_slice_is_byte_identical_across_workers(tmp_path):
    assert main(["slice", "--config", _slice_cfg(tmp_path, "one")]) == 0
    assert main(["slice", "--config", _slice_cfg(tmp_path, "two", workers=2)]) == 0
    for name in ("slice_XY_00.csv", "slice_XZ_01.csv"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_slice_json(tmp_path):
    assert main(["slice", "--config", _slice_cfg(tmp_path, "j", format="json", planes=["XY"], times=[0])]) == 0
    doc = json.loads((tmp_path / "j" / "slice_XY_00.json").read_text())
    assert doc["plane"] == "XY" and doc["t"] == 0.0
    assert doc["axes"]["x"] == [-4000, 4000, 9]
    assert len(doc["values"]) == 9 and len(doc["values"][0]) == 7


def test_check_filters_and_fault_injection(tmp_path, capsys):
    assert main(["check", "--only", "angular", "--output", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "check.json").read_text())
    assert doc["passed"] and {r["group"] for r in doc["results"]} == {"angular"}
    assert main(["check", "--only", "radial", "--inject", "norm"]) == 1
    assert "FAIL" in capsys.readouterr().out
    assert main(["check", "--only", "nothing"]) == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "kss", "check", "--only", "specfun"],
                         capture_output=True, text=True, timeout=120)
    assert out.returncode == 0
    assert out.stdout.count("PASS") >= 2
