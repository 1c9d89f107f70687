"""End-to-end tests of the command line interface."""

import json

import pytest

from fluxlab import ConfigError
from fluxlab.cli import _field_value, build_parser, main, parse_config


def test_defaults_resolved():
    args = build_parser().parse_args(["butterfly"])
    cfg = parse_config(args)
    assert cfg.command == "butterfly"
    assert cfg.params["qmax"] == 20
    assert cfg.params["kgrid"] == 64
    assert cfg.params["format"] == "csv"
    assert cfg.params["out"] == ""


def test_unknown_config_key_rejected(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"qmax": 4, "bogus": 1}))
    args = build_parser().parse_args(["butterfly", "--config", str(path)])
    with pytest.raises(ConfigError):
        parse_config(args)
    assert main(["butterfly", "--config", str(path)]) == 2


def test_config_must_be_object(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("[1, 2]")
    assert main(["butterfly", "--config", str(path)]) == 2
    path.write_text("{not json")
    assert main(["butterfly", "--config", str(path)]) == 2


def test_flag_overrides_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"kgrid": 8, "qmax": 3}))
    args = build_parser().parse_args(
        ["butterfly", "--config", str(path), "--qmax", "2"]
    )
    cfg = parse_config(args)
    assert cfg.params["qmax"] == 2
    assert cfg.params["kgrid"] == 8


def test_unreduced_flux_exits_2(capsys):
    assert main(["fiber-spectrum", "--flux", "3/6", "--kgrid", "8"]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_required_flag_exits_2(capsys):
    assert main(["fiber-spectrum"]) == 2
    err = capsys.readouterr().err
    assert "--flux" in err


def test_bad_format_exits_2():
    assert main(["chern", "--format", "toml"]) == 2


def test_field_value_caster():
    assert _field_value("1/8") == 0.125
    assert _field_value("0.25") == 0.25
    assert _field_value(0.5) == 0.5
    with pytest.raises(ValueError):
        _field_value("one eighth")


def test_version_flag_exits_zero():
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0


def test_chern_artifact_bytes_are_stable(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert main(["chern", "--flux", "1/3", "--kgrid", "30", "--out", str(first)]) == 0
    assert main(["chern", "--flux", "1/3", "--kgrid", "30", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    text = first.read_text()
    assert text.startswith("# fluxlab ")
    assert "# command: chern" in text
    assert "band,chern" in text
    sidecar = json.loads((tmp_path / "a.meta.json").read_text())
    assert sidecar["command"] == "chern"
    assert sidecar["ok"] is True
    assert sidecar["rows"] == 3
    assert sidecar["wall_time_s"] >= 0.0
    assert sidecar["config"]["kgrid"] == 30


def test_chern_degenerate_bands_exit_4(capsys):
    assert main(["chern", "--flux", "1/2", "--kgrid", "32"]) == 4
    assert "error:" in capsys.readouterr().err


def test_gauge_check_impossible_tolerance_exits_3(capsys):
    code = main(
        ["gauge-check", "--B", "1/8", "--L", "8", "--kgrid", "16", "--tol", "1e-20"]
    )
    assert code == 3
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_out_into_missing_directory_exits_2(tmp_path):
    target = tmp_path / "missing" / "x.csv"
    code = main(["chern", "--flux", "1/3", "--kgrid", "12", "--out", str(target)])
    assert code == 2
    assert not target.exists()
    assert not target.parent.exists()


def test_butterfly_small_run_stdout(capsys):
    assert main(["butterfly", "--qmax", "2", "--kgrid", "8"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    header_idx = lines.index("p,q,band,e_min,e_max,q25,q50,q75")
    data = [
        line
        for line in lines[header_idx + 1 :]
        if line and not line.startswith("butterfly:")
    ]
    # fluxes 0/1 and 1/1 carry one band each, 1/2 carries two; rows are
    # ordered by flux value, so 1/1 lands last
    assert len(data) == 4
    assert data[0].startswith("0,1,0,")
    assert data[1].startswith("1,2,0,")
    assert data[2].startswith("1,2,1,")
    assert data[3].startswith("1,1,0,")
    assert "# n_flux_values: 3" in lines
    assert any(line.startswith("butterfly: 3 flux values, 4 band rows") for line in lines)


def test_json_artifact_parses(tmp_path):
    out = tmp_path / "chern.json"
    code = main(
        [
            "chern",
            "--flux",
            "1/3",
            "--kgrid",
            "30",
            "--format",
            "json",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "chern"
    assert doc["columns"] == ["band", "chern"]
    assert doc["rows"] == [[0, 1], [1, -2], [2, 1]]
    assert doc["meta"]["sum"] == 0
    assert doc["config"]["kgrid"] == 30
    assert "version" in doc


def test_config_file_value_lands_in_artifact(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kgrid": 12}))
    out = tmp_path / "c.csv"
    assert main(["chern", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    assert '"kgrid":12' in text.splitlines()[2]
    assert "# kgrid: 12" in text
