from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from fidroute.cli import build_parser, main
from fidroute.network import load


@pytest.fixture
def net(tmp_path):
    path = tmp_path / "net.json"
    assert main(["gen", "--topology", "er", "--nodes", "12", "--avg-degree", "4", "--seed", "7", "--out", str(path)]) == 0
    return path


def test_gen_writes_a_valid_network(tmp_path):
    out = tmp_path / "big.json"
    assert main(["gen", "--topology", "er", "--nodes", "100", "--avg-degree", "6", "--seed", "7", "--out", str(out)]) == 0
    assert load(out).L == 300
    echoed = json.loads((tmp_path / "big.json.config.json").read_text())
    assert echoed["command"] == "gen" and echoed["seed"] == 7


def test_route_csv_fidelity_column(net, tmp_path):
    out = tmp_path / "curves.csv"
    assert main(["route", "--net", str(net), "--source", "0", "--model", "flow", "--m", "8", "--depth", "20", "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12 * 161
    assert all(float(r["fidelity"]) == (3 * float(r["gamma"]) + 1) / 4 for r in rows)


def test_route_json_registry(net, tmp_path):
    out = tmp_path / "reg.json"
    assert main(["route", "--net", str(net), "--model", "single", "--m", "8", "--depth", "20", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["model"] == "single" and data["grid"] == {"m": 8, "depth": 20}


def test_star_command(net, tmp_path):
    out = tmp_path / "star.csv"
    args = ["star", "--net", str(net), "--targets", "0", "1", "2", "--m", "8", "--depth", "20", "--out", str(out)]
    assert main(args) == 0
    assert out.read_text().startswith("capacity,fidelity,source,c1,c2,c3\n")


def test_star_needs_distinct_targets(net, tmp_path, capsys):
    assert main(["star", "--net", str(net), "--targets", "0", "0", "2", "--out", str(tmp_path / "s.csv")]) == 1
    err = capsys.readouterr().err.strip()
    assert err.startswith("error: ConfigurationError:") and "\n" not in err


def test_verify_command(tmp_path, capsys):
    out = tmp_path / "verify.tap"
    assert main(["verify", "--instances", "2", "--star-instances", "1", "--seed", "1", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("1..7\n") and "not ok" not in text
    assert out.read_text() == text


def test_bench_command(tmp_path):
    out, fits = tmp_path / "b.csv", tmp_path / "f.json"
    args = ["bench", "--nodes", "20", "40", "80", "--samples", "2", "--m", "8", "--depth", "20", "--no-timing"]
    assert main(args + ["--out", str(out), "--fit-out", str(fits)]) == 0
    assert len(out.read_text().splitlines()) == 4
    assert json.loads(fits.read_text())[0]["cell"]["metric"] == "visited"


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"topology": "rgg", "nodes": 20, "avg_degree": 4.0, "seed": 1}))
    out = tmp_path / "n.json"
    assert main(["gen", "--config", str(cfg), "--seed", "9", "--out", str(out)]) == 0
    echoed = json.loads((tmp_path / "n.json.config.json").read_text())
    assert echoed["seed"] == 9 and echoed["topology"] == "rgg"


def test_empty_config_and_full_flags(tmp_path):
    cfg = tmp_path / "empty.json"
    cfg.write_text("")
    out = tmp_path / "n.json"
    assert main(["gen", "--config", str(cfg), "--nodes", "10", "--avg-degree", "3", "--out", str(out)]) == 0
    assert load(out).V == 10


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nodes": 10, "colour": "red", "avg_degree": 2}))
    assert main(["gen", "--config", str(cfg), "--out", str(tmp_path / "x.json")]) == 1
    assert "colour" in capsys.readouterr().err
    cfg.write_text(json.dumps({"nodes": [10, "a"]}))
    assert main(["bench", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 1
    assert "nodes[1]" in capsys.readouterr().err
    assert main(["gen", "--nodes", "10"]) == 1
    assert "--avg-degree" in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--bogus"])
    assert exc.value.code == 2


def test_missing_network_file(tmp_path, capsys):
    assert main(["route", "--net", str(tmp_path / "nope.json"), "--out", str(tmp_path / "c.csv")]) == 1
    assert capsys.readouterr().err.startswith("error: FileNotFoundError:")


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("FIDROUTE_OUTPUT_DIR", str(tmp_path))
    assert main(["gen", "--nodes", "10", "--avg-degree", "3", "--out", "rel.json"]) == 0
    assert (tmp_path / "rel.json").exists()
    assert (tmp_path / "rel.json.config.json").exists()


def test_echoed_config_regenerates_output(net, tmp_path):
    out = tmp_path / "c.csv"
    assert main(["route", "--net", str(net), "--m", "8", "--depth", "20", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["route", "--config", str(tmp_path / "c.csv.config.json")]) == 0
    assert out.read_bytes() == first


def test_help_documents_every_flag():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    for name, p in sub.items():
        for action in p._actions:
            if action.option_strings and action.dest != "help":
                assert action.help, f"{name} {action.option_strings} lacks help"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fidroute", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("gen", "route", "star", "verify", "bench"):
        assert cmd in res.stdout
