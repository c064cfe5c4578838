import json
import subprocess
import sys

import pytest

from tilerec import io as tio
from tilerec.cli import RunConfig, main
from tilerec.errors import ConfigError
from tilerec.geometry import Isometry2
from tilerec.tiling import TransformedProvider

from conftest import provider
from test_tiling import unit_cells_meeting_open_disk

LATTICE_SEARCH = {"generator": {"kind": "lattice"},
                  "search": {"pattern": [[1, 0], [0, 1], [1, 1]], "epsilon": 0.1, "variant": "thm1",
                             "n_budget": 5, "r_search": 30},
                  "metric": {"r_min": 0.02},
                  "flc": {"radii": [4, 6, 8]}}


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "run.json"
    p.write_text(json.dumps(LATTICE_SEARCH))
    return str(p)


def run(*argv):
    return main([str(a) for a in argv])


def test_gen_count_and_idempotent(tmp_path, cfg):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("gen", "--config", cfg, "--radius", 10, "--out", a) == 0
    assert run("gen", "--config", cfg, "--radius", 10, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(json.loads(a.read_text())["tiles"]) == len(unit_cells_meeting_open_disk(10.0))


def test_gen_bad_kind(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"generator": {"kind": "hexagon"}}))
    assert run("gen", "--config", p) == 1


def test_gen_seed_override(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"generator": {"kind": "shear", "params": {"offsets": "seeded"}}}))
    outs = []
    for seed in (1, 1, 2):
        o = tmp_path / f"s{len(outs)}.json"
        assert run("gen", "--config", p, "--seed", seed, "--radius", 4, "--out", o) == 0
        outs.append(o.read_text())
    assert outs[0] == outs[1] != outs[2]


def _write_window(path, prov, radius):
    tio.write_json(path, tio.window_to_dict(prov.window(radius)))


def test_metric_paths(tmp_path, cfg, capsys):
    lat = provider("lattice")
    x, y, z = tmp_path / "x.json", tmp_path / "y.json", tmp_path / "z.json"
    _write_window(x, lat, 56.0)
    _write_window(y, TransformedProvider(lat, Isometry2.translate((0.05, 0.0))), 56.0)
    _write_window(z, provider("pinwheel"), 56.0)
    assert run("metric", "--config", cfg, "--metric", "d1", x, x) == 0
    assert json.loads(capsys.readouterr().out)["upper"] <= 0.02
    assert run("metric", "--config", cfg, "--metric", "d1", x, y) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0.05 <= out["upper"] <= 0.051
    assert list(out)[:3] == ["lower", "upper", "truncation_radius"]
    assert run("metric", "--config", cfg, "--metric", "d2", x, z) == 0
    assert json.loads(capsys.readouterr().out)["upper"] == pytest.approx(0.707106781187)


def test_metric_schema_violation(tmp_path, cfg):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tiles": []}))
    assert run("metric", "--config", cfg, bad, bad) == 1


def test_flc_writes_report_and_figure(tmp_path, cfg):
    out = tmp_path / "flc.json"
    assert run("flc", "--config", cfg, "--out", out) == 0
    assert json.loads(out.read_text())["verdict"] == "FLC-translation"
    assert (tmp_path / "flc.png").read_bytes()[:4] == b"\x89PNG"


def test_search_verify_render_roundtrip(tmp_path, cfg):
    w, c = tmp_path / "w.json", tmp_path / "c.json"
    assert run("search", "--config", cfg, "--out", c) == 0
    cert = json.loads(c.read_text())
    assert cert["n"] == 1 and cert["variant"] == "thm1"
    assert run("gen", "--config", cfg, "--radius", 30, "--out", w) == 0
    assert run("verify", w, c) == 0
    svg = tmp_path / "r.svg"
    assert run("render", w, c, "--out", svg) == 0
    assert svg.read_text().count('class="patch"') == 4

    cert["corrections"][0] = [0.3, 0.0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    assert run("verify", w, bad) == 2
    assert run("verify", w, tmp_path / "missing.json") == 1


def test_verify_window_too_small(tmp_path, cfg):
    c, w = tmp_path / "c.json", tmp_path / "w.json"
    assert run("search", "--config", cfg, "--out", c) == 0
    _write_window(w, provider("lattice"), 5.0)
    assert run("verify", w, c) == 2


def test_search_budget_exhausted(cfg):
    assert run("search", "--config", cfg, "--n-budget", 0) == 3


def test_search_ip_flag(tmp_path, cfg):
    ip, c = tmp_path / "ip.json", tmp_path / "c.json"
    ip.write_text(json.dumps({"kind": "geometric", "params": {"base": 3}}))
    assert run("search", "--config", cfg, "--ip", ip, "--n-budget", 30, "--radius", 40, "--out", c) == 0
    assert json.loads(c.read_text())["n"] == 3


def test_argparse_errors_exit_1():
    with pytest.raises(SystemExit) as e:
        run("gen", "--bogus")
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        run("metric", "--metric", "d7", "a", "b")
    assert e.value.code == 1


@pytest.mark.parametrize("bad", [
    {"nonsense": 1},
    {"tolerances": {"geom": 0}},
    {"search": {"variant": "thm5"}},
    {"search": {"pattern": [[1, 0], [1, 0]]}},
    {"metric": {"r_min": 0.9}},
    {"flc": {"radii": [3, 2, 1]}},
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(bad)


def test_console_script_and_logging(tmp_path, cfg):
    env = {"TILEREC_LOG": "info", "PATH": "/usr/bin:/bin"}
    out = tmp_path / "w.json"
    res = subprocess.run([sys.executable, "-m", "tilerec.cli", "gen", "--config", cfg, "--radius", "3",
                          "--out", str(out)], capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert "INFO" in res.stderr
    assert json.loads(out.read_text())["radius"] == 3.0
