import csv
import io
import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from convexstab import cli

SMALL = {"kind": "random_bandlimited", "count": 2, "seed": 1, "sigma": 0.05, "L": 8}


def run(command, config, out, **kw):
    err = io.StringIO()
    code = cli.run(command, config, out, stderr=err, **kw)
    return code, err.getvalue()


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_gen_writes_corpus_and_reports(tmp_path):
    code, _ = run("gen", {"corpus": SMALL}, tmp_path)
    assert code == 0
    assert (tmp_path / "corpus" / "manifest.json").exists()
    assert len(rows(tmp_path / "gen.csv")) == 2
    resolved = json.loads((tmp_path / "resolved_config.json").read_text())
    assert resolved["command"] == "gen" and resolved["config"]["corpus"]["seed"] == 1


def test_convexify_from_spec_and_from_path(tmp_path):
    cfg = {"corpus": SMALL, "pipeline": {"L": 8}}
    code, err = run("convexify", cfg, tmp_path / "a")
    assert code == 0, err
    a = rows(tmp_path / "a" / "convexify.csv")
    assert [r["index"] for r in a] == ["0", "1"]
    assert all(float(r["slack"]) >= -1e-8 for r in a)
    root = ET.parse(tmp_path / "a" / "convexify.svg").getroot()
    assert root.tag == "{http://www.w3.org/2000/svg}svg" and root.get("version") == "1.1"
    run("gen", {"corpus": SMALL}, tmp_path / "g")
    code, err = run("convexify", {"corpus": {"path": str(tmp_path / "g" / "corpus")}, "pipeline": {"L": 8}}, tmp_path / "b")
    assert code == 0, err
    assert (tmp_path / "a" / "convexify.csv").read_bytes() == (tmp_path / "b" / "convexify.csv").read_bytes()


def test_workers_preserve_order_and_bytes(tmp_path):
    cfg = {"corpus": {**SMALL, "count": 3}, "pipeline": {"L": 8}}
    assert run("convexify", cfg, tmp_path / "one")[0] == 0
    assert run("convexify", {**cfg, "workers": 2}, tmp_path / "two")[0] == 0
    for name in ("convexify.csv", "convexify.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_empty_corpus_is_a_config_error(tmp_path):
    code, err = run("convexify", {"corpus": {**SMALL, "count": 0}}, tmp_path)
    assert code == 2 and "empty corpus" in err


@pytest.mark.parametrize(
    "config",
    [
        {"corpus": {**SMALL, "count": "two"}},
        {"corpus": SMALL, "pipeline": {"lam": -1}},
        {"corpus": SMALL, "colour": "blue"},
        {"pipeline": {"L": 8}},
        {"corpus": {**SMALL, "sigma": 0.9}},
    ],
)
def test_config_errors_exit_2(tmp_path, config):
    code, err = run("convexify", config, tmp_path)
    assert code == 2 and err.startswith("error:")


def test_assertion_failure_exit_1(tmp_path):
    cfg = {"corpus": SMALL, "pipeline": {"L": 8, "max_iters": 1, "min_converged_fraction": 1.0}}
    code, err = run("convexify", cfg, tmp_path)
    assert code == 1 and "converged fraction" in err


def test_alexandrov_with_refinement(tmp_path):
    cfg = {"corpus": SMALL, "alexandrov": {"refine_L": 16}}
    code, err = run("alexandrov", cfg, tmp_path)
    assert code == 0, err
    r = rows(tmp_path / "alexandrov.csv")
    assert len(r) == 2 and all(float(x["refine_drift"]) <= 0.02 for x in r)


def test_plane_default_corpus(tmp_path):
    code, err = run("plane", {}, tmp_path)
    assert code == 0, err
    r = rows(tmp_path / "plane.csv")
    assert len(r) == 1000
    assert min(float(x["slack_plane2"]) for x in r) >= -1e-12
    assert (tmp_path / "plane_tightest.svg").exists()


def test_plane_rejects_spherical_corpus(tmp_path):
    assert run("plane", {"corpus": SMALL}, tmp_path)[0] == 2


def test_counterexample_reports(tmp_path):
    cfg = {"counterexample": {"thetas": [0.3, 0.2], "L": 16}}
    code, err = run("counterexample", cfg, tmp_path)
    # the factor-2 norm brackets are not attainable at this resolution
    assert code == 1 and "bracket" in err
    assert len(rows(tmp_path / "counterexample_sets.csv")) == 2
    assert json.loads((tmp_path / "counterexample.json").read_text())["lam"] == 0.1


def test_selftest_subset(tmp_path, capsys):
    code, err = run("selftest", {"selftest": {"criteria": [1, 10]}}, tmp_path)
    assert code == 0, err
    assert [r["criterion"] for r in rows(tmp_path / "selftest.csv")] == ["1", "10"]
    assert "[PASS]" in capsys.readouterr().out


def test_svg_timestamp_toggle(tmp_path):
    run("plane", {"corpus": {"kind": "planar_notched", "count": 3, "sigma": 0.4, "n": 2}}, tmp_path / "a")
    run("plane", {"corpus": {"kind": "planar_notched", "count": 3, "sigma": 0.4, "n": 2}, "svg_timestamp": True}, tmp_path / "b")
    assert "generated" not in (tmp_path / "a" / "plane.svg").read_text()
    assert "generated" in (tmp_path / "b" / "plane.svg").read_text()


def test_output_dir_environment_override(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path / "env"))
    assert cli.run("gen", {"corpus": SMALL}, stderr=io.StringIO()) == 0
    assert (tmp_path / "env" / "gen.csv").exists()


def test_main_entry_point(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": SMALL, "output_dir": str(tmp_path / "out")}))
    env = {**os.environ}
    env.pop(cli.OUTPUT_ENV, None)
    p = subprocess.run([sys.executable, "-m", "convexstab.cli", "gen", str(cfg)], capture_output=True, text=True, env=env)
    assert p.returncode == 0, p.stderr
    assert (tmp_path / "out" / "gen.json").exists()
    p = subprocess.run([sys.executable, "-m", "convexstab.cli", "gen"], capture_output=True, text=True, env=env)
    assert p.returncode == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["gen", str(bad)]) == 2
