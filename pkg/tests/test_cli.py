import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

from graphnorm import cli
from graphnorm.cli import ConfigError, Output, format_table, list_catalog, load_config, main, run
from graphnorm.potentials import write_table

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

GRID1 = {"dim_per_particle": 1, "particles": 1, "points_per_axis": 16,
         "extent": 6.283185307179586}
RAMP = {"horizon": 1.0, "base": {"kind": "cosine"}, "drive": {"kind": "cosine"},
        "envelope": {"kind": "linear_ramp", "rate": 1.0}}


def write_cfg(tmp_path, cfg, name="cfg.yaml"):
    cfg = dict(cfg)
    cfg.setdefault("output_dir", str(tmp_path / "out"))
    p = tmp_path / name
    p.write_text(yaml.safe_dump(cfg))
    return p


def summary(out):
    return json.loads((Path(out) / "summary.json").read_text())


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


# ---------------------------------------------------------------- list

def test_list_catalog_contents(capsys):
    text = list_catalog()
    assert "softened_coulomb" in text
    assert "km:" in text
    for exp in cli.EXPERIMENTS:
        assert f"  {exp}:" in text
    assert main(["list"]) == 0
    assert "softened_coulomb" in capsys.readouterr().out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "graphnorm.cli", "list"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "gaussian_well" in res.stdout


# ---------------------------------------------------------------- schema

def test_shipped_configs_validate():
    for path in sorted(CONFIGS.glob("*.yaml")):
        cfg = load_config(path)
        assert cfg["experiment"] in cli.EXPERIMENTS
        assert set(cfg["parameters"]) == set(cli.PARAMETER_DEFAULTS[cfg["experiment"]])


def test_defaults_filled():
    raw = {"experiment": "km", "grid": dict(GRID1), "potential": {"base": {"kind": "cosine"}}}
    cfg = cli.resolve_config(raw)
    assert cfg["seed"] == 0
    assert cfg["output_dir"] == "out_km"
    assert cfg["potential"]["envelope"] == {"kind": "constant", "value": 1.0}
    assert cfg["potential"]["base"]["amplitude"] == 1.0
    assert cfg["parameters"]["shift"] == 1.0


BAD = [
    {"grid": GRID1, "potential": {"base": {"kind": "cosine"}}},                 # no experiment
    {"experiment": "fly", "grid": GRID1, "potential": {"base": {"kind": "cosine"}}},
    {"experiment": "km", "grid": {**GRID1, "points_per_axis": 12},
     "potential": {"base": {"kind": "cosine"}}},                                # not a power of 2
    {"experiment": "km", "grid": GRID1, "potential": {"base": {"kind": "nope"}}},
    {"experiment": "km", "grid": GRID1,
     "potential": {"base": {"kind": "softened_coulomb"}}},                      # missing epsilon
    {"experiment": "km", "grid": GRID1,
     "potential": {"base": {"kind": "cosine", "epsilon": 1.0}}},                # wrong parameter
    {"experiment": "km", "grid": GRID1, "potential": {"base": {"kind": "cosine"}},
     "parameters": {"bogus": 1}},
    {"experiment": "km", "grid": GRID1, "potential": {"base": {"kind": "cosine"}},
     "parameters": {"m": 1.5}},
    {"experiment": "km", "grid": GRID1,
     "potential": {"base": {"kind": "cosine"}, "envelope": {"kind": "linear_ramp", "value": 1}}},
    {"experiment": "km", "grid": GRID1, "potential": {"base": {"kind": "cosine"}},
     "unexpected": 1},
    {"experiment": "km", "grid": GRID1, "potential": {"base": {"kind": "cosine"}, "horizon": -1}},
]


@pytest.mark.parametrize("raw", BAD)
def test_bad_configs_rejected(tmp_path, raw):
    with pytest.raises(ConfigError):
        cli.resolve_config(raw)
    path = write_cfg(tmp_path, raw)
    assert run(path) == cli.EXIT_CONFIG
    assert not (tmp_path / "out").exists()   # nothing ran


def test_unreadable_config(tmp_path):
    assert run(tmp_path / "missing.yaml") == 2
    p = tmp_path / "bad.yaml"
    p.write_text("- just\n- a list\n")
    assert run(p) == 2
    p.write_text("experiment: [")
    assert run(p) == 2


# ---------------------------------------------------------------- experiments

def test_free_propagate_constant_columns(tmp_path):
    out = tmp_path / "free"
    assert main(["run", str(CONFIGS / "free_propagate.yaml"), "--output", str(out)]) == 0
    header, rows = read_csv(out / "trace.csv")
    assert header[:2] == ["time", "l2"] and "sobolev_6" in header
    vals = np.array(rows, dtype=float)[:, 1:]
    np.testing.assert_allclose(vals, np.broadcast_to(vals[0], vals.shape), rtol=1e-10)
    resolved = json.loads((out / "config.resolved.json").read_text())
    assert resolved["output_dir"] == str(out)
    assert summary(out)["exit_code"] == 0


def test_converge_four_rows(tmp_path):
    out = tmp_path / "conv"
    assert run(CONFIGS / "converge.yaml", output=str(out)) == 0
    header, rows = read_csv(out / "defect.csv")
    assert header == ["k", "defect", "raw_defect", "fitted_order"]
    assert [r[0] for r in rows] == ["4", "8", "16", "32"]
    order = float(rows[0][3])
    assert 0.7 <= order <= 1.3
    assert len({r[3] for r in rows}) == 1
    assert all(len(r[1].split("e")[0].replace("-", "").replace(".", "")) == 17 for r in rows)


def test_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(CONFIGS / "inequalities.yaml", output=str(a)) == 0
    assert run(CONFIGS / "inequalities.yaml", output=str(b)) == 0
    for name in ("inequalities.csv", "reports.jsonl"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_override(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(CONFIGS / "converge.yaml", seed=1, output=str(a)) == 0
    assert run(CONFIGS / "converge.yaml", seed=2, output=str(b)) == 0
    assert json.loads((a / "config.resolved.json").read_text())["seed"] == 1
    # the defect maximizes over random probes, so the seed changes the table
    assert (a / "defect.csv").read_bytes() != (b / "defect.csv").read_bytes()


def test_kato_experiment(tmp_path):
    cfg = {"experiment": "kato", "grid": {**GRID1, "dim_per_particle": 2},
           "potential": {"base": {"kind": "softened_coulomb", "epsilon": 0.5},
                         "drive": {"kind": "cosine", "mode": 1}},
           "parameters": {"orders": [0, 1]}}
    assert run(write_cfg(tmp_path, cfg)) == 0
    header, rows = read_csv(tmp_path / "out" / "kato.csv")
    assert [r[0] for r in rows] == ["base", "drive"]
    assert header[-2:] == ["sobolev_kato_0", "sobolev_kato_1"]


def test_km_experiment(tmp_path):
    assert run(CONFIGS / "km.yaml", output=str(tmp_path / "km")) == 0
    s = summary(tmp_path / "km")
    names = [c["name"] for c in s["checks"]]
    assert names == ["linear_fit_residual", "K1_factorization"]
    assert s["results"]["slope"] <= s["results"]["budget"]


def test_violation_exit_code(tmp_path):
    cfg = {"experiment": "converge", "grid": GRID1, "potential": RAMP,
           "parameters": {"k_list": [4, 8], "order_min": 5.0, "order_max": 6.0}}
    assert run(write_cfg(tmp_path, cfg)) == cli.EXIT_VIOLATIONS
    s = summary(tmp_path / "out")
    assert s["status"] == "violations"
    assert any(not c["passed"] for c in s["checks"])


def test_runtime_failure_exit_code(tmp_path):
    cfg = {"experiment": "km", "grid": {**GRID1, "dim_per_particle": 2, "points_per_axis": 128},
           "potential": RAMP}
    assert run(write_cfg(tmp_path, cfg)) == cli.EXIT_RUNTIME
    s = summary(tmp_path / "out")
    assert s["status"] == "error" and "GridError" in s["error"]
    assert (tmp_path / "out" / "config.resolved.json").exists()


def test_custom_table_relative_path(tmp_path):
    g = np.cos(np.arange(16) * 2 * np.pi / 16)
    write_table(tmp_path / "well.gnp", g)
    cfg = {"experiment": "kato", "grid": GRID1,
           "potential": {"base": {"kind": "custom_table", "path": "well.gnp"}},
           "parameters": {"orders": [0]}}
    assert run(write_cfg(tmp_path, cfg)) == 0
    _, rows = read_csv(tmp_path / "out" / "kato.csv")
    assert rows[0][1] == "custom_table"
    resolved = json.loads((tmp_path / "out" / "config.resolved.json").read_text())
    assert Path(resolved["potential"]["base"]["path"]).is_absolute()


def test_custom_table_shape_mismatch(tmp_path):
    write_table(tmp_path / "w.gnp", np.zeros(32))
    cfg = {"experiment": "kato", "grid": GRID1,
           "potential": {"base": {"kind": "custom_table", "path": "w.gnp"}}}
    assert run(write_cfg(tmp_path, cfg)) == cli.EXIT_CONFIG


# ---------------------------------------------------------------- output

def test_output_confined(tmp_path):
    out = Output(tmp_path / "o")
    out.table("ok.csv", ["a"], [[1.0]])
    for bad in ("../escape.csv", "/tmp/abs.csv", "sub/../../x.csv"):
        with pytest.raises(ValueError):
            out.table(bad, ["a"], [[1.0]])
    assert not (tmp_path / "escape.csv").exists()


def test_run_writes_only_inside_output_dir(tmp_path):
    cfg = {"experiment": "converge", "grid": GRID1, "potential": RAMP,
           "parameters": {"k_list": [4, 8]}}
    path = write_cfg(tmp_path, cfg)
    before = set(tmp_path.iterdir())
    run(path)
    after = set(tmp_path.iterdir())
    assert after - before == {tmp_path / "out"}
    assert {p.name for p in (tmp_path / "out").iterdir()} == {
        "config.resolved.json", "defect.csv", "summary.json"}


def test_format_table():
    text = format_table(["a", "b", "c"], [[1, 0.1, "x"], [2, -1e-300, "y"]])
    assert text == ("a,b,c\n1,1.0000000000000001e-01,x\n"
                    "2,-1.0000000000000000e-300,y\n")
