import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from invset.cli import main
from invset.geometry import AxisBox, read_cloud_csv, write_cloud_csv
from invset.plotting import plot_clouds
from invset.runner import ConfigError, ExperimentConfig, delta_init, load_shipped, run, shipped_configs

SVG = "{http://www.w3.org/2000/svg}"

EXPECTED_CONFIGS = {
    "exp1_a0.1", "exp1_a10", "exp1_a1.1", "exp1_a1.01", "exp2", "exp3",
    "exp4_grid", "exp4_random", "exp4_halton", "exp5", "exp6",
    "exp7_disk_m6", "exp7_disk_m30", "exp7_henon_m6", "exp7_henon_m30", "exp8_mu0.01",
}


def small_config(**over):
    raw = {
        "name": "tiny",
        "map": {"name": "connecting_2d"},
        "box": {"lower": [-2, -2], "upper": [2, 2]},
        "init": {"kind": "uniform", "n": 20},
        "optim": {"max_iters": 15, "snapshot_every": 0},
        "reference": {"kind": "SegmentGrid", "N": 500},
        "seed": 5,
    }
    raw.update(over)
    return raw


def group(svg_path, gid):
    root = ET.parse(svg_path).getroot()
    for g in root.iter(f"{SVG}g"):
        if g.get("id") == gid:
            return g
    return None


def count_markers(svg_path, gid="points"):
    g = group(svg_path, gid)
    return 0 if g is None else len(list(g.iter(f"{SVG}use")))


def count_circles(svg_path):
    g = group(svg_path, "delta-circles")
    return 0 if g is None else len(list(g.iter(f"{SVG}path")))


@pytest.mark.parametrize(
    "box, n, expected",
    [
        (AxisBox((-2, -2), (2, 2)), 1024, math.sqrt(16 / (1024 * math.pi))),
        (AxisBox((0, 0), (1, 1)), 1, 0.564190),
        (AxisBox((-1,), (1,)), 2, 0.5),
    ],
)
def test_delta_init(box, n, expected):
    assert delta_init(box, n) == pytest.approx(expected, abs=1e-6)


def test_delta_init_32x32_grid_value():
    assert delta_init(AxisBox((-2, -2), (2, 2)), 1024) == pytest.approx(0.070524, abs=5e-7)


def test_delta_init_3d_ball_volumes():
    box = AxisBox.cube(-2, 2, 3)
    d = delta_init(box, 1000)
    assert 1000 * 4 / 3 * math.pi * d**3 == pytest.approx(box.volume)


def test_shipped_configs_all_valid():
    configs = shipped_configs()
    assert set(configs) == EXPECTED_CONFIGS
    for name in configs:
        cfg = load_shipped(name)
        assert cfg.name == name
    lj = load_shipped("exp7_disk_m30").lj
    assert (lj.p, lj.m, lj.mu) == (1, 30, 1.0)
    assert lj.delta == pytest.approx(0.070524, abs=5e-7)
    assert load_shipped("exp8_mu0.01").lj.mu == 0.01


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"map": {"name": "lorenz"}}, "map.name"),
        ({"box": {"lower": [-2], "upper": [2]}}, "box"),
        ({"init": {"kind": "grid", "counts": [4]}}, "init.counts"),
        ({"init": {"kind": "sobol", "n": 3}}, "init.kind"),
        ({"n": 7}, "n"),
        ({"lj": {"m": 20}}, "lj.m"),
        ({"optim": {"wolfe_c1": 0.95}}, "optim"),
        ({"seed": -1}, "seed"),
    ],
)
def test_config_errors_name_field(patch, field):
    with pytest.raises(ConfigError, match=f"^{field}"):
        ExperimentConfig.from_dict(small_config(**patch))


def test_run_outputs_and_cadence(tmp_path):
    res = run(ExperimentConfig.from_dict(small_config()), out_dir=tmp_path / "a")
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert [f for f in files if f.startswith("cloud") and f.endswith(".csv")] == ["cloud_final.csv"]
    assert {"metrics.csv", "manifest.json", "quality.csv", "cloud_final.svg", "convergence.svg"} <= set(files)

    lines = (tmp_path / "a" / "metrics.csv").read_text().splitlines()
    assert lines[0] == "iter,value,grad_inf,delta"
    rows = [line.split(",") for line in lines[1:]]
    iters = [int(r[0]) for r in rows]
    assert iters == sorted(set(iters)) and iters[0] == 0
    values = [float(r[1]) for r in rows]
    assert np.all(np.diff(values) <= 1e-15)

    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seed"] == 5
    assert manifest["termination"] == res.optim.termination.value
    assert ExperimentConfig.from_dict(manifest["config"]).to_dict() == manifest["config"]

    cfg = ExperimentConfig.from_dict(small_config(optim={"max_iters": 15, "snapshot_every": 5}))
    res = run(cfg, out_dir=tmp_path / "b", plots=False)
    snaps = sorted(p.name for p in (tmp_path / "b").glob("cloud_iter*.csv"))
    assert snaps == [f"cloud_iter{i:05d}.csv" for i in range(0, res.optim.iterations + 1, 5)]


def test_rerun_is_byte_identical(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config(lj={"p": 1, "m": 3, "mu": 1.0},
                                                  optim={"max_iters": 20, "snapshot_every": 10}))
    run(cfg, out_dir=tmp_path / "a")
    run(cfg, out_dir=tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir() if p.name != "manifest.json")
    assert names
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_seed_override_changes_initial_cloud(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config())
    a = run(cfg, out_dir=tmp_path / "a", plots=False)
    b = run(cfg, out_dir=tmp_path / "b", seed=6, plots=False)
    assert not np.array_equal(a.initial, b.initial)
    assert json.loads((tmp_path / "b" / "manifest.json").read_text())["seed"] == 6


def test_lj_run_records_delta(tmp_path):
    cfg = ExperimentConfig.from_dict(small_config(lj={"p": 1, "m": 3, "mu": 1.0}))
    res = run(cfg, out_dir=tmp_path)
    rows = [r.split(",") for r in (tmp_path / "metrics.csv").read_text().splitlines()[1:]]
    assert float(rows[0][3]) == pytest.approx(delta_init(cfg.box, 20))
    assert float(rows[-1][3]) == res.delta
    assert count_markers(tmp_path / "cloud_final.svg") == 20
    assert count_circles(tmp_path / "cloud_final.svg") == 20


def test_plot_single_point(tmp_path):
    out = plot_clouds([np.array([[0.3, 0.1]])], tmp_path / "one.svg")
    assert count_markers(out) == 1
    assert count_circles(out) == 0


def test_plot_is_deterministic_and_handles_projections(tmp_path, rng):
    X = rng.normal(size=(30, 3))
    a = plot_clouds([X], tmp_path / "a.svg", proj="xz", delta=0.1)
    b = plot_clouds([X], tmp_path / "b.svg", proj="xz", delta=0.1)
    assert a.read_bytes() == b.read_bytes()
    assert count_markers(a) == 30 and count_circles(a) == 30
    with pytest.raises(ValueError):
        plot_clouds([X], tmp_path / "c.svg", proj="xw")
    with pytest.raises(ValueError):
        plot_clouds([rng.normal(size=(5, 4))], tmp_path / "d.svg")


def test_plot_1d_evolution(tmp_path, rng):
    snaps = [rng.uniform(-1, 1, size=(10, 1)) * 0.5**k for k in range(4)]
    out = plot_clouds(snaps, tmp_path / "evo.svg", reference=[[0.0]])
    assert count_markers(out) == 10
    assert count_markers(out, "points-0") == 10


def test_cli_run_verify_plot(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(small_config()))
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg_path), "--out", str(out), "--seed", "9"]) == 0
    assert capsys.readouterr().out.startswith("name,termination,iterations")

    assert main(["verify", "--cloud", str(out / "cloud_final.csv"),
                 "--reference", '{"kind": "SegmentGrid", "N": 500}']) == 0
    header, values = capsys.readouterr().out.strip().splitlines()
    assert header == "d_H,d_forward,d_backward"
    d_h, d_fwd, d_bwd = map(float, values.split(","))
    assert d_h == max(d_fwd, d_bwd)

    svg = tmp_path / "p.svg"
    assert main(["plot", "--in", str(out / "cloud_final.csv"), "--delta", "0.05", "--out", str(svg)]) == 0
    assert count_circles(svg) == 20


def test_cli_plot_3d_projection(tmp_path):
    path = tmp_path / "c.csv"
    write_cloud_csv(path, np.random.default_rng(0).normal(size=(12, 3)))
    for proj in ("xy", "xz", "yz"):
        assert main(["plot", "--in", str(path), "--proj", proj, "--out", str(tmp_path / f"{proj}.svg")]) == 0
        assert count_markers(tmp_path / f"{proj}.svg") == 12


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(small_config(map={"name": "nope"})))
    assert main(["run", "--config", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2

    unplottable = tmp_path / "c4.csv"
    write_cloud_csv(unplottable, np.zeros((3, 4)))
    assert main(["plot", "--in", str(unplottable), "--out", str(tmp_path / "x.svg")]) == 1
    assert main(["verify", "--cloud", str(tmp_path / "none.csv"), "--reference", '{"kind": "SegmentGrid"}']) == 1

    cloud = tmp_path / "c.csv"
    write_cloud_csv(cloud, np.zeros((3, 2)))
    assert main(["verify", "--cloud", str(cloud), "--reference", "not json"]) == 2


def test_cli_list(capsys):
    assert main(["list"]) == 0
    names = {line.split("\t")[0] for line in capsys.readouterr().out.splitlines()}
    assert names == EXPECTED_CONFIGS


def test_cli_runs_shipped_config_by_name(tmp_path):
    assert main(["run", "--config", "exp1_a10", "--out", str(tmp_path)]) == 0
    assert read_cloud_csv(tmp_path / "cloud_final.csv").shape == (40, 1)
