"""Experiment configs, seeded runs and their on-disk outputs.

A run directory contains::

    cloud_final.csv        final point cloud
    cloud_iter00010.csv    snapshots every ``optim.snapshot_every`` iterations
    metrics.csv            iter,value,grad_inf,delta
    quality.csv            distances to the reference set (when configured)
    manifest.json          config, seed, termination, timings
    cloud_final.svg        scatter of the final cloud (d <= 3)
    convergence.svg        objective and gradient norm per iteration
"""

from __future__ import annotations

import copy
import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import MAPS, MapSystem, make_map
from .energy import LJParams, augmented, energy
from .geometry import AxisBox, PointCloud, write_cloud_csv
from .optimize import OptimOptions, OptimRun, minimize
from .sampling import from_spec
from .verify import reference_from_spec, report_quality

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


def delta_init(box: AxisBox, n: int) -> float:
    """Radius such that ``n`` balls of that radius have total volume ``vol(box)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = box.dim
    unit_ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    return (box.volume / (n * unit_ball)) ** (1.0 / d)


@dataclass
class ExperimentConfig:
    name: str
    map_name: str
    map_params: dict
    box: AxisBox
    init: dict
    n: int
    optim: OptimOptions
    seed: int
    output: str
    lj: LJParams | None = None
    reference: dict | None = None
    plot: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = copy.deepcopy(raw)

        def need(key, where=raw, prefix=""):
            if key not in where:
                raise ConfigError(f"{prefix}{key}: required field missing")
            return where[key]

        name = str(raw.get("name", "experiment"))
        m = need("map")
        if not isinstance(m, dict):
            raise ConfigError("map: expected an object with 'name' and 'params'")
        map_name = need("name", m, "map.")
        if map_name not in MAPS:
            raise ConfigError(f"map.name: unknown map {map_name!r}; choose from {sorted(MAPS)}")
        map_params = m.get("params", {}) or {}
        try:
            system = make_map(map_name, map_params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"map.params: {exc}") from None

        b = need("box")
        try:
            box = AxisBox(tuple(need("lower", b, "box.")), tuple(need("upper", b, "box.")))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"box: {exc}") from None
        if box.dim != system.dim:
            raise ConfigError(f"box: dimension {box.dim} does not match map dimension {system.dim}")

        init = need("init")
        kind = init.get("kind")
        if kind in ("uniform", "halton"):
            n_init = int(need("n", init, "init."))
        elif kind == "grid":
            counts = need("counts", init, "init.")
            if len(counts) != box.dim:
                raise ConfigError(f"init.counts: need {box.dim} entries, got {len(counts)}")
            n_init = int(np.prod(counts))
        else:
            raise ConfigError(f"init.kind: must be uniform, grid or halton, got {kind!r}")
        n = int(raw.get("n", n_init))
        if n != n_init:
            raise ConfigError(f"n: {n} is inconsistent with init (which yields {n_init} points)")
        if n < 1:
            raise ConfigError("n: must be at least 1")

        try:
            optim = OptimOptions(**raw.get("optim", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"optim: {exc}") from None

        lj = None
        if raw.get("lj") is not None:
            spec = dict(raw["lj"])
            spec.setdefault("delta", delta_init(box, n))
            try:
                lj = LJParams(**spec)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"lj: {exc}") from None
            if lj.m >= n:
                raise ConfigError(f"lj.m: need m < n, got m={lj.m}, n={n}")

        reference = raw.get("reference")
        if reference is not None and not isinstance(reference, dict):
            raise ConfigError("reference: expected an object with a 'kind' field")

        try:
            seed = int(raw.get("seed", 0))
        except (TypeError, ValueError):
            raise ConfigError("seed: expected an integer") from None
        if not 0 <= seed < 2**64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")

        return cls(
            name=name, map_name=map_name, map_params=dict(map_params), box=box, init=dict(init),
            n=n, optim=optim, seed=seed, output=str(raw.get("output", f"runs/{name}")),
            lj=lj, reference=reference, plot=dict(raw.get("plot", {})),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "map": {"name": self.map_name, "params": self.map_params},
            "box": self.box.to_dict(),
            "init": self.init,
            "n": self.n,
            "lj": None if self.lj is None else asdict(self.lj),
            "optim": asdict(self.optim),
            "reference": self.reference,
            "output": self.output,
            "seed": self.seed,
            "plot": self.plot,
        }

    def system(self) -> MapSystem:
        return make_map(self.map_name, self.map_params)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return ExperimentConfig.from_dict(raw)


def shipped_configs() -> dict:
    """Name -> path of the experiment configs bundled with the package."""
    root = resources.files("invset") / "configs"
    return {p.name[:-5]: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".json")}


def load_shipped(name: str) -> ExperimentConfig:
    configs = shipped_configs()
    if name not in configs:
        raise ConfigError(f"no shipped config named {name!r}; available: {', '.join(configs)}")
    return load_config(configs[name])


def make_objective(cfg: ExperimentConfig, system: MapSystem):
    """Objective over the flat variable vector; with LJ the last entry is delta."""
    d = system.dim
    if cfg.lj is None:
        def obj(z):
            rep = energy(z.reshape(-1, d), system)
            return rep.value, rep.grad
    else:
        lj = cfg.lj

        def obj(z):
            rep = augmented(z[:-1].reshape(-1, d), lj, system, delta=z[-1])
            return rep.value, rep.grad
    return obj


@dataclass
class RunResult:
    config: ExperimentConfig
    optim: OptimRun
    cloud: np.ndarray
    delta: float | None
    quality: tuple | None
    out_dir: Path | None
    initial: np.ndarray
    timings: dict
    delta_trace: list = field(default_factory=list)


def execute(cfg: ExperimentConfig) -> RunResult:
    """Run the optimization described by ``cfg`` without touching the disk."""
    system = cfg.system()
    t0 = time.perf_counter()
    X0 = from_spec(cfg.init, cfg.box, cfg.seed).points
    z0 = X0.ravel()
    if cfg.lj is not None:
        z0 = np.concatenate([z0, [cfg.lj.delta]])
    t1 = time.perf_counter()
    delta_trace = []
    callback = None
    if cfg.lj is not None:
        callback = lambda it, z, value, grad: delta_trace.append(float(z[-1]))  # noqa: E731
    run = minimize(make_objective(cfg, system), z0, cfg.optim, callback=callback)
    t2 = time.perf_counter()

    if cfg.lj is None:
        cloud, delta = run.final_x.reshape(-1, system.dim), None
    else:
        cloud, delta = run.final_x[:-1].reshape(-1, system.dim), float(run.final_x[-1])

    quality = None
    if cfg.reference is not None:
        ref = reference_from_spec(cfg.reference)
        quality = report_quality(cloud, ref)
    t3 = time.perf_counter()
    timings = {"init_s": t1 - t0, "optimize_s": t2 - t1, "verify_s": t3 - t2}
    return RunResult(cfg, run, cloud, delta, quality, None, X0, timings, delta_trace)


def _split(z: np.ndarray, cfg: ExperimentConfig, dim: int):
    if cfg.lj is None:
        return z.reshape(-1, dim), None
    return z[:-1].reshape(-1, dim), float(z[-1])


def write_outputs(result: RunResult, out_dir, plots: bool = True) -> Path:
    cfg, run = result.config, result.optim
    dim = cfg.box.dim
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    write_cloud_csv(out / "cloud_final.csv", result.cloud)
    for row in run.trace:
        if row.snapshot is not None:
            pts, _ = _split(row.snapshot, cfg, dim)
            write_cloud_csv(out / f"cloud_iter{row.iteration:05d}.csv", pts)

    with (out / "metrics.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "value", "grad_inf", "delta"])
        for k, row in enumerate(run.trace):
            delta = format(result.delta_trace[k], ".17g") if result.delta_trace else ""
            w.writerow([row.iteration, format(row.value, ".17g"), format(row.grad_inf, ".17g"), delta])

    if result.quality is not None:
        with (out / "quality.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "d_H", "d_forward", "d_backward"])
            w.writerow([run.iterations, *(format(v, ".17g") for v in result.quality)])

    manifest = {
        "invset_version": __version__,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "termination": run.termination.value,
        "iterations": run.iterations,
        "evaluations": run.evaluations,
        "final_value": run.final_value,
        "final_grad_inf": run.final_grad_norm,
        "delta_final": result.delta,
        "quality": None if result.quality is None else dict(zip(("d_H", "d_forward", "d_backward"), result.quality)),
        "timings": result.timings,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    if plots and dim <= 3:
        from .plotting import plot_clouds, plot_convergence

        ref_pts = None
        if cfg.reference is not None:
            ref_pts = reference_from_spec(cfg.reference).sample.points
        clouds = [result.cloud]
        if dim == 1:
            snaps = [_split(r.snapshot, cfg, dim)[0] for r in run.trace if r.snapshot is not None]
            clouds = snaps + clouds
        plot_clouds(clouds, out / "cloud_final.svg", reference=ref_pts, delta=result.delta,
                    proj=cfg.plot.get("proj", "xy"), title=cfg.name)
        t = run.trace
        plot_convergence([r.iteration for r in t], [r.value for r in t], [r.grad_inf for r in t],
                         out / "convergence.svg", title=cfg.name)
    return out


def run(cfg: ExperimentConfig, out_dir=None, seed: int | None = None, plots: bool = True) -> RunResult:
    """Execute ``cfg`` and write every output file; ``seed``/``out_dir`` override the config."""
    if seed is not None:
        cfg = copy.deepcopy(cfg)
        cfg.seed = int(seed)
    result = execute(cfg)
    result.out_dir = write_outputs(result, out_dir or cfg.output, plots=plots)
    log.info("%s: %s after %d iterations, value %.3e", cfg.name, result.optim.termination.value,
             result.optim.iterations, result.optim.final_value)
    return result
