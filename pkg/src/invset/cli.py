"""Command line interface: ``invset run | plot | verify | list``.

Exit status is 0 on success, 2 for configuration/usage errors and 1 for
runtime failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .geometry import read_cloud_csv
from .runner import ConfigError, load_config, run, shipped_configs

log = logging.getLogger("invset")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _resolve_config(ref: str):
    path = Path(ref)
    if path.exists():
        return load_config(path)
    shipped = shipped_configs()
    if ref in shipped:
        return load_config(shipped[ref])
    raise ConfigError(f"{ref}: no such config file or shipped config")


def _reference_spec(text: str) -> dict:
    path = Path(text)
    try:
        raw = path.read_text() if path.exists() else text
        spec = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--reference: not a JSON object or JSON file ({exc})") from None
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("--reference: expected a JSON object with a 'kind' field")
    return spec


def cmd_run(args) -> int:
    cfg = _resolve_config(args.config)
    result = run(cfg, out_dir=args.out, seed=args.seed, plots=not args.no_plots)
    o = result.optim
    print("name,termination,iterations,value,grad_inf,delta,out")
    print(",".join(str(v) for v in (
        cfg.name, o.termination.value, o.iterations, format(o.final_value, ".6e"),
        format(o.final_grad_norm, ".6e"), "" if result.delta is None else format(result.delta, ".6g"),
        result.out_dir,
    )))
    return 0


def cmd_plot(args) -> int:
    from .plotting import plot_clouds
    from .verify import reference_from_spec

    clouds = [read_cloud_csv(p) for p in args.inputs]
    ref = None
    if args.reference:
        ref = reference_from_spec(_reference_spec(args.reference)).sample.points
    plot_clouds(clouds, args.out, reference=ref, delta=args.delta, proj=args.proj)
    print(args.out)
    return 0


def cmd_verify(args) -> int:
    from .verify import reference_from_spec, report_quality

    cloud = read_cloud_csv(args.cloud)
    ref = reference_from_spec(_reference_spec(args.reference))
    d_h, d_fwd, d_bwd = report_quality(cloud, ref)
    print("d_H,d_forward,d_backward")
    print(",".join(format(v, ".17g") for v in (d_h, d_fwd, d_bwd)))
    return 0


def cmd_list(args) -> int:
    for name, path in shipped_configs().items():
        print(f"{name}\t{path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invset", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("--config", required=True, help="JSON config path or shipped config name")
    p.add_argument("--out", default=None, help="output directory (default: config 'output')")
    p.add_argument("--seed", type=_u64, default=None, help="override the config seed")
    p.add_argument("--no-plots", action="store_true", help="skip SVG figures")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plot", help="scatter one or more cloud CSV files into an SVG")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, help="cloud CSV files (last is drawn on top)")
    p.add_argument("--delta", type=float, default=None, help="draw circles of this radius around the last cloud")
    p.add_argument("--proj", choices=("xy", "xz", "yz"), default="xy", help="axis pair for 3d clouds")
    p.add_argument("--reference", default=None, help="reference set spec (JSON text or file)")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("verify", help="distances of a cloud to a reference set")
    p.add_argument("--cloud", required=True, help="cloud CSV file")
    p.add_argument("--reference", required=True, help='reference spec, e.g. \'{"kind": "IntervalGrid", "N": 10000}\'')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("list", help="list shipped experiment configs")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
