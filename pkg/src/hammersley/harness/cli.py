"""Command-line entry point: ``hammersley <experiment> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
import time

from .config import EXPERIMENTS, ConfigError, default_config
from .results import to_csv, to_json, write

EXIT_OK, EXIT_STATISTICAL, EXIT_EXACT, EXIT_CONFIG = 0, 1, 2, 3


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hammersley", description="Monte Carlo experiments for the discrete Hammersley process.")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", type=float)
        sp.add_argument("--u", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--n-grid", type=_ints, dest="n_grid", help="comma-separated N values")
        sp.add_argument("--c", type=float)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--tau", type=float)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", help="output path (stdout when omitted)")
        sp.add_argument("--format", choices=("csv", "json"), default="json", dest="fmt")
        sp.add_argument("--dims", type=_ints, help="lattice extents m,n")
        sp.add_argument("--direction", type=_floats, help="flat-edge or shape direction x,y")
        sp.add_argument("--r-pair", type=_floats, dest="r_pair", help="coupled boundary parameters r1,r2")
        sp.add_argument("--r-grid", type=_floats, dest="r_grid")
        sp.add_argument("--b-grid", type=_floats, dest="b_grid")
        sp.add_argument("--delta-grid", type=_floats, dest="delta_grid")
        sp.add_argument("--eps-grid", type=_floats, dest="eps_grid")
        sp.add_argument("--tail-n", type=int, dest="tail_N")
        sp.add_argument("--level", type=float, help="significance level of the chi-square gates")
        sp.add_argument("--no-retry", action="store_true", help="do not rerun failed statistical gates")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    keys = ("p", "u", "seed", "samples", "n_grid", "c", "alpha", "tau", "workers", "out", "fmt", "dims",
            "direction", "r_pair", "r_grid", "b_grid", "delta_grid", "eps_grid", "tail_N", "level")
    try:
        cfg = default_config(args.experiment, **{k: getattr(args, k) for k in keys})
        if len(cfg.dims) != 2 or len(cfg.direction) != 2 or len(cfg.r_pair) != 2:
            raise ConfigError("dims, direction and r-pair take exactly two values")
    except (ConfigError, ValueError) as exc:
        print(f"hammersley: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    from .experiments import run_experiment

    t0 = time.perf_counter()
    try:
        res = run_experiment(cfg, retry=not args.no_retry)
    except (ConfigError, ValueError) as exc:
        print(f"hammersley: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out:
        write(res, cfg.out, cfg.fmt)
    else:
        sys.stdout.write(to_json(res) if cfg.fmt == "json" else to_csv(res))
    code = res.exit_code()
    failed = [v.name for v in res.verdicts if not v.passed]
    print(f"hammersley {cfg.name}: exit {code}, wall time {time.perf_counter() - t0:.1f} s"
          + (f", failed: {', '.join(failed)}" if failed else ""), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
