"""Command-line entry point: run, sweep-lt, sweep-t1, and plot."""
import argparse
import logging
import sys

from .config import apply_overrides, default_config, full_scale, load_config
from .errors import SimulatorError
from .harness import METHOD_ORDER, run_experiment, sweep_lt, sweep_t1
from .plots import emit_plots

DEFAULT_LT_VALUES = [20, 100, 150]
DEFAULT_T1_VALUES = [0, 250, 500, 1000]


def _add_common(sub):
    sub.add_argument("--config", help="YAML config file; defaults are built in")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--realizations", type=int, help="channel realizations per point")
    sub.add_argument("--out-dir", help="output directory override")
    sub.add_argument("--workers", type=int, help="parallel worker processes")
    sub.add_argument("--save-traces", action="store_true",
                     help="write per-episode training traces")
    sub.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                     help="override any config value; repeatable")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irsambc",
        description="IRS-assisted ambient backscatter link simulator: "
                    "learned CSI-free configuration against full-CSI baselines")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="all methods over the configured reflector counts")
    _add_common(run)
    run.add_argument("--methods", nargs="+", choices=METHOD_ORDER,
                     help="subset of methods to run")
    run.add_argument("--full-scale", action="store_true",
                     help="published-scale run: 1000 realizations, denser N grid")

    lt = sub.add_parser("sweep-lt", help="learned GRCD versus training symbol length")
    _add_common(lt)
    lt.add_argument("--n", type=int, default=64, help="reflector count for the sweep")
    lt.add_argument("--values", nargs="+", type=int, default=DEFAULT_LT_VALUES)

    t1 = sub.add_parser("sweep-t1", help="learned GRCD versus random-phase steps")
    _add_common(t1)
    t1.add_argument("--n", type=int, default=64, help="reflector count for the sweep")
    t1.add_argument("--values", nargs="+", type=int, default=DEFAULT_T1_VALUES)

    plot = sub.add_parser("plot", help="re-render figures from an existing summary")
    plot.add_argument("summary", help="path to a summary.csv")
    plot.add_argument("--out-dir", help="directory for the figures")
    return parser


def _build_config(args):
    config = load_config(args.config) if args.config else default_config()
    apply_overrides(config, args.set)
    if getattr(args, "full_scale", False):
        config = full_scale(config)
    if args.seed is not None:
        config.run.master_seed = args.seed
    if args.realizations is not None:
        config.run.realizations = args.realizations
    if args.out_dir is not None:
        config.run.out_dir = args.out_dir
    if args.workers is not None:
        config.run.workers = args.workers
    if args.save_traces:
        config.run.save_traces = True
    if getattr(args, "methods", None):
        config.run.methods = list(args.methods)
    return config


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        if args.command == "plot":
            paths = emit_plots(args.summary, out_dir=args.out_dir)
        else:
            config = _build_config(args)
            if args.command == "run":
                result = run_experiment(config)
            elif args.command == "sweep-lt":
                result = sweep_lt(config, args.values, n=args.n)
            else:
                result = sweep_t1(config, args.values, n=args.n)
            paths = [result.raw_path, result.summary_path]
            paths += emit_plots(result.summary_path)
            paths += result.trace_paths
    except (SimulatorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
