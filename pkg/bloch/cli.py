import argparse
import logging
import sys

import pandas as pd

from bloch.errors import BlochError, NumericalError, StepFailure, TrajectoryIOError, UsageError
from bloch.harness import experiments
from bloch.harness.benchmark import rows_to_df
from bloch.harness.config import (EXPERIMENT_CONVERGENCE, EXPERIMENT_CUSTOM, EXPERIMENT_DEGENERATE, EXPERIMENT_NSFD,
                                  EXPERIMENT_SCALING, EXPERIMENT_TABLE1, EXPERIMENT_THREE_LEVEL, ExperimentConfig)
from bloch.harness.plotting import write_plot_script
from bloch.propagators.strategies import CN_CAYLEY, CN_TRAPEZOIDAL, EXP_SERIES, EXP_SPECTRAL, METHODS
from bloch.results.tables import MethodTableQuery, ScalingQuery


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

SUBCOMMAND_EXPERIMENTS = {
    "simulate": EXPERIMENT_THREE_LEVEL,
    "degenerate": EXPERIMENT_DEGENERATE,
    "scaling": EXPERIMENT_SCALING,
    "table1": EXPERIMENT_TABLE1,
    "convergence": EXPERIMENT_CONVERGENCE,
    "nsfd-report": EXPERIMENT_NSFD,
}


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument("--method", choices=METHODS, default=None)
    common.add_argument("--np", dest="n_p", type=int, default=None)
    common.add_argument("--periods", type=int, default=None)
    common.add_argument("--levels", type=int, nargs="+", default=None)
    common.add_argument("--config", default=None, help="YAML file with ExperimentConfig fields")
    common.add_argument("--out", dest="output_path", default=None)
    common.add_argument("--stride", dest="record_stride", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--cn-form", dest="cn_form", choices=[CN_TRAPEZOIDAL, CN_CAYLEY], default=None)
    common.add_argument("--evaluator", dest="exp_evaluator", choices=[EXP_SPECTRAL, EXP_SERIES], default=None)
    common.add_argument("--plot", action="store_true", help="also write a seaborn script plotting the CSV")
    common.add_argument("--full", action="store_true", default=None, help="2000 periods for timing runs")
    common.add_argument("--parallel", action="store_true", default=None)
    common.add_argument("--verbose", action="store_true")

    parser = ArgumentParser(prog="bloch", description="Strang splitting for the Bloch equations of N-level systems")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("simulate", parents=[common], help="three-level (or custom) trajectory")
    subparsers.add_parser("degenerate", parents=[common], help="exact strategies on a degenerate polarizability")
    subparsers.add_parser("scaling", parents=[common], help="Newton against the series exponential over N")
    subparsers.add_parser("table1", parents=[common], help="methods against n_p on the three-level system")
    subparsers.add_parser("convergence", parents=[common], help="fitted order of the splitting")
    subparsers.add_parser("nsfd-report", parents=[common], help="nonstandard finite-difference coefficients")

    return parser


def make_config(args):
    overrides = {
        "method": args.method,
        "n_p": args.n_p,
        "periods": args.periods,
        "levels": args.levels,
        "output_path": args.output_path,
        "record_stride": args.record_stride,
        "seed": args.seed,
        "cn_form": args.cn_form,
        "exp_evaluator": args.exp_evaluator,
        "full": args.full,
        "parallel": args.parallel,
    }
    cfg = ExperimentConfig.from_yaml(args.config) if args.config is not None else ExperimentConfig()

    experiment = SUBCOMMAND_EXPERIMENTS[args.command]
    if args.command == "simulate" and cfg.experiment == EXPERIMENT_CUSTOM:
        experiment = EXPERIMENT_CUSTOM

    cfg = cfg.updated(experiment=experiment, **overrides)
    if args.plot and args.command != "simulate":
        raise UsageError(f"--plot is only available for simulate, not {args.command}")
    if args.plot and cfg.output_path is None:
        raise UsageError("--plot needs an output CSV, pass --out or set output_path in the config")

    return cfg


def _save_df(df, path):
    try:
        df.to_csv(path, index=False)
    except OSError as error:
        raise TrajectoryIOError(path, error.strerror or str(error)) from error


def _print_df(df):
    with pd.option_context("display.max_columns", None, "display.width", 200):
        print(df.to_string())


def run_simulate(cfg, args):
    run = experiments.run_custom if cfg.experiment == EXPERIMENT_CUSTOM else experiments.run_three_level
    _, row = run(cfg)
    if args.plot:
        print(f"Plot script written to {write_plot_script(cfg.output_path)}")
    _print_df(rows_to_df([row]))


def run_degenerate(cfg, args):
    report = experiments.run_degenerate(cfg)
    if cfg.output_path is not None:
        _save_df(report.to_df(), cfg.output_path)
    _print_df(report.to_df()[["method", "status", "max_deviation", "min_eigenvalue_overall", "error"]])


def run_scaling(cfg, args):
    rows = experiments.run_scaling(cfg)
    if cfg.output_path is not None:
        _save_df(rows_to_df(rows), cfg.output_path)
    _print_df(ScalingQuery.from_rows(rows).get_table())


def run_table1(cfg, args):
    rows = experiments.run_crank_nicolson_table(cfg)
    if cfg.output_path is not None:
        _save_df(rows_to_df(rows), cfg.output_path)
    _print_df(MethodTableQuery.from_rows(rows).get_table())


def run_convergence(cfg, args):
    report = experiments.run_convergence(cfg)
    if cfg.output_path is not None:
        _save_df(report.to_df(), cfg.output_path)
    _print_df(report.to_df())
    print(f"Fitted order: {report.order:.3f}")


def run_nsfd_report(cfg, args):
    df = experiments.run_nsfd_sweep(cfg)
    if cfg.output_path is not None:
        _save_df(df, cfg.output_path)
    _print_df(df)


COMMANDS = {
    "simulate": run_simulate,
    "degenerate": run_degenerate,
    "scaling": run_scaling,
    "table1": run_table1,
    "convergence": run_convergence,
    "nsfd-report": run_nsfd_report,
}


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as error:
        print(f"bloch: error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exit:
        # --help
        return exit.code

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    try:
        cfg = make_config(args)
        logger.debug(f"Running {args.command} with {cfg}")
        COMMANDS[args.command](cfg, args)
    except StepFailure as error:
        print(f"bloch: {args.command}: {error.method} failed at step {error.step}: {type(error.cause).__name__}: {error.cause}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalError as error:
        print(f"bloch: {args.command}: {type(error).__name__}: {error}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BlochError as error:
        print(f"bloch: {args.command}: {error}", file=sys.stderr)
        return EXIT_USAGE

    return EXIT_OK


def main():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
