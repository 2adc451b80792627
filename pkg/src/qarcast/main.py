#!/usr/bin/env python3
"""
qarcast command line

Bootstrap prediction intervals for autoregressive and quantile
autoregressive series, Monte-Carlo coverage experiments and rolling-window
backtests on real data.

Exit codes: 0 success, 2 flag or configuration errors, 3 data errors,
4 method errors.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from datetime import datetime

import pandas as pd

from qarcast._version import __version__
from qarcast.exceptions import ConfigError, DataError, DomainError, MethodError
from qarcast.qar_backtest import BacktestConfig, backtest_methods, rwpoos
from qarcast.qar_intervals import (
    AR_METHODS,
    METHOD_DEFAULTS,
    METHODS,
    MULTIPLIER_LAWS,
    QAR_METHODS,
    MethodConfig,
    prediction_intervals,
)
from qarcast.qar_io import CSV_SIGNIFICANT_DIGITS, load_series_csv
from qarcast.qar_simulate import PROFILES, load_experiment_config, run_experiment

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_METHOD = 4

BACKTEST_METHODS = AR_METHODS + QAR_METHODS
DEFAULT_SEED = 1

logger = logging.getLogger("qarcast")


def setup_logging(run_name=None, log_dir=None, verbose=False):
    """Configure root logging to a timestamped file and the console.

    Safe to call more than once: existing handlers are cleared first.
    ``log_dir=False`` disables the log file.

    Returns:
        str or None: Path of the log file.
    """
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    name = f"qarcast_{run_name}_{timestamp}.log" if run_name else f"qarcast_{timestamp}.log"

    root = logging.getLogger()
    for handler in root.handlers[:]:
        handler.close()
        root.removeHandler(handler)

    handlers = [logging.StreamHandler()]
    log_filename = None
    if log_dir is not False:
        log_dir = log_dir or "."
        os.makedirs(log_dir, exist_ok=True)
        log_filename = os.path.join(log_dir, name)
        handlers.insert(0, logging.FileHandler(log_filename))

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )
    if log_filename:
        logger.info(f"Logging to {log_filename}")
    return log_filename


def _probability(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _int_list(text):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got {text}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("horizons must be positive integers")
    return values


def expand_methods(text):
    """Parse a comma separated method list; 'all' expands to every backtestable method."""
    tags = []
    for part in text.split(","):
        part = part.strip().lower().replace("_", "-")
        if not part:
            continue
        if part == "all":
            tags.extend(BACKTEST_METHODS)
        elif part in METHODS:
            tags.append(part)
        else:
            raise argparse.ArgumentTypeError(f"unknown method '{part}'")
    return list(dict.fromkeys(tags))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--log-dir', help='Directory for the run log file (default: current directory)')
    common.add_argument('--no-log-file', action='store_true', help='Log to standard error only')
    common.add_argument('--verbose', action='store_true', help='Enable debug logging')
    common.add_argument('--strict', action='store_true',
                        help='Require an explicit --seed for simulate and backtest')

    parser = argparse.ArgumentParser(
        prog="qarcast",
        description="Bootstrap prediction intervals for AR(p) and QAR(p) time series",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_int = sub.add_parser('interval', parents=[common], formatter_class=fmt,
                           help='Prediction intervals for the next k observations of a series')
    p_int.add_argument('--input', required=True, help='Two-column CSV file (label, value)')
    p_int.add_argument('--method', required=True, choices=[m for m in METHODS if m != "oracle"],
                       help='Interval method')
    p_int.add_argument('--p', type=_positive_int, default=METHOD_DEFAULTS["p"], help='Lag order')
    p_int.add_argument('--k', type=_positive_int, default=1, help='Largest horizon')
    p_int.add_argument('--level', type=_probability, default=METHOD_DEFAULTS["level"],
                       help='Nominal coverage level')
    p_int.add_argument('--B', type=_positive_int, default=None,
                       help=f'Bootstrap replications (default: {METHOD_DEFAULTS["B_ar"]} for AR-based, '
                            f'{METHOD_DEFAULTS["B_qar"]} for QAR-based methods)')
    p_int.add_argument('--tau', type=_probability, default=METHOD_DEFAULTS["tau"],
                       help='Quantile order of the AR quantile fit')
    p_int.add_argument('--tau0', type=_probability, default=METHOD_DEFAULTS["tau0"],
                       help='Quantile order of the QAR point prediction')
    p_int.add_argument('--multiplier', choices=MULTIPLIER_LAWS, default=METHOD_DEFAULTS["multiplier"],
                       help='Multiplier law of the weighted bootstrap')
    p_int.add_argument('--loo', choices=("full", "row"), default=METHOD_DEFAULTS["loo"],
                       help='Rows dropped per predictive residual')
    p_int.add_argument('--seed', type=_seed, default=None, help='Master random seed')
    p_int.add_argument('--format', choices=("csv", "json"), default="csv", help='Output format')
    p_int.add_argument('--output', help='Write to this file instead of standard output')

    p_sim = sub.add_parser('simulate', parents=[common], formatter_class=fmt,
                           help='Monte-Carlo coverage experiment from a JSON configuration')
    p_sim.add_argument('--config', required=True, help='Experiment configuration JSON file')
    p_sim.add_argument('--out', required=True, help='Output directory for the reports')
    p_sim.add_argument('--seed', type=_seed, default=None, help='Master random seed (overrides the config)')
    p_sim.add_argument('--workers', type=_positive_int, default=None,
                       help='Worker processes (default: performance.max_workers of the config)')
    p_sim.add_argument('--profile', choices=tuple(PROFILES), default=None,
                       help='Replication profile (default: $QARCAST_PROFILE, then the config, then desk)')

    p_bt = sub.add_parser('backtest', parents=[common], formatter_class=fmt,
                          help='Rolling-window pseudo-out-of-sample evaluation')
    p_bt.add_argument('--input', required=True, help='Two-column CSV file (label, value)')
    p_bt.add_argument('--window', type=_positive_int, required=True, help='Training window length R')
    p_bt.add_argument('--p', type=_positive_int, default=METHOD_DEFAULTS["p"], help='Lag order')
    p_bt.add_argument('--methods', type=expand_methods, default=expand_methods("all"),
                      help="Comma separated method tags or 'all'")
    p_bt.add_argument('--horizons', type=_int_list, default=[1, 2, 3, 4], help='Comma separated horizons')
    p_bt.add_argument('--level', type=_probability, default=METHOD_DEFAULTS["level"],
                      help='Nominal coverage level')
    p_bt.add_argument('--B', type=_positive_int, default=None,
                      help=f'Bootstrap replications (default: {METHOD_DEFAULTS["B_ar"]} for AR-based, '
                           f'{METHOD_DEFAULTS["B_qar"]} for QAR-based methods)')
    p_bt.add_argument('--tau0', type=_probability, default=METHOD_DEFAULTS["tau0"],
                      help='Quantile order of the QAR point prediction')
    p_bt.add_argument('--seed', type=_seed, default=None, help='Master random seed')
    p_bt.add_argument('--workers', type=_positive_int, default=1, help='Worker processes')
    p_bt.add_argument('--common-windows', action='store_true',
                      help='Score every horizon on the same windows (those reaching the largest horizon)')
    p_bt.add_argument('--out', help='Output directory (default: print the table)')
    p_bt.add_argument('--format', choices=("csv", "json"), default="csv",
                      help='Format of the printed table')
    return parser


def _resolve_seed(args, parser):
    if args.seed is not None:
        return args.seed
    if args.strict:
        parser.error(f"--seed is required for {args.command} in strict mode")
    logger.warning(f"No --seed given; using {DEFAULT_SEED}")
    return DEFAULT_SEED


def _write_frame(frame, fmt, output=None):
    if fmt == "json":
        text = json.dumps(frame.to_dict(orient="records"), indent=2) + "\n"
    else:
        text = frame.to_csv(index=False, float_format=f"%.{CSV_SIGNIFICANT_DIGITS}g", lineterminator="\n")
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def cmd_interval(args, parser):
    if args.method == "bj" and args.B is not None:
        logger.warning("--B is ignored by bj (no bootstrap)")
    try:
        cfg = MethodConfig(method=args.method, p=args.p, tau=args.tau, tau0=args.tau0,
                           B=None if args.method == "bj" else args.B, level=args.level,
                           multiplier=args.multiplier, loo=args.loo,
                           seed=DEFAULT_SEED if args.seed is None else args.seed)
    except DomainError as e:
        parser.error(str(e))
    if args.seed is None and args.method != "bj":
        if args.strict:
            parser.error("--seed is required in strict mode")
        logger.warning(f"No --seed given; using {DEFAULT_SEED}")

    series = load_series_csv(args.input)
    intervals = prediction_intervals(series, cfg, None, args.k)
    frame = pd.DataFrame([{"horizon": iv.horizon, "point": iv.point, "lower": iv.lower,
                           "upper": iv.upper} for iv in intervals])
    _write_frame(frame, args.format, args.output)
    return EXIT_OK


def cmd_simulate(args, parser):
    seed = args.seed
    if seed is None and args.strict:
        parser.error("--seed is required for simulate in strict mode")
    cfg = load_experiment_config(args.config, profile=args.profile)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    report = run_experiment(cfg, workers=args.workers)
    for path in report.save(args.out):
        print(path)
    return EXIT_OK


def cmd_backtest(args, parser):
    seed = _resolve_seed(args, parser)
    if not args.methods:
        parser.error("--methods is empty")
    if "oracle" in args.methods:
        parser.error("oracle needs the true model and cannot be backtested")
    if args.B is not None and "bj" in args.methods:
        logger.warning("--B is ignored by bj (no bootstrap)")
    try:
        methods = backtest_methods(args.methods, args.p, args.level, args.B, args.tau0)
    except DomainError as e:
        parser.error(str(e))

    series = load_series_csv(args.input)
    cfg = BacktestConfig(window=args.window, p=args.p, methods=methods, horizons=args.horizons,
                         level=args.level, seed=seed, max_workers=args.workers,
                         common_windows=args.common_windows)
    report = rwpoos(series, cfg)
    if args.out:
        for path in report.save(args.out):
            print(path)
    else:
        _write_frame(report.to_frame(), args.format)
    return EXIT_OK


COMMANDS = {"interval": cmd_interval, "simulate": cmd_simulate, "backtest": cmd_backtest}


def run(argv=None):
    """Parse ``argv`` and run the command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(args.command, False if args.no_log_file else args.log_dir, args.verbose)
    logger.info(f"qarcast {__version__} {args.command}")

    try:
        return COMMANDS[args.command](args, parser)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as e:
        logger.error(f"Data error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (MethodError, DomainError) as e:
        logger.error(f"Method error: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_METHOD


def main():
    """Main entry point for the qarcast command."""
    sys.exit(run())


if __name__ == "__main__":
    main()
