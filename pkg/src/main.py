#!/usr/bin/env python3
"""
underfit command-line entry point
Subcommands: nmu, synth, fit, sweep, report
"""

import argparse
import asyncio
import logging
import sys
from typing import List, Optional

from pythonjsonlogger import jsonlogger

from .cli import build_run_config, cmd_fit, cmd_nmu, cmd_report, cmd_sweep, cmd_synth
from .cli.synth import GENERATORS
from .config import LOG_DATEFMT, LOG_FORMAT, LOG_LEVEL, LOG_LINE
from .errors import UnderfitError
from .events import event_bell
from .geometry import FAMILIES

logger = logging.getLogger('main')


def setup_logging(level: str = LOG_LEVEL, fmt: str = LOG_FORMAT, diagnostics_log: Optional[str] = None):
    """Root logger to stderr (text or JSON lines); per-bicluster lines to an optional file"""
    if fmt == 'json':
        formatter = jsonlogger.JsonFormatter(LOG_LINE, datefmt=LOG_DATEFMT)
    else:
        formatter = logging.Formatter(LOG_LINE, datefmt=LOG_DATEFMT)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)

    root = logging.getLogger()
    for old in list(root.handlers):
        root.removeHandler(old)
    root.addHandler(handler)
    root.setLevel(getattr(logging, level, logging.WARNING))

    diagnostics = logging.getLogger('diagnostics')
    diagnostics.propagate = False
    for old in list(diagnostics.handlers):
        diagnostics.removeHandler(old)
        old.close()
    if diagnostics_log:
        file_handler = logging.FileHandler(diagnostics_log, mode='w')
        file_handler.setFormatter(formatter)
        diagnostics.addHandler(file_handler)
        diagnostics.setLevel(logging.INFO)
    else:
        diagnostics.addHandler(logging.NullHandler())


def _log_progress(event_type: str):
    def callback(data):
        logger.info(f"{event_type}: {data}")
    callback.__name__ = f"log_{event_type}"
    return callback


def subscribe_progress():
    for event_type in ('factor_extracted', 'bicluster_extracted', 'candidate_discarded', 'models_selected', 'sweep_row'):
        event_bell.subscribe(event_type, _log_progress(event_type))


def _common(parser: argparse.ArgumentParser, needs_input: bool = True):
    if needs_input:
        parser.add_argument('--input', help='Input file (or fit output directory for report)')
    parser.add_argument('--output-dir', dest='output_dir', help='Directory for output files')
    parser.add_argument('--seed', type=int, help='Random seed')
    parser.add_argument('--config', help='JSON file with parameter overrides')
    parser.add_argument('--diagnostics-log', dest='diagnostics_log', help='Write one line per extracted bicluster here')


def _fit_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--family', choices=sorted(FAMILIES), help='Model family (default: from the dataset)')
    parser.add_argument('--pool-size', dest='pool_size', type=int, help='Number of sampled hypotheses')
    parser.add_argument('--no-prefilter', dest='prefilter', action='store_false', default=None,
                        help='Keep every hypothesis column before factorizing')
    parser.add_argument('--no-exclusive', dest='exclusive', action='store_false', default=None,
                        help='Skip the exclusive assignment of shared data')
    parser.add_argument('--no-post-test', dest='post_test', action='store_false', default=None,
                        help='Keep every refitted factor regardless of the statistical test')
    parser.add_argument('--corr-threshold', dest='corr_threshold', type=float, help='Conflict threshold between factors')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='underfit', description='Nonnegative matrix underapproximation and robust multi-model fitting')
    sub = parser.add_subparsers(dest='command', required=True)

    nmu = sub.add_parser('nmu', help='Factor a nonnegative CSV matrix')
    _common(nmu)
    nmu.add_argument('--rank', type=int, help='Number of factors')
    nmu.add_argument('--tau', type=float, help='Relative change tolerance')
    nmu.add_argument('--residual-weight', dest='residual_weight', type=float,
                     help='Weight of ½‖R‖² in the R-update, 0 or more')
    nmu.add_argument('--max-iters', dest='max_iters', type=int, help='ADMM iteration budget per factor')
    nmu.add_argument('--compare-svd', dest='compare_svd', action='store_true', default=None,
                     help='Also run SVD deflation and count its negative residuals')

    synth = sub.add_parser('synth', help='Generate a labeled synthetic dataset')
    _common(synth, needs_input=False)
    synth.add_argument('--kind', choices=sorted(GENERATORS), help='Dataset kind')
    synth.add_argument('--k', type=int, help='Number of models')
    synth.add_argument('--n-points', dest='n_points', type=int, help='Total number of data')
    synth.add_argument('--noise', type=float, help='Gaussian noise standard deviation')
    synth.add_argument('--outlier-ratio', dest='outlier_ratio', type=float, help='Fraction of outliers')

    fit = sub.add_parser('fit', help='Fit multiple models to a dataset')
    _common(fit)
    fit.add_argument('--sigma', type=float, help='Inlier scale')
    _fit_flags(fit)

    sweep = sub.add_parser('sweep', help='Fit once per sigma')
    _common(sweep)
    sweep.add_argument('--sigma', dest='sigmas', type=float, nargs='+', help='Inlier scales')
    _fit_flags(sweep)

    report = sub.add_parser('report', help='Heat maps and model table of a fit output directory')
    _common(report)
    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """Exit status: 0 on success, 1 on a library error, 2 on anything unexpected"""
    args = build_parser().parse_args(argv)
    setup_logging(diagnostics_log=args.diagnostics_log)
    subscribe_progress()

    try:
        config = build_run_config(args.command, vars(args), args.config)
        if config.command == 'nmu':
            cmd_nmu(config)
        elif config.command == 'synth':
            cmd_synth(config)
        elif config.command == 'fit':
            cmd_fit(config)
        elif config.command == 'sweep':
            await cmd_sweep(config)
        else:
            cmd_report(config)
        return 0
    except (UnderfitError, FileNotFoundError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return 2
    finally:
        event_bell.clear()


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
