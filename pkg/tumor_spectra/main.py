"""
tumor-spectra command-line interface

Runs the stationary, spectral, threshold, epsilon-spectrum, simulation and
sweep computations from a JSON configuration and writes CSV/JSON results.
"""

import argparse
import json
import logging
import sys
import time
import warnings
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from . import __version__
from .config import Settings, parse_config
from .errors import ConfigurationError, TumorSpectraError
from .formatter import ResultWriter, format_console_summary, utc_now
from .stability_analyzer import COMMANDS, StabilityAnalyzer, error_block
from .tools.cache import StateCache

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_FAILURE = 3


def _configure_logging(level: int, suppress_warnings: bool = False) -> None:
    """Configure root logging and optionally silence Python warnings."""

    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    root = logging.getLogger()
    root.setLevel(level)
    if suppress_warnings:
        warnings.filterwarnings("ignore")
    logging.captureWarnings(True)


def _report_error(exc: BaseException, verbose: bool) -> None:
    """Print the machine-readable error block (and a hint) on stderr."""
    print(json.dumps(error_block(exc), sort_keys=True, default=str), file=sys.stderr)
    if verbose and not isinstance(exc, TumorSpectraError):
        import traceback

        traceback.print_exc()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", "-c", required=True, help="JSON run configuration file"
    )
    common.add_argument(
        "--out",
        "-o",
        default=None,
        help="Output directory (default: TUMOR_SPECTRA_OUTPUT_DIR or ./results)",
    )
    common.add_argument(
        "--jobs",
        "-j",
        type=int,
        default=None,
        help="Worker threads for per-degree work and sweep cells (default: 1)",
    )
    common.add_argument(
        "--no-cache",
        action="store_true",
        help="Do not read or write the stationary-state cache",
    )
    common.add_argument(
        "--continue-on-error",
        action="store_true",
        default=False,
        help="Keep going when an optional stage (oracle, threshold, fits) fails",
    )
    noise = common.add_mutually_exclusive_group()
    noise.add_argument(
        "--verbose", "-v", action="store_true", help="Explain each stage, log DEBUG"
    )
    noise.add_argument(
        "--quiet", "-q", action="store_true", help="Only errors; no progress lines"
    )

    parser = argparse.ArgumentParser(
        prog="tumor-spectra",
        description=(
            "Linear stability of radially symmetric tumors in a Stokes flow:\n"
            "stationary states, spectral thresholds and time-domain checks."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  tumor-spectra stationary --config linear.json
  tumor-spectra threshold --config linear.json --out results/threshold
  tumor-spectra sweep --config linear.json --jobs 4 --continue-on-error

Exit codes: 0 success, 2 invalid input, 3 solver failure.
        """,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "stationary": "Stationary radius and profiles (r, sigma, v, p)",
        "spectrum": "Per-degree gamma_l, alpha_l and the spectral summary",
        "threshold": "gamma_star, l_star, alpha0 and the Stokes oracle table",
        "eps-spectrum": "Slow/fast branches of the modal operators in epsilon",
        "simulate": "Linear modal or nonlinear radial time evolution",
        "sweep": "Stability map over (gamma, epsilon)",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: Optional[List[str]] = None):
    """Main CLI entry point."""
    # Load environment variables from .env file
    load_dotenv()

    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = Settings()
    except ValueError as e:
        _report_error(ConfigurationError(str(e)), args.verbose)
        sys.exit(EXIT_VALIDATION)

    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.ERROR
    else:
        level = getattr(logging, settings.log_level)
    _configure_logging(level, suppress_warnings=args.quiet)

    out_dir = Path(args.out or settings.output_dir)
    jobs = args.jobs if args.jobs is not None else settings.jobs

    try:
        config = parse_config(args.config)
        cache = StateCache(None if args.no_cache else settings.cache_dir)
        analyzer = StabilityAnalyzer(
            config,
            cache=cache,
            jobs=jobs,
            continue_on_error=args.continue_on_error,
            verbose=args.verbose,
            quiet=args.quiet,
        )

        started_at = utc_now()
        start_time = time.time()
        results = analyzer.run(args.command)
        duration = time.time() - start_time
        logger.info("%s finished in %.1f s", args.command, duration)

        ResultWriter(out_dir).write(results, config, started_at)
        if not args.quiet:
            print(format_console_summary(results, out_dir))

    except TumorSpectraError as e:
        _report_error(e, args.verbose)
        sys.exit(e.exit_code)
    except KeyboardInterrupt as e:
        _report_error(e, False)
        sys.exit(EXIT_FAILURE)
    except Exception as e:
        _report_error(e, args.verbose)
        sys.exit(EXIT_FAILURE)

    if not results["success"]:
        for block in results["errors"]:
            print(json.dumps(block, sort_keys=True, default=str), file=sys.stderr)
        sys.exit(EXIT_FAILURE)
    sys.exit(EXIT_OK)


def cli_entry_point():
    """Entry point for console script."""
    main()


if __name__ == "__main__":
    main()
