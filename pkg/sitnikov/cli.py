"""
Command-line interface for sitnikov.
"""

import argparse
import logging
import sys
from typing import List

from .core.errors import NumericalError
from .core.models import IntegratorConfig, RunConfig
from .core.runner import PartialResult, SitnikovRunner, write_report

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def float_list(text: str) -> List[float]:
    """Parse a comma separated list of numbers."""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--abs-tol", type=float, default=1e-12, help="Absolute tolerance (default: 1e-12)"
    )
    common.add_argument(
        "--rel-tol", type=float, default=1e-12, help="Relative tolerance (default: 1e-12)"
    )
    common.add_argument(
        "--format",
        dest="output_format",
        choices=["csv", "json", "markdown"],
        default="csv",
        help="Output format (default: csv)",
    )
    common.add_argument("--out", dest="output_path", help="Output file (default: stdout)")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log progress (-vv for debug output)"
    )

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument("--m", type=int, required=True, help="Orbit is 2m*pi periodic")
    family.add_argument("--p", type=int, required=True, help="Orbit has 2p zeros per period")
    family.add_argument(
        "--parity", choices=["odd", "even"], default="odd", help="Orbit symmetry (default: odd)"
    )

    parser = argparse.ArgumentParser(
        prog="sitnikov",
        description="Symmetric periodic orbits of the Sitnikov problem and their stability.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  sitnikov table1 --n-max 10
  sitnikov slope --m 2 --p 1 --parity even
  sitnikov continue --m 2 --p 1 --e 0,0.01,0.02 --format json
  sitnikov period --T 12.566370614359172
        """,
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    table1_parser = subparsers.add_parser(
        "table1", parents=[common], help="Reproduce (eta_n, h_n, A_n) against the reference"
    )
    table1_parser.add_argument("--n-max", type=int, default=10, help="Last row (default: 10)")

    scan_parser = subparsers.add_parser(
        "scan", parents=[common], help="A_n scan with self-convergence certificates"
    )
    scan_parser.add_argument("--n-max", type=int, required=True, help="Last row")

    subparsers.add_parser("slope", parents=[common, family], help="Trace slope at e = 0")

    continue_parser = subparsers.add_parser(
        "continue", parents=[common, family], help="Continue a family into e > 0"
    )
    continue_parser.add_argument(
        "--e", dest="e_values", type=float_list, required=True, help="Eccentricities, e.g. 0,0.01"
    )

    period_parser = subparsers.add_parser("period", parents=[common], help="Period function rows")
    period_parser.add_argument("--h", dest="h_values", type=float_list, help="Energies in (-2, 0)")
    period_parser.add_argument("--T", dest="T_values", type=float_list, help="Target periods")

    structure_parser = subparsers.add_parser(
        "structure", parents=[common], help="Half-period Poincare matrices of an odd orbit"
    )
    structure_parser.add_argument("--eta", type=float, required=True, help="Initial velocity")
    structure_parser.add_argument("--n-max", type=int, default=4, help="Last n (default: 4)")

    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Validate the parsed arguments into a RunConfig."""
    return RunConfig(
        command=args.command,
        m=getattr(args, "m", None),
        p=getattr(args, "p", None),
        n_max=getattr(args, "n_max", None),
        parity=getattr(args, "parity", "odd"),
        e_values=getattr(args, "e_values", None) or [],
        h_values=getattr(args, "h_values", None) or [],
        T_values=getattr(args, "T_values", None) or [],
        eta=getattr(args, "eta", None),
        tolerances=IntegratorConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol),
        output_format=args.output_format,
        output_path=args.output_path,
    )


def configure_logging(verbosity: int) -> None:
    if verbosity <= 0:
        return
    logging.basicConfig(
        level=logging.DEBUG if verbosity > 1 else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main() -> None:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        return

    configure_logging(args.verbose)

    try:
        config = build_config(args)
        runner = SitnikovRunner(output_format=config.output_format)
        report = runner.run(config)
        write_report(report, config.output_path)
        if config.output_path:
            print(f"Wrote {config.command} report to '{config.output_path}'")

    except PartialResult as e:
        write_report(e.report, args.output_path)
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_NUMERICAL)
    except NumericalError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_NUMERICAL)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
