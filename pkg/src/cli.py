"""Command-line entry point: simulate, compare, fixtures."""
import argparse
import logging
import sys
from pathlib import Path

from src.compare import DEFAULT_REFERENCE, compare, exceeds_thresholds, format_report, load_reference
from src.config import EXIT_INVALID_SCENARIO, EXIT_OK, EXIT_RUNTIME_ERROR, EXIT_THRESHOLD_EXCEEDED
from src.errors import MissingReference, ScenarioError
from src.scenario import fixture_path, list_fixtures, load_scenario, with_overrides
from src.simulator import run
from src.storage import load_json


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _resolve_scenario(value: str) -> Path:
    """A scenario path, or the name of a bundled fixture."""
    path = Path(value)
    if not path.exists() and value in list_fixtures():
        return fixture_path(value)
    return path


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(_resolve_scenario(args.scenario))
        scenario = with_overrides(
            scenario,
            n_rays=args.n_rays,
            delta_phi=args.delta_phi,
            delta_tau_ns=args.delta_tau,
            combining=args.combining,
        )
    except ScenarioError as e:
        print(f"✗ Invalid scenario: {e}")
        return EXIT_INVALID_SCENARIO

    out_dir = Path(args.out_dir) if args.out_dir else Path("out") / scenario.name
    return run(scenario, out_dir, fmt=args.format, html=args.html, threads=args.threads)


def cmd_compare(args) -> int:
    print("Comparing against measurements...")

    try:
        stats = [load_json(Path(path)) for path in args.stats]
        reference = load_reference(Path(args.reference))
    except (OSError, ValueError) as e:
        print(f"✗ Could not read input: {e}")
        return EXIT_INVALID_SCENARIO

    try:
        report = compare(stats, reference)
    except (MissingReference, KeyError) as e:
        print(f"✗ Comparison failed: {e}")
        return EXIT_RUNTIME_ERROR

    title, body = format_report(report)
    print(f"✓ {title}")
    print(body)

    failed = exceeds_thresholds(report)
    if failed:
        print(f"✗ Threshold exceeded: {', '.join(failed)}")
        return EXIT_THRESHOLD_EXCEEDED
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for name in list_fixtures():
            print(name)
        return EXIT_OK

    if not args.name:
        print("✗ fixtures emit needs a fixture name")
        return EXIT_INVALID_SCENARIO
    try:
        text = fixture_path(args.name).read_text()
    except ValueError as e:
        print(f"✗ {e}")
        return EXIT_INVALID_SCENARIO

    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwave-icm",
        description="Single-reflection mmWave cluster ray tracer",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Increase verbosity")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Simulate a scenario")
    simulate.add_argument("--scenario", required=True, help="Scenario JSON file or bundled fixture name")
    simulate.add_argument("--out-dir", default=None, help="Output directory (default out/<scenario>)")
    simulate.add_argument("--n-rays", type=int, default=None, help="Diffuse rays per cluster")
    simulate.add_argument("--delta-phi", type=float, default=None, help="Angle resolution in degrees")
    simulate.add_argument("--delta-tau", type=float, default=None, help="Delay resolution in ns")
    simulate.add_argument("--format", choices=("csv", "json"), default="csv", help="Profile format")
    simulate.add_argument("--combining", choices=("coherent", "incoherent"), default=None)
    simulate.add_argument("--threads", type=int, default=None, help="Worker threads (default RT_ICM_THREADS)")
    simulate.add_argument("--html", action="store_true", default=False, help="Also write summary.html")
    simulate.set_defaults(handler=cmd_simulate)

    comparison = commands.add_parser("compare", help="Compare cluster stats with measurements")
    comparison.add_argument("--stats", required=True, nargs="+", help="cluster_stats.json file(s)")
    comparison.add_argument("--reference", default=str(DEFAULT_REFERENCE), help="Measured reference table")
    comparison.set_defaults(handler=cmd_compare)

    fixtures = commands.add_parser("fixtures", help="List or print bundled scenarios")
    fixtures.add_argument("action", choices=("list", "emit"))
    fixtures.add_argument("name", nargs="?", default=None)
    fixtures.add_argument("--out", default=None, help="Write the fixture here instead of stdout")
    fixtures.set_defaults(handler=cmd_fixtures)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the command line."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except ValueError as e:
        # RT_ICM_THREADS and other configuration problems
        print(f"✗ {e}")
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
