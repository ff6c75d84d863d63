"""Command-line front end for the credit-cycle simulator.

Run from the repository root::

    python bank_credit_cycles/credit_cli.py run --preset baseline --paths 1 --seed 42
    python bank_credit_cycles/credit_cli.py sweep --preset securitization-fair --grid d0=0.05:0.5:10
    python bank_credit_cycles/credit_cli.py report runs/cds-fair-* runs/cds-negative-basis-*
    python bank_credit_cycles/credit_cli.py list-presets

Tables, CSV and JSON go to stdout; log lines go to stderr. Exit codes: 0 success,
2 invalid configuration, 3 I/O failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from engine import run_monte_carlo, sweep
from errors import ConfigParseError, CreditCycleError
from output_utils import format_summary, format_table, load_manifest, report_frame, write_bundle
from presets import PRESETS, get_preset
from scenario_config import ScenarioConfig, parse_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
MAX_GRID_KEYS = 2


def _add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS), help="Start from a named scenario")
    parser.add_argument("--config", help="Config file path or http(s) URL, applied over the preset")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE", help="Override one key"
    )
    parser.add_argument("--paths", type=int, default=1000, help="Number of Monte Carlo paths")
    parser.add_argument("--seed", type=int, default=0, help="Master seed")
    parser.add_argument("--workers", type=int, default=1, help="Worker processes for the paths")


def _add_format_argument(parser: argparse.ArgumentParser, default: str = "table") -> None:
    parser.add_argument("--format", choices=("csv", "json", "table"), default=default, help="Output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="credit-cycles", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="Logging level"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario and write an output bundle")
    _add_scenario_arguments(run)
    run.add_argument("--manifest", help="Re-run the scenario recorded in a bundle directory")
    run.add_argument("--out", default="runs", help="Directory that receives the run bundle")
    _add_format_argument(run)

    grid = commands.add_parser("sweep", help="Comparative statics over one or two config keys")
    _add_scenario_arguments(grid)
    grid.add_argument(
        "--grid", action="append", default=[], metavar="KEY=START:STOP:COUNT", help="Grid axis (at most two)"
    )
    grid.add_argument("--out", help="Also write the sweep table as CSV into this directory")
    _add_format_argument(grid)

    report = commands.add_parser("report", help="Compare run bundles side by side")
    report.add_argument("bundles", nargs="+", help="Bundle directories written by 'run'")
    _add_format_argument(report)

    listing = commands.add_parser("list-presets", help="List the named scenarios")
    _add_format_argument(listing)
    return parser


def resolve_scenario(args: argparse.Namespace) -> tuple[str, ScenarioConfig]:
    base = get_preset(args.preset).config() if args.preset else None
    config = parse_config(args.config, args.overrides, base=base)
    if args.preset:
        name = args.preset
    elif args.config:
        name = Path(args.config).stem or "custom"
    else:
        name = "custom"
    return name, config


def parse_grid(specs: list[str]) -> dict[str, np.ndarray]:
    """``key=start:stop:count`` axes as evenly spaced values."""
    if not 1 <= len(specs) <= MAX_GRID_KEYS:
        raise ConfigParseError(f"sweep needs one or two --grid axes, got {len(specs)}", field="grid")
    axes = {}
    for spec in specs:
        key, sep, bounds = spec.partition("=")
        parts = bounds.split(":")
        if not sep or len(parts) != 3:
            raise ConfigParseError(f"expected KEY=START:STOP:COUNT, got '{spec}'", field="grid")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigParseError(f"grid bounds must be numbers, got '{spec}'", field=key.strip()) from None
        if count < 1:
            raise ConfigParseError(f"grid count must be positive, got {count}", field=key.strip())
        axes[key.strip()] = np.linspace(start, stop, count)
    return axes


def _emit_frame(frame: pd.DataFrame, fmt: str, index: bool = True) -> None:
    if fmt == "csv":
        sys.stdout.write(frame.to_csv(index=index, lineterminator="\n"))
    elif fmt == "json":
        sys.stdout.write(frame.reset_index().to_json(orient="records", indent=2) + "\n")
    else:
        sys.stdout.write(format_table(frame))


def command_run(args: argparse.Namespace) -> int:
    if args.manifest:
        name, config, seed, n_paths = load_manifest(args.manifest)
    else:
        name, config = resolve_scenario(args)
        seed, n_paths = args.seed, args.paths
    summary = run_monte_carlo(config, n_paths, seed, args.workers)
    run_dir = write_bundle(args.out, name, config, summary)
    logger.info(f"{name}: bundle at {run_dir}")

    if args.format == "csv":
        sys.stdout.write(summary.records.to_csv(index=False, lineterminator="\n"))
    elif args.format == "json":
        sys.stdout.write(json.dumps({"name": name, "bundle": str(run_dir), **summary.to_dict()}, indent=2) + "\n")
    else:
        sys.stdout.write(format_summary(summary, name))
    return EXIT_OK


def command_sweep(args: argparse.Namespace) -> int:
    name, config = resolve_scenario(args)
    table = sweep(config, parse_grid(args.grid), args.paths, args.seed, workers=args.workers)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        table.to_csv(out / f"{name}-sweep.csv", index=False, lineterminator="\n")
    _emit_frame(table, args.format, index=False)
    return EXIT_OK


def command_report(args: argparse.Namespace) -> int:
    _emit_frame(report_frame(args.bundles), args.format)
    return EXIT_OK


def command_list_presets(args: argparse.Namespace) -> int:
    frame = pd.DataFrame(
        [{"preset": p.name, "situation": p.situation, "expected": p.expected} for p in PRESETS.values()]
    ).set_index("preset")
    _emit_frame(frame, args.format)
    return EXIT_OK


COMMANDS = {
    "run": command_run,
    "sweep": command_sweep,
    "report": command_report,
    "list-presets": command_list_presets,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except OSError as e:
        logger.error(str(e))
        return EXIT_IO
    except (CreditCycleError, ValueError) as e:
        logger.error(str(e))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
