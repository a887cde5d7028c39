"""Command-line runner: ``losmimo [SCENARIO] --config FILE --out FILE``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys

from . import __version__
from .config import Params, format_value, load_config, parse_config
from .errors import ConfigError, ConvergenceError, DomainError
from .geometry import SPEED_OF_LIGHT, SPEED_OF_LIGHT_APPROX
from .scenarios import SCENARIOS, RunContext

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="losmimo",
        description="Line-of-sight MIMO array design experiments.",
        epilog="scenarios: " + ", ".join(SCENARIOS),
    )
    parser.add_argument("command", nargs="?", default="run",
                        help="'run' (scenario from the config) or a scenario name")
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--scenario", help="scenario name; overrides the config's 'scenario' key")
    parser.add_argument("--out", help="CSV output path (default: standard output)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweep points")
    parser.add_argument("--c-approx", action="store_true", help="use c = 3e8 m/s")
    parser.add_argument("--quad-order", type=int, default=16, help="Gauss-Legendre points per axis")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config entry (repeatable)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _entries(args):
    entries = load_config(args.config) if args.config else {}
    for item in args.set:
        override = parse_config(item.replace("=", " = ", 1), "--set")
        if not override:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        entries.update(override)
    return entries


def _scenario_name(args, entries):
    names = [n for n in (args.scenario, None if args.command == "run" else args.command) if n]
    if len(set(names)) > 1:
        raise ConfigError(f"conflicting scenario names: {', '.join(names)}")
    name = names[0] if names else entries.get("scenario")
    if name is None:
        raise ConfigError("no scenario given (positional command, --scenario, or 'scenario' key)")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    return name


def render_csv(name, params, ctx, output):
    """CSV text with ``#`` provenance lines; byte-identical for identical input."""
    buf = io.StringIO()
    buf.write(f"# losmimo {__version__}\n")
    buf.write(f"# scenario = {name}\n")
    buf.write(f"# config_sha256 = {params.digest()}\n")
    buf.write(f"# c_m_per_s = {format_value(ctx.c)}\n")
    for key in sorted(params.resolved):
        buf.write(f"# {key} = {format_value(params.resolved[key])}\n")
    for note in output.notes:
        buf.write(f"# note: {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(output.columns)
    for row in output.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def run(args):
    if args.threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {args.threads}")
    if args.quad_order < 2:
        raise ConfigError(f"--quad-order must be >= 2, got {args.quad_order}")
    entries = _entries(args)
    name = _scenario_name(args, entries)
    entries.pop("scenario", None)
    ctx = RunContext(
        c=SPEED_OF_LIGHT_APPROX if args.c_approx else SPEED_OF_LIGHT,
        threads=args.threads,
        quad_order=args.quad_order,
    )
    params = Params(entries)
    scenario = SCENARIOS[name]
    resolved = scenario.resolve(params, ctx)
    unused = params.unused()
    if unused:
        raise ConfigError(f"parameters not used by scenario {name}: {', '.join(unused)}")
    output = scenario.compute(resolved, ctx)
    text = render_csv(name, params, ctx, output)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"{name}: wrote {len(output.rows)} rows to {args.out}")
    else:
        sys.stdout.write(text)
    for line in output.summary:
        print(line, file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
