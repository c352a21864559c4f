"""Command-line interface for producer-scrounger.

Usage:
    psg ess --game foraging --n 2 --s 0.5 --gamma 1
    psg sweep --n 3 --s 0.4 --gamma-range 0:3:0.01             # Rich table
    psg sweep --n 4 --gamma-range 0:4:0.01 --second-axis s:0.2:0.6:0.2 --out fig.csv
    psg sweep --game company --n 4 --s 0.6 --c 0.05 --gamma-range 0:3:0.01 --format json
    psg verify --game company --utility linear
    psg sweep --config run.json --workers 4 -v

Exit status: 0 ok, 1 error, 2 degenerate game (ess), 64 usage or config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Any, NoReturn, Optional

import numpy as np

from producer_scrounger.config import RunConfig, build_config, load_config_file
from producer_scrounger.core.analysis import (
    RC_COLUMNS,
    assert_no_reverse_correlation,
    detect_rc,
    necessary_condition_check,
    sweep,
)
from producer_scrounger.core.company import parse_utility
from producer_scrounger.core.errors import (
    ConfigError,
    InternalInvariantError,
    ProducerScroungerError,
)
from producer_scrounger.core.foraging import ForagingParams, analytic_ess
from producer_scrounger.core.models import EssClassification, SweepTable
from producer_scrounger.core.solver import find_ess
from producer_scrounger.core.suites import (
    PropertyResult,
    company_suite,
    foraging_suite,
    modified_foraging_suite,
)
from producer_scrounger.export import format_output, format_rich_table

logger = logging.getLogger("producer_scrounger")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 64

# argparse dest -> config key
_CONFIG_FLAGS = (
    "game",
    "n",
    "s",
    "gamma",
    "c",
    "a",
    "p_succ",
    "utility",
    "producer_keeps_all",
    "gamma_range",
    "second_axis",
    "min_drop",
    "out",
    "format",
    "grid_points",
    "root_tol",
    "gap_tol",
    "workers",
)


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits 64 on bad usage (2 means Degenerate here)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    game = common.add_argument_group("game")
    game.add_argument(
        "--game",
        choices=["foraging", "foraging-modified", "company"],
        default=None,
        help="Game to analyse (default: foraging)",
    )
    game.add_argument("--n", type=int, default=None, help="Group size (default: 2)")
    game.add_argument("--s", type=float, default=None, help="Finder's share / own-product weight (default: 0.5)")
    game.add_argument("--gamma", type=float, default=None, help="Production capacity for ess (default: 1)")
    game.add_argument("--c", type=float, default=None, help="Producer cost, company game (default: 0)")
    game.add_argument("--a", type=float, default=None, help="Scrounger quality factor, company game (default: 0.5)")
    game.add_argument("--p-succ", type=float, default=None, help="Success probability, company game (default: 0.5)")
    game.add_argument(
        "--utility",
        default=None,
        help="linear, exp:RATE or cap:CAP (default: exp:2)",
    )
    game.add_argument(
        "--producer-keeps-all",
        action="store_const",
        const=True,
        default=None,
        help="Modified foraging: producer payoff F_P instead of s*F_P",
    )

    run = common.add_argument_group("run")
    run.add_argument("--gamma-range", default=None, metavar="LO:HI:STEP", help="Gamma grid for sweep")
    run.add_argument(
        "--second-axis",
        default=None,
        metavar="NAME:LO:HI:STEP",
        help="Repeat the sweep over s or c",
    )
    run.add_argument("--min-drop", type=float, default=None, help="Smallest reported RC drop (default: 1e-6)")
    run.add_argument("--grid-points", type=int, default=None, help="Solver sign-scan grid (default: 2001)")
    run.add_argument("--root-tol", type=float, default=None, help="Solver root tolerance (default: 1e-10)")
    run.add_argument("--gap-tol", type=float, default=None, help="Payoff-gap zero tolerance (default: 1e-9)")
    run.add_argument("--workers", type=int, default=None, help="Threads used by sweeps (default: 1)")
    run.add_argument("--config", type=Path, default=None, help="JSON file of settings; flags override it")

    out = common.add_argument_group("output")
    out.add_argument("-o", "--out", type=Path, default=None, help="Output file (default: stdout)")
    out.add_argument(
        "-f", "--format",
        choices=["csv", "json", "markdown"],
        default=None,
        help="Output format (default: rich for terminal, csv for files)",
    )
    out.add_argument(
        "-v", "--verbose",
        action="count",
        default=0,
        help="Log progress (-v) or debug detail (-vv) to stderr",
    )
    return common


def build_parser() -> UsageArgumentParser:
    parser = UsageArgumentParser(
        prog="psg",
        description="ESS, gamma sweeps and Reverse Correlation for producer-scrounger games",
    )
    subparsers = parser.add_subparsers(dest="command", help="Commands")
    common = _common_flags()
    subparsers.add_parser("ess", parents=[common], help="Solve one game at --gamma")
    subparsers.add_parser("sweep", parents=[common], help="Sweep gamma and detect Reverse Correlation")
    subparsers.add_parser("verify", parents=[common], help="Run the property checks for a game")
    return parser


def configure_logging(verbosity: int) -> None:
    """Route package logs through rich on stderr."""
    from rich.console import Console
    from rich.logging import RichHandler

    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def main(args: Optional[list[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    try:
        parsed = parser.parse_args(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if parsed.command is None:
        parser.print_help()
        return EXIT_OK

    configure_logging(parsed.verbose)
    commands = {"ess": cmd_ess, "sweep": cmd_sweep, "verify": cmd_verify}
    try:
        file_values = load_config_file(parsed.config) if parsed.config else {}
        flag_values = {key: getattr(parsed, key) for key in _CONFIG_FLAGS}
        config = build_config(file_values, flag_values)
        if config.extrapolated:
            logger.warning("utility %s is not the reference choice; results are extrapolated", config.utility)
        return commands[parsed.command](config)
    except ConfigError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProducerScroungerError, InternalInvariantError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def cmd_ess(config: RunConfig) -> int:
    """Execute the ess command."""
    if config.sweep is not None:
        raise ConfigError("ess solves a single game; use --gamma instead of --gamma-range")

    game = config.game_at()
    result = find_ess(game, config.solver_config())
    print(f"{game.label}: {result.summary()}")
    if result.verified is not None:
        print(f"verified: {'yes' if result.verified else 'no'}")

    if config.game == "foraging" and config.s < 1:
        expected = analytic_ess(ForagingParams(config.n, config.s, config.gamma))
        agrees = expected.classification is result.classification and (
            expected.p_star is None
            or result.p_star is None
            or abs(expected.p_star - result.p_star) <= 1e-8
        )
        print(f"analytic: {expected.summary()} ({'agrees' if agrees else 'DISAGREES'})")
        if not agrees:
            logger.warning("numeric and analytic ESS differ at gamma=%g", config.gamma)

    return EXIT_DEGENERATE if result.classification is EssClassification.DEGENERATE else EXIT_OK


def _second_values(config: RunConfig) -> list[Optional[float]]:
    if config.second_axis is None:
        return [None]
    return list(config.second_axis.values())


def run_sweep(config: RunConfig) -> SweepTable:
    """Run the configured sweep, one block per second-axis value.

    The metadata echoes the whole configuration and lists the RC intervals
    found in each block for both payoff columns.
    """
    if config.sweep is None:
        raise ConfigError("sweep needs --gamma-range LO:HI:STEP")
    spec = config.sweep
    axis = config.second_axis.name if config.second_axis else None
    cfg = config.solver_config()
    checkpoints = [float(g) for g in np.linspace(spec.gamma_lo, spec.gamma_hi, 5)]

    rows = []
    intervals: dict[str, list[dict[str, Any]]] = {column: [] for column in RC_COLUMNS}
    first_meta: dict[str, Any] = {}
    for value in _second_values(config):
        family = config.family(**({axis: value} if axis else {}))
        table = sweep(family, spec.gamma_lo, spec.gamma_hi, spec.step, cfg, workers=config.workers)
        if necessary_condition_check(family, checkpoints):
            assert_no_reverse_correlation(table, config.min_drop)
        for column in RC_COLUMNS:
            for found in detect_rc(table, config.min_drop, column):
                logger.info("%s: RC in %s on [%g, %g]", family.label, column, found.gamma_lo, found.gamma_hi)
                entry = found.as_dict()
                if axis:
                    entry[axis] = value
                intervals[column].append(entry)
        rows.extend(dataclasses.replace(row, second=value) for row in table)
        first_meta = first_meta or table.metadata

    metadata = {
        **first_meta,
        "game": config.family().label if not axis else f"{config.game} over {axis}",
        "config": config.echo(),
        "rc_intervals": intervals,
        "extrapolated": config.extrapolated,
    }
    if axis:
        metadata["second_axis"] = {"name": axis, "values": _second_values(config)}
        metadata["params"] = {k: v for k, v in first_meta.get("params", {}).items() if k != axis}
    return SweepTable(rows=tuple(rows), metadata=metadata, second_name=axis)


def _rc_lines(table: SweepTable) -> list[str]:
    lines = []
    for column, found in table.metadata.get("rc_intervals", {}).items():
        text = ", ".join(
            f"[{i['gamma_lo']:.6g}, {i['gamma_hi']:.6g}] drop {i['drop']:.4g}"
            + (f" ({table.second_name}={i[table.second_name]:g})" if table.second_name else "")
            for i in found
        )
        lines.append(f"RC intervals ({column}): {text or 'none'}")
    return lines


def cmd_sweep(config: RunConfig) -> int:
    """Execute the sweep command."""
    table = run_sweep(config)
    fmt = config.output.format
    path = config.output.path

    if path is not None:
        output_text = format_output(table, fmt or "csv")
        try:
            path.write_text(output_text)
        except OSError as exc:
            print(f"Error: cannot write {path}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        logger.info("Wrote %d rows to %s", len(table), path)
        for line in _rc_lines(table):
            print(line, file=sys.stderr)
    elif fmt is not None:
        print(format_output(table, fmt))
    else:
        # Rich tables go directly to console, not through string
        format_rich_table(table)
        for line in _rc_lines(table):
            print(line)
    return EXIT_OK


def run_suite(config: RunConfig) -> list[PropertyResult]:
    """Property checks relevant to the configured game."""
    gamma_range = None
    if config.sweep is not None:
        gamma_range = (config.sweep.gamma_lo, config.sweep.gamma_hi, config.sweep.step)
    cfg = config.solver_config()
    if config.game == "foraging":
        return foraging_suite(config.n, config.s, gamma_range, cfg, config.min_drop)
    if config.game == "foraging-modified":
        return modified_foraging_suite(
            config.n, config.s, config.producer_keeps_all, gamma_range, cfg, config.min_drop
        )
    return company_suite(
        config.n,
        config.s,
        config.c,
        config.a,
        config.p_succ,
        parse_utility(config.utility),
        gamma_range,
        cfg,
        config.min_drop,
    )


def cmd_verify(config: RunConfig) -> int:
    """Execute the verify command."""
    from rich.console import Console
    from rich.table import Table as RichTable

    results = run_suite(config)
    rich_table = RichTable(
        title=f"verify {config.game} (n={config.n}, s={config.s:g})",
        show_header=True,
        header_style="bold cyan",
        border_style="blue",
        title_style="bold magenta",
    )
    for col in ("property", "status", "worst error", "detail"):
        rich_table.add_column(col, overflow="fold")
    for r in results:
        rich_table.add_row(
            r.name,
            "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]",
            f"{r.worst_error:.3g}",
            r.detail,
        )
    Console().print(rich_table)

    for r in results:
        if r.name.startswith("RC intervals") or not r.passed:
            print(f"{r.name}: {r.detail}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} properties passed")
    return EXIT_OK if passed == len(results) else EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
