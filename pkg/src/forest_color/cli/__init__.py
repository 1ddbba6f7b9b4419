"""Command-line front end.

Subcommands::

    forest-color solve <file.col> [--exhaustive] [--jobs K] [--stats out.json]
                       [-o coloring [--print-coloring]]
    forest-color verify <file.col> <coloring>
    forest-color gen <kind:key=value,...> [-o file.col]
    forest-color analyze [--lp [--literal-lp]] [--work-factor 2,6,6]
                         [--rate EXPR --vertices V] [--schedules]
    forest-color bench <dir> [--oracle-cap 20] [--jobs K]

Exit codes: 0 colorable or ok, 1 not colorable (or a failed check), 2 usage,
parse and I/O errors. Logs go to standard error; stdout carries results only.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import structlog

from forest_color.analysis import (
    build_lp,
    parse_rate_terms,
    per_root_base,
    rate,
    schedule_rate,
    solve_lp,
    work_factor,
)
from forest_color.base import SolverConfig, label_of
from forest_color.bushy import partition_bound
from forest_color.cli.dimacs import parse_dimacs, write_dimacs
from forest_color.cli.files import format_coloring, load_coloring, save_coloring, save_stats
from forest_color.cli.generators import generate, parse_spec
from forest_color.graph import Graph
from forest_color.solver import DEFAULT_ORACLE_CAP, brute_force, solve_3coloring, verify_coloring

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_NOT_COLORABLE = 1
EXIT_USAGE = 2


def configure_logging(verbosity: int) -> None:
    """Route structlog to standard error at warning, info (-v) or debug (-vv)."""
    level = (logging.WARNING, logging.INFO)[verbosity] if verbosity < 2 else logging.DEBUG
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def _read_graph(path: Path) -> Graph:
    return parse_dimacs(path.read_text("utf-8"))


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        exhaustive=getattr(args, "exhaustive", False),
        jobs=args.jobs,
        strict_partition=getattr(args, "strict_partition", False),
        dominated_elimination=getattr(args, "dominated", False),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    g = _read_graph(args.file)
    result = solve_3coloring(g, _config(args))
    if args.stats is not None:
        status = "colorable" if result.colorable else "not-colorable"
        bound = sum(partition_bound(c) for c in result.stats.partitions)
        extra = {"status": status, "partition.bound": bound}
        save_stats(path=args.stats, stats=result.stats, extra=extra)
    if result.coloring is None:
        print("not colorable")
        return EXIT_NOT_COLORABLE
    print("colorable")
    if args.output is not None:
        save_coloring(path=args.output, coloring=result.coloring)
    if args.output is None or args.print_coloring:
        sys.stdout.write(format_coloring(result.coloring))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = _read_graph(args.file)
    coloring = load_coloring(path=args.coloring)
    extra = sorted(v for v in coloring if v not in g)
    if extra:
        print(f"invalid: label {label_of(extra[0])} is not a vertex of the graph")
        return EXIT_NOT_COLORABLE
    violation = verify_coloring(g, coloring)
    if violation is None:
        print("ok")
        return EXIT_OK
    if violation.edge is not None:
        u, v = violation.edge
        print(f"invalid: edge {label_of(u)}-{label_of(v)} is monochromatic")
    else:
        assert violation.vertex is not None
        print(f"invalid: vertex {label_of(violation.vertex)} is uncolored")
    return EXIT_NOT_COLORABLE


def cmd_gen(args: argparse.Namespace) -> int:
    spec = parse_spec(args.spec)
    text = write_dimacs(generate(spec), comment=f"generated by forest-color gen {args.spec}")
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text, "utf-8")
    return EXIT_OK


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"branching vector must be comma-separated numbers: {text!r}") from None


def cmd_analyze(args: argparse.Namespace) -> int:
    show_lp = args.lp or not (args.work_factor or args.rate or args.schedules)
    if args.work_factor:
        vector = _parse_vector(args.work_factor)
        label = ", ".join(f"{r:g}" for r in vector)
        print(f"work factor ({label}): {work_factor(vector):.4f}")
    if args.rate:
        if args.vertices is None:
            raise ValueError("--rate needs --vertices")
        print(f"rate: {rate(parse_rate_terms(args.rate), args.vertices):.5f}")
    if args.schedules:
        for g in range(6):
            print(f"schedule rate, {g} grandchildren: {schedule_rate(g):.5f}")
        print(f"per-root base: {per_root_base():.5f}")
    if show_lp:
        print(solve_lp(build_lp(literal=args.literal_lp)).table())
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    files = sorted(args.corpus.glob("*.col"))
    if not files:
        raise ValueError(f"no .col files in {args.corpus}")
    config = _config(args)
    disagreements = 0
    print("instance\tn\tm\tstatus\toracle\tbranch_nodes\tcsp_calls\tassignments\tbound")
    for path in files:
        g = _read_graph(path)
        result = solve_3coloring(g, config)
        status = "colorable" if result.colorable else "not-colorable"
        if g.n <= args.oracle_cap:
            agrees = (brute_force(g, cap=args.oracle_cap) is not None) == result.colorable
            oracle = "agree" if agrees else "DISAGREE"
            if not agrees:
                disagreements += 1
        else:
            oracle = "skipped"
        s = result.stats
        bound = sum(partition_bound(c) for c in s.partitions)
        print(
            f"{path.name}\t{g.n}\t{g.m}\t{status}\t{oracle}\t{s.branch_nodes}"
            f"\t{s.csp_calls}\t{s.enumerated_assignments}\t{bound:.3g}"
        )
    if disagreements:
        logger.error("Oracle disagreement", instances=disagreements)
        return EXIT_NOT_COLORABLE
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forest-color",
        description="3-coloring by forest-guided branch and reduce.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log info (-v) or debug (-vv)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="Decide 3-colorability of a DIMACS graph")
    p_solve.add_argument("file", type=Path)
    p_solve.add_argument("--exhaustive", action="store_true", help="Enumerate the whole search")
    p_solve.add_argument("--jobs", type=int, default=1, help="Worker threads (default: 1)")
    p_solve.add_argument("--stats", type=Path, default=None, help="Write search stats as JSON")
    p_solve.add_argument("-o", "--output", type=Path, default=None, help="Write the coloring")
    p_solve.add_argument(
        "--print-coloring", action="store_true", help="Print the coloring even with -o"
    )
    p_solve.add_argument(
        "--strict-partition", action="store_true", help="Fail on partition violations"
    )
    p_solve.add_argument(
        "--dominated", action="store_true", help="Enable dominated-vertex removal"
    )
    p_solve.set_defaults(handler=cmd_solve)

    p_verify = sub.add_parser("verify", help="Check a coloring file against a graph")
    p_verify.add_argument("file", type=Path)
    p_verify.add_argument("coloring", type=Path)
    p_verify.set_defaults(handler=cmd_verify)

    p_gen = sub.add_parser("gen", help="Generate an instance as DIMACS")
    p_gen.add_argument("spec", help="kind:key=value,... (e.g. worst-case-family:size=2)")
    p_gen.add_argument("-o", "--output", type=Path, default=None)
    p_gen.set_defaults(handler=cmd_gen)

    p_analyze = sub.add_parser("analyze", help="Runtime analysis calculators")
    p_analyze.add_argument("--lp", action="store_true", help="Solve the partition LP")
    p_analyze.add_argument(
        "--literal-lp", action="store_true", help="Drop the N1 and shared-leaf charges"
    )
    p_analyze.add_argument("--work-factor", default=None, help="Branching vector, e.g. 2,6,6")
    p_analyze.add_argument("--rate", default=None, help="Sum of c*b^e terms")
    p_analyze.add_argument("--vertices", type=float, default=None, help="Vertices for --rate")
    p_analyze.add_argument(
        "--schedules", action="store_true", help="Chromatic schedule rates and per-root base"
    )
    p_analyze.set_defaults(handler=cmd_analyze)

    p_bench = sub.add_parser("bench", help="Solve every .col file in a directory")
    p_bench.add_argument("corpus", type=Path)
    p_bench.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--exhaustive", action="store_true")
    p_bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    configure_logging(args.verbose)
    try:
        return int(args.handler(args))
    except (ValueError, OSError) as exc:
        print(f"forest-color: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    raise SystemExit(main())
