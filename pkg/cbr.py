import argparse
import json
import logging
import sys

import click
from tqdm import tqdm

from constants import *
from engine import SolverConfig
from exceptions import SolverError
from language import While, parse_program, walk
from reachability import solve_reachability
from utils import PROFILER, all_logging_disabled

logging.basicConfig(format="%(levelname)s:%(message)s", level=logging.INFO)

logger = logging.getLogger(__name__)


def _add_solver_options(parser):
    parser.add_argument("file", type=str)
    parser.add_argument("--consistency", type=str, choices=CONSISTENCY_LEVELS, default="bound")
    parser.add_argument("--relax", type=str, choices=("drop", "envelope", "corner"), default="envelope")
    parser.add_argument("--join", type=str, choices=JOIN_MODES, default="template")
    parser.add_argument("--widen-delay", type=int, default=WIDEN_DELAY)
    parser.add_argument("--max-unroll", type=int, default=MAX_UNROLL)
    parser.add_argument("--max-rounds", type=int, default=MAX_ROUNDS)
    parser.add_argument("--limit", type=int, default=SEARCH_LIMIT, help="Maximum number of search nodes")
    parser.add_argument("--seed", type=int, default=None, help="Random tie-breaking of the propagation queue")
    parser.add_argument("--verbose", action="store_true", default=False)
    parser.add_argument("--quiet", action="store_true", default=False)


def get_args(argv=None):
    parser = argparse.ArgumentParser(prog="cbr", description="Constraint-based reachability of program labels")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Find inputs reaching one label")
    _add_solver_options(solve)
    solve.add_argument("--target", type=str, required=True)
    solve.add_argument("--dump-invariants", action="store_true", default=False)
    solve.add_argument("--format", type=str, choices=("text", "json"), default="text")
    solve.add_argument("--profile", action="store_true", default=False)

    cover = commands.add_parser("cover", help="Find inputs reaching every label in turn")
    _add_solver_options(cover)

    plot = commands.add_parser("plot", help="Draw concrete and abstract fixpoints of one loop")
    plot.add_argument("file", type=str)
    plot.add_argument("--loop", type=str, required=True, help="Label of a loop over parameters only")
    plot.add_argument("--var", type=str, default=None, help="State variable to draw, the first by default")
    plot.add_argument("--widen-delay", type=int, default=WIDEN_DELAY)
    plot.add_argument("--join", type=str, choices=JOIN_MODES, default="template")
    plot.add_argument("--save", type=str, default=None)
    plot.add_argument("--verbose", action="store_true", default=False)
    plot.add_argument("--quiet", action="store_true", default=False)
    return parser.parse_args(argv)


def make_config(args) -> SolverConfig:
    return SolverConfig(
        consistency=args.consistency,
        relaxation=args.relax,
        join=args.join,
        widen_delay=args.widen_delay,
        max_unroll=args.max_unroll,
        max_rounds=args.max_rounds,
        search_limit=args.limit,
        seed=args.seed,
    )


def load_program(path):
    with open(path) as f:
        return parse_program(f.read())


def _format_witness(witness):
    return ", ".join(f"{k}={v}" for k, v in witness.items()) if witness is not None else "-"


def solve(args) -> int:
    program = load_program(args.file)
    answer = solve_reachability(program, args.target, make_config(args))
    if args.format == "json":
        click.echo(json.dumps(answer.as_dict(with_invariants=args.dump_invariants), indent=2))
    else:
        click.echo(click.style(answer.status, fg=STATUS_COLORS[answer.status], bold=True))
        if answer.witness is not None:
            click.echo(f"witness: {_format_witness(answer.witness)}")
        for name, value in answer.stats.as_dict().items():
            click.echo(f"  {name}: {value}")
        if args.dump_invariants:
            for inv in answer.invariants:
                click.echo(f"loop {inv['loop']} (depth {inv['depth']}) {inv['in']} -> {inv['out']}")
                click.echo("P:\n" + inv["P"])
                click.echo("Q:\n" + inv["Q"])
    if args.profile:
        logger.info("\n" + PROFILER.report())
    return STATUS_EXIT_CODES[answer.status]


def cover(args) -> int:
    """Solve every label of the program in turn; exit 0 when all are reached."""
    program = load_program(args.file)
    config = make_config(args)
    inside = loop_body_labels(program)
    targets = [label for label in program.labels() if label not in inside]
    rows = []
    with all_logging_disabled():
        for label in tqdm(targets, desc="labels"):
            answer = solve_reachability(program, label, config)
            rows.append((label, answer.status, answer.witness))
    width = max((len(label) for label, _, _ in rows), default=5)
    for label, status, witness in rows:
        styled = click.style(f"{status:<16}", fg=STATUS_COLORS[status])
        click.echo(f"{label:<{width}}  {styled}{_format_witness(witness)}")
    skipped = len(program.labels()) - len(targets)
    if skipped:
        logger.info(f"{skipped} labels inside loop bodies were skipped")
    return EXIT_FOUND if all(status == FOUND for _, status, _ in rows) else EXIT_EXHAUSTED


def loop_body_labels(program) -> set:
    """Labels inside while bodies, which cannot be targets."""
    return {
        s.label
        for loop in walk(program.body)
        if isinstance(loop, While)
        for s in walk(loop.body)
        if s.label is not None
    }


def plot(args) -> int:
    import ui

    program = load_program(args.file)
    ui.plot_loop(program, args.loop, args.var, args.widen_delay, args.join, save_path=args.save)
    return EXIT_FOUND


COMMANDS = {"solve": solve, "cover": cover, "plot": plot}


def main(argv=None) -> int:
    args = get_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (SolverError, OSError) as e:
        click.echo(click.style(f"error: {e}", fg="red"), err=True)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
