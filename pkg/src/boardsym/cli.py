"""Command-line entry point: ``boardsym <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .burnside import orbit_count, orbit_count_closed_form, ratio_sweep
from .census import CensusAborted, CensusConfig, CheckpointError, run_census
from .grid_core import format_board, parse_board
from .partitions import admissible_partitions, boards_with_partition, partition_csv
from .polyomino import PieceError, load_pieces
from .tiling_solver import AreaMismatchError, NodeCapExceeded, solve_witness

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_CHECKPOINT = 4


def _dims(p: argparse.ArgumentParser, with_r: bool = True) -> None:
    p.add_argument("-m", type=int, required=True, help="rows")
    p.add_argument("-n", type=int, required=True, help="columns")
    if with_r:
        p.add_argument("-r", type=int, required=True, help="blocked cells")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boardsym", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="stream the reduced set of boards")
    _dims(p)
    p.add_argument("--out", type=Path, help="write boards here instead of stdout")

    p = sub.add_parser("partitions", help="admissible partitions with stabilizers and weights, as CSV")
    _dims(p)

    p = sub.add_parser("burnside", help="number of symmetry classes of boards")
    _dims(p)

    p = sub.add_parser("ratio", help="reduction ratio sweep as CSV plus monotonicity checks")
    _dims(p, with_r=False)
    p.add_argument("--r-max", type=int, help="largest r (default ceil(mn/2))")

    p = sub.add_parser("solve", help="decide one board")
    p.add_argument("--board", required=True, type=Path, help="board file")
    p.add_argument("--pieces", required=True, help="piece file, preset or piece name")
    p.add_argument("--witness", action="store_true", help="print a tiling when one exists")
    p.add_argument("--node-cap", type=int, help="give up after this many search nodes")

    p = sub.add_parser("census", help="classify the reduced set and weight the tallies")
    _dims(p)
    p.add_argument("--pieces", required=True, help="piece file, preset or piece name")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--checkpoint", type=Path, help="JSONL checkpoint to resume from and append to")
    p.add_argument("--node-cap", type=int, help="abort when one board needs more search nodes")
    p.add_argument("--csv", type=Path, help="write per-partition CSV here")
    p.add_argument("--shard-size", type=int, default=50_000, help="boards per work unit")
    p.add_argument("--quiet", action="store_true", help="print only the summary line")
    return parser


def _cmd_reduce(args) -> int:
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        first = True
        for pc in admissible_partitions(args.m, args.n, args.r):
            for b in boards_with_partition(pc.partition):
                if not first:
                    out.write("\n")
                out.write(format_board(b) + "\n")
                first = False
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _cmd_partitions(args) -> int:
    classes = admissible_partitions(args.m, args.n, args.r)
    sys.stdout.write(partition_csv(classes))
    total = sum(pc.board_count for pc in classes)
    weighted = sum(pc.board_count * pc.weight for pc in classes)
    print(f"partitions={len(classes)} reduced_size={total} weighted_total={weighted}", file=sys.stderr)
    return EXIT_OK


def _cmd_burnside(args) -> int:
    closed = orbit_count_closed_form(args.m, args.n, args.r)
    if closed != orbit_count(args.m, args.n, args.r):
        print("closed form disagrees with the generic count", file=sys.stderr)
        return 1
    print(closed)
    return EXIT_OK


def _cmd_ratio(args) -> int:
    sweep = ratio_sweep(args.m, args.n, args.r_max)
    print("m,n,r,reduced_size,orbit_count,ratio")
    for rep in sweep.reports:
        print(f"{rep.m},{rep.n},{rep.r},{rep.reduced_size},{rep.orbit_count},{rep.decimal}")
    for check in sweep.checks:
        print(check.line())
    return EXIT_OK if sweep.passed else 1


def _cmd_solve(args) -> int:
    board = parse_board(args.board.read_text())
    pieces = load_pieces(args.pieces)
    tiling = solve_witness(board, pieces, node_cap=args.node_cap)
    print("solvable" if tiling else "unsolvable")
    if tiling and args.witness:
        print(tiling.render(board))
    return EXIT_OK


def _cmd_census(args) -> int:
    cfg = CensusConfig(
        args.m,
        args.n,
        args.r,
        load_pieces(args.pieces),
        jobs=args.jobs,
        checkpoint=args.checkpoint,
        node_cap=args.node_cap,
        shard_size=args.shard_size,
        csv_path=args.csv,
    )
    report = run_census(cfg)
    if not args.quiet:
        print(report.table())
    print(report.summary_line())
    return EXIT_OK


_COMMANDS = {
    "reduce": _cmd_reduce,
    "partitions": _cmd_partitions,
    "burnside": _cmd_burnside,
    "ratio": _cmd_ratio,
    "solve": _cmd_solve,
    "census": _cmd_census,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (NodeCapExceeded, CensusAborted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except (AreaMismatchError, PieceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
