"""Tiling censuses over the reduced set, weighted back to the full board space.

Every board in the reduced set is classified once.  Per-partition unsolvable
tallies are multiplied by the partition weight ``[G:K]`` to recover totals
over all ``C(mn, r)`` boards.

Work is split into units ``(partition index, start, stop)`` over the
enumeration order of :func:`partitions.partition_masks`.  Completed units are
appended to an optional JSONL checkpoint, so an interrupted run resumes where
it stopped and produces the same report.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import multiprocessing as mp
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .burnside import orbit_count_closed_form
from .grid_core import Board
from .partitions import BoardPartition, PartitionClass, admissible_partitions, partition_masks
from .polyomino import PieceSet
from .tiling_solver import AreaMismatchError, BatchSolver, NodeCapExceeded

CHECKPOINT_VERSION = 1
DEFAULT_SHARD = 50_000

CSV_COLUMNS = (
    "case",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "delta1",
    "delta2",
    "delta3",
    "delta4",
    "c",
    "weight",
    "board_count",
    "solvable",
    "unsolvable",
    "status",
)


class CheckpointError(RuntimeError):
    """Unreadable, mismatched or corrupt checkpoint file."""


@dataclass(frozen=True)
class CensusConfig:
    m: int
    n: int
    r: int
    pieces: PieceSet
    jobs: int = 1
    checkpoint: Path | None = None
    node_cap: int | None = None
    shard_size: int = DEFAULT_SHARD
    csv_path: Path | None = None

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"board dimensions must be positive, got {self.m}x{self.n}")
        if not 0 <= self.r <= self.m * self.n:
            raise ValueError(f"r={self.r} outside 0..{self.m * self.n}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.shard_size < 1:
            raise ValueError("shard_size must be at least 1")
        if self.pieces.total_area != self.m * self.n - self.r:
            raise AreaMismatchError(
                f"pieces cover {self.pieces.total_area} cells but {self.m}x{self.n} boards "
                f"with {self.r} blocked cells have {self.m * self.n - self.r} open cells"
            )

    @property
    def config_hash(self) -> str:
        """Digest of everything that determines the work units and their results."""
        payload = {
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "shard": self.shard_size,
            "pieces": [[list(map(list, p.cells)), c] for p, c in self.pieces.pieces],
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class CensusRecord:
    partition: BoardPartition
    board_count: int
    weight: int
    solvable_count: int = 0
    unsolvable_count: int = 0
    status: str = "pending"

    @property
    def classified(self) -> int:
        return self.solvable_count + self.unsolvable_count


@dataclass
class RunStats:
    units_total: int = 0
    units_resumed: int = 0
    units_solved: int = 0
    nodes: int = 0


@dataclass
class CensusReport:
    m: int
    n: int
    r: int
    pieces: str
    records: list[CensusRecord]
    stats: RunStats = field(default_factory=RunStats, compare=False, repr=False)

    @property
    def reduced_total(self) -> int:
        return sum(rec.board_count for rec in self.records)

    @property
    def reduced_unsolvable(self) -> int:
        return sum(rec.unsolvable_count for rec in self.records)

    @property
    def reduced_solvable(self) -> int:
        return sum(rec.solvable_count for rec in self.records)

    @property
    def weighted_total(self) -> int:
        return sum(rec.board_count * rec.weight for rec in self.records)

    @property
    def weighted_unsolvable(self) -> int:
        return sum(rec.unsolvable_count * rec.weight for rec in self.records)

    @property
    def weighted_solvable(self) -> int:
        return sum(rec.solvable_count * rec.weight for rec in self.records)

    @property
    def orbit_count(self) -> int:
        return orbit_count_closed_form(self.m, self.n, self.r)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.reduced_total, self.orbit_count)

    @property
    def complete(self) -> bool:
        return all(rec.status == "complete" for rec in self.records)

    def check(self) -> None:
        """Raise ``AssertionError`` if the report totals are inconsistent."""
        for rec in self.records:
            if rec.status == "complete":
                assert rec.classified == rec.board_count, rec
        if self.complete:
            assert self.weighted_total == math.comb(self.m * self.n, self.r)
            assert self.weighted_solvable + self.weighted_unsolvable == self.weighted_total

    def summary_line(self) -> str:
        fields = {
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "partitions": len(self.records),
            "reduced_total": self.reduced_total,
            "reduced_unsolvable": self.reduced_unsolvable,
            "weighted_total": self.weighted_total,
            "weighted_solvable": self.weighted_solvable,
            "weighted_unsolvable": self.weighted_unsolvable,
            "orbit_count": self.orbit_count,
            "ratio": f"{float(self.ratio):.4f}",
        }
        return " ".join(f"{k}={v}" for k, v in fields.items())

    def table(self) -> str:
        head = f"{'partition':<28} {'weight':>6} {'boards':>10} {'solvable':>10} {'unsolvable':>10}"
        lines = [f"census {self.m}x{self.n}, r={self.r}, pieces: {self.pieces}", head, "-" * len(head)]
        for rec in self.records:
            lines.append(
                f"{str(rec.partition):<28} {rec.weight:>6} {rec.board_count:>10} "
                f"{rec.solvable_count:>10} {rec.unsolvable_count:>10}"
            )
        lines.append("-" * len(head))
        lines.append(
            f"{'reduced total':<28} {'':>6} {self.reduced_total:>10} "
            f"{self.reduced_solvable:>10} {self.reduced_unsolvable:>10}"
        )
        lines.append(
            f"{'weighted total':<28} {'':>6} {self.weighted_total:>10} "
            f"{self.weighted_solvable:>10} {self.weighted_unsolvable:>10}"
        )
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in self.records:
            p = rec.partition
            writer.writerow(
                [
                    p.case.value,
                    *p.lam,
                    *p.delta,
                    p.c,
                    rec.weight,
                    rec.board_count,
                    rec.solvable_count,
                    rec.unsolvable_count,
                    rec.status,
                ]
            )
        return buf.getvalue()


# -- checkpoints --------------------------------------------------------------


@dataclass
class CheckpointState:
    """Completed units keyed by ``(partition index, start)``."""

    config_hash: str
    units: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def add(self, pidx: int, start: int, stop: int, unsolvable: int) -> None:
        self.units[(pidx, start)] = (stop, unsolvable)


def _header(config_hash: str) -> str:
    return json.dumps({"kind": "header", "version": CHECKPOINT_VERSION, "config": config_hash})


def _unit_line(pidx: int, start: int, stop: int, unsolvable: int) -> str:
    return json.dumps({"kind": "unit", "p": pidx, "start": start, "stop": stop, "unsolvable": unsolvable})


def checkpoint_write(path: Path, state: CheckpointState) -> None:
    """Write ``state`` to ``path`` atomically."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(_header(state.config_hash) + "\n")
        for (pidx, start), (stop, uns) in sorted(state.units.items()):
            fh.write(_unit_line(pidx, start, stop, uns) + "\n")
    os.replace(tmp, path)


def checkpoint_read(path: Path, repair: bool = False) -> CheckpointState:
    """Load a checkpoint.

    A partial final line (an interrupted append) is dropped, and with
    ``repair`` the file is truncated back to the last complete record.  Any
    other malformed content raises :class:`CheckpointError`.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    lines = raw.split(b"\n")
    tail = lines.pop()  # empty when the file ends with a newline
    good_len = len(raw) - len(tail)
    if not lines:
        raise CheckpointError(f"checkpoint {path} has no header")
    try:
        header = json.loads(lines[0])
    except ValueError as exc:
        raise CheckpointError(f"checkpoint {path} has a corrupt header") from exc
    if header.get("kind") != "header":
        raise CheckpointError(f"checkpoint {path} does not start with a header")
    if header.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"checkpoint {path} has version {header.get('version')}, expected {CHECKPOINT_VERSION}"
        )
    state = CheckpointState(str(header.get("config")))
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
            state.add(int(rec["p"]), int(rec["start"]), int(rec["stop"]), int(rec["unsolvable"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise CheckpointError(f"checkpoint {path} line {lineno} is corrupt") from exc
    if tail and repair:
        with open(path, "r+b") as fh:
            fh.truncate(good_len)
    return state


# -- workers ------------------------------------------------------------------

_worker: dict = {}


def _init_worker(m: int, n: int, pieces: PieceSet, node_cap: int | None) -> None:
    _worker["solver"] = BatchSolver(m, n, pieces, node_cap)
    _worker["m"], _worker["n"] = m, n
    _masks_for.cache_clear()


@lru_cache(maxsize=4)
def _masks_for(m: int, n: int, vec: tuple[int, ...]) -> np.ndarray:
    return partition_masks(BoardPartition.from_vector(m, n, vec))


def _run_unit(unit: tuple[int, tuple[int, ...], int, int]):
    pidx, vec, start, stop = unit
    solver: BatchSolver = _worker["solver"]
    masks = _masks_for(_worker["m"], _worker["n"], vec)[start:stop]
    before = solver.nodes
    try:
        out = solver.classify(masks)
    except NodeCapExceeded as exc:
        return ("cap", pidx, start, stop, sorted(exc.board.blocked), exc.nodes)
    unsolvable = int(np.count_nonzero(out == 0))
    return ("ok", pidx, start, stop, unsolvable, solver.nodes - before)


class CensusAborted(RuntimeError):
    """A board hit the node cap; the census cannot vouch for its totals."""

    def __init__(self, board: Board, nodes: int):
        super().__init__(f"node cap exceeded after {nodes} nodes on board\n{board}")
        self.board = board
        self.nodes = nodes


def work_units(classes: list[PartitionClass], shard_size: int) -> list[tuple[int, tuple[int, ...], int, int]]:
    units = []
    for pidx, pc in enumerate(classes):
        for start in range(0, pc.board_count, shard_size):
            units.append((pidx, pc.partition.vector, start, min(start + shard_size, pc.board_count)))
    return units


def _open_checkpoint(cfg: CensusConfig) -> CheckpointState | None:
    if cfg.checkpoint is None:
        return None
    path = Path(cfg.checkpoint)
    if not path.exists() or path.stat().st_size == 0:
        state = CheckpointState(cfg.config_hash)
        checkpoint_write(path, state)
        return state
    state = checkpoint_read(path, repair=True)
    if state.config_hash != cfg.config_hash:
        raise CheckpointError(
            f"checkpoint {path} belongs to a different configuration "
            f"({state.config_hash} != {cfg.config_hash})"
        )
    return state


def run_census(
    cfg: CensusConfig,
    progress: Callable[[int, int], None] | None = None,
) -> CensusReport:
    cfg.validate()
    m, n = cfg.m, cfg.n
    classes = admissible_partitions(m, n, cfg.r)
    records = [CensusRecord(pc.partition, pc.board_count, pc.weight) for pc in classes]
    units = work_units(classes, cfg.shard_size)
    state = _open_checkpoint(cfg)
    stats = RunStats(units_total=len(units))

    unsolvable = [0] * len(records)
    covered = [0] * len(records)

    def absorb(pidx: int, start: int, stop: int, uns: int) -> None:
        unsolvable[pidx] += uns
        covered[pidx] += stop - start

    todo = []
    for unit in units:
        pidx, _, start, stop = unit
        done = state.units.get((pidx, start)) if state else None
        if done is not None:
            if done[0] != stop:
                raise CheckpointError(f"checkpoint unit ({pidx}, {start}) ends at {done[0]}, expected {stop}")
            absorb(pidx, start, stop, done[1])
            stats.units_resumed += 1
        else:
            todo.append(unit)

    log = open(cfg.checkpoint, "a") if state is not None else None
    try:
        for result in _execute(cfg, todo):
            if result[0] == "cap":
                _, pidx, start, stop, cells, nodes = result
                raise CensusAborted(Board.of(m, n, [tuple(c) for c in cells]), nodes)
            _, pidx, start, stop, uns, nodes = result
            absorb(pidx, start, stop, uns)
            stats.units_solved += 1
            stats.nodes += nodes
            if log is not None:
                log.write(_unit_line(pidx, start, stop, uns) + "\n")
                log.flush()
            if progress is not None:
                progress(stats.units_resumed + stats.units_solved, stats.units_total)
    finally:
        if log is not None:
            log.close()

    for rec, uns, cov in zip(records, unsolvable, covered):
        rec.unsolvable_count = uns
        rec.solvable_count = cov - uns
        rec.status = "complete" if cov == rec.board_count else "pending"
    report = CensusReport(m, n, cfg.r, cfg.pieces.describe(), records, stats)
    report.check()
    if cfg.csv_path is not None:
        Path(cfg.csv_path).write_text(report.to_csv())
    return report


def _execute(cfg: CensusConfig, todo: list) -> Iterable:
    if not todo:
        return
    init = (cfg.m, cfg.n, cfg.pieces, cfg.node_cap)
    if cfg.jobs == 1:
        _init_worker(*init)
        yield from map(_run_unit, todo)
        return
    with mp.get_context().Pool(cfg.jobs, initializer=_init_worker, initargs=init) as pool:
        yield from pool.imap_unordered(_run_unit, todo)
