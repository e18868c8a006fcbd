"""Decide whether a blocked board can be tiled by a piece multiset.

Two search backends share one contract:

``bitboard``
    compiled search over uint64 masks (boards of at most 64 cells); branches
    on the lowest-index open cell.
``exact_cover``
    pure-Python Algorithm X over one column per open cell, with per-piece-type
    use counters; branches on the cell with fewest remaining candidates.

Both prune a branch when some connected open region has an area that no
sub-multiset of the remaining pieces can fill.  A node cap turns runaway
searches into :class:`NodeCapExceeded` rather than a verdict.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid_core import Board, Cell
from .polyomino import FreePolyomino, PieceSet

try:
    from . import _bitboard
except ImportError:  # pragma: no cover - numba missing
    _bitboard = None

BACKENDS = ("auto", "bitboard", "exact_cover")


class AreaMismatchError(ValueError):
    """Piece area differs from the number of open cells."""


class NodeCapExceeded(RuntimeError):
    def __init__(self, board: Board, nodes: int):
        super().__init__(f"search exceeded node cap after {nodes} nodes on board\n{board}")
        self.board = board
        self.nodes = nodes


@dataclass(frozen=True)
class Tiling:
    """``assignments[k] = (piece index in PieceSet.expanded(), cells)``."""

    assignments: tuple[tuple[int, frozenset[Cell]], ...]

    def render(self, board: Board) -> str:
        grid = [["#" if (i, j) in board.blocked else "." for j in range(board.cols)] for i in range(board.rows)]
        letters = string.ascii_uppercase + string.ascii_lowercase + string.digits
        for k, (_, cells) in enumerate(sorted(self.assignments, key=lambda a: min(a[1]))):
            for i, j in cells:
                grid[i][j] = letters[k % len(letters)]
        return "\n".join("".join(row) for row in grid)


def check_area(b: Board, ps: PieceSet) -> None:
    open_cells = b.rows * b.cols - b.r
    if ps.total_area != open_cells:
        raise AreaMismatchError(
            f"pieces cover {ps.total_area} cells but the board has {open_cells} open cells"
        )


def validate_tiling(b: Board, ps: PieceSet, tiling: Tiling) -> list[str]:
    """Problems with ``tiling`` as a tiling of ``b`` by ``ps`` (empty if valid)."""
    problems = []
    expanded = ps.expanded()
    used = set()
    covered: set[Cell] = set()
    for idx, cells in tiling.assignments:
        if not 0 <= idx < len(expanded):
            problems.append(f"piece index {idx} out of range")
            continue
        if idx in used:
            problems.append(f"piece {idx} used twice")
        used.add(idx)
        shape = FreePolyomino(_normalize_shape(cells))
        if cells and min(shape.images) not in expanded[idx].images:
            problems.append(f"cells {sorted(cells)} do not form {expanded[idx]}")
        if covered & cells:
            problems.append(f"overlap at {sorted(covered & cells)}")
        covered |= cells
    if used != set(range(len(expanded))):
        problems.append(f"unused pieces {sorted(set(range(len(expanded))) - used)}")
    open_cells = set(b.open_cells())
    if covered != open_cells:
        problems.append(
            f"covered cells differ from open cells: missing {sorted(open_cells - covered)}, "
            f"extra {sorted(covered - open_cells)}"
        )
    return problems


def _normalize_shape(cells) -> tuple[Cell, ...]:
    r0 = min(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    return tuple(sorted((r - r0, c - c0) for r, c in cells))


# -- bitboard backend ---------------------------------------------------------


@dataclass(frozen=True)
class BitboardTables:
    m: int
    n: int
    orders: np.ndarray
    mult: np.ndarray
    anc_start: np.ndarray
    anc_type: np.ndarray
    anc_mask: np.ndarray
    full: np.uint64
    not_first: np.uint64
    not_last: np.uint64
    piece_count: int

    def kernel_args(self):
        return (
            self.full,
            np.int64(self.n),
            self.not_first,
            self.not_last,
            self.anc_start,
            self.anc_type,
            self.anc_mask,
            self.orders,
            self.mult,
        )


@lru_cache(maxsize=64)
def bitboard_tables(m: int, n: int, ps: PieceSet) -> BitboardTables:
    N = m * n
    if N > 64:
        raise ValueError("bitboard backend needs at most 64 cells")
    buckets: list[list[tuple[int, int, int]]] = [[] for _ in range(N)]
    for t, (piece, _) in enumerate(ps.pieces):
        seen = set()
        for image in piece.images:
            h = max(r for r, _ in image) + 1
            w = max(c for _, c in image) + 1
            for dr in range(m - h + 1):
                for dc in range(n - w + 1):
                    mask = 0
                    for r, c in image:
                        mask |= 1 << ((r + dr) * n + c + dc)
                    if mask in seen:
                        continue
                    seen.add(mask)
                    anchor = (mask & -mask).bit_length() - 1
                    # larger pieces first at each anchor; ties by type then mask
                    buckets[anchor].append((-piece.order, t, mask))
    anc_start = np.zeros(N + 1, dtype=np.int64)
    types, masks_ = [], []
    for a in range(N):
        buckets[a].sort()
        anc_start[a + 1] = anc_start[a] + len(buckets[a])
        for _, t, mask in buckets[a]:
            types.append(t)
            masks_.append(mask)
    first_col = sum(1 << (i * n) for i in range(m))
    last_col = sum(1 << (i * n + n - 1) for i in range(m))
    full = (1 << N) - 1
    return BitboardTables(
        m,
        n,
        np.array([p.order for p, _ in ps.pieces], dtype=np.int64),
        np.array([c for _, c in ps.pieces], dtype=np.int64),
        anc_start,
        np.array(types, dtype=np.int64),
        np.array(masks_, dtype=np.uint64),
        np.uint64(full),
        np.uint64(full & ~first_col),
        np.uint64(full & ~last_col),
        ps.piece_count,
    )


def _bitboard_search(b: Board, ps: PieceSet, node_cap: int | None, prune: bool):
    tables = bitboard_tables(b.rows, b.cols, ps)
    choices = np.zeros(max(tables.piece_count, 1), dtype=np.int64)
    status, nodes, depth = _bitboard.search(
        np.uint64(b.mask),
        tables.full,
        np.int64(b.cols),
        tables.not_first,
        tables.not_last,
        tables.anc_start,
        tables.anc_type,
        tables.anc_mask,
        tables.orders,
        tables.mult,
        np.int64(node_cap or 0),
        prune,
        choices,
    )
    if status == _bitboard.CAP_EXCEEDED:
        raise NodeCapExceeded(b, int(nodes))
    if status != _bitboard.SOLVED:
        return None
    placed = []
    for k in range(int(depth)):
        i = int(choices[k])
        placed.append((int(tables.anc_type[i]), int(tables.anc_mask[i])))
    return placed


# -- exact cover backend ------------------------------------------------------


class _ExactCover:
    def __init__(self, b: Board, ps: PieceSet, node_cap: int | None, prune: bool):
        self.board = b
        self.node_cap = node_cap
        self.prune = prune
        self.orders = [p.order for p, _ in ps.pieces]
        self.rem = [c for _, c in ps.pieces]
        open_cells = b.open_cells()
        self.X: dict[Cell, set[int]] = {cell: set() for cell in open_cells}
        self.Y: list[tuple[Cell, ...]] = []
        self.row_type: list[int] = []
        self.rows_of_type: list[list[int]] = [[] for _ in ps.pieces]
        for t, (piece, _) in enumerate(ps.pieces):
            for image in piece.images:
                h = max(r for r, _ in image) + 1
                w = max(c for _, c in image) + 1
                for dr in range(b.rows - h + 1):
                    for dc in range(b.cols - w + 1):
                        cells = tuple(sorted((r + dr, c + dc) for r, c in image))
                        if any(cell in b.blocked for cell in cells):
                            continue
                        row = len(self.Y)
                        self.Y.append(cells)
                        self.row_type.append(t)
                        self.rows_of_type[t].append(row)
                        for cell in cells:
                            self.X[cell].add(row)
        self.nodes = 0
        self.solution: list[int] = []

    def _select(self, row: int) -> list[set[int]]:
        X, Y = self.X, self.Y
        cols = []
        for j in Y[row]:
            for i in X[j]:
                for k in Y[i]:
                    if k != j:
                        X[k].remove(i)
            cols.append(X.pop(j))
        return cols

    def _deselect(self, row: int, cols: list[set[int]]) -> None:
        X, Y = self.X, self.Y
        for j in reversed(Y[row]):
            X[j] = cols.pop()
            for i in X[j]:
                for k in Y[i]:
                    if k != j:
                        X[k].add(i)

    def _retire_type(self, t: int) -> list[int]:
        # last copy placed: withdraw every remaining candidate of this type
        X, Y = self.X, self.Y
        gone = []
        for row in self.rows_of_type[t]:
            head = Y[row][0]
            if head in X and row in X[head]:
                for k in Y[row]:
                    X[k].remove(row)
                gone.append(row)
        return gone

    def _restore_type(self, gone: list[int]) -> None:
        for row in gone:
            for k in self.Y[row]:
                self.X[k].add(row)

    def _regions_ok(self) -> bool:
        reach = 1
        for o, c in zip(self.orders, self.rem):
            for _ in range(c):
                reach |= reach << o
        todo = set(self.X)
        while todo:
            start = todo.pop()
            stack = [start]
            size = 1
            while stack:
                r, c = stack.pop()
                for nb in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
                    if nb in todo:
                        todo.remove(nb)
                        stack.append(nb)
                        size += 1
            if not reach >> size & 1:
                return False
        return True

    def run(self) -> bool:
        X = self.X
        if not X:
            return True
        col = min(X, key=lambda cell: (len(X[cell]), cell))
        for row in sorted(X[col]):
            t = self.row_type[row]
            self.nodes += 1
            if self.node_cap and self.nodes > self.node_cap:
                raise NodeCapExceeded(self.board, self.nodes)
            cols = self._select(row)
            self.rem[t] -= 1
            gone = self._retire_type(t) if self.rem[t] == 0 else []
            if (not self.prune or not X or self._regions_ok()) and self.run():
                self.solution.append(row)
                return True
            self._restore_type(gone)
            self.rem[t] += 1
            self._deselect(row, cols)
        return False


def _exact_cover_search(b: Board, ps: PieceSet, node_cap: int | None, prune: bool):
    solver = _ExactCover(b, ps, node_cap, prune)
    if not solver.run():
        return None
    n = b.cols
    out = []
    for row in reversed(solver.solution):
        mask = sum(1 << (i * n + j) for i, j in solver.Y[row])
        out.append((solver.row_type[row], mask))
    return out


# -- public API ---------------------------------------------------------------


def resolve_backend(b: Board, backend: str = "auto") -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if backend == "auto":
        return "bitboard" if _bitboard is not None and b.rows * b.cols <= 64 else "exact_cover"
    if backend == "bitboard" and (_bitboard is None or b.rows * b.cols > 64):
        raise ValueError("bitboard backend needs numba and at most 64 cells")
    return backend


def _search(b: Board, ps: PieceSet, node_cap, backend, prune):
    check_area(b, ps)
    if resolve_backend(b, backend) == "bitboard":
        return _bitboard_search(b, ps, node_cap, prune)
    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10_000))
    try:
        return _exact_cover_search(b, ps, node_cap, prune)
    finally:
        sys.setrecursionlimit(limit)


def solvable(
    b: Board,
    ps: PieceSet,
    node_cap: int | None = None,
    backend: str = "auto",
    prune: bool = True,
) -> bool:
    return _search(b, ps, node_cap, backend, prune) is not None


def solve_witness(
    b: Board,
    ps: PieceSet,
    node_cap: int | None = None,
    backend: str = "auto",
    prune: bool = True,
) -> Tiling | None:
    placed = _search(b, ps, node_cap, backend, prune)
    if placed is None:
        return None
    offsets = []
    acc = 0
    for _, count in ps.pieces:
        offsets.append(acc)
        acc += count
    used = [0] * len(ps.pieces)
    n = b.cols
    assignments = []
    for t, mask in placed:
        cells = frozenset(divmod(i, n) for i in range(b.rows * n) if mask >> i & 1)
        assignments.append((offsets[t] + used[t], cells))
        used[t] += 1
    return Tiling(tuple(assignments))


class BatchSolver:
    """Classify many boards of one shape against one piece set.

    ``classify`` takes uint64 blocked masks and returns an int8 array with 1
    for solvable and 0 for unsolvable; a node-cap hit raises
    :class:`NodeCapExceeded` naming the offending board.
    """

    def __init__(self, m: int, n: int, ps: PieceSet, node_cap: int | None = None, prune: bool = True):
        self.m, self.n, self.ps = m, n, ps
        self.node_cap = node_cap
        self.prune = prune
        self.use_bitboard = _bitboard is not None and m * n <= 64
        if self.use_bitboard:
            self.tables = bitboard_tables(m, n, ps)
        self.nodes = 0

    def classify(self, blocked_masks) -> np.ndarray:
        if not self.use_bitboard:
            return np.array(
                [
                    solvable(Board.from_mask(self.m, self.n, int(x)), self.ps, self.node_cap, "exact_cover", self.prune)
                    for x in blocked_masks
                ],
                dtype=np.int8,
            )
        masks = np.ascontiguousarray(blocked_masks, dtype=np.uint64)
        t = self.tables
        out, nodes = _bitboard.search_batch(
            masks,
            *t.kernel_args(),
            np.int64(self.node_cap or 0),
            self.prune,
            max(t.piece_count, 1),
        )
        self.nodes += int(nodes)
        if len(out) and out[-1] == _bitboard.CAP_EXCEEDED:
            bad = Board.from_mask(self.m, self.n, int(masks[len(out) - 1]))
            raise NodeCapExceeded(bad, int(nodes))
        return out
