"""Region schemes, board partitions and the reduced board set.

A board is split into at most nine regions: four corner blocks ``L1..L4``
(top-left, top-right, bottom-right, bottom-left), middle strips ``D1..D4`` and
a centre cell ``C``.  A *board partition* records how many blocked cells fall
in each region.  The reduced set keeps every board whose partition passes the
admissibility rule for its dimension case; weighting each partition class by
the index of its preserving subgroup recovers totals for the full family.
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator

import numpy as np

from . import masks as _masks
from .grid_core import Board, Cell, Symmetry, SymmetryGroup, symmetry_group_of

LABELS = ("L1", "L2", "L3", "L4", "D1", "D2", "D3", "D4", "C")
_INDEX = {label: i for i, label in enumerate(LABELS)}


class Case(enum.Enum):
    SQUARE_EVEN = "SquareEven"
    SQUARE_ODD = "SquareOdd"
    RECT_EVEN = "RectEven"
    RECT_ODD = "RectOdd"
    RECT_MIXED = "RectMixed"
    SINGLE_ROW_EVEN = "SingleRowEven"
    SINGLE_ROW_ODD = "SingleRowOdd"

    def __str__(self) -> str:
        return self.value


_CASE_LABELS = {
    Case.SQUARE_EVEN: LABELS[:4],
    Case.RECT_EVEN: LABELS[:4],
    Case.SQUARE_ODD: LABELS,
    Case.RECT_ODD: LABELS,
    Case.RECT_MIXED: LABELS[:6],
    Case.SINGLE_ROW_EVEN: ("L1", "L2"),
    Case.SINGLE_ROW_ODD: ("L1", "L2", "C"),
}


def case_of(m: int, n: int) -> Case:
    if m < 1 or n < 1:
        raise ValueError(f"board dimensions must be positive, got {m}x{n}")
    if m == 1 or n == 1:
        return Case.SINGLE_ROW_EVEN if max(m, n) % 2 == 0 else Case.SINGLE_ROW_ODD
    if m % 2 != n % 2:
        return Case.RECT_MIXED
    if m == n:
        return Case.SQUARE_EVEN if m % 2 == 0 else Case.SQUARE_ODD
    return Case.RECT_EVEN if m % 2 == 0 else Case.RECT_ODD


def _label_at(m: int, n: int, case: Case, i: int, j: int) -> str:
    if case in (Case.SINGLE_ROW_EVEN, Case.SINGLE_ROW_ODD):
        length, p = (n, j) if m == 1 else (m, i)
        half = length // 2
        if p < half:
            return "L1"
        return "L2" if p >= length - half else "C"
    # vertical band: 0 top, 1 middle row, 2 bottom; horizontal likewise
    k, l = m // 2, n // 2
    vb = 0 if i < k else (2 if i >= m - k else 1)
    hb = 0 if j < l else (2 if j >= n - l else 1)
    if case is Case.RECT_MIXED:
        if m % 2 == 0:
            # middle column, split into upper and lower halves
            if hb == 1:
                return "D1" if vb == 0 else "D2"
        elif vb == 1:
            # middle row, split into left and right halves
            return "D1" if hb == 0 else "D2"
    return _NINE[vb][hb]


_NINE = (("L1", "D1", "L2"), ("D4", "C", "D2"), ("L4", "D3", "L3"))


@dataclass(frozen=True)
class RegionScheme:
    m: int
    n: int

    @cached_property
    def case(self) -> Case:
        return case_of(self.m, self.n)

    @property
    def labels(self) -> tuple[str, ...]:
        return _CASE_LABELS[self.case]

    @cached_property
    def region_cells(self) -> dict[str, tuple[Cell, ...]]:
        out: dict[str, list[Cell]] = {label: [] for label in self.labels}
        for i in range(self.m):
            for j in range(self.n):
                out[_label_at(self.m, self.n, self.case, i, j)].append((i, j))
        return {label: tuple(cells) for label, cells in out.items()}

    @cached_property
    def region_sizes(self) -> dict[str, int]:
        return {label: len(cells) for label, cells in self.region_cells.items()}

    def region_of(self, cell: Cell) -> str:
        i, j = cell
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise ValueError(f"cell {cell} outside {self.m}x{self.n} board")
        return _label_at(self.m, self.n, self.case, i, j)

    @cached_property
    def capacities(self) -> tuple[int, ...]:
        """Region sizes as a 9-vector in ``LABELS`` order (0 for unused labels)."""
        return tuple(self.region_sizes.get(label, 0) for label in LABELS)

    @cached_property
    def label_permutations(self) -> dict[Symmetry, dict[str, str]]:
        """Where each symmetry sends each region, read off a representative cell."""
        out = {}
        for g in symmetry_group_of(self.m, self.n):
            perm = {}
            for label, cells in self.region_cells.items():
                if cells:
                    perm[label] = self.region_of(g.map_cell(cells[0], self.m, self.n))
            out[g] = perm
        return out

    @cached_property
    def index_permutations(self) -> tuple[tuple[Symmetry, tuple[int, ...]], ...]:
        # perm[i] = destination of label index i in LABELS order
        out = []
        for g, perm in self.label_permutations.items():
            idx = list(range(len(LABELS)))
            for src, dst in perm.items():
                idx[_INDEX[src]] = _INDEX[dst]
            out.append((g, tuple(idx)))
        return tuple(out)


@lru_cache(maxsize=None)
def region_scheme(m: int, n: int) -> RegionScheme:
    return RegionScheme(m, n)


@dataclass(frozen=True)
class BoardPartition:
    """Blocked-cell counts per region.

    ``lam`` and ``delta`` are always 4-tuples; entries for labels the scheme
    does not use are zero, as is ``c`` when there is no centre cell.
    """

    m: int
    n: int
    lam: tuple[int, int, int, int]
    delta: tuple[int, int, int, int] = (0, 0, 0, 0)
    c: int = 0

    def __post_init__(self) -> None:
        caps = self.scheme.capacities
        for value, cap, label in zip(self.vector, caps, LABELS):
            if not 0 <= value <= cap:
                raise ValueError(f"{label} count {value} outside 0..{cap} for {self.m}x{self.n}")

    @classmethod
    def from_vector(cls, m: int, n: int, vec) -> "BoardPartition":
        vec = tuple(int(v) for v in vec)
        return cls(m, n, vec[0:4], vec[4:8], vec[8])

    @property
    def scheme(self) -> RegionScheme:
        return region_scheme(self.m, self.n)

    @property
    def case(self) -> Case:
        return self.scheme.case

    @property
    def vector(self) -> tuple[int, ...]:
        return (*self.lam, *self.delta, self.c)

    @property
    def counts(self) -> dict[str, int]:
        vec = self.vector
        return {label: vec[_INDEX[label]] for label in self.scheme.labels}

    @property
    def r(self) -> int:
        return sum(self.vector)

    def __str__(self) -> str:
        counts = self.counts
        lam = ",".join(str(counts[x]) for x in self.scheme.labels if x.startswith("L"))
        rest = ",".join(str(counts[x]) for x in self.scheme.labels if x.startswith("D"))
        out = f"({lam})"
        if rest:
            out += f"[{rest}]"
        if "C" in counts:
            out += f"_{counts['C']}"
        return out


@dataclass(frozen=True)
class PartitionClass:
    partition: BoardPartition
    stabilizer_k: SymmetryGroup
    weight: int
    board_count: int


# -- admissibility ------------------------------------------------------------


def _corner_rules(l1, l2, l3, l4) -> bool:
    # shared by both square cases
    return l1 >= l2 and l1 >= l3 and l1 >= l4 and l2 >= l4 and (l1 != l2 or l3 >= l4)


def _square_even(v) -> bool:
    return _corner_rules(*v[:4])


def _square_odd(v) -> bool:
    l1, l2, l3, l4, d1, d2, d3, d4, _ = v
    if not _corner_rules(l1, l2, l3, l4):
        return False
    if l1 == l3 and l2 != l4:
        if d1 < d2 or (d1 == d2 and d3 < d4):
            return False
    if l2 == l4 and l1 != l3:
        if d1 < d4 or (d1 == d4 and d2 < d3):
            return False
    if l1 == l2 > l3 == l4 and d2 < d4:
        return False
    if l1 == l3 > l2 == l4:
        if d1 < max(d2, d3, d4):
            return False
        if d1 == d2 and d3 < d4:
            return False
        if d1 == d3 and d2 < d4:
            return False
        if d1 == d4 and d2 < d3:
            return False
    if l1 == l2 == l3 == l4:
        if d1 < max(d2, d3, d4) or d2 < d4 or (d1 == d2 and d3 < d4):
            return False
    return True


def _rect_even(v) -> bool:
    l1, l2, l3, l4 = v[:4]
    return (
        l1 >= max(l2, l3, l4)
        and (l1 != l2 or l3 >= l4)
        and (l1 != l3 or l2 >= l4)
        and (l1 != l4 or l2 >= l3)
    )


def _rect_odd(v) -> bool:
    l1, l2, l3, l4, d1, d2, d3, d4, _ = v
    if l1 < max(l2, l3, l4):
        return False
    if l1 == l3:
        if l2 < l4:
            return False
        if l2 == l4 and (d1 < d3 or (d1 == d3 and d2 < d4)):
            return False
    if l1 == l2:
        if l3 < l4 or (l3 == l4 and d2 < d4):
            return False
    if l1 == l4:
        if l2 < l3 or (l2 == l3 and d1 < d3):
            return False
    return True


def _mixed_even_rows(l1, l2, l3, l4, d1, d2) -> bool:
    if l1 < max(l2, l3, l4):
        return False
    if l1 == l2 and l3 < l4:
        return False
    if l1 == l3 and (l2 < l4 or (l2 == l4 and d1 < d2)):
        return False
    if l1 == l4 and (l2 < l3 or (l2 == l3 and d1 < d2)):
        return False
    return True


def _rect_mixed(v, even_rows: bool) -> bool:
    l1, l2, l3, l4, d1, d2 = v[:6]
    if even_rows:
        return _mixed_even_rows(l1, l2, l3, l4, d1, d2)
    # odd rows: read the board through its transpose, which swaps the
    # top-right and bottom-left corners and keeps the strip halves in place
    return _mixed_even_rows(l1, l4, l3, l2, d1, d2)


def _single_row(v) -> bool:
    return v[0] >= v[1]


def _predicate(m: int, n: int):
    case = case_of(m, n)
    if case is Case.SQUARE_EVEN:
        return _square_even
    if case is Case.SQUARE_ODD:
        return _square_odd
    if case is Case.RECT_EVEN:
        return _rect_even
    if case is Case.RECT_ODD:
        return _rect_odd
    if case is Case.RECT_MIXED:
        even_rows = m % 2 == 0
        return lambda v: _rect_mixed(v, even_rows)
    return _single_row


def is_admissible(p: BoardPartition) -> bool:
    return _predicate(p.m, p.n)(p.vector)


# -- stabilizers and weights --------------------------------------------------


def _stabilizer_of_vector(scheme: RegionScheme, vec) -> tuple[Symmetry, ...]:
    kept = []
    for g, perm in scheme.index_permutations:
        moved = [0] * len(LABELS)
        for src, dst in enumerate(perm):
            moved[dst] = vec[src]
        if tuple(moved) == tuple(vec):
            kept.append(g)
    return tuple(kept)


def partition_stabilizer(p: BoardPartition) -> tuple[SymmetryGroup, int]:
    """Subgroup preserving the partition class, and its index in the full group."""
    K = SymmetryGroup(_stabilizer_of_vector(p.scheme, p.vector))
    G = symmetry_group_of(p.m, p.n)
    return K, G.order // K.order


def permuted_partition(g: Symmetry, p: BoardPartition) -> BoardPartition:
    """Partition of ``g·B`` for any board ``B`` with partition ``p``."""
    perm = dict(p.scheme.index_permutations)[g]
    vec = p.vector
    moved = [0] * len(LABELS)
    for src, dst in enumerate(perm):
        moved[dst] = vec[src]
    return BoardPartition.from_vector(p.m, p.n, moved)


# -- enumeration --------------------------------------------------------------


def _count_vectors(scheme: RegionScheme, r: int) -> Iterator[tuple[int, ...]]:
    """Count vectors with region capacities respected, summing to ``r``, in
    descending lexicographic order, restricted to ``L1 >= every other L``."""
    caps = scheme.capacities
    active = [i for i, cap in enumerate(caps) if cap > 0]
    corner_slots = {1, 2, 3}

    def rec(pos: int, remaining: int, vec: list[int], top: int):
        if pos == len(active):
            if remaining == 0:
                yield tuple(vec)
            return
        i = active[pos]
        hi = min(caps[i], remaining)
        if i in corner_slots:
            hi = min(hi, top)
        for value in range(hi, -1, -1):
            new_top = top if i else value
            rest_cap = sum(
                min(caps[j], new_top) if j in corner_slots else caps[j]
                for j in active[pos + 1 :]
            )
            if remaining - value > rest_cap:
                break
            vec[i] = value
            yield from rec(pos + 1, remaining - value, vec, new_top)
        vec[i] = 0

    if not active:
        if r == 0:
            yield (0,) * len(LABELS)
        return
    yield from rec(0, r, [0] * len(LABELS), 0)


def _board_count_vec(caps, vec) -> int:
    out = 1
    for cap, k in zip(caps, vec):
        if k:
            out *= math.comb(cap, k)
    return out


def admissible_vectors(m: int, n: int, r: int) -> Iterator[tuple[int, ...]]:
    """Raw admissible count vectors (``LABELS`` order); the fast path."""
    if not 0 <= r <= m * n:
        return
    scheme = region_scheme(m, n)
    pred = _predicate(m, n)
    if scheme.capacities[0] == 0:
        # 1x1 board: no corner regions, the only region is the centre
        for vec in _count_vectors(scheme, r):
            yield vec
        return
    for vec in _count_vectors(scheme, r):
        if pred(vec):
            yield vec


def admissible_partitions(m: int, n: int, r: int) -> list[PartitionClass]:
    scheme = region_scheme(m, n)
    G = symmetry_group_of(m, n)
    out = []
    for vec in admissible_vectors(m, n, r):
        p = BoardPartition.from_vector(m, n, vec)
        K = SymmetryGroup(_stabilizer_of_vector(scheme, vec))
        out.append(PartitionClass(p, K, G.order // K.order, _board_count_vec(scheme.capacities, vec)))
    return out


def partition_board_count(p: BoardPartition) -> int:
    return _board_count_vec(p.scheme.capacities, p.vector)


def partition_of(b: Board) -> BoardPartition:
    scheme = region_scheme(b.rows, b.cols)
    vec = [0] * len(LABELS)
    for cell in b.blocked:
        vec[_INDEX[scheme.region_of(cell)]] += 1
    return BoardPartition.from_vector(b.rows, b.cols, vec)


def boards_with_partition(p: BoardPartition) -> Iterator[Board]:
    """Every board with partition ``p``; regions vary in label order, the
    first region slowest, cells within a region chosen in row-major order."""
    scheme = p.scheme
    counts = p.counts
    choices = [itertools.combinations(scheme.region_cells[x], counts[x]) for x in scheme.labels]
    for combo in itertools.product(*choices):
        yield Board(p.m, p.n, frozenset(itertools.chain.from_iterable(combo)))


def partition_masks(p: BoardPartition) -> np.ndarray:
    """uint64 masks of ``boards_with_partition(p)``, in the same order."""
    scheme = p.scheme
    n = p.n
    counts = p.counts
    parts = [
        _masks.subset_masks([i * n + j for i, j in scheme.region_cells[x]], counts[x])
        for x in scheme.labels
    ]
    return _masks.product_masks(parts)


def reduced_set(m: int, n: int, r: int) -> Iterator[Board]:
    for pc in admissible_partitions(m, n, r):
        yield from boards_with_partition(pc.partition)


def reduced_size(m: int, n: int, r: int) -> int:
    caps = region_scheme(m, n).capacities
    return sum(_board_count_vec(caps, vec) for vec in admissible_vectors(m, n, r))


def weighted_total(m: int, n: int, r: int) -> int:
    scheme = region_scheme(m, n)
    G = symmetry_group_of(m, n).order
    caps = scheme.capacities
    total = 0
    for vec in admissible_vectors(m, n, r):
        weight = G // len(_stabilizer_of_vector(scheme, vec))
        total += _board_count_vec(caps, vec) * weight
    return total


# -- report -------------------------------------------------------------------

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
    "region_sizes",
    "K",
    "weight",
    "board_count",
)


def partition_csv(classes: list[PartitionClass]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for pc in classes:
        p = pc.partition
        sizes = ";".join(f"{k}={v}" for k, v in p.scheme.region_sizes.items())
        writer.writerow(
            [
                p.case.value,
                *p.lam,
                *p.delta,
                p.c,
                sizes,
                " ".join(str(g) for g in pc.stabilizer_k),
                pc.weight,
                pc.board_count,
            ]
        )
    return buf.getvalue()
