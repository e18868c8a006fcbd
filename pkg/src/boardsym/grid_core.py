"""Blocked boards, their symmetry groups, orbits and stabilizers.

Cells are ``(row, col)`` pairs, row 0 at the top and col 0 at the left.  The
row-major cell index ``row * cols + col`` is used for bit masks and for the
lexicographic canonical form.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

Cell = tuple[int, int]

DEFAULT_BRUTE_FORCE_CAP = 10**8


class DimensionError(ValueError):
    """A symmetry was applied to a board whose shape does not admit it."""


class CapExceededError(RuntimeError):
    """An exhaustive enumeration would exceed the configured size cap."""


class Symmetry(enum.Enum):
    R0 = "R0"
    R90 = "R90"
    R180 = "R180"
    R270 = "R270"
    H = "H"
    V = "V"
    D = "D"
    Dp = "Dp"

    @property
    def needs_square(self) -> bool:
        return self in _SQUARE_ONLY

    def map_cell(self, cell: Cell, m: int, n: int) -> Cell:
        """Image of ``cell`` on an ``m`` x ``n`` board."""
        i, j = cell
        if self is Symmetry.R0:
            return i, j
        if self is Symmetry.H:
            return m - 1 - i, j
        if self is Symmetry.V:
            return i, n - 1 - j
        if self is Symmetry.R180:
            return m - 1 - i, n - 1 - j
        if self is Symmetry.R90:
            return n - 1 - j, i
        if self is Symmetry.R270:
            return j, n - 1 - i
        if self is Symmetry.D:
            return j, i
        return n - 1 - j, n - 1 - i

    def __str__(self) -> str:
        return "D'" if self is Symmetry.Dp else self.value


_SQUARE_ONLY = frozenset({Symmetry.R90, Symmetry.R270, Symmetry.D, Symmetry.Dp})
_ORDER = list(Symmetry)


@lru_cache(maxsize=None)
def _probe_perm(g: Symmetry) -> tuple[Cell, ...]:
    # 4x4 probe: every element of D4 acts faithfully on it
    return tuple(g.map_cell((i, j), 4, 4) for i in range(4) for j in range(4))


@lru_cache(maxsize=None)
def compose(g: Symmetry, h: Symmetry) -> Symmetry:
    """The symmetry ``g∘h``: apply ``h`` first, then ``g``."""
    target = tuple(g.map_cell(c, 4, 4) for c in _probe_perm(h))
    for k in _ORDER:
        if _probe_perm(k) == target:
            return k
    raise AssertionError("D4 is not closed")  # pragma: no cover


def inverse(g: Symmetry) -> Symmetry:
    for k in _ORDER:
        if compose(k, g) is Symmetry.R0:
            return k
    raise AssertionError("no inverse")  # pragma: no cover


_NAMED_SUBGROUPS = {
    frozenset({"R0", "R90", "R180", "R270"}): "<R90>",
    frozenset({"R0", "H", "V", "R180"}): "<H,V>",
    frozenset({"R0", "D", "Dp", "R180"}): "<D,D'>",
}


@dataclass(frozen=True)
class SymmetryGroup:
    elements: tuple[Symmetry, ...]

    def __iter__(self) -> Iterator[Symmetry]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: object) -> bool:
        return g in self.elements

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def name(self) -> str:
        """Conventional name, e.g. ``D4``, ``<H,V>``, ``<D'>`` or ``<e>``."""
        tags = frozenset(g.value for g in self.elements)
        if len(tags) == 1:
            return "<e>"
        if len(tags) == 8:
            return "D4"
        if len(tags) == 2:
            (other,) = tags - {"R0"}
            return f"<{Symmetry(other)}>"
        return _NAMED_SUBGROUPS.get(tags, "{" + ",".join(sorted(tags)) + "}")

    def is_closed(self) -> bool:
        return all(compose(g, h) in self for g in self for h in self) and all(
            inverse(g) in self for g in self
        )

    def __str__(self) -> str:
        return self.name


def subgroup(elements: Iterable[Symmetry]) -> SymmetryGroup:
    """Group from a set of elements, in canonical element order."""
    chosen = set(elements)
    return SymmetryGroup(tuple(g for g in _ORDER if g in chosen))


@lru_cache(maxsize=None)
def symmetry_group_of(m: int, n: int) -> SymmetryGroup:
    if m < 1 or n < 1:
        raise ValueError(f"board dimensions must be positive, got {m}x{n}")
    S = Symmetry
    if m == 1 and n == 1:
        return SymmetryGroup((S.R0,))
    if m == n:
        return SymmetryGroup(tuple(_ORDER))
    if m == 1 or n == 1:
        return SymmetryGroup((S.R0, S.R180))
    return SymmetryGroup((S.R0, S.H, S.V, S.R180))


@dataclass(frozen=True)
class Board:
    """An ``rows`` x ``cols`` grid with a set of blocked cells."""

    rows: int
    cols: int
    blocked: frozenset[Cell]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"board dimensions must be positive, got {self.rows}x{self.cols}")
        if not isinstance(self.blocked, frozenset):
            object.__setattr__(self, "blocked", frozenset(self.blocked))
        for i, j in self.blocked:
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ValueError(f"blocked cell {(i, j)} outside {self.rows}x{self.cols} board")

    @classmethod
    def of(cls, rows: int, cols: int, blocked: Iterable[Cell] = ()) -> "Board":
        cells = list(blocked)
        if len(set(cells)) != len(cells):
            raise ValueError("duplicate blocked cells")
        return cls(rows, cols, frozenset(cells))

    @classmethod
    def from_mask(cls, rows: int, cols: int, mask: int) -> "Board":
        cells = []
        idx = 0
        while mask:
            if mask & 1:
                cells.append(divmod(idx, cols))
            mask >>= 1
            idx += 1
        return cls(rows, cols, frozenset(cells))

    @property
    def r(self) -> int:
        return len(self.blocked)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def mask(self) -> int:
        n = self.cols
        return sum(1 << (i * n + j) for i, j in self.blocked)

    def indices(self) -> tuple[int, ...]:
        """Sorted row-major indices of the blocked cells."""
        n = self.cols
        return tuple(sorted(i * n + j for i, j in self.blocked))

    def open_cells(self) -> list[Cell]:
        return [
            (i, j)
            for i in range(self.rows)
            for j in range(self.cols)
            if (i, j) not in self.blocked
        ]

    def __str__(self) -> str:
        return format_board(self)


def apply_symmetry(g: Symmetry, b: Board) -> Board:
    m, n = b.rows, b.cols
    if g.needs_square and m != n:
        raise DimensionError(f"{g} needs a square board, got {m}x{n}")
    return Board(m, n, frozenset(g.map_cell(c, m, n) for c in b.blocked))


def orbit(b: Board) -> set[Board]:
    return {apply_symmetry(g, b) for g in symmetry_group_of(b.rows, b.cols)}


def stabilizer(b: Board) -> SymmetryGroup:
    G = symmetry_group_of(b.rows, b.cols)
    return SymmetryGroup(tuple(g for g in G if apply_symmetry(g, b) == b))


def canonical_form(b: Board) -> Board:
    """Orbit member whose sorted row-major blocked indices are lexicographically least."""
    return min(orbit(b), key=Board.indices)


def brute_force_orbit_classes(
    m: int, n: int, r: int, cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> list[Board]:
    """Canonical representatives of every class, by exhaustive enumeration.

    Boards are enumerated as bit masks with numpy; the result is sorted by
    blocked-index tuple.
    """
    from . import masks

    keys = masks.brute_force_canonical_keys(m, n, r, cap=cap)
    out = [Board.from_mask(m, n, int(x)) for x in masks.keys_to_masks(keys, m, n)]
    out.sort(key=Board.indices)
    return out


def check_enumeration_cap(m: int, n: int, r: int, cap: int) -> int:
    total = math.comb(m * n, r) if 0 <= r <= m * n else 0
    if total > cap:
        raise CapExceededError(f"C({m * n},{r}) = {total} boards exceeds cap {cap}")
    return total


def all_boards(m: int, n: int, r: int) -> Iterator[Board]:
    """Every board in the family, in lexicographic order of blocked indices."""
    for combo in itertools.combinations(range(m * n), r):
        yield Board(m, n, frozenset(divmod(idx, n) for idx in combo))


# -- text format -------------------------------------------------------------


def format_board(b: Board) -> str:
    lines = [f"{b.rows} {b.cols}"]
    for i in range(b.rows):
        lines.append("".join("#" if (i, j) in b.blocked else "." for j in range(b.cols)))
    return "\n".join(lines)


def parse_board(text: str) -> Board:
    """Parse the grid form (``m n`` then rows of ``#``/``.``) or ``m n: r,c r,c ...``."""
    text = text.strip()
    if not text:
        raise ValueError("empty board text")
    head, _, rest = text.partition("\n")
    if ":" in head:
        dims, _, cells = head.partition(":")
        m, n = _parse_dims(dims)
        blocked = []
        for tok in cells.split():
            a, _, c = tok.partition(",")
            blocked.append((int(a), int(c)))
        return Board.of(m, n, blocked)
    m, n = _parse_dims(head)
    grid = [line.strip() for line in rest.splitlines() if line.strip()]
    if len(grid) != m or any(len(line) != n for line in grid):
        raise ValueError(f"expected {m} rows of {n} characters")
    blocked = []
    for i, line in enumerate(grid):
        for j, ch in enumerate(line):
            if ch == "#":
                blocked.append((i, j))
            elif ch != ".":
                raise ValueError(f"unexpected character {ch!r} in board grid")
    return Board.of(m, n, blocked)


def parse_boards(text: str) -> list[Board]:
    """Parse a stream of boards separated by blank lines."""
    boards = []
    for chunk in text.strip().split("\n\n"):
        if chunk.strip():
            boards.append(parse_board(chunk))
    return boards


def _parse_dims(s: str) -> tuple[int, int]:
    parts = s.split()
    if len(parts) != 2:
        raise ValueError(f"expected 'm n', got {s!r}")
    return int(parts[0]), int(parts[1])
