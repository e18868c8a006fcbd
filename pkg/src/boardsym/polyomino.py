"""Free polyominoes, piece sets and placements on blocked boards."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .grid_core import Board, Cell


class PieceError(ValueError):
    """Malformed, disconnected or unknown piece specification."""


def _normalize(cells: Iterable[Cell]) -> tuple[Cell, ...]:
    cells = list(cells)
    r0 = min(r for r, _ in cells)
    c0 = min(c for _, c in cells)
    return tuple(sorted((r - r0, c - c0) for r, c in cells))


def _dihedral_images(cells: Iterable[Cell]) -> list[tuple[Cell, ...]]:
    cells = list(cells)
    out = []
    for transpose in (False, True):
        base = [(c, r) for r, c in cells] if transpose else cells
        for fr in (1, -1):
            for fc in (1, -1):
                out.append(_normalize((fr * r, fc * c) for r, c in base))
    return out


def is_connected(cells: Iterable[Cell]) -> bool:
    cells = set(cells)
    if not cells:
        return False
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        r, c = stack.pop()
        for nb in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class FreePolyomino:
    cells: tuple[Cell, ...]
    name: str = ""

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FreePolyomino) and self.cells == other.cells

    def __hash__(self) -> int:
        return hash(self.cells)

    @property
    def order(self) -> int:
        return len(self.cells)

    @cached_property
    def images(self) -> tuple[tuple[Cell, ...], ...]:
        """Distinct fixed orientations, sorted."""
        return tuple(sorted(set(_dihedral_images(self.cells))))

    def render(self) -> str:
        h = max(r for r, _ in self.cells) + 1
        w = max(c for _, c in self.cells) + 1
        cells = set(self.cells)
        return "\n".join("".join("#" if (r, c) in cells else "." for c in range(w)) for r in range(h))

    def __str__(self) -> str:
        return self.name or f"{self.order}-omino"


def canonical_free_form(cells: Iterable[Cell], name: str = "") -> FreePolyomino:
    cells = list(cells)
    if not cells:
        raise PieceError("a polyomino needs at least one cell")
    if len(set(cells)) != len(cells):
        raise PieceError("duplicate cells in polyomino")
    if not is_connected(cells):
        raise PieceError("polyomino cells are not edge-connected")
    return FreePolyomino(min(_dihedral_images(cells)), name)


def from_ascii(text: str, name: str = "") -> FreePolyomino:
    rows = [line.strip() for line in text.strip().splitlines() if line.strip()]
    cells = []
    for r, line in enumerate(rows):
        for c, ch in enumerate(line):
            if ch == "#":
                cells.append((r, c))
            elif ch != ".":
                raise PieceError(f"unexpected character {ch!r} in piece grid")
    return canonical_free_form(cells, name)


_SHAPES = {
    "monomino": "#",
    "domino": "##",
    "I-tromino": "###",
    "L-tromino": "##\n#.",
    "I-tetromino": "####",
    "L-tetromino": "###\n#..",
    "O-tetromino": "##\n##",
    "S-tetromino": ".##\n##.",
    "T-tetromino": "###\n.#.",
    "F-pentomino": ".##\n##.\n.#.",
    "I-pentomino": "#####",
    "L-pentomino": "####\n#...",
    "N-pentomino": "##..\n.###",
    "P-pentomino": "##\n##\n#.",
    "T-pentomino": "###\n.#.\n.#.",
    "U-pentomino": "#.#\n###",
    "V-pentomino": "#..\n#..\n###",
    "W-pentomino": "#..\n##.\n.##",
    "X-pentomino": ".#.\n###\n.#.",
    "Y-pentomino": "####\n.#..",
    "Z-pentomino": "##.\n.#.\n.##",
}

_ALIASES = {
    "square-tetromino": "O-tetromino",
    "z-tetromino": "S-tetromino",
}

PRESETS: dict[str, list[tuple[str, int]]] = {
    "genius-square": [
        ("monomino", 1),
        ("domino", 1),
        ("I-tromino", 1),
        ("L-tromino", 1),
        ("I-tetromino", 1),
        ("L-tetromino", 1),
        ("O-tetromino", 1),
        ("S-tetromino", 1),
        ("T-tetromino", 1),
    ],
    "pentominoes-all": [(f"{x}-pentomino", 1) for x in "FILNPTUVWXYZ"],
    "tetrominoes-all": [(f"{x}-tetromino", 1) for x in "ILOST"],
    "tetrominoes-6x7": [
        ("I-tetromino", 2),
        ("L-tetromino", 2),
        ("O-tetromino", 2),
        ("T-tetromino", 2),
        ("S-tetromino", 1),
    ],
    "i-pieces": [
        ("monomino", 1),
        ("domino", 1),
        ("I-tromino", 1),
        ("I-tetromino", 1),
        ("I-pentomino", 1),
    ],
}

_LOOKUP = {name.lower(): name for name in _SHAPES}


def builtin_piece(name: str) -> FreePolyomino:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    canonical = _LOOKUP.get(key.lower())
    if canonical is None:
        raise PieceError(f"unknown piece name {name!r}")
    return from_ascii(_SHAPES[canonical], canonical)


@dataclass(frozen=True)
class PieceSet:
    pieces: tuple[tuple[FreePolyomino, int], ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise PieceError("empty piece set")
        for piece, count in self.pieces:
            if count < 1:
                raise PieceError(f"multiplicity of {piece} must be positive, got {count}")

    @classmethod
    def of(cls, items: Iterable[tuple[FreePolyomino, int]]) -> "PieceSet":
        """Merge duplicate shapes, keeping the first name seen."""
        merged: dict[FreePolyomino, list] = {}
        for piece, count in items:
            if piece in merged:
                merged[piece][1] += count
            else:
                merged[piece] = [piece, count]
        return cls(tuple((p, c) for p, c in merged.values()))

    @classmethod
    def preset(cls, name: str, times: int = 1) -> "PieceSet":
        key = name.strip().lower()
        if key not in PRESETS:
            raise PieceError(f"unknown preset {name!r}")
        return cls.of((builtin_piece(p), c * times) for p, c in PRESETS[key])

    @property
    def total_area(self) -> int:
        return sum(p.order * c for p, c in self.pieces)

    @property
    def piece_count(self) -> int:
        return sum(c for _, c in self.pieces)

    def expanded(self) -> list[FreePolyomino]:
        return [p for p, c in self.pieces for _ in range(c)]

    def describe(self) -> str:
        return ", ".join(f"{p}x{c}" for p, c in self.pieces)


def _is_grid_line(line: str) -> bool:
    return bool(line) and set(line) <= {"#", "."}


def parse_pieces(text: str) -> PieceSet:
    """Parse the line-oriented piece format.

    Each entry is ``name`` or ``name:count`` (a built-in piece or preset), or
    ``label:count`` followed by an ASCII grid of ``#``/``.`` ended by a blank
    line.
    """
    lines = [line.strip() for line in text.splitlines()]
    items: list[tuple[FreePolyomino, int]] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        i += 1
        if not line:
            continue
        if _is_grid_line(line):
            raise PieceError(f"grid line {line!r} without a label")
        label, sep, count_s = line.partition(":")
        label = label.strip()
        try:
            count = int(count_s) if sep else 1
        except ValueError:
            raise PieceError(f"bad multiplicity in {line!r}") from None
        if count < 1:
            raise PieceError(f"multiplicity must be positive in {line!r}")
        grid = []
        while i < len(lines) and _is_grid_line(lines[i]):
            grid.append(lines[i])
            i += 1
        if grid:
            items.append((from_ascii("\n".join(grid), label), count))
        elif label.lower() in PRESETS:
            items.extend(PieceSet.preset(label, count).pieces)
        else:
            items.append((builtin_piece(label), count))
    return PieceSet.of(items)


def load_pieces(spec: str) -> PieceSet:
    """A preset/piece name, or a path to a piece file."""
    from pathlib import Path

    path = Path(spec)
    if path.exists():
        return parse_pieces(path.read_text())
    return parse_pieces(spec)


def placements(p: FreePolyomino, b: Board) -> list[frozenset[Cell]]:
    """Every position of ``p`` on the open cells of ``b``."""
    out = set()
    for image in p.images:
        h = max(r for r, _ in image) + 1
        w = max(c for _, c in image) + 1
        for dr in range(b.rows - h + 1):
            for dc in range(b.cols - w + 1):
                cells = frozenset((r + dr, c + dc) for r, c in image)
                if not cells & b.blocked:
                    out.add(cells)
    return sorted(out, key=lambda s: tuple(sorted(s)))
