import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boardsym.grid_core import Board, apply_symmetry, symmetry_group_of
from boardsym.polyomino import PieceSet, builtin_piece
from boardsym.tiling_solver import (
    AreaMismatchError,
    BatchSolver,
    NodeCapExceeded,
    Tiling,
    resolve_backend,
    solvable,
    solve_witness,
    validate_tiling,
)

from .oracles import tileable_regions

SAMPLE_BOARD = [(0, 2), (0, 4), (2, 2), (3, 1), (4, 4), (5, 0), (5, 5)]
GENIUS = PieceSet.preset("genius-square")
BACKENDS = ["bitboard", "exact_cover"]


def one(name: str, count: int = 1) -> PieceSet:
    return PieceSet.of([(builtin_piece(name), count)])


def random_board(rng: random.Random, m: int, n: int, r: int) -> Board:
    cells = [(i, j) for i in range(m) for j in range(n)]
    return Board(m, n, frozenset(rng.sample(cells, r)))


@pytest.mark.parametrize("backend", BACKENDS)
def test_examples(backend):
    b = Board.of(6, 6, SAMPLE_BOARD)
    assert solvable(b, GENIUS, backend=backend)
    assert solvable(Board.of(2, 2, []), one("O-tetromino"), backend=backend)
    assert not solvable(Board.of(1, 4, []), one("O-tetromino"), backend=backend)
    with pytest.raises(AreaMismatchError):
        solvable(Board.of(2, 2, []), one("domino"), backend=backend)


@pytest.mark.parametrize("backend", BACKENDS)
def test_witness_examples(backend):
    b = Board.of(2, 3, [])
    ps = one("L-tromino", 2)
    w = solve_witness(b, ps, backend=backend)
    assert len(w.assignments) == 2
    assert validate_tiling(b, ps, w) == []
    w = solve_witness(Board.of(1, 4, []), one("I-tetromino"), backend=backend)
    assert w.assignments == ((0, frozenset({(0, 0), (0, 1), (0, 2), (0, 3)})),)
    assert solve_witness(Board.of(1, 4, []), one("O-tetromino"), backend=backend) is None


def test_sample_board_witness_render():
    b = Board.of(6, 6, SAMPLE_BOARD)
    w = solve_witness(b, GENIUS)
    assert validate_tiling(b, GENIUS, w) == []
    text = w.render(b)
    rows = text.splitlines()
    assert len(rows) == 6 and all(len(row) == 6 for row in rows)
    assert {(i, j) for i, row in enumerate(rows) for j, ch in enumerate(row) if ch == "#"} == set(SAMPLE_BOARD)
    assert len(set(text) - {"#", "\n"}) == 9


def test_witness_is_deterministic():
    b = Board.of(6, 6, SAMPLE_BOARD)
    assert solve_witness(b, GENIUS) == solve_witness(b, GENIUS)
    assert solve_witness(b, GENIUS, backend="exact_cover") == solve_witness(b, GENIUS, backend="exact_cover")


def test_validator_catches_bad_tilings():
    b = Board.of(2, 3, [])
    ps = one("L-tromino", 2)
    good = solve_witness(b, ps)
    (i0, c0), (i1, c1) = good.assignments
    assert validate_tiling(b, ps, Tiling(((i0, c0),)))
    assert validate_tiling(b, ps, Tiling(((i0, c0), (i0, c1))))
    assert validate_tiling(b, ps, Tiling(((i0, c0), (i1, c0))))
    straight = frozenset({(0, 0), (0, 1), (0, 2)})
    assert validate_tiling(b, ps, Tiling(((0, straight), (1, frozenset({(1, 0), (1, 1), (1, 2)})))))


SMALL_CASES = [
    (3, 3, 1, [("L-tromino", 1), ("I-tromino", 1), ("domino", 1)]),
    (4, 4, 4, [("L-tetromino", 1), ("T-tetromino", 1), ("domino", 2)]),
    (4, 4, 4, [("L-tromino", 4)]),
    (3, 4, 2, [("S-tetromino", 1), ("L-tetromino", 1), ("domino", 1)]),
    (4, 4, 2, [("monomino", 1), ("domino", 1), ("I-tromino", 1), ("I-tetromino", 1), ("L-tetromino", 1)]),
    (2, 5, 0, [("P-pentomino", 2)]),
]


@pytest.mark.parametrize("m,n,r,spec", SMALL_CASES)
def test_against_placement_oracle(m, n, r, spec):
    ps = PieceSet.of([(builtin_piece(name), c) for name, c in spec])
    tileable = tileable_regions(m, n, [(list(p.cells), c) for p, c in ps.pieces])
    full = (1 << (m * n)) - 1
    from boardsym.grid_core import all_boards

    boards = list(all_boards(m, n, r))
    batch = BatchSolver(m, n, ps).classify(np.array([b.mask for b in boards], dtype=np.uint64))
    for b, status in zip(boards, batch):
        expected = (full & ~b.mask) in tileable
        assert bool(status) == expected
        for backend in BACKENDS:
            assert solvable(b, ps, backend=backend) == expected
        assert solvable(b, ps, prune=False) == expected


TIER_7 = [
    (6, 8, 3, one("P-pentomino", 9)),
    (5, 7, 5, one("L-tromino", 10)),
]


@pytest.mark.parametrize("m,n,r,ps", TIER_7)
def test_backends_agree_on_random_boards(m, n, r, ps):
    rng = random.Random(11)
    for _ in range(60):
        b = random_board(rng, m, n, r)
        results = {backend: solvable(b, ps, backend=backend) for backend in BACKENDS}
        assert len(set(results.values())) == 1, (b, results)


@pytest.mark.parametrize("m,n,r,ps", TIER_7)
def test_symmetry_invariance_sample(m, n, r, ps):
    rng = random.Random(5)
    G = symmetry_group_of(m, n)
    for _ in range(100):
        b = random_board(rng, m, n, r)
        g = rng.choice(G.elements)
        assert solvable(b, ps) == solvable(apply_symmetry(g, b), ps)


def test_checkerboard_colouring():
    # dominoes always cover one dark and one light cell
    rng = random.Random(3)
    dominoes = one("domino", 8)
    for _ in range(200):
        b = random_board(rng, 4, 5, 4)
        dark = sum((i + j) % 2 == 0 for i, j in b.open_cells())
        if dark != 8:
            assert not solvable(b, dominoes)
    with pytest.raises(AreaMismatchError):
        solvable(random_board(rng, 4, 5, 3), dominoes)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**20 - 1))
def test_random_witnesses_validate(seed):
    rng = random.Random(seed)
    b = random_board(rng, 5, 7, 5)
    ps = one("L-tromino", 10)
    w = solve_witness(b, ps)
    assert (w is not None) == solvable(b, ps, backend="exact_cover")
    if w is not None:
        assert validate_tiling(b, ps, w) == []


@pytest.mark.parametrize("backend", BACKENDS)
def test_node_cap(backend):
    b = Board.of(8, 8, [(0, 0), (0, 7), (7, 0), (7, 7)])
    ps = PieceSet.preset("pentominoes-all")
    with pytest.raises(NodeCapExceeded) as info:
        solvable(b, ps, node_cap=5, backend=backend)
    assert info.value.board == b


def test_batch_cap_names_the_board():
    ps = PieceSet.preset("pentominoes-all")
    masks = np.array([Board.of(8, 8, [(0, 0), (0, 7), (7, 0), (7, 7)]).mask], dtype=np.uint64)
    with pytest.raises(NodeCapExceeded) as info:
        BatchSolver(8, 8, ps, node_cap=5).classify(masks)
    assert info.value.board.blocked == {(0, 0), (0, 7), (7, 0), (7, 7)}


def test_large_board_falls_back_to_exact_cover():
    b = Board.of(9, 8, [])
    assert resolve_backend(b) == "exact_cover"
    with pytest.raises(ValueError):
        resolve_backend(b, "bitboard")
    with pytest.raises(ValueError):
        resolve_backend(b, "simplex")
    assert solvable(b, one("I-tetromino", 18))
    assert BatchSolver(9, 8, one("I-tetromino", 18)).classify([b.mask]).tolist() == [1]
