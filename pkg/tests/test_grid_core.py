import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boardsym.grid_core import (
    Board,
    CapExceededError,
    DimensionError,
    Symmetry,
    all_boards,
    apply_symmetry,
    brute_force_orbit_classes,
    canonical_form,
    compose,
    format_board,
    inverse,
    orbit,
    parse_board,
    parse_boards,
    stabilizer,
    symmetry_group_of,
)

from .oracles import canonical_bytes, orbit_classes, to_array

S = Symmetry
SAMPLE_BOARD = [(0, 2), (0, 4), (2, 2), (3, 1), (4, 4), (5, 0), (5, 5)]


@st.composite
def boards(draw, max_side=6):
    m = draw(st.integers(1, max_side))
    n = draw(st.integers(1, max_side))
    cells = [(i, j) for i in range(m) for j in range(n)]
    blocked = draw(st.sets(st.sampled_from(cells), max_size=len(cells)))
    return Board(m, n, frozenset(blocked))


def test_group_table():
    assert symmetry_group_of(6, 6).name == "D4"
    assert symmetry_group_of(6, 6).order == 8
    assert symmetry_group_of(6, 8).name == "<H,V>"
    assert symmetry_group_of(6, 8).order == 4
    assert symmetry_group_of(1, 4).elements == (S.R0, S.R180)
    assert symmetry_group_of(5, 1).elements == (S.R0, S.R180)
    assert symmetry_group_of(1, 1).elements == (S.R0,)
    for m, n in [(6, 6), (6, 8), (1, 4), (1, 1), (3, 3)]:
        G = symmetry_group_of(m, n)
        assert G.elements[0] is S.R0
        assert G.is_closed()


def test_involutions_and_rotation_inverse():
    for g in (S.H, S.V, S.D, S.Dp, S.R180):
        assert compose(g, g) is S.R0
        assert inverse(g) is g
    assert compose(S.R90, S.R270) is S.R0
    assert compose(S.R90, S.R90) is S.R180


def test_cell_maps_agree_with_numpy():
    # R90 is counter-clockwise, H swaps rows, D is the transpose
    numpy_forms = {
        S.R0: lambda a: a,
        S.R90: lambda a: a[:, ::-1].T,
        S.R180: lambda a: a[::-1, ::-1],
        S.R270: lambda a: a[::-1, :].T,
        S.H: lambda a: a[::-1, :],
        S.V: lambda a: a[:, ::-1],
        S.D: lambda a: a.T,
        S.Dp: lambda a: a[::-1, ::-1].T,
    }
    b = Board.of(4, 4, [(0, 1), (0, 2), (1, 3), (3, 0)])
    for g, f in numpy_forms.items():
        image = apply_symmetry(g, b)
        assert (to_array(4, 4, image.blocked) == f(to_array(4, 4, b.blocked))).all(), g


def test_apply_symmetry_examples():
    b = Board.of(2, 2, [(0, 1)])
    assert apply_symmetry(S.R0, b) == b
    assert apply_symmetry(S.D, b).blocked == {(1, 0)}
    assert apply_symmetry(S.R180, Board.of(1, 4, [(0, 0)])).blocked == {(0, 3)}
    with pytest.raises(DimensionError):
        apply_symmetry(S.R90, Board.of(2, 3, []))


def test_orbit_and_stabilizer_examples():
    assert len(orbit(Board.of(2, 2, [(0, 0)]))) == 4
    assert len(orbit(Board.of(3, 3, [(1, 1)]))) == 1
    full = Board(3, 4, frozenset((i, j) for i in range(3) for j in range(4)))
    assert len(orbit(full)) == 1
    assert set(stabilizer(Board.of(3, 3, [(0, 0)]))) == {S.R0, S.D}
    assert stabilizer(Board.of(3, 3, [(1, 1)])).order == 8
    assert set(stabilizer(Board.of(2, 3, [(0, 0)]))) == {S.R0}


def test_canonical_form_examples():
    assert canonical_form(Board.of(2, 2, [(1, 1)])).blocked == {(0, 0)}
    full = Board(2, 3, frozenset((i, j) for i in range(2) for j in range(3)))
    assert canonical_form(full) == full
    b = Board.of(6, 6, SAMPLE_BOARD)
    images = sorted((apply_symmetry(g, b) for g in symmetry_group_of(6, 6)), key=Board.indices)
    assert canonical_form(b) == images[0]


def test_board_validation():
    with pytest.raises(ValueError):
        Board.of(2, 2, [(2, 0)])
    with pytest.raises(ValueError):
        Board.of(2, 2, [(0, 0), (0, 0)])
    with pytest.raises(ValueError):
        Board(0, 3, frozenset())


def test_orbit_stabilizer_exhaustive_small():
    for m, n in itertools.product(range(1, 4), repeat=2):
        G = symmetry_group_of(m, n)
        for r in range(m * n + 1):
            for b in all_boards(m, n, r):
                assert len(orbit(b)) * stabilizer(b).order == G.order


@settings(max_examples=200, deadline=None)
@given(boards())
def test_group_action_properties(b):
    G = symmetry_group_of(b.rows, b.cols)
    canon = canonical_form(b)
    assert canonical_form(canon) == canon
    assert canon.indices() == tuple(sorted(canon.indices()))
    assert len(orbit(b)) * stabilizer(b).order == G.order
    for g in G:
        image = apply_symmetry(g, b)
        assert image.r == b.r
        assert canonical_form(image) == canon
        for h in G:
            assert apply_symmetry(g, apply_symmetry(h, b)) == apply_symmetry(compose(g, h), b)


@settings(max_examples=200, deadline=None)
@given(boards())
def test_canonical_form_matches_numpy_oracle(b):
    # the min-lex index tuple is the max row-major bit string
    canon = canonical_form(b)
    assert to_array(b.rows, b.cols, canon.blocked).tobytes() == canonical_bytes(b.rows, b.cols, b.blocked)


def test_brute_force_classes_examples():
    assert len(brute_force_orbit_classes(2, 2, 1)) == 1
    assert len(brute_force_orbit_classes(3, 3, 2)) == 8
    with pytest.raises(CapExceededError):
        brute_force_orbit_classes(6, 6, 7, cap=1000)


@pytest.mark.parametrize("m,n", [(1, 5), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (2, 5)])
def test_brute_force_classes_match_oracle(m, n):
    for r in range(m * n + 1):
        classes = brute_force_orbit_classes(m, n, r)
        expected = orbit_classes(m, n, r)
        assert len(classes) == len(expected)
        assert {to_array(m, n, b.blocked).tobytes() for b in classes} == expected
        assert all(canonical_form(b) == b for b in classes)


def test_all_boards_count():
    assert sum(1 for _ in all_boards(3, 4, 5)) == math.comb(12, 5)


def test_text_round_trip():
    b = Board.of(6, 6, SAMPLE_BOARD)
    text = format_board(b)
    assert text.splitlines()[0] == "6 6"
    assert text.splitlines()[1] == "..#.#."
    assert parse_board(text) == b
    assert parse_board("6 6: 0,2 0,4 2,2 3,1 4,4 5,0 5,5") == b
    assert parse_boards(text + "\n\n" + format_board(Board.of(2, 2, []))) == [b, Board.of(2, 2, [])]
    with pytest.raises(ValueError):
        parse_board("2 2\n#.\n")
    with pytest.raises(ValueError):
        parse_board("2 2\n#x\n..")
