import json
import math

import pytest

from boardsym.census import (
    CSV_COLUMNS,
    CensusAborted,
    CensusConfig,
    CheckpointError,
    CheckpointState,
    checkpoint_read,
    checkpoint_write,
    run_census,
    work_units,
)
from boardsym.partitions import admissible_partitions
from boardsym.polyomino import PieceSet, builtin_piece
from boardsym.tiling_solver import AreaMismatchError

from .oracles import unsolvable_count


def pieces(*spec) -> PieceSet:
    return PieceSet.of([(builtin_piece(name), count) for name, count in spec])


P9 = pieces(("P-pentomino", 9))


@pytest.fixture(scope="module")
def p9_report():
    return run_census(CensusConfig(6, 8, 3, P9))


def test_p_pentomino_census(p9_report):
    rep = p9_report
    assert rep.reduced_total == 4_324
    assert rep.reduced_unsolvable == 2_572
    assert rep.weighted_unsolvable == 10_288
    assert rep.weighted_total == math.comb(48, 3)
    assert rep.weighted_solvable + rep.weighted_unsolvable == rep.weighted_total
    assert rep.orbit_count == 4_324 and rep.ratio == 1
    assert rep.complete
    for rec in rep.records:
        assert rec.solvable_count + rec.unsolvable_count == rec.board_count


@pytest.mark.parametrize(
    "m,n,r,spec",
    [
        (4, 4, 4, [("L-tromino", 4)]),
        (4, 4, 2, [("monomino", 1), ("domino", 1), ("I-tromino", 1), ("I-tetromino", 1), ("L-tetromino", 1)]),
        (3, 4, 2, [("S-tetromino", 1), ("L-tetromino", 1), ("domino", 1)]),
        (4, 3, 4, [("domino", 4)]),
        (3, 3, 3, [("L-tromino", 2)]),
        (2, 4, 0, [("L-tetromino", 2)]),
        (1, 5, 1, [("domino", 2)]),
    ],
)
def test_weighted_totals_match_full_space(m, n, r, spec):
    ps = pieces(*spec)
    rep = run_census(CensusConfig(m, n, r, ps))
    expected = unsolvable_count(m, n, r, [(list(p.cells), c) for p, c in ps.pieces])
    assert rep.weighted_unsolvable == expected
    assert rep.weighted_total == math.comb(m * n, r)


def test_determinism_across_workers_and_shards(p9_report):
    for jobs, shard in [(1, 97), (2, 500), (4, 1000)]:
        rep = run_census(CensusConfig(6, 8, 3, P9, jobs=jobs, shard_size=shard))
        assert rep == p9_report
        assert rep.summary_line() == p9_report.summary_line()
        assert rep.to_csv() == p9_report.to_csv()


def test_config_validation():
    with pytest.raises(AreaMismatchError):
        CensusConfig(6, 8, 4, P9).validate()
    with pytest.raises(ValueError):
        CensusConfig(6, 8, 3, P9, jobs=0).validate()
    with pytest.raises(ValueError):
        CensusConfig(6, 8, 49, P9).validate()


def test_work_units_cover_each_partition():
    classes = admissible_partitions(6, 8, 3)
    units = work_units(classes, 700)
    for pidx, pc in enumerate(classes):
        spans = sorted((start, stop) for p, _, start, stop in units if p == pidx)
        assert spans[0][0] == 0 and spans[-1][1] == pc.board_count
        assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))


def test_checkpoint_round_trip(tmp_path):
    state = CheckpointState("abc123")
    state.add(0, 0, 100, 7)
    state.add(2, 100, 150, 0)
    path = tmp_path / "ck.jsonl"
    checkpoint_write(path, state)
    assert checkpoint_read(path) == state


def test_resume_completed_run(tmp_path):
    path = tmp_path / "ck.jsonl"
    cfg = CensusConfig(6, 8, 3, P9, checkpoint=path, shard_size=500)
    first = run_census(cfg)
    second = run_census(cfg)
    assert second == first
    assert second.stats.units_solved == 0
    assert second.stats.units_resumed == first.stats.units_total


def test_resume_after_interruption(tmp_path, p9_report):
    path = tmp_path / "ck.jsonl"
    cfg = CensusConfig(6, 8, 3, P9, checkpoint=path, shard_size=300)
    full = run_census(cfg)
    lines = path.read_text().splitlines(keepends=True)
    kept = lines[:5]
    # simulate a crash mid-append
    path.write_text("".join(kept) + lines[5][: len(lines[5]) // 2])
    resumed = run_census(cfg)
    assert resumed == full == p9_report
    assert resumed.stats.units_resumed == 4
    assert resumed.stats.units_solved == full.stats.units_total - 4
    assert resumed.summary_line() == p9_report.summary_line()
    assert all(json.loads(line) for line in path.read_text().splitlines())


def test_checkpoint_errors(tmp_path):
    path = tmp_path / "ck.jsonl"
    cfg = CensusConfig(6, 8, 3, P9, checkpoint=path, shard_size=500)
    run_census(cfg)
    other = CensusConfig(6, 8, 3, P9, checkpoint=path, shard_size=400)
    with pytest.raises(CheckpointError):
        run_census(other)

    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    header["version"] = 99
    path.write_text("\n".join([json.dumps(header)] + lines[1:]) + "\n")
    with pytest.raises(CheckpointError):
        checkpoint_read(path)

    path.write_text("\n".join([lines[0], "{broken", *lines[1:]]) + "\n")
    with pytest.raises(CheckpointError):
        run_census(cfg)

    path.write_text("")
    assert run_census(cfg).reduced_unsolvable == 2_572


def test_node_cap_aborts_with_board():
    cfg = CensusConfig(8, 8, 4, PieceSet.preset("pentominoes-all"), node_cap=10, shard_size=50)
    with pytest.raises(CensusAborted) as info:
        run_census(cfg)
    assert info.value.board.r == 4


def test_reports(tmp_path, p9_report):
    csv_path = tmp_path / "out.csv"
    run_census(CensusConfig(6, 8, 3, P9, csv_path=csv_path))
    rows = csv_path.read_text().splitlines()
    assert rows[0].split(",") == list(CSV_COLUMNS)
    assert len(rows) == 6
    assert rows[1].startswith("RectEven,3,0,0,0,0,0,0,0,0,4,220,")
    assert rows[1].endswith(",complete")
    line = p9_report.summary_line()
    fields = dict(kv.split("=") for kv in line.split())
    assert fields["reduced_unsolvable"] == "2572"
    assert fields["weighted_unsolvable"] == "10288"
    table = p9_report.table()
    assert "weighted total" in table and "10288" in table
