import numpy as np
import pytest

from covfix.instance import (
    DimensionMismatch,
    DuplicateIndex,
    EmptyRow,
    IndexOutOfRange,
    InfeasibleReduction,
    NonPositiveCost,
    OverlappingFixings,
    ReducedInstance,
    TransposeMismatch,
    restrict,
    validate,
)
from tests.helpers import T1, T2, random_instances


def test_validate_builds_both_views():
    """Rows and columns describe the same matrix."""
    assert T1.rows == ((0, 1), (1, 2))
    assert T1.cols == ((0,), (0, 1), (1,))
    assert T1.integral
    assert T1.nnz == 4
    assert T1.dense.tolist() == [[1, 1, 0], [0, 1, 1]]


def test_validate_sorts_unsorted_supports():
    """Supports may arrive in any order."""
    inst = validate(1, 3, [1, 2, 3], [[2, 0]])
    assert inst.rows == ((0, 2),)


def test_validate_checks_cols_against_rows():
    """An explicit column view must be the transpose."""
    validate(2, 3, [1, 1, 3], [[0, 1], [1, 2]], cols=[[0], [0, 1], [1]])
    with pytest.raises(TransposeMismatch):
        validate(2, 3, [1, 1, 3], [[0, 1], [1, 2]], cols=[[0], [1], [1]])


@pytest.mark.parametrize(
    "args, error",
    [
        ((2, 3, [1, 1, 3], [[0, 1], []]), EmptyRow),
        ((1, 3, [1, 0, 3], [[0]]), NonPositiveCost),
        ((1, 3, [1, -2, 3], [[0]]), NonPositiveCost),
        ((1, 3, [1, 1, 3], [[0, 3]]), IndexOutOfRange),
        ((1, 3, [1, 1, 3], [[1, 1]]), DuplicateIndex),
        ((1, 3, [1, 1], [[0]]), DimensionMismatch),
        ((2, 3, [1, 1, 3], [[0]]), DimensionMismatch),
    ],
)
def test_validate_rejects(args, error):
    """Malformed instances are rejected at construction."""
    with pytest.raises(error):
        validate(*args)


def test_restrict_drops_columns():
    """Dropping columns 1 and 3 of T1 leaves column 2 on both rows."""
    reduced = restrict(T1, drop_cols_to_zero={0, 2})
    assert (reduced.n_rows, reduced.n_cols) == (2, 1)
    assert reduced.col_map == (1,)
    assert reduced.fixed_to_zero == {0, 2}
    assert reduced.cost_offset == 0


def test_restrict_fix_to_one_removes_covered_rows():
    """Column 2 covers both rows of T1."""
    reduced = restrict(T1, fix_cols_to_one={1})
    assert (reduced.n_rows, reduced.n_cols) == (0, 2)
    assert reduced.col_map == (0, 2)
    assert reduced.fixed_to_one == {1}
    assert reduced.cost_offset == 1
    assert reduced.original_column_ids() == [1, 3]


def test_restrict_rejects_uncoverable_row():
    """Dropping the only column of a row is infeasible."""
    with pytest.raises(InfeasibleReduction) as e:
        restrict(T2, drop_cols_to_zero={0})
    assert e.value.row == 0


def test_restrict_rejects_overlap():
    """A column cannot be fixed both ways."""
    with pytest.raises(OverlappingFixings):
        restrict(T1, drop_cols_to_zero={1}, fix_cols_to_one={1})


def test_restrict_rejects_bad_index():
    """Indices are checked against the current instance."""
    with pytest.raises(IndexOutOfRange):
        restrict(T1, drop_rows={2})


def test_restrict_chains_maps_to_original_indices():
    """Later reductions map back through earlier ones."""
    first = restrict(T2, drop_rows={1})
    assert first.row_map == (0, 2)
    second = first.restrict(fix_cols_to_one={0})
    assert second.row_map == (2,)
    assert second.col_map == (1, 2)
    assert second.fixed_to_one == {0}
    assert second.cost_offset == 2
    third = second.restrict(drop_cols_to_zero={1})
    assert third.col_map == (1,)
    assert third.fixed_to_zero == {2}


def test_compose_matches_chained_restrict():
    """Composing a reduction of the sub-instance equals restricting in place."""
    outer = restrict(T2, drop_rows={1})
    inner = ReducedInstance.identity(outer.instance).restrict(fix_cols_to_one={0})
    assert outer.compose(inner) == outer.restrict(fix_cols_to_one={0})


def test_identity_is_not_empty():
    """Only a reduction without rows and columns is empty."""
    assert not ReducedInstance.identity(T1).is_empty
    assert restrict(T1, fix_cols_to_one={1}).restrict(drop_cols_to_zero={0, 1}).is_empty


def _subset(rng: np.random.Generator, candidates: list[int], p: float) -> set[int]:
    return {j for j in candidates if rng.random() < p}


def test_restrict_composition_on_random_instances():
    """Two reductions in a row equal one reduction by the combined original columns."""
    rng = np.random.default_rng(41)
    checked = 0
    for inst in random_instances(seed=41, count=300, max_rows=8, max_cols=12):
        zero = _subset(rng, list(range(inst.n_cols)), 0.2)
        one = _subset(rng, [j for j in range(inst.n_cols) if j not in zero], 0.1)
        try:
            first = restrict(inst, drop_cols_to_zero=zero, fix_cols_to_one=one)
            local_zero = _subset(rng, list(range(first.n_cols)), 0.2)
            free = [j for j in range(first.n_cols) if j not in local_zero]
            local_one = _subset(rng, free, 0.1)
            chained = first.restrict(drop_cols_to_zero=local_zero, fix_cols_to_one=local_one)
        except InfeasibleReduction:
            continue
        combined = restrict(
            inst,
            drop_cols_to_zero=zero | {first.col_map[j] for j in local_zero},
            fix_cols_to_one=one | {first.col_map[j] for j in local_one},
        )
        assert chained == combined
        inner = ReducedInstance.identity(first.instance).restrict(local_zero, local_one)
        assert first.compose(inner) == chained
        checked += 1
    assert checked >= 20
