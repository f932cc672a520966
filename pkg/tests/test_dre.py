from covfix.dre import dominated_rows, dre_fixpoint, reduce_rows, singleton_rows
from covfix.instance import ReducedInstance, restrict, validate
from covfix.oracle import exact_optimum, fix_validity
from tests.helpers import IDENTITY2, T1, T2, random_instances


def test_dominated_rows_t2():
    """Row {1} dominates row {1,2}."""
    assert dominated_rows(T2) == {1}
    assert dominated_rows(T1) == frozenset()


def test_identical_rows_keep_lowest_index():
    """Of two equal rows only the first survives."""
    inst = validate(3, 3, [1, 1, 1], [[0, 2], [1, 2], [0, 2]])
    assert dominated_rows(inst) == {2}


def test_singleton_rows():
    """One entry per forced column."""
    assert singleton_rows(T2) == [(0, 0)]
    assert singleton_rows(T1) == []
    inst = validate(3, 2, [1, 1], [[1], [0, 1], [1]])
    assert singleton_rows(inst) == [(0, 1)]


def test_fixpoint_t2():
    """DRE leaves row 3 with columns 2 and 3 free and column 1 fixed."""
    reduced = dre_fixpoint(T2)
    assert reduced.row_map == (2,)
    assert reduced.col_map == (1, 2)
    assert reduced.fixed_to_one == {0}
    assert reduced.cost_offset == 2


def test_fixpoint_t1_unchanged():
    """Incomparable rows and no singletons."""
    assert dre_fixpoint(T1) == ReducedInstance.identity(T1)


def test_fixpoint_identity():
    """Every column is forced."""
    reduced = dre_fixpoint(IDENTITY2)
    assert reduced.is_empty
    assert reduced.cost_offset == 2


def test_reduce_rows_composes():
    """DRE after fixing maps back to original indices."""
    state = restrict(T1, drop_cols_to_zero={0, 2})
    reduced = reduce_rows(state)
    assert reduced.is_empty
    assert reduced.fixed_to_one == {1}
    assert reduced.fixed_to_zero == {0, 2}
    assert reduced.cost_offset == 1


def test_fixpoint_preserves_optimum():
    """Optimum of the original equals optimum of the reduced instance plus the offset."""
    for inst in random_instances(seed=8, count=500, max_rows=8, max_cols=12):
        reduced = dre_fixpoint(inst)
        before, _ = exact_optimum(inst)
        after, _ = exact_optimum(reduced.instance)
        assert before == after + reduced.cost_offset
        assert not dominated_rows(reduced.instance)
        assert not singleton_rows(reduced.instance)
        for j in reduced.fixed_to_one:
            assert fix_validity(inst, j, 1, before)


def test_fixpoint_is_idempotent():
    """Running DRE on its own output changes nothing."""
    for inst in random_instances(seed=9, count=300, max_rows=8, max_cols=12):
        reduced = dre_fixpoint(inst)
        assert dre_fixpoint(reduced.instance) == ReducedInstance.identity(reduced.instance)
        assert reduce_rows(reduced) == reduced
