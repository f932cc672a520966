import pytest

from covfix.harness.greedy import greedy_ub
from covfix.instance import validate
from covfix.oracle import exact_optimum
from tests.helpers import IDENTITY2, T1, T2, random_instances


def test_hand_traced_covers():
    """Cost per newly covered row, lowest index on ties."""
    assert greedy_ub(T1) == (1, (1,))
    assert greedy_ub(IDENTITY2) == (2, (0, 1))
    assert greedy_ub(T2) == (3, (0, 1))


def test_redundant_columns_dropped():
    """A column made redundant by later picks is removed."""
    # column 1 has the best ratio; columns 2 and 3 are then needed and cover its rows
    inst = validate(4, 3, [1, 1.1, 1.1], [[0, 1], [0, 2], [1], [2]])
    value, cover = greedy_ub(inst)
    assert cover == (1, 2)
    assert value == pytest.approx(2.2)


def test_greedy_is_a_feasible_upper_bound():
    """The greedy value is never below the optimum and covers every row."""
    for inst in random_instances(seed=6, count=200):
        value, cover = greedy_ub(inst)
        assert all(set(row) & set(cover) for row in inst.rows)
        assert value >= exact_optimum(inst)[0]
        assert value == sum(inst.cost[j] for j in cover)
