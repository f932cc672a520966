"""
Set-covering instances and their reductions.

An instance is min{wᵀz : Az ≥ e, z ∈ {0,1}ⁿ} for a 0/1 matrix A stored twice: as the sorted
column supports of each row and as the sorted row supports of each column. Indices are 0-based
everywhere in memory; file formats and reports add 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import AbstractSet, Iterable, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import CovfixError

__all__ = [
    "DimensionMismatch",
    "DuplicateIndex",
    "EmptyRow",
    "IndexOutOfRange",
    "InfeasibleReduction",
    "NonPositiveCost",
    "OverlappingFixings",
    "ReducedInstance",
    "ScpInstance",
    "TransposeMismatch",
    "restrict",
    "validate",
]

Support = Tuple[int, ...]


class InstanceError(CovfixError):
    """The instance data is not a valid set-covering instance."""


class EmptyRow(InstanceError):
    """A row is covered by no column, so the instance is infeasible."""

    def __init__(self, row: int):
        super().__init__(f"row {row + 1} is not covered by any column")
        self.row = row


class NonPositiveCost(InstanceError):
    """A column cost is zero, negative or not finite."""

    def __init__(self, col: int, value: float):
        super().__init__(f"column {col + 1} has non-positive cost {value!r}")
        self.col = col
        self.value = value


class IndexOutOfRange(InstanceError):
    """An index refers past the end of the matrix."""

    def __init__(self, where: str, index: int, limit: int):
        super().__init__(f"{where}: index {index + 1} outside 1..{limit}")
        self.where = where
        self.index = index
        self.limit = limit


class DuplicateIndex(InstanceError):
    """A support list names the same index twice."""

    def __init__(self, row: int, index: int):
        super().__init__(f"row {row + 1} lists column {index + 1} more than once")
        self.row = row
        self.index = index


class DimensionMismatch(InstanceError):
    """Declared sizes disagree with the supplied data."""

    def __init__(self, what: str, expected: int, got: int):
        super().__init__(f"{what}: expected {expected}, got {got}")
        self.what = what
        self.expected = expected
        self.got = got


class TransposeMismatch(InstanceError):
    """Row and column views describe different matrices."""


class OverlappingFixings(InstanceError):
    """The same column was asked to be fixed to 0 and to 1."""

    def __init__(self, cols: Sequence[int]):
        super().__init__(f"columns fixed both ways: {[c + 1 for c in cols]}")
        self.cols = list(cols)


class InfeasibleReduction(InstanceError):
    """
    A surviving row lost every covering column.

    Either the upper bound used for fixing was not valid or the fixing logic is wrong.
    """

    def __init__(self, row: int):
        super().__init__(f"original row {row + 1} has no surviving column")
        self.row = row


@dataclass(frozen=True)
class ScpInstance:
    """A validated set-covering instance. Build it with `validate`."""

    n_rows: int
    n_cols: int
    cost: tuple[float, ...]
    rows: tuple[Support, ...]
    cols: tuple[Support, ...]
    integral: bool = False

    @cached_property
    def costs(self) -> np.ndarray:
        arr = np.asarray(self.cost, dtype=float).reshape(self.n_cols)
        arr.setflags(write=False)
        return arr

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """A as an m×n CSR matrix of ones."""
        indptr = np.zeros(self.n_rows + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(row) for row in self.rows])
        indices = np.fromiter(
            (j for row in self.rows for j in row), dtype=np.int64, count=int(indptr[-1])
        )
        data = np.ones(len(indices), dtype=float)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n_rows, self.n_cols))

    @cached_property
    def dense(self) -> np.ndarray:
        """A as a dense array; only for small instances."""
        return self.matrix.toarray()

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def __repr__(self) -> str:
        return f"ScpInstance(n_rows={self.n_rows}, n_cols={self.n_cols}, nnz={self.nnz})"


def validate(
    n_rows: int,
    n_cols: int,
    cost: Sequence[float],
    rows: Sequence[Iterable[int]],
    cols: Sequence[Iterable[int]] | None = None,
) -> ScpInstance:
    """
    Check raw instance data and build an `ScpInstance`.

    Supports are 0-based and may arrive unsorted; they are stored sorted. When `cols` is given it
    must be the transpose of `rows`.
    """
    if len(cost) != n_cols:
        raise DimensionMismatch("cost vector length", n_cols, len(cost))
    if len(rows) != n_rows:
        raise DimensionMismatch("row count", n_rows, len(rows))
    costs = tuple(float(value) for value in cost)
    for j, value in enumerate(costs):
        if not math.isfinite(value) or value <= 0:
            raise NonPositiveCost(j, value)

    sorted_rows: list[Support] = []
    col_lists: list[list[int]] = [[] for _ in range(n_cols)]
    for i, raw in enumerate(rows):
        support = tuple(sorted(int(j) for j in raw))
        if not support:
            raise EmptyRow(i)
        if support[0] < 0 or support[-1] >= n_cols:
            bad = support[0] if support[0] < 0 else support[-1]
            raise IndexOutOfRange(f"row {i + 1}", bad, n_cols)
        for a, b in zip(support, support[1:]):
            if a == b:
                raise DuplicateIndex(i, a)
        for j in support:
            col_lists[j].append(i)
        sorted_rows.append(support)

    transposed = tuple(tuple(col) for col in col_lists)
    if cols is not None:
        if len(cols) != n_cols:
            raise DimensionMismatch("column count", n_cols, len(cols))
        if tuple(tuple(sorted(int(i) for i in col)) for col in cols) != transposed:
            raise TransposeMismatch("row and column supports disagree")

    return ScpInstance(
        n_rows=n_rows,
        n_cols=n_cols,
        cost=costs,
        rows=tuple(sorted_rows),
        cols=transposed,
        integral=all(value.is_integer() for value in costs),
    )


@dataclass(frozen=True)
class ReducedInstance:
    """
    A sub-instance left after fixing columns and removing rows.

    `col_map` and `row_map` send local indices to indices of the original instance; the fixed
    sets hold original column indices.
    """

    instance: ScpInstance
    col_map: tuple[int, ...]
    row_map: tuple[int, ...]
    fixed_to_one: frozenset[int] = frozenset()
    fixed_to_zero: frozenset[int] = frozenset()
    cost_offset: float = 0.0

    @classmethod
    def identity(cls, inst: ScpInstance) -> ReducedInstance:
        return cls(
            instance=inst,
            col_map=tuple(range(inst.n_cols)),
            row_map=tuple(range(inst.n_rows)),
        )

    @property
    def n_cols(self) -> int:
        return self.instance.n_cols

    @property
    def n_rows(self) -> int:
        return self.instance.n_rows

    @property
    def is_empty(self) -> bool:
        return self.instance.n_rows == 0 and self.instance.n_cols == 0

    def restrict(
        self,
        drop_cols_to_zero: Iterable[int] = (),
        fix_cols_to_one: Iterable[int] = (),
        drop_rows: Iterable[int] = (),
    ) -> ReducedInstance:
        """Reduce further, with all index sets given in local indices of `self.instance`."""
        inst = self.instance
        to_zero = _checked(drop_cols_to_zero, inst.n_cols, "dropped column")
        to_one = _checked(fix_cols_to_one, inst.n_cols, "fixed column")
        gone_rows = _checked(drop_rows, inst.n_rows, "dropped row")
        overlap = sorted(to_zero & to_one)
        if overlap:
            raise OverlappingFixings(overlap)

        covered = {i for j in to_one for i in inst.cols[j]}
        keep_rows = [i for i in range(inst.n_rows) if i not in gone_rows and i not in covered]
        keep_cols = [j for j in range(inst.n_cols) if j not in to_zero and j not in to_one]
        new_index = {j: k for k, j in enumerate(keep_cols)}

        new_rows: list[Support] = []
        for i in keep_rows:
            support = tuple(new_index[j] for j in inst.rows[i] if j in new_index)
            if not support:
                raise InfeasibleReduction(self.row_map[i])
            new_rows.append(support)

        reduced = validate(
            len(keep_rows), len(keep_cols), [inst.cost[j] for j in keep_cols], new_rows
        )
        return ReducedInstance(
            instance=reduced,
            col_map=tuple(self.col_map[j] for j in keep_cols),
            row_map=tuple(self.row_map[i] for i in keep_rows),
            fixed_to_one=self.fixed_to_one | {self.col_map[j] for j in to_one},
            fixed_to_zero=self.fixed_to_zero | {self.col_map[j] for j in to_zero},
            cost_offset=self.cost_offset + math.fsum(inst.cost[j] for j in to_one),
        )

    def compose(self, inner: ReducedInstance) -> ReducedInstance:
        """Chain a reduction of `self.instance` onto this one."""
        return ReducedInstance(
            instance=inner.instance,
            col_map=tuple(self.col_map[j] for j in inner.col_map),
            row_map=tuple(self.row_map[i] for i in inner.row_map),
            fixed_to_one=self.fixed_to_one | {self.col_map[j] for j in inner.fixed_to_one},
            fixed_to_zero=self.fixed_to_zero | {self.col_map[j] for j in inner.fixed_to_zero},
            cost_offset=self.cost_offset + inner.cost_offset,
        )

    def original_column_ids(self) -> list[int]:
        """1-based original IDs of the surviving columns."""
        return [j + 1 for j in self.col_map]


def restrict(
    inst: ScpInstance,
    drop_cols_to_zero: Iterable[int] = (),
    fix_cols_to_one: Iterable[int] = (),
    drop_rows: Iterable[int] = (),
) -> ReducedInstance:
    """
    Remove columns fixed to 0, fix columns to 1 and drop rows.

    Rows covered by a column fixed to 1 are dropped as well. When those columns cover every row
    the result has m=0 and keeps the surviving columns.
    """
    return ReducedInstance.identity(inst).restrict(drop_cols_to_zero, fix_cols_to_one, drop_rows)


def _checked(indices: Iterable[int], limit: int, what: str) -> AbstractSet[int]:
    found = frozenset(int(i) for i in indices)
    for index in found:
        if not 0 <= index < limit:
            raise IndexOutOfRange(what, index, limit)
    return found
