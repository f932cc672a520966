"""
Dominated-row elimination (DRE).

Row î dominates row i when every column covering î also covers i; i is then redundant. A row
covered by a single column forces that column to 1, and every row it covers goes away. Both
steps are repeated until neither changes the instance.
"""
from __future__ import annotations

import logging
from collections import defaultdict

from .instance import ReducedInstance, ScpInstance

logger = logging.getLogger(__name__)

__all__ = ["dominated_rows", "dre_fixpoint", "reduce_rows", "singleton_rows"]


def dominated_rows(inst: ScpInstance) -> frozenset[int]:
    """
    Rows whose support contains the support of a row that is kept.

    Rows are visited by increasing support size, then index, so of two identical rows the lower
    index survives. Each kept row is filed under its least frequent column; a candidate dominator
    of row i must be filed under one of i's columns.
    """
    order = sorted(range(inst.n_rows), key=lambda i: (len(inst.rows[i]), i))
    frequency = [len(col) for col in inst.cols]
    filed: defaultdict[int, list[int]] = defaultdict(list)
    supports: dict[int, set[int]] = {}
    dominated: set[int] = set()
    for i in order:
        support = inst.rows[i]
        here = set(support)
        if any(supports[k] <= here for c in support for k in filed.get(c, ())):
            dominated.add(i)
            continue
        supports[i] = here
        filed[min(support, key=lambda c: (frequency[c], c))].append(i)
    return frozenset(dominated)


def singleton_rows(inst: ScpInstance) -> list[tuple[int, int]]:
    """(row, column) for every row covered by one column, one row per column."""
    seen: set[int] = set()
    found: list[tuple[int, int]] = []
    for i, support in enumerate(inst.rows):
        if len(support) == 1 and support[0] not in seen:
            seen.add(support[0])
            found.append((i, support[0]))
    return found


def dre_fixpoint(inst: ScpInstance) -> ReducedInstance:
    """
    Alternate dominated-row deletion and singleton forcing until nothing changes.

    Columns left without rows stay in the instance.
    """
    state = ReducedInstance.identity(inst)
    sweeps = 0
    while True:
        sweeps += 1
        changed = False
        dominated = dominated_rows(state.instance)
        if dominated:
            state = state.restrict(drop_rows=dominated)
            changed = True
        forced = singleton_rows(state.instance)
        if forced:
            state = state.restrict(fix_cols_to_one={col for _, col in forced})
            changed = True
        if not changed:
            break
    logger.debug(
        "DRE after %d sweeps: %d rows removed, %d columns fixed to 1",
        sweeps,
        inst.n_rows - state.n_rows,
        len(state.fixed_to_one),
    )
    return state


def reduce_rows(state: ReducedInstance) -> ReducedInstance:
    """Run DRE on the instance held by `state` and chain the result onto it."""
    return state.compose(dre_fixpoint(state.instance))
