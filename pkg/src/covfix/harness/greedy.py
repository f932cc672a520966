"""Chvátal's greedy cover, used as an upper-bound source when no UB file is given."""
from __future__ import annotations

import heapq as hq
import logging

import numpy as np

from ..instance import ScpInstance

logger = logging.getLogger(__name__)

__all__ = ["greedy_ub"]


def greedy_ub(inst: ScpInstance) -> tuple[float, tuple[int, ...]]:
    """
    Value and sorted 0-based columns of a greedy cover.

    Repeatedly takes the column with the smallest cost per newly covered row, lowest index on
    ties, then drops columns whose rows are all covered twice, most expensive first.
    """
    uncovered = np.ones(inst.n_rows, dtype=bool)
    # Keys only grow as rows get covered, so a popped entry whose key is still current is the
    # minimum over all columns.
    heap = [(inst.cost[j] / len(col), j) for j, col in enumerate(inst.cols) if col]
    hq.heapify(heap)
    chosen: list[int] = []
    while uncovered.any():
        ratio, j = hq.heappop(heap)
        gain = int(uncovered[list(inst.cols[j])].sum())
        if gain == 0:
            continue
        current = inst.cost[j] / gain
        if current > ratio:
            hq.heappush(heap, (current, j))
            continue
        chosen.append(j)
        uncovered[list(inst.cols[j])] = False

    cover = _drop_redundant(inst, chosen)
    value = float(sum(inst.cost[j] for j in cover))
    logger.debug("Greedy cover of %d columns, value %g", len(cover), value)
    return value, tuple(sorted(cover))


def _drop_redundant(inst: ScpInstance, chosen: list[int]) -> list[int]:
    times = np.zeros(inst.n_rows, dtype=np.int64)
    for j in chosen:
        times[list(inst.cols[j])] += 1
    kept = set(chosen)
    for j in sorted(chosen, key=lambda c: (-inst.cost[c], c)):
        rows = list(inst.cols[j])
        if (times[rows] > 1).all():
            times[rows] -= 1
            kept.discard(j)
    return sorted(kept)
