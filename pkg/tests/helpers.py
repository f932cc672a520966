"""Small instances shared by the tests."""
from __future__ import annotations

from typing import Iterator

import numpy as np

from covfix.instance import ScpInstance, validate
from covfix.simplex import DualIterate

# rows {1,2} and {2,3}, w = (1, 1, 3); column 2 covers everything
T1 = validate(2, 3, [1, 1, 3], [[0, 1], [1, 2]])
# rows {1}, {1,2}, {2,3}, w = (2, 1, 1)
T2 = validate(3, 3, [2, 1, 1], [[0], [0, 1], [1, 2]])
IDENTITY2 = validate(2, 2, [1, 1], [[0], [1]])

T1_TEXT = "2 3\n1 1 3\n2\n1 2\n2\n2 3\n"


def random_instance(
    rng: np.random.Generator, max_rows: int = 8, max_cols: int = 12, max_cost: int = 10
) -> ScpInstance:
    """A random instance with integer costs in 1..max_cost and no empty rows."""
    m = int(rng.integers(1, max_rows + 1))
    n = int(rng.integers(1, max_cols + 1))
    density = rng.uniform(0.15, 0.6)
    rows: list[list[int]] = []
    for _ in range(m):
        support = np.flatnonzero(rng.random(n) < density).tolist()
        rows.append(support or [int(rng.integers(n))])
    costs = rng.integers(1, max_cost + 1, size=n).tolist()
    return validate(m, n, costs, rows)


def random_instances(seed: int, count: int, **kwargs: int) -> Iterator[ScpInstance]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_instance(rng, **kwargs)


def dual_point(inst: ScpInstance, u: list[float], iteration: int = 0) -> DualIterate:
    """A hand-made iterate for `u`."""
    vector = np.asarray(u, dtype=float)
    return DualIterate(
        iter_index=iteration,
        u=vector,
        zeta=float(vector.sum()),
        reduced_costs=inst.costs - inst.matrix.T @ vector,
        objective=float(vector.sum()),
    )


class Recorder:
    """Listener that keeps every iterate."""

    def __init__(self):
        self.iterates: list[DualIterate] = []

    def __call__(self, it: DualIterate):
        self.iterates.append(it)
