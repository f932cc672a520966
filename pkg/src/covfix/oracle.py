"""
Brute-force ground truth for tiny instances.

Everything here is exhaustive enumeration, independent of the simplex code: binary vectors for
the covering problem itself, and polyhedron vertices for its LP relaxation and the strong-fixing
LPs. Size caps are hard errors.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import CovfixError
from .fixing import InvalidBound
from .instance import ScpInstance

__all__ = [
    "Infeasible",
    "TooLarge",
    "exact_optimum",
    "fix_validity",
    "lp_optimum",
    "sf_oracle_value",
]

MAX_EXACT_COLS = 20
MAX_LP_ROWS = 6
MAX_LP_COLS = 8
MAX_SF_ROWS = 8
MAX_SF_COLS = 8

_TOL = 1e-9


class TooLarge(CovfixError):
    """The instance exceeds the enumeration cap."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what} {size} exceeds the oracle limit {limit}")
        self.what = what
        self.size = size
        self.limit = limit


class Infeasible(CovfixError):
    """No binary vector covers every row."""


def _covers(inst: ScpInstance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Codes k of all 2ⁿ binary vectors (bit j is z_j), their costs and feasibility."""
    if inst.n_cols > MAX_EXACT_COLS:
        raise TooLarge("column count", inst.n_cols, MAX_EXACT_COLS)
    codes = np.arange(1 << inst.n_cols, dtype=np.int64)
    costs = np.zeros(len(codes))
    for j, w in enumerate(inst.cost):
        costs[(codes >> j) & 1 == 1] += w
    feasible = np.ones(len(codes), dtype=bool)
    for row in inst.rows:
        mask = sum(1 << j for j in row)
        feasible &= (codes & mask) != 0
    return codes, costs, feasible


def _optimal(inst: ScpInstance) -> tuple[float, np.ndarray, np.ndarray]:
    codes, costs, feasible = _covers(inst)
    if not feasible.any():
        raise Infeasible("instance has no feasible cover")
    value = float(costs[feasible].min())
    optimal = feasible & (costs <= value + _TOL * (1 + abs(value)))
    return value, codes, optimal


def exact_optimum(inst: ScpInstance) -> tuple[float, tuple[int, ...]]:
    """Optimal value and the first optimal cover in enumeration order."""
    value, codes, optimal = _optimal(inst)
    code = int(codes[np.argmax(optimal)])
    return value, tuple((code >> j) & 1 for j in range(inst.n_cols))


def fix_validity(inst: ScpInstance, j: int, bound01: int, ub: float) -> bool:
    """
    Whether fixing z_j to `bound01` keeps every optimal cover.

    For 0: no optimal cover uses j. For 1: every optimal cover uses j.
    """
    value, codes, optimal = _optimal(inst)
    if ub < value - _TOL * (1 + abs(value)):
        raise InvalidBound(ub, value)
    uses_j = (codes >> j) & 1 == 1
    if bound01 == 0:
        return not bool((optimal & uses_j).any())
    return bool(uses_j[optimal].all())


def lp_optimum(inst: ScpInstance) -> float:
    """Optimum of max{uᵀe : uᵀA ≤ wᵀ, u ≥ 0} by enumerating the vertices of (D)."""
    if inst.n_rows > MAX_LP_ROWS:
        raise TooLarge("row count", inst.n_rows, MAX_LP_ROWS)
    if inst.n_cols > MAX_LP_COLS:
        raise TooLarge("column count", inst.n_cols, MAX_LP_COLS)
    m = inst.n_rows
    g = np.vstack([inst.dense.T, -np.eye(m)])
    h = np.concatenate([inst.costs, np.zeros(m)])
    return _vertex_maximum(g, h, np.ones(m))


def sf_oracle_value(inst: ScpInstance, j: int) -> float:
    """min{wᵀz : Az ≥ e, z ≥ 0, z_j ≥ 1} by enumerating the vertices of that polyhedron."""
    if inst.n_rows > MAX_SF_ROWS:
        raise TooLarge("row count", inst.n_rows, MAX_SF_ROWS)
    if inst.n_cols > MAX_SF_COLS:
        raise TooLarge("column count", inst.n_cols, MAX_SF_COLS)
    n = inst.n_cols
    force = np.zeros((1, n))
    force[0, j] = -1.0
    g = np.vstack([-inst.dense, -np.eye(n), force])
    h = np.concatenate([-np.ones(inst.n_rows), np.zeros(n), [-1.0]])
    return -_vertex_maximum(g, h, -inst.costs)


def _vertex_maximum(g: np.ndarray, h: np.ndarray, c: np.ndarray) -> float:
    """max cᵀx over the pointed polyhedron {x : g x ≤ h}, assumed bounded in direction c."""
    dim = g.shape[1]
    if dim == 0:
        return 0.0
    chosen = np.array(list(combinations(range(len(g)), dim)), dtype=np.int64)
    mats = g[chosen]
    regular = np.abs(np.linalg.det(mats)) > 1e-9
    points = np.linalg.solve(mats[regular], h[chosen][regular][..., None])[..., 0]
    inside = (points @ g.T <= h + 1e-9).all(axis=1)
    if not inside.any():
        raise Infeasible("polyhedron has no vertex")
    return float((points[inside] @ c).max())
