"""
Strong fixing (SF) for set covering.

For each free column j, solve

    𝔷_j = w_j + max{uᵀ(e − A_j) : uᵀA ≤ wᵀ, u ≥ 0}

which by LP duality equals min{wᵀz : Az ≥ e, z ≥ 0, z_j ≥ 1}. If 𝔷_j > UB no cover of cost at most
UB uses j, so z_j is fixed to 0. This is the largest fixing any single dual certificate can give.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .fixing import EPS_FIX, FixSet, InvalidBound, Provenance, Strategy, check_bound, fix_from_dual
from .instance import ScpInstance
from .oracle import sf_oracle_value
from .simplex import SolveResult, SolverConfig, solve_with_objective

logger = logging.getLogger(__name__)

__all__ = ["SfReport", "column_objective", "sf_oracle_value", "strong_fix"]


@dataclass(frozen=True)
class SfReport:
    """
    Outcome of strong fixing.

    `values` maps each column whose LP was solved to 𝔷_j; `exceeded` lists those with 𝔷_j > UB.
    `skipped` holds the columns that an earlier certificate fixed before their turn.
    """

    fix_set: FixSet
    values: Mapping[int, float]
    exceeded: frozenset[int]
    lp_solves: int
    skipped: tuple[int, ...]
    simplex_iterations: int = 0


def column_objective(inst: ScpInstance, j: int) -> np.ndarray:
    """The objective e − A_j of the strong-fixing LP for column j."""
    obj = np.ones(inst.n_rows)
    obj[list(inst.cols[j])] = 0.0
    return obj


def strong_fix(
    inst: ScpInstance,
    ub: float,
    cfg: SolverConfig = SolverConfig(),
    cross_certificates: bool = True,
    *,
    jobs: int = 1,
    eps_fix: float = EPS_FIX,
) -> SfReport:
    """
    Strong fixing over the columns in ascending order.

    Each LP starts from the optimal basis of the previous one; all of them share the feasible
    region of (D). With `cross_certificates` every optimal u is also screened against all free
    columns with the reduced-cost rule. With `jobs` > 1 the LPs are solved concurrently from the
    slack basis and merged in column order.
    """
    if jobs > 1:
        return _strong_fix_parallel(inst, ub, cfg, cross_certificates, jobs, eps_fix)

    fixes = FixSet()
    values: dict[int, float] = {}
    skipped: list[int] = []
    warm: Sequence[int] | None = None
    iterations = 0
    for j in range(inst.n_cols):
        if j in fixes.fixed:
            skipped.append(j)
            continue
        result = solve_with_objective(inst, column_objective(inst, j), cfg, warm=warm)
        warm = result.basis
        iterations += result.iterations
        fixes = _screen(
            inst, ub, j, result, len(values), fixes, values, cross_certificates, eps_fix
        )

    _check_cover(inst, ub, fixes, values)
    report = SfReport(
        fix_set=fixes,
        values=values,
        exceeded=frozenset(j for j, value in values.items() if value > ub + eps_fix),
        lp_solves=len(values),
        skipped=tuple(skipped),
        simplex_iterations=iterations,
    )
    logger.info(
        "Strong fixing: %d of %d columns fixed with %d LP solves (%d skipped)",
        len(fixes),
        inst.n_cols,
        report.lp_solves,
        len(skipped),
    )
    return report


def _screen(
    inst: ScpInstance,
    ub: float,
    j: int,
    result: SolveResult,
    ordinal: int,
    fixes: FixSet,
    values: dict[int, float],
    cross_certificates: bool,
    eps_fix: float,
) -> FixSet:
    value = inst.cost[j] + result.objective
    values[j] = value
    check_bound(ub, result.final.zeta)
    # A value above UB certifies the fix even when the solve stopped early.
    if value > ub + eps_fix and j not in fixes.fixed:
        fixes = fixes.merge(
            FixSet(to_zero=frozenset([j]), provenance={j: Provenance(Strategy.SF, ordinal)})
        )
    if cross_certificates:
        fixes = fix_from_dual(
            inst, result.final, ub, fixes, strategy=Strategy.SF_CERTIFICATE, eps_fix=eps_fix
        )
    return fixes


def _strong_fix_parallel(
    inst: ScpInstance,
    ub: float,
    cfg: SolverConfig,
    cross_certificates: bool,
    jobs: int,
    eps_fix: float,
) -> SfReport:
    def _solve(j: int) -> SolveResult:
        return solve_with_objective(inst, column_objective(inst, j), cfg)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_solve, range(inst.n_cols)))

    fixes = FixSet()
    values: dict[int, float] = {}
    for j, result in enumerate(results):
        fixes = _screen(inst, ub, j, result, j, fixes, values, False, eps_fix)
    if cross_certificates:
        for result in results:
            fixes = fix_from_dual(
                inst, result.final, ub, fixes, strategy=Strategy.SF_CERTIFICATE, eps_fix=eps_fix
            )
    _check_cover(inst, ub, fixes, values)
    return SfReport(
        fix_set=fixes,
        values=values,
        exceeded=frozenset(j for j, value in values.items() if value > ub + eps_fix),
        lp_solves=len(results),
        skipped=(),
        simplex_iterations=sum(result.iterations for result in results),
    )


def _check_cover(inst: ScpInstance, ub: float, fixes: FixSet, values: Mapping[int, float]):
    fixed = fixes.to_zero
    for row in inst.rows:
        if all(j in fixed for j in row):
            # Any cover pays at least min 𝔷_j over this row's columns.
            bound = min((values[j] for j in row if j in values), default=float("inf"))
            raise InvalidBound(ub, bound)
