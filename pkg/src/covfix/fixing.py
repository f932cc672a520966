"""
Reduced-cost fixing from dual-feasible points of (D).

For any u feasible for (D) with ζ = uᵀe, every optimal cover z satisfies
z_j ≤ ⌊(UB − ζ) / w̄_j⌋ where w̄_j = w_j − uᵀA_j. Whenever UB − ζ < w̄_j the floor is 0
and z_j can be fixed to 0. RCF applies this to the optimal dual only; DPF applies it to every
simplex iterate. Without the z ≤ e bounds there are no duals that could fix a variable to 1.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import CovfixError
from .instance import DimensionMismatch, ScpInstance
from .simplex import DualIterate, Listener, SolveResult, Status

logger = logging.getLogger(__name__)

__all__ = [
    "EPS_FIX",
    "DpfListener",
    "FixSet",
    "InvalidBound",
    "IterateRecord",
    "NotOptimal",
    "Provenance",
    "Strategy",
    "dpf_listener",
    "fix_from_dual",
    "rcf",
]

EPS_FIX = 1e-6
EPS_BOUND = 1e-6


class InvalidBound(CovfixError):
    """The dual value exceeds the claimed upper bound, so the bound is not valid."""

    def __init__(self, ub: float, zeta: float):
        super().__init__(f"upper bound {ub:.10g} is below the dual bound {zeta:.10g}")
        self.ub = ub
        self.zeta = zeta


class NotOptimal(CovfixError):
    """Reduced-cost fixing needs an optimal final iterate."""

    def __init__(self, status: Status):
        super().__init__(f"solve ended with status {status.value}")
        self.status = status


class Strategy(str, enum.Enum):
    RCF = "rcf"
    DPF = "dpf"
    SF = "sf"
    SF_CERTIFICATE = "sf-certificate"


@dataclass(frozen=True)
class Provenance:
    strategy: Strategy
    iteration: int


@dataclass(frozen=True)
class FixSet:
    """Columns fixed to 0 or 1, each with the strategy and iterate that fixed it first."""

    to_zero: frozenset[int] = frozenset()
    to_one: frozenset[int] = frozenset()
    provenance: Mapping[int, Provenance] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        assert not self.to_zero & self.to_one, "a column cannot be fixed both ways"
        assert set(self.provenance) == self.to_zero | self.to_one, "provenance out of sync"

    def __len__(self) -> int:
        return len(self.to_zero) + len(self.to_one)

    @property
    def fixed(self) -> frozenset[int]:
        return self.to_zero | self.to_one

    def merge(self, other: FixSet) -> FixSet:
        """Union of both sets; entries already in `self` keep their provenance."""
        provenance: dict[int, Provenance] = dict(other.provenance)
        provenance.update(self.provenance)
        return FixSet(
            to_zero=self.to_zero | (other.to_zero - self.to_one),
            to_one=self.to_one | (other.to_one - self.to_zero),
            provenance=provenance,
        )


def check_bound(ub: float, zeta: float):
    if ub < zeta - EPS_BOUND * (1.0 + abs(zeta)):
        raise InvalidBound(ub, zeta)


def fixable(it: DualIterate, ub: float, eps_fix: float = EPS_FIX) -> np.ndarray:
    """Mask of columns whose reduced cost exceeds the gap UB − ζ by more than `eps_fix`."""
    check_bound(ub, it.zeta)
    reduced = it.reduced_costs
    return (reduced > 0) & (reduced - (ub - it.zeta) > eps_fix)


def fix_from_dual(
    inst: ScpInstance,
    it: DualIterate,
    ub: float,
    acc: FixSet | None = None,
    *,
    strategy: Strategy = Strategy.RCF,
    eps_fix: float = EPS_FIX,
) -> FixSet:
    """Add to `acc` every free column the dual point `it` certifies can be fixed to 0."""
    if len(it.reduced_costs) != inst.n_cols:
        raise DimensionMismatch("reduced cost length", inst.n_cols, len(it.reduced_costs))
    acc = acc if acc is not None else FixSet()
    taken = acc.fixed
    new = frozenset(int(j) for j in np.flatnonzero(fixable(it, ub, eps_fix)) if j not in taken)
    if not new:
        return acc
    provenance = {j: Provenance(strategy, it.iter_index) for j in new}
    return acc.merge(FixSet(to_zero=new, provenance=provenance))


def rcf(inst: ScpInstance, result: SolveResult, ub: float, eps_fix: float = EPS_FIX) -> FixSet:
    """Reduced-cost fixing with the final, optimal iterate of a solve."""
    if result.status is not Status.OPTIMAL:
        raise NotOptimal(result.status)
    return fix_from_dual(inst, result.final, ub, strategy=Strategy.RCF, eps_fix=eps_fix)


@dataclass(frozen=True)
class IterateRecord:
    iteration: int
    zeta: float
    fixed: int


class DpfListener:
    """
    Dual-path fixing: apply the reduced-cost rule to every iterate streamed by one solve.

    Records, per iterate, ζ and the cumulative number of columns fixed so far.
    """

    def __init__(self, inst: ScpInstance, ub: float, eps_fix: float = EPS_FIX):
        self._inst = inst
        self._ub = ub
        self._eps_fix = eps_fix
        self._fixed_at = np.full(inst.n_cols, -1, dtype=np.int64)
        self._count = 0
        self._last: DualIterate | None = None
        self.records: list[IterateRecord] = []

    def __call__(self, it: DualIterate):
        newly = fixable(it, self._ub, self._eps_fix) & (self._fixed_at < 0)
        self._fixed_at[newly] = it.iter_index
        self._count += int(newly.sum())
        self.records.append(IterateRecord(it.iter_index, it.zeta, self._count))
        self._last = it

    @property
    def fix_set(self) -> FixSet:
        fixed = np.flatnonzero(self._fixed_at >= 0)
        return FixSet(
            to_zero=frozenset(int(j) for j in fixed),
            provenance={
                int(j): Provenance(Strategy.DPF, int(self._fixed_at[j])) for j in fixed
            },
        )

    def rcf_fix_set(self) -> FixSet:
        """The fix set the last streamed iterate gives on its own."""
        if self._last is None:
            return FixSet()
        return fix_from_dual(
            self._inst, self._last, self._ub, strategy=Strategy.RCF, eps_fix=self._eps_fix
        )

    @property
    def first_fix_iteration(self) -> int | None:
        fixed = self._fixed_at[self._fixed_at >= 0]
        return int(fixed.min()) if len(fixed) else None

    @property
    def first_dpf_only_iteration(self) -> int | None:
        """Iteration of the earliest fix that the last iterate alone does not certify."""
        final = self.rcf_fix_set().to_zero
        only = [int(j) for j in np.flatnonzero(self._fixed_at >= 0) if int(j) not in final]
        return int(self._fixed_at[only].min()) if only else None


def dpf_listener(inst: ScpInstance, ub: float) -> tuple[Listener, Callable[[], FixSet]]:
    """A listener for `simplex.solve` and an accessor for the fix set it accumulates."""
    listener = DpfListener(inst, ub)
    return listener, lambda: listener.fix_set
