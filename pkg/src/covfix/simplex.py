"""
Revised primal simplex on the set-covering dual.

    (D)  max cᵀu  s.t.  Aᵀu + s = w,  u ≥ 0,  s ≥ 0

The standard form has one equality per column of A and m + n variables: the structurals
u_0..u_{m-1} followed by the slacks s_0..s_{n-1}. With c = e this is the dual of the LP
relaxation of the covering problem, and the all-slack basis (u = 0) is feasible because w > 0.

A basis holding k structurals S leaves exactly k slacks J nonbasic, and every solve with the n×n
basis reduces to one with the k×k working matrix K = A[S, J]ᵀ. K is LU-factorized; between
refactorizations the basis changes are kept as a product-form eta file.
"""
from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import CovfixError
from .instance import DimensionMismatch, ScpInstance

logger = logging.getLogger(__name__)

__all__ = [
    "DualIterate",
    "InvalidWarmStart",
    "Listener",
    "NumericalBreakdown",
    "Pricing",
    "SolveResult",
    "SolverConfig",
    "Status",
    "Unbounded",
    "solve",
    "solve_with_objective",
]


class SimplexError(CovfixError):
    """The simplex method could not continue."""


class NumericalBreakdown(SimplexError):
    """The working basis became singular or lost feasibility beyond tolerance."""


class Unbounded(SimplexError):
    """The entering variable can grow without bound."""

    def __init__(self, entering: int):
        super().__init__(f"objective unbounded along variable {entering}")
        self.entering = entering


class InvalidWarmStart(SimplexError):
    """A warm-start basis is malformed or not primal feasible for (D)."""


class InvalidSolverConfig(SimplexError):
    """Solver tolerances or limits are out of range."""


class Pricing(str, enum.Enum):
    DANTZIG = "dantzig"
    BLAND = "bland"


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True)
class SolverConfig:
    """
    Simplex tolerances and limits.

    `anti_cycling` is the number of consecutive degenerate pivots after which Bland's rule is
    forced for the rest of the solve; None means max(50, 10·m).
    """

    eps_feas: float = 1e-7
    eps_opt: float = 1e-9
    eps_pivot: float = 1e-10
    pricing: Pricing = Pricing.DANTZIG
    anti_cycling: int | None = None
    max_iters: int = 100_000
    refactor_every: int = 100

    def __post_init__(self):
        object.__setattr__(self, "pricing", Pricing(self.pricing))
        tolerances = (self.eps_feas, self.eps_opt, self.eps_pivot)
        if min(tolerances) <= 0:
            raise InvalidSolverConfig(f"tolerances must be positive: {tolerances}")
        if self.max_iters < 1 or self.refactor_every < 1:
            raise InvalidSolverConfig("max_iters and refactor_every must be at least 1")
        if self.anti_cycling is not None and self.anti_cycling < 1:
            raise InvalidSolverConfig("anti_cycling must be at least 1")

    def update(self, config: Mapping[str, Any]) -> SolverConfig:
        return replace(self, **config)

    def cycling_threshold(self, n_rows: int) -> int:
        return self.anti_cycling if self.anti_cycling is not None else max(50, 10 * n_rows)


@dataclass(frozen=True, eq=False)
class DualIterate:
    """
    A snapshot of one simplex iterate, feasible for (D).

    `reduced_costs` holds w_j − uᵀA_j, the slacks of (D) and the reduced costs of the LP
    relaxation. `zeta` is always uᵀe; `objective` is cᵀu for the objective being maximized.
    """

    iter_index: int
    u: np.ndarray
    zeta: float
    reduced_costs: np.ndarray
    objective: float


@dataclass(frozen=True)
class SolveResult:
    status: Status
    final: DualIterate
    iterations: int
    basis: tuple[int, ...]

    @property
    def objective(self) -> float:
        return self.final.objective


Listener = Callable[[DualIterate], None]


def solve(
    inst: ScpInstance, cfg: SolverConfig = SolverConfig(), listener: Listener | None = None
) -> SolveResult:
    """Maximize uᵀe over (D) from the all-slack basis, streaming every iterate to `listener`."""
    return _DualSimplex(inst, np.ones(inst.n_rows), cfg).run(listener)


def solve_with_objective(
    inst: ScpInstance,
    obj: Sequence[float],
    cfg: SolverConfig = SolverConfig(),
    warm: Sequence[int] | None = None,
    listener: Listener | None = None,
) -> SolveResult:
    """Maximize objᵀu over (D), optionally from the basis of an earlier solve on `inst`."""
    vector = np.asarray(obj, dtype=float).ravel()
    if len(vector) != inst.n_rows:
        raise DimensionMismatch("objective length", inst.n_rows, len(vector))
    return _DualSimplex(inst, vector, cfg, warm).run(listener)


class _Basis:
    """Positional basis of the standard-form system [Aᵀ | I]."""

    def __init__(self, a: sp.csr_matrix, heads: np.ndarray, cfg: SolverConfig):
        self._a = a
        self._m, self._n = a.shape
        self._cfg = cfg
        self.heads = heads
        self._etas: list[tuple[int, np.ndarray]] = []
        self.refactor()

    def refactor(self):
        structural = self.heads < self._m
        self._struct_pos = np.flatnonzero(structural)
        self._slack_pos = np.flatnonzero(~structural)
        self._slack_cols = self.heads[~structural] - self._m
        nonbasic_slack = np.ones(self._n, dtype=bool)
        nonbasic_slack[self._slack_cols] = False
        self._tight_cols = np.flatnonzero(nonbasic_slack)
        self._a_s = self._a[self.heads[structural]]
        self._lu: tuple[np.ndarray, np.ndarray] | None = None
        if len(self._struct_pos):
            kernel = self._a_s[:, self._tight_cols].toarray().T
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(kernel, check_finite=False)
            smallest = float(np.abs(np.diag(lu)).min())
            if smallest < self._cfg.eps_pivot:
                raise NumericalBreakdown(
                    f"working basis of order {len(kernel)} is singular (pivot {smallest:.3g})"
                )
            self._lu = (lu, piv)
        self._etas = []
        logger.debug("Refactorized basis with %d structurals", len(self._struct_pos))

    def replace(self, position: int, entering: int, alpha: np.ndarray) -> bool:
        """Swap `entering` in at `position`; return True when the basis was refactorized."""
        self.heads[position] = entering
        self._etas.append((position, alpha))
        if len(self._etas) >= self._cfg.refactor_every:
            self.refactor()
            return True
        return False

    def ftran(self, b: np.ndarray) -> np.ndarray:
        """Solve B x = b."""
        x = np.empty(self._n)
        if self._lu is not None:
            xs = scipy.linalg.lu_solve(self._lu, b[self._tight_cols], check_finite=False)
            x[self._struct_pos] = xs
            x[self._slack_pos] = b[self._slack_cols] - (self._a_s.T @ xs)[self._slack_cols]
        else:
            x[self._slack_pos] = b[self._slack_cols]
        for position, alpha in self._etas:
            pivot = x[position] / alpha[position]
            x -= pivot * alpha
            x[position] = pivot
        return x

    def btran(self, c: np.ndarray) -> np.ndarray:
        """Solve Bᵀ y = c."""
        v = np.array(c, dtype=float)
        for position, alpha in reversed(self._etas):
            off = alpha @ v - alpha[position] * v[position]
            v[position] = (v[position] - off) / alpha[position]
        y = np.zeros(self._n)
        y[self._slack_cols] = v[self._slack_pos]
        if self._lu is not None:
            rhs = v[self._struct_pos] - self._a_s @ y
            y[self._tight_cols] = scipy.linalg.lu_solve(self._lu, rhs, trans=1, check_finite=False)
        return y


class _DualSimplex:
    def __init__(
        self,
        inst: ScpInstance,
        obj: np.ndarray,
        cfg: SolverConfig,
        warm: Sequence[int] | None = None,
    ):
        self._m, self._n = inst.n_rows, inst.n_cols
        self._a = inst.matrix
        self._at = inst.matrix.T.tocsr()
        self._w = inst.costs
        self._obj = obj
        self._cfg = cfg
        self._cost = np.concatenate([obj, np.zeros(self._n)])
        self._bland = cfg.pricing is Pricing.BLAND
        self._degenerate = 0
        self._threshold = cfg.cycling_threshold(self._m)

        if warm is None:
            heads = np.arange(self._m, self._m + self._n, dtype=np.int64)
        else:
            heads = self._checked_heads(warm)
        self._basis = _Basis(self._a, heads, cfg)
        self._x = self._basis.ftran(self._w)
        if warm is not None and len(self._x) and self._x.min() < -cfg.eps_feas:
            raise InvalidWarmStart(f"warm basis is infeasible (min basic {self._x.min():.3g})")
        np.maximum(self._x, 0.0, out=self._x)

    def _checked_heads(self, warm: Sequence[int]) -> np.ndarray:
        heads = np.asarray(warm, dtype=np.int64)
        total = self._m + self._n
        if len(heads) != self._n or len(np.unique(heads)) != self._n:
            raise InvalidWarmStart(f"expected {self._n} distinct basic variables")
        if len(heads) and (heads.min() < 0 or heads.max() >= total):
            raise InvalidWarmStart(f"basic variables must lie in 0..{total - 1}")
        return heads.copy()

    def run(self, listener: Listener | None) -> SolveResult:
        iteration = 0
        current = self._iterate(iteration)
        if listener is not None:
            listener(current)
        status = Status.OPTIMAL
        while True:
            entering = self._price()
            if entering is None:
                break
            if iteration >= self._cfg.max_iters:
                status = Status.ITERATION_LIMIT
                break
            self._pivot(entering)
            iteration += 1
            if listener is not None:
                current = self._iterate(iteration)
                listener(current)
        if current.iter_index != iteration:
            current = self._iterate(iteration)
        logger.info(
            "Simplex on %d×%d: %s after %d iterations, objective %.6g",
            self._m,
            self._n,
            status.value,
            iteration,
            current.objective,
        )
        return SolveResult(
            status=status,
            final=current,
            iterations=iteration,
            basis=tuple(int(v) for v in self._basis.heads),
        )

    def _price(self) -> int | None:
        heads = self._basis.heads
        y = self._basis.btran(self._cost[heads])
        d = np.concatenate([self._obj - self._a @ y, -y])
        d[heads] = 0.0
        candidates = d > self._cfg.eps_opt
        if not candidates.any():
            return None
        if self._bland:
            return int(np.argmax(candidates))
        return int(np.argmax(np.where(candidates, d, -np.inf)))

    def _column(self, variable: int) -> np.ndarray:
        if variable < self._m:
            return self._a.getrow(variable).toarray().ravel()
        column = np.zeros(self._n)
        column[variable - self._m] = 1.0
        return column

    def _pivot(self, entering: int):
        alpha = self._basis.ftran(self._column(entering))
        eligible = alpha > self._cfg.eps_pivot
        if not eligible.any():
            raise Unbounded(entering)
        ratios = np.full(self._n, np.inf)
        ratios[eligible] = np.maximum(self._x[eligible], 0.0) / alpha[eligible]
        step = float(ratios.min())
        ties = np.flatnonzero(ratios <= step + 1e-12)
        if self._bland:
            leaving = int(ties[np.argmin(self._basis.heads[ties])])
        else:
            leaving = int(ties[np.argmax(alpha[ties])])

        self._x -= step * alpha
        self._x[leaving] = step
        if step <= self._cfg.eps_feas:
            self._degenerate += 1
            if not self._bland and self._degenerate >= self._threshold:
                logger.debug(
                    "Switching to Bland's rule after %d degenerate pivots", self._degenerate
                )
                self._bland = True
        else:
            self._degenerate = 0

        if self._basis.replace(leaving, entering, alpha):
            self._x = self._basis.ftran(self._w)
            worst = float(self._x.min()) if len(self._x) else 0.0
            if worst < -1e3 * self._cfg.eps_feas:
                raise NumericalBreakdown(f"basic solution infeasible after refactor ({worst:.3g})")
        np.maximum(self._x, 0.0, out=self._x)

    def _iterate(self, iteration: int) -> DualIterate:
        heads = self._basis.heads
        structural = heads < self._m
        u = np.zeros(self._m)
        u[heads[structural]] = self._x[structural]
        reduced = self._w - self._at @ u
        u.setflags(write=False)
        reduced.setflags(write=False)
        return DualIterate(
            iter_index=iteration,
            u=u,
            zeta=float(u.sum()),
            reduced_costs=reduced,
            objective=float(self._obj @ u),
        )
