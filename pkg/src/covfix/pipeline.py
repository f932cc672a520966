"""
The evaluated reduction procedures and the suite runner.

    RCF+DRE      one solve of (D), fix with the final iterate, then DRE if anything was fixed
    DPF+DRE      one solve of (D), fix with every iterate, then DRE if anything was fixed
    I(RCF+DRE)   repeat RCF+DRE on the reduced instance until a round fixes nothing
    I(DPF+DRE)   repeat DPF+DRE on the reduced instance until a round fixes nothing
    SF+DRE       strong fixing on the original instance, then DRE if anything was fixed

Each LP solve starts from the all-slack basis. After DRE fixes columns to 1, later rounds use the
reduced instance and the bound UB − cost offset.
"""
from __future__ import annotations

import asyncio
import enum
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Iterable, Iterator, Mapping, Sequence, TypeVar

import numpy as np

from .dre import reduce_rows
from .errors import CovfixError
from .fixing import DpfListener, FixSet, IterateRecord, rcf
from .instance import ReducedInstance, ScpInstance
from .simplex import SolverConfig, solve
from .strong import strong_fix

logger = logging.getLogger(__name__)

__all__ = [
    "MissingUb",
    "MultipleExceptions",
    "NamedInstance",
    "Procedure",
    "ProcedureResult",
    "RoundRecord",
    "RunTrace",
    "SetSummary",
    "SuiteFailure",
    "SuiteResult",
    "TraceRecord",
    "instance_set",
    "reduction_summary",
    "run_procedure",
    "run_suite",
]


class MissingUb(CovfixError):
    """Some instances have no upper bound."""

    def __init__(self, names: Sequence[str]):
        super().__init__(f"no upper bound for: {', '.join(names)}")
        self.names = list(names)


class Procedure(str, enum.Enum):
    RCF = "RCF+DRE"
    DPF = "DPF+DRE"
    IRCF = "I(RCF+DRE)"
    IDPF = "I(DPF+DRE)"
    SF = "SF+DRE"

    @property
    def code(self) -> str:
        return _CODES[self]

    @property
    def iterative(self) -> bool:
        return self in (Procedure.IRCF, Procedure.IDPF)

    @property
    def uses_path(self) -> bool:
        return self in (Procedure.DPF, Procedure.IDPF)

    @classmethod
    def from_code(cls, code: str) -> Procedure:
        for procedure, known in _CODES.items():
            if known == code.strip().lower():
                return procedure
        expected = ", ".join(_CODES.values())
        raise ValueError(f"unknown procedure {code!r}; expected one of {expected}")


_CODES: dict[Procedure, str] = {
    Procedure.RCF: "rcf",
    Procedure.DPF: "dpf",
    Procedure.IRCF: "irc",
    Procedure.IDPF: "idpf",
    Procedure.SF: "sf",
}


@dataclass(frozen=True)
class NamedInstance:
    name: str
    instance: ScpInstance


@dataclass(frozen=True)
class TraceRecord:
    """One simplex iterate: ζ, columns fixed to 0 so far in the run, remaining share of the gap."""

    outer_iteration: int
    iteration: int
    zeta: float
    fixed: int
    gap_percent: float


@dataclass(frozen=True)
class RunTrace:
    records: tuple[TraceRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def solve(self, outer_iteration: int) -> tuple[TraceRecord, ...]:
        return tuple(r for r in self.records if r.outer_iteration == outer_iteration)

    def extended(
        self, outer_iteration: int, iterates: Sequence[IterateRecord], fixed: Sequence[int]
    ) -> RunTrace:
        """Append one solve; the gap is measured against that solve's first and last ζ."""
        if not iterates:
            return self
        zeta = np.array([record.zeta for record in iterates])
        span = zeta[-1] - zeta[0]
        if span > 1e-12:
            gap = np.clip(100.0 * (zeta[-1] - zeta) / span, 0.0, 100.0)
            gap = np.minimum.accumulate(gap)
        else:
            gap = np.zeros(len(zeta))
        added = tuple(
            TraceRecord(outer_iteration, record.iteration, record.zeta, count, float(g))
            for record, count, g in zip(iterates, fixed, gap)
        )
        return RunTrace(self.records + added)


@dataclass(frozen=True)
class RoundRecord:
    """
    One outer iteration: its LP work, what it fixed and the size left afterwards.

    For dual-path rounds the iteration of the first fix, and of the first fix the final iterate
    alone would not have made, are kept; they are None otherwise.
    """

    outer_iteration: int
    simplex_iterations: int
    fixed_to_zero: int
    fixed_to_one: int
    rows_removed: int
    n_cols: int
    n_rows: int
    ub: float
    cost_offset: float
    first_fix_iteration: int | None = None
    first_dpf_only_iteration: int | None = None


@dataclass(frozen=True)
class ProcedureResult:
    name: Procedure
    instance_name: str
    n0: int
    m0: int
    final: ReducedInstance
    outer_iterations: int
    trace: RunTrace = field(default_factory=RunTrace)
    rounds: tuple[RoundRecord, ...] = ()
    wall_time: float = 0.0

    @property
    def n_final(self) -> int:
        return self.final.n_cols

    @property
    def m_final(self) -> int:
        return self.final.n_rows

    @property
    def fixed0(self) -> int:
        return len(self.final.fixed_to_zero)

    @property
    def fixed1(self) -> int:
        return len(self.final.fixed_to_one)

    @property
    def reduction_percent(self) -> float:
        return 100.0 * (self.n0 - self.n_final) / self.n0 if self.n0 else 0.0


def run_procedure(
    inst: ScpInstance,
    ub: float,
    name: Procedure,
    cfg: SolverConfig = SolverConfig(),
    *,
    instance_name: str = "",
    cross_certificates: bool = True,
    sf_jobs: int = 1,
) -> ProcedureResult:
    """Run one procedure on `inst` with the upper bound `ub`."""
    started = time.perf_counter()
    state = ReducedInstance.identity(inst)
    trace = RunTrace()
    rounds: list[RoundRecord] = []

    if name is Procedure.SF:
        report = strong_fix(inst, ub, cfg, cross_certificates, jobs=sf_jobs)
        state, record = _apply(state, report.fix_set, 1, report.simplex_iterations, ub)
        rounds.append(record)
    else:
        while True:
            outer = len(rounds) + 1
            bound = ub - state.cost_offset
            listener = DpfListener(state.instance, bound)
            result = solve(state.instance, cfg, listener)
            # counts in the trace run on across outer iterations
            base = sum(r.fixed_to_zero for r in rounds)
            if name.uses_path:
                fixes = listener.fix_set
                fixed = [base + record.fixed for record in listener.records]
            else:
                fixes = rcf(state.instance, result, bound)
                fixed = [base] * (len(listener.records) - 1) + [base + len(fixes)]
            trace = trace.extended(outer, listener.records, fixed)
            state, record = _apply(state, fixes, outer, result.iterations, bound)
            if name.uses_path:
                record = replace(
                    record,
                    first_fix_iteration=listener.first_fix_iteration,
                    first_dpf_only_iteration=listener.first_dpf_only_iteration,
                )
            rounds.append(record)
            logger.info(
                "%s %s round %d: fixed %d to 0, %d to 1, size %d×%d, offset %g",
                instance_name,
                name.value,
                outer,
                record.fixed_to_zero,
                record.fixed_to_one,
                record.n_cols,
                record.n_rows,
                state.cost_offset,
            )
            if not name.iterative or not fixes:
                break

    empty = [j for j, col in enumerate(state.instance.cols) if not col]
    if empty:
        state = state.restrict(drop_cols_to_zero=empty)
    return ProcedureResult(
        name=name,
        instance_name=instance_name,
        n0=inst.n_cols,
        m0=inst.n_rows,
        final=state,
        outer_iterations=len(rounds),
        trace=trace,
        rounds=tuple(rounds),
        wall_time=time.perf_counter() - started,
    )


def _apply(
    state: ReducedInstance, fixes: FixSet, outer: int, simplex_iterations: int, bound: float
) -> tuple[ReducedInstance, RoundRecord]:
    """Drop the columns fixed to 0 and, if there were any, run DRE."""
    before = state
    if fixes.to_zero:
        state = reduce_rows(state.restrict(drop_cols_to_zero=fixes.to_zero))
    record = RoundRecord(
        outer_iteration=outer,
        simplex_iterations=simplex_iterations,
        fixed_to_zero=len(fixes.to_zero),
        fixed_to_one=len(state.fixed_to_one) - len(before.fixed_to_one),
        rows_removed=before.n_rows - state.n_rows,
        n_cols=state.n_cols,
        n_rows=state.n_rows,
        ub=bound,
        cost_offset=state.cost_offset,
    )
    return state, record


@dataclass(frozen=True)
class SuiteFailure:
    instance_name: str
    procedure: Procedure
    error: CovfixError


@dataclass(frozen=True)
class SetSummary:
    set_name: str
    procedure: Procedure
    instances: int
    mean_reduction_percent: float
    mean_outer_iterations: float


@dataclass(frozen=True)
class SuiteResult:
    results: tuple[ProcedureResult, ...]
    failures: tuple[SuiteFailure, ...]
    procedures: tuple[Procedure, ...]

    def summary(self) -> list[SetSummary]:
        return reduction_summary(self.results, self.procedures)


class MultipleExceptions(Exception):
    """Multiple exceptions."""

    def __init__(self, exceptions: Sequence[BaseException]):
        super().__init__(f"{len(exceptions)} tasks failed: {exceptions[0]!r}")
        self.exceptions = exceptions


def run_suite(
    instances: Sequence[NamedInstance],
    ub_table: Mapping[str, float],
    procedures: Sequence[Procedure],
    cfg: SolverConfig = SolverConfig(),
    *,
    jobs: int = 1,
    sf_jobs: int = 1,
    cross_certificates: bool = True,
) -> SuiteResult:
    """
    Run every procedure on every instance.

    Results come back in (instance, procedure) order whatever the completion order. Failures of
    single runs are collected rather than raised so that the other results survive. `jobs` runs
    that many procedures at once; `sf_jobs` is handed to each SF run for its restricted LPs.
    """
    missing = [item.name for item in instances if item.name not in ub_table]
    if missing:
        raise MissingUb(missing)
    tasks = [(item, procedure) for item in instances for procedure in procedures]
    outcomes = asyncio.run(
        _exec_procedures(tasks, ub_table, cfg, jobs, sf_jobs, cross_certificates)
    )

    results: list[ProcedureResult] = []
    failures: list[SuiteFailure] = []
    for (item, procedure), outcome in zip(tasks, list(iter_outcomes(outcomes))):
        if isinstance(outcome, CovfixError):
            logger.warning("%s %s failed: %s", item.name, procedure.value, outcome)
            failures.append(SuiteFailure(item.name, procedure, outcome))
        else:
            results.append(outcome)
    return SuiteResult(tuple(results), tuple(failures), tuple(procedures))


async def _exec_procedures(
    tasks: Sequence[tuple[NamedInstance, Procedure]],
    ub_table: Mapping[str, float],
    cfg: SolverConfig,
    jobs: int,
    sf_jobs: int,
    cross_certificates: bool,
) -> Sequence[ProcedureResult | BaseException]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [
            loop.run_in_executor(
                pool,
                partial(
                    run_procedure,
                    item.instance,
                    ub_table[item.name],
                    procedure,
                    cfg,
                    instance_name=item.name,
                    cross_certificates=cross_certificates,
                    sf_jobs=sf_jobs,
                ),
            )
            for item, procedure in tasks
        ]
        return await asyncio.gather(*futures, return_exceptions=True)


ReturnType = TypeVar("ReturnType")


def iter_outcomes(
    items: Iterable[ReturnType | BaseException],
) -> Iterator[ReturnType | CovfixError]:
    """Pass results and covfix errors through; anything else is re-raised together at the end."""
    unexpected: list[BaseException] = []
    for item in items:
        if isinstance(item, BaseException) and not isinstance(item, CovfixError):
            unexpected.append(item)
            continue
        yield item
    if unexpected:
        raise MultipleExceptions(unexpected)


def instance_set(name: str) -> str:
    """The benchmark set an instance belongs to: scp46 → 4, scpa3 → a, sls500_2 → sls500."""
    beasley = re.match(r"^scp(nr[e-h]|[a-h]|\d)", name)
    if beasley:
        return beasley.group(1)
    if "_" in name:
        return name.rsplit("_", 1)[0]
    return name


def reduction_summary(
    results: Iterable[ProcedureResult], procedures: Sequence[Procedure] | None = None
) -> list[SetSummary]:
    """Average percentage reduction in the number of variables per instance set and procedure."""
    grouped: dict[tuple[str, Procedure], list[ProcedureResult]] = {}
    sets: list[str] = []
    for result in results:
        set_name = instance_set(result.instance_name)
        if set_name not in sets:
            sets.append(set_name)
        grouped.setdefault((set_name, result.name), []).append(result)
    order = list(procedures) if procedures is not None else list(Procedure)
    summary: list[SetSummary] = []
    for set_name in sets:
        for procedure in order:
            group = grouped.get((set_name, procedure))
            if not group:
                continue
            summary.append(
                SetSummary(
                    set_name=set_name,
                    procedure=procedure,
                    instances=len(group),
                    mean_reduction_percent=float(np.mean([r.reduction_percent for r in group])),
                    mean_outer_iterations=float(np.mean([r.outer_iterations for r in group])),
                )
            )
    return summary
