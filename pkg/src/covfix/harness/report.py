"""
CSV outputs of a harness run.

    results.csv          one row per (instance, procedure)
    table.csv            one row per instance, the procedures side by side
    summary.csv          average reduction per instance set and procedure
    traces/<i>__<p>.csv  per simplex iteration: ζ, cumulative fixed, gap %
    rounds/<i>__<p>.csv  per outer iteration: simplex iterations, fixings, size
    ub.txt               the upper bounds used
    instances/<i>.txt    generated instances in OR-Library format

All files are RFC-4180 CSV in UTF-8 with a header row. Numbers are written with a fixed format so
that identical runs give identical files; wall times are only written when asked for.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from ..instance import ScpInstance
from ..orlib import format_ub_table, save_instance
from ..pipeline import Procedure, ProcedureResult, RunTrace, SetSummary

logger = logging.getLogger(__name__)

__all__ = [
    "AveragedTrace",
    "Reporter",
    "average_traces",
    "RESULT_COLUMNS",
    "ROUND_COLUMNS",
    "TRACE_COLUMNS",
]

RESULT_COLUMNS = (
    "instance",
    "procedure",
    "n0",
    "m0",
    "n_final",
    "m_final",
    "outer_iters",
    "fixed0",
    "fixed1",
    "wall_ms",
)
TRACE_COLUMNS = ("outer_iteration", "iteration", "zeta", "fixed_cumulative", "gap_percent")
ROUND_COLUMNS = (
    "outer_iteration",
    "simplex_iterations",
    "fixed0",
    "fixed1",
    "rows_removed",
    "n",
    "m",
    "ub",
    "offset",
    "first_fix_iteration",
    "first_dpf_only_iteration",
)


def _num(value: float) -> str:
    return f"{value:.10g}"


def _optional(value: int | None) -> str:
    return "" if value is None else str(value)


class Reporter:
    """Writes every output file of a run below `out`."""

    def __init__(self, out: Path, timing: bool = False):
        self.out = out
        self.timing = timing

    def path(self, *parts: str) -> Path:
        path = self.out.joinpath(*parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def chart_path(self, *parts: str) -> Path:
        return self.path("charts", *parts)

    def _write_csv(self, path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]):
        with path.open("w", encoding="utf8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns)
            writer.writeheader()
            writer.writerows(rows)
        logger.debug("Wrote %s", path)

    def write_instance(self, name: str, inst: ScpInstance) -> Path:
        path = self.path("instances", f"{name}.txt")
        save_instance(inst, path)
        return path

    def write_ub(self, table: Mapping[str, float]) -> Path:
        path = self.path("ub.txt")
        path.write_text(format_ub_table(table), encoding="utf8")
        return path

    def write_results(self, results: Sequence[ProcedureResult]) -> Path:
        path = self.path("results.csv")
        self._write_csv(path, RESULT_COLUMNS, (self._result_row(r) for r in results))
        return path

    def _result_row(self, result: ProcedureResult) -> dict[str, Any]:
        return {
            "instance": result.instance_name,
            "procedure": result.name.value,
            "n0": result.n0,
            "m0": result.m0,
            "n_final": result.n_final,
            "m_final": result.m_final,
            "outer_iters": result.outer_iterations,
            "fixed0": result.fixed0,
            "fixed1": result.fixed1,
            "wall_ms": f"{1000 * result.wall_time:.1f}" if self.timing else "",
        }

    def write_trace(self, result: ProcedureResult) -> Path:
        path = self.path("traces", f"{result.instance_name}__{result.name.code}.csv")
        rows = (
            {
                "outer_iteration": r.outer_iteration,
                "iteration": r.iteration,
                "zeta": _num(r.zeta),
                "fixed_cumulative": r.fixed,
                "gap_percent": _num(r.gap_percent),
            }
            for r in result.trace
        )
        self._write_csv(path, TRACE_COLUMNS, rows)
        return path

    def write_rounds(self, result: ProcedureResult) -> Path:
        path = self.path("rounds", f"{result.instance_name}__{result.name.code}.csv")
        rows = (
            {
                "outer_iteration": r.outer_iteration,
                "simplex_iterations": r.simplex_iterations,
                "fixed0": r.fixed_to_zero,
                "fixed1": r.fixed_to_one,
                "rows_removed": r.rows_removed,
                "n": r.n_cols,
                "m": r.n_rows,
                "ub": _num(r.ub),
                "offset": _num(r.cost_offset),
                "first_fix_iteration": _optional(r.first_fix_iteration),
                "first_dpf_only_iteration": _optional(r.first_dpf_only_iteration),
            }
            for r in result.rounds
        )
        self._write_csv(path, ROUND_COLUMNS, rows)
        return path

    def write_summary(self, summary: Sequence[SetSummary]) -> Path:
        path = self.path("summary.csv")
        rows = (
            {
                "set": s.set_name,
                "procedure": s.procedure.value,
                "instances": s.instances,
                "mean_reduction_percent": f"{s.mean_reduction_percent:.2f}",
                "mean_outer_iters": f"{s.mean_outer_iterations:.2f}",
            }
            for s in summary
        )
        columns = ("set", "procedure", "instances", "mean_reduction_percent", "mean_outer_iters")
        self._write_csv(path, columns, rows)
        return path

    def write_table(
        self, results: Sequence[ProcedureResult], procedures: Sequence[Procedure]
    ) -> Path:
        """Instances down, procedures across: (n, m) per procedure and #it for I(·)."""
        columns = ["instance", "n0", "m0"]
        for procedure in procedures:
            columns += [f"{procedure.value} n", f"{procedure.value} m"]
            if procedure.iterative:
                columns.append(f"{procedure.value} #it")
        rows: dict[str, dict[str, Any]] = {}
        for result in results:
            row = rows.setdefault(
                result.instance_name,
                {"instance": result.instance_name, "n0": result.n0, "m0": result.m0},
            )
            row[f"{result.name.value} n"] = result.n_final
            row[f"{result.name.value} m"] = result.m_final
            if result.name.iterative:
                row[f"{result.name.value} #it"] = result.outer_iterations
        path = self.path("table.csv")
        self._write_csv(path, columns, rows.values())
        return path

    def write_all(
        self,
        results: Sequence[ProcedureResult],
        procedures: Sequence[Procedure],
        summary: Sequence[SetSummary],
    ):
        self.write_results(results)
        self.write_table(results, procedures)
        self.write_summary(summary)
        for result in results:
            if result.name is not Procedure.SF:
                self.write_trace(result)
            self.write_rounds(result)


@dataclass(frozen=True)
class AveragedTrace:
    """Mean fixing and gap curves over several solves, against the share of iterations done."""

    percent_iterations: np.ndarray
    fixed_percent: np.ndarray
    gap_percent: np.ndarray
    traces: int


def average_traces(traces: Sequence[RunTrace], points: int = 101) -> AveragedTrace:
    """
    Average the first solve of each trace on a grid of `points` iteration percentages.

    Fixed counts are taken as a percentage of the count at the end of that solve; solves that fix
    nothing contribute zeros.
    """
    grid = np.linspace(0.0, 100.0, points)
    fixed = np.zeros(points)
    gap = np.zeros(points)
    used = 0
    for trace in traces:
        records = trace.solve(1)
        if not records:
            continue
        x = np.linspace(0.0, 100.0, len(records)) if len(records) > 1 else np.zeros(1)
        counts = np.array([r.fixed for r in records], dtype=float)
        share = 100.0 * counts / counts[-1] if counts[-1] > 0 else np.zeros(len(counts))
        fixed += np.interp(grid, x, share)
        gap += np.interp(grid, x, [r.gap_percent for r in records])
        used += 1
    if used:
        fixed /= used
        gap /= used
    return AveragedTrace(grid, fixed, gap, used)
