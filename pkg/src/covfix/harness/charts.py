"""
SVG charts of a harness run.

Figures are built with the object-oriented matplotlib API on the Agg backend, so nothing here
touches pyplot state. A fixed hash salt and no date metadata keep repeated runs identical.
"""
from __future__ import annotations

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Sequence

import matplotlib
import numpy as np
from matplotlib.axes import Axes
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from ..pipeline import Procedure, ProcedureResult, SetSummary
from .report import AveragedTrace

logger = logging.getLogger(__name__)

__all__ = [
    "plot_average_trace",
    "plot_round_fixings",
    "plot_round_iterations",
    "plot_summary",
    "plot_trace",
]

_STYLE = {
    "figure.figsize": (5, 3),
    "font.size": 9,
    "axes.linewidth": 0.5,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "covfix",
    "svg.fonttype": "none",
}


@contextmanager
def _figure(path: Path, axes: int = 1) -> Iterator[tuple[Figure, list[Axes]]]:
    with matplotlib.rc_context(_STYLE):
        fig = Figure()
        FigureCanvasAgg(fig)
        yield fig, [fig.add_subplot(1, axes, k + 1) for k in range(axes)]
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.debug("Wrote %s", path)


def plot_trace(result: ProcedureResult, path: Path):
    """Cumulative fixed variables and remaining gap along the first simplex solve."""
    records = result.trace.solve(1)
    iterations = [r.iteration for r in records]
    with _figure(path) as (fig, (ax,)):
        ax.step(iterations, [r.fixed for r in records], where="post", color="k", lw=1)
        ax.set_xlabel("simplex iteration")
        ax.set_ylabel("variables fixed")
        gap = ax.twinx()
        gap.spines["right"].set_visible(True)
        gap.plot(iterations, [r.gap_percent for r in records], color="0.6", lw=0.8, ls="--")
        gap.set_ylabel("% of initial gap")
        gap.set_ylim(0, 100)
        fig.suptitle(f"{result.instance_name}: {result.name.value}", fontsize=9)


def plot_average_trace(avg: AveragedTrace, title: str, path: Path):
    with _figure(path) as (fig, (ax,)):
        ax.plot(avg.percent_iterations, avg.fixed_percent, color="k", lw=1, label="% fixed")
        ax.plot(
            avg.percent_iterations, avg.gap_percent, color="0.6", lw=0.8, ls="--", label="% gap"
        )
        ax.set_xlabel("% of simplex iterations")
        ax.set_ylim(0, 100)
        ax.legend(frameon=False)
        fig.suptitle(f"{title} ({avg.traces} instances)", fontsize=9)


def plot_round_fixings(
    results: Sequence[ProcedureResult], path: Path, reference: ProcedureResult | None = None
):
    """Variables fixed per outer iteration, one bar group per procedure; SF as a line."""
    width = 0.8 / max(1, len(results))
    with _figure(path) as (fig, (ax,)):
        for k, result in enumerate(results):
            rounds = np.arange(1, len(result.rounds) + 1)
            fixed = [r.fixed_to_zero + r.fixed_to_one for r in result.rounds]
            shade = str(0.2 + 0.5 * k / max(1, len(results)))
            ax.bar(rounds + k * width, fixed, width, label=result.name.value, color=shade)
        if reference is not None:
            total = reference.fixed0 + reference.fixed1
            ax.axhline(total, color="k", lw=0.8, ls=":", label=reference.name.value)
        ax.set_xlabel("outer iteration")
        ax.set_ylabel("variables fixed")
        ax.legend(frameon=False)
        if results:
            fig.suptitle(results[0].instance_name, fontsize=9)


def plot_round_iterations(result: ProcedureResult, path: Path):
    with _figure(path) as (fig, (ax,)):
        rounds = np.arange(1, len(result.rounds) + 1)
        ax.bar(rounds, [r.simplex_iterations for r in result.rounds], 0.6, color="0.4")
        ax.set_xlabel("outer iteration")
        ax.set_ylabel("simplex iterations")
        fig.suptitle(f"{result.instance_name}: {result.name.value}", fontsize=9)


def plot_summary(summary: Sequence[SetSummary], path: Path):
    """Average % reduction in variables, sets along x and one bar per procedure."""
    sets: list[str] = []
    procedures: list[Procedure] = []
    values: dict[tuple[str, Procedure], float] = {}
    for item in summary:
        if item.set_name not in sets:
            sets.append(item.set_name)
        if item.procedure not in procedures:
            procedures.append(item.procedure)
        values[item.set_name, item.procedure] = item.mean_reduction_percent
    width = 0.8 / max(1, len(procedures))
    x = np.arange(len(sets))
    with _figure(path) as (fig, (ax,)):
        for k, procedure in enumerate(procedures):
            heights = [values.get((s, procedure), 0.0) for s in sets]
            shade = str(0.1 + 0.7 * k / max(1, len(procedures)))
            ax.bar(x + k * width, heights, width, label=procedure.value, color=shade)
        ax.set_xticks(x + width * (len(procedures) - 1) / 2)
        ax.set_xticklabels(sets)
        ax.set_ylabel("% reduction in variables")
        ax.legend(frameon=False, fontsize=7)
