#!/usr/bin/env python
"""
Run the variable-fixing procedures on set-covering instances.

* RCF+DRE      reduced-cost fixing with the optimal dual
* DPF+DRE      dual-path fixing with every simplex iterate
* I(RCF+DRE)   RCF+DRE repeated until nothing is fixed
* I(DPF+DRE)   DPF+DRE repeated until nothing is fixed
* SF+DRE       strong fixing
"""

from __future__ import annotations

import glob
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

import click

from ..dre import dominated_rows
from ..errors import CovfixError
from ..oracle import exact_optimum
from ..orlib import load_instance, load_ub_table
from ..pipeline import NamedInstance, Procedure, SuiteResult, instance_set, run_suite
from ..simplex import Pricing
from ..sls import generate_batch
from . import charts
from .config import UB_MODES, ConfigError, NoConfigFile, RunConfig
from .greedy import greedy_ub
from .report import Reporter, average_traces

logger = logging.getLogger(__name__)

__all__ = ["main"]


class NoInstances(CovfixError):
    """No instance file matched the given patterns."""

    def __init__(self, patterns: Sequence[str]):
        super().__init__(f"no instance files match {', '.join(patterns)}")
        self.patterns = list(patterns)


class DuplicateInstanceName(CovfixError):
    """Two instance files share a name."""

    def __init__(self, name: str, paths: Sequence[Path]):
        super().__init__(f"instance name {name!r} is used by {', '.join(map(str, paths))}")
        self.name = name
        self.paths = list(paths)


@click.command()
@click.option("--instances", multiple=True, help="Glob of OR-Library instance files")
@click.option("--ub-file", type=click.Path(path_type=Path), help="File of 'name value' lines")
@click.option(
    "--ub",
    "ub_mode",
    type=click.Choice(UB_MODES),
    help="Compute the upper bounds (default: greedy)",
)
@click.option("--procedures", help="Comma separated: rcf,dpf,irc,idpf,sf")
@click.option("--out", type=click.Path(path_type=Path), help="Output directory")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Generator seed")
@click.option("--jobs", type=click.IntRange(1), help="Instances processed in parallel")
@click.option("--sf-jobs", type=click.IntRange(1), help="Restricted LPs solved in parallel by SF")
@click.option("--generate", type=click.Choice(["sls"]), help="Generate instances instead")
@click.option("--n", "n_cols", type=click.IntRange(1), help="Generated column count")
@click.option("--nu", type=click.IntRange(1), help="Generated node count")
@click.option("--rmin", type=float, help="Smallest covering radius")
@click.option("--rmax", type=float, help="Largest covering radius")
@click.option("--count", type=click.IntRange(1), help="Number of instances to generate")
@click.option("--pricing", type=click.Choice([p.value for p in Pricing]))
@click.option("--tol-feas", type=float, help="Simplex feasibility tolerance")
@click.option("--cross-certificates/--no-cross-certificates", default=None)
@click.option("--timing/--no-timing", default=None, help="Fill the wall_ms column")
@click.option("--charts/--no-charts", default=None)
@click.option("--config", "config_file", type=click.Path(path_type=Path))
@click.option("--verbose", is_flag=True, default=False)
@click.version_option()
def main(
    verbose: bool,
    config_file: Path | None,
    instances: Sequence[str],
    ub_file: Path | None,
    ub_mode: str | None,
    procedures: str | None,
    n_cols: int | None,
    nu: int | None,
    rmin: float | None,
    rmax: float | None,
    pricing: str | None,
    tol_feas: float | None,
    generate: str | None,
    **flags: Any,
):
    _configure_logging(verbose)

    overrides: dict[str, Any] = {k: v for k, v in flags.items() if v is not None}
    if instances:
        overrides["instances"] = tuple(instances)
    if ub_file is not None:
        overrides["ub_file"] = ub_file
    if ub_mode is not None:
        overrides["ub_mode"] = ub_mode
    if procedures is not None:
        overrides["procedures"] = tuple(p for p in procedures.split(",") if p.strip())
    if generate is not None:
        overrides["generate"] = True
    sls = {
        key: value
        for key, value in {"n": n_cols, "nu": nu, "r_min": rmin, "r_max": rmax}.items()
        if value is not None
    }
    solver = {
        key: value
        for key, value in {"pricing": pricing, "eps_feas": tol_feas}.items()
        if value is not None
    }

    try:
        config = RunConfig.get_config(config_file)
        if config.ub_file is not None and (ub_mode is not None):
            config = replace(config, ub_file=None)
        if config.ub_mode is not None and (ub_file is not None):
            config = replace(config, ub_mode=None)
        config = config.update({**overrides, "sls": sls, "solver": solver}).validate()
    except NoConfigFile as e:
        click.echo(
            f'"{e.config_filename}" could not be located in the search paths: {e.search_paths!s}'
        )
        sys.exit(1)
    except (ConfigError, ValueError, TypeError) as e:
        raise click.UsageError(str(e))
    except CovfixError as e:
        click.echo(f"Error: {e}")
        sys.exit(1)

    try:
        suite = _run(config)
    except CovfixError as e:
        click.echo(f"Error: {e}")
        sys.exit(1)

    if suite.failures:
        for failure in suite.failures:
            name = f"{failure.instance_name} {failure.procedure.value}"
            click.echo(f"{name} failed: {failure.error}")
        click.echo("Some procedures failed.")
        sys.exit(1)
    click.echo(f"Results written to {config.out}")


def _configure_logging(verbose: bool):
    level = "DEBUG" if verbose else os.environ.get("COVFIX_LOG", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise click.BadParameter(f"unknown log level {level!r}", param_hint="COVFIX_LOG")
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("covfix").setLevel(level)


def _run(config: RunConfig) -> SuiteResult:
    reporter = Reporter(config.out, timing=config.timing)
    instances = _load_instances(config, reporter)
    for item in instances:
        dominated = dominated_rows(item.instance)
        if dominated:
            logger.warning("%s has %d dominated rows", item.name, len(dominated))

    ub_table = _ub_table(config, instances)
    suite = run_suite(
        instances,
        ub_table,
        config.procedures,
        config.solver,
        jobs=config.jobs,
        sf_jobs=config.sf_jobs,
        cross_certificates=config.cross_certificates,
    )
    reporter.write_ub({item.name: ub_table[item.name] for item in instances})
    reporter.write_all(suite.results, suite.procedures, suite.summary())
    if config.charts:
        _write_charts(reporter, suite)

    for result in suite.results:
        iterations = f" [{result.outer_iterations}]" if result.name.iterative else ""
        click.echo(
            f"- {result.instance_name} {result.name.value}: "
            f"({result.n0}, {result.m0}) -> ({result.n_final}, {result.m_final}){iterations}"
        )
    return suite


def _load_instances(config: RunConfig, reporter: Reporter) -> list[NamedInstance]:
    if config.generate:
        params = replace(config.sls, seed=config.seed)
        click.echo(f"Generating {config.count} SLS instances with n={params.n}")
        batch = generate_batch(params, config.count, jobs=config.jobs)
        named = [NamedInstance(f"sls{params.n}_{k + 1}", inst) for k, inst in enumerate(batch)]
        for item in named:
            reporter.write_instance(item.name, item.instance)
        return named

    paths = sorted({Path(p) for pattern in config.instances for p in glob.glob(pattern)})
    paths = [path for path in paths if path.is_file()]
    if not paths:
        raise NoInstances(config.instances)
    by_name: dict[str, list[Path]] = {}
    for path in paths:
        by_name.setdefault(path.stem, []).append(path)
    for name, group in by_name.items():
        if len(group) > 1:
            raise DuplicateInstanceName(name, group)
    return [NamedInstance(path.stem, load_instance(path)) for path in paths]


def _ub_table(config: RunConfig, instances: Sequence[NamedInstance]) -> dict[str, float]:
    if config.ub_file is not None:
        return load_ub_table(config.ub_file)
    table: dict[str, float] = {}
    for item in instances:
        if config.ub_mode == "exact":
            table[item.name] = exact_optimum(item.instance)[0]
        else:
            table[item.name] = greedy_ub(item.instance)[0]
        logger.info("%s: %s UB %g", item.name, config.ub_mode, table[item.name])
    return table


def _write_charts(reporter: Reporter, suite: SuiteResult):
    by_instance: dict[str, dict[Procedure, Any]] = {}
    for result in suite.results:
        by_instance.setdefault(result.instance_name, {})[result.name] = result
        slug = f"{result.instance_name}__{result.name.code}"
        if result.name.uses_path:
            charts.plot_trace(result, reporter.chart_path("traces", f"{slug}.svg"))
        if result.name.iterative:
            charts.plot_round_iterations(result, reporter.chart_path("rounds", f"{slug}.svg"))

    for name, results in by_instance.items():
        iterative = [results[p] for p in (Procedure.IRCF, Procedure.IDPF) if p in results]
        if iterative:
            path = reporter.chart_path("fixings", f"{name}.svg")
            charts.plot_round_fixings(iterative, path, reference=results.get(Procedure.SF))

    summary = suite.summary()
    if summary:
        charts.plot_summary(summary, reporter.chart_path("summary.svg"))

    sets: dict[str, list[Any]] = {}
    for result in suite.results:
        if result.name is Procedure.DPF:
            sets.setdefault(instance_set(result.instance_name), []).append(result.trace)
    for set_name, traces in sets.items():
        avg = average_traces(traces)
        path = reporter.chart_path("average", f"{set_name}.svg")
        charts.plot_average_trace(avg, f"DPF on {set_name}", path)
