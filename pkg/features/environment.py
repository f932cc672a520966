"""Runners for click applications."""
from __future__ import annotations

from pathlib import Path
from tempfile import TemporaryDirectory
from typing import Iterable

from behave import fixture, use_fixture
from behave.model import Examples, Feature, Row, Scenario, ScenarioOutline, Table

from features.steps.covfix_env import CovfixContext, CovfixEnvironment


@fixture
def covfix_environment(context: CovfixContext) -> Iterable[CovfixEnvironment]:
    with TemporaryDirectory() as tmp_dir:
        covfix = CovfixEnvironment(_path=Path(tmp_dir), verbose=False, project_files={})
        context.covfix = covfix
        yield covfix


def add_dynamic_procedure(feature: Feature):
    """Procedures that reduce the small example to nothing, whatever the pivot path."""
    headings = ["code", "procedure"]
    procedures = {"dpf": "DPF+DRE", "idpf": "I(DPF+DRE)", "sf": "SF+DRE"}

    if feature.scenarios is None:
        return
    for scenario in feature.scenarios:
        if scenario.tags is None:
            continue
        if "fixture.dynamic_procedure" in scenario.tags and isinstance(scenario, ScenarioOutline):
            rows = [Row(headings=headings, cells=list(item)) for item in procedures.items()]
            example = Examples(
                filename=scenario.filename,
                line=scenario.line,
                keyword=scenario.keyword,
                name="Procedures",
                table=Table(headings=headings, rows=rows),
            )
            if scenario.examples:
                scenario.examples.append(example)
            else:
                scenario.examples = [example]


def before_scenario(context: CovfixContext, _scenario: Scenario):
    use_fixture(covfix_environment, context)


def before_feature(_context: CovfixContext, feature: Feature):
    add_dynamic_procedure(feature)
