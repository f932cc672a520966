import csv
import io
from pathlib import Path

from behave import given, then, when

from features.steps.covfix_env import CovfixContext

here = Path(__file__).parent


@given("a new covfix project")
def step_new_project(context: CovfixContext):
    context.covfix.project_files["pyproject.toml"] = (here / "data" / "pyproject.toml").read_text()


@given("there is no project file")
def step_no_project(context: CovfixContext):
    context.covfix.project_files.pop("pyproject.toml", None)


@given('the example instance "{name}"')
def step_example_instance(context: CovfixContext, name: str):
    context.covfix.project_files[f"data/{name}.txt"] = (here / "data" / f"{name}.txt").read_text()


@given("the example upper bounds")
def step_example_bounds(context: CovfixContext):
    context.covfix.project_files["ub.txt"] = (here / "data" / "ub.txt").read_text()


@given('the file "{rel_path}" contains')
def step_file_contains(context: CovfixContext, rel_path: str):
    context.covfix.project_files[rel_path] = context.text.strip() + "\n"


@given('the environment variable {name} is "{value}"')
def step_environment_variable(context: CovfixContext, name: str, value: str):
    context.covfix.env[name] = value


@when('I run covfix with "{args}"')
def step_run_covfix(context: CovfixContext, args: str):
    context.result = context.covfix.run(*args.split())


@when("I run covfix with no arguments")
def step_run_covfix_no_args(context: CovfixContext):
    context.result = context.covfix.run()


@then("the exit code is {exit_code}")
def step_exit_code(context: CovfixContext, exit_code: str):
    assert context.result
    assert context.result.exit_code == int(exit_code), context.result.output


@then("the output contains the text")
def step_output_contains_text(context: CovfixContext):
    assert context.result
    assert context.text.strip() in context.result.output, context.result.output


@then('the output contains "{message}"')
def step_output_contains_message(context: CovfixContext, message: str):
    assert context.result
    assert message in context.result.output, context.result.output


@then('the file "{rel_path}" exists')
def step_file_exists(context: CovfixContext, rel_path: str):
    assert (context.covfix.project_dir / rel_path).is_file()


@then('the file "{rel_path}" has {count:d} data rows')
def step_file_rows(context: CovfixContext, rel_path: str, count: int):
    rows = list(csv.DictReader(io.StringIO(context.covfix.read(rel_path))))
    assert len(rows) == count, rows


@then('"{rel_path}" reports {procedure} on {instance} ending at {n:d} columns')
def step_final_columns(
    context: CovfixContext, rel_path: str, procedure: str, instance: str, n: int
):
    rows = list(csv.DictReader(io.StringIO(context.covfix.read(rel_path))))
    (row,) = [r for r in rows if r["instance"] == instance and r["procedure"] == procedure]
    assert int(row["n_final"]) == n, row
