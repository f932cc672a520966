from __future__ import annotations

import csv
from pathlib import Path

import pytest
from click.testing import CliRunner, Result

from covfix.harness import main
from tests.helpers import T1_TEXT


@pytest.fixture
def project(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """A working directory with one instance and its bound; charts off unless asked for."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("COVFIX_LOG", raising=False)
    (tmp_path / "pyproject.toml").write_text("[tool.covfix]\ncharts = false\n", encoding="utf8")
    (tmp_path / "data").mkdir()
    (tmp_path / "data" / "t1.txt").write_text(T1_TEXT, encoding="utf8")
    (tmp_path / "ub.txt").write_text("t1 1\n", encoding="utf8")
    return tmp_path


def run(*args: str, env: dict[str, str] | None = None) -> Result:
    return CliRunner().invoke(main, list(args), env=env)


def rows(path: Path) -> list[dict[str, str]]:
    with path.open(encoding="utf8", newline="") as f:
        return list(csv.DictReader(f))


def test_all_procedures(project: Path):
    result = run("--instances", "data/*.txt", "--ub-file", "ub.txt", "--out", "out")
    assert result.exit_code == 0, result.output
    assert "- t1 SF+DRE: (3, 2) -> (0, 0)" in result.output
    assert "Results written to out" in result.output
    results = rows(project / "out" / "results.csv")
    assert [r["procedure"] for r in results] == [
        "RCF+DRE",
        "DPF+DRE",
        "I(RCF+DRE)",
        "I(DPF+DRE)",
        "SF+DRE",
    ]
    assert results[-1]["n_final"] == "0"
    assert (project / "out" / "ub.txt").read_text(encoding="utf8") == "t1 1\n"
    assert (project / "out" / "traces" / "t1__dpf.csv").is_file()
    assert not (project / "out" / "traces" / "t1__sf.csv").exists()
    assert not (project / "out" / "charts").exists()


def test_outputs_are_reproducible(project: Path):
    """Without timing two runs write identical files."""
    for out in ("a", "b"):
        result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt", "--out", out)
        assert result.exit_code == 0, result.output
    for name in ("results.csv", "table.csv", "summary.csv", "traces/t1__idpf.csv"):
        assert (project / "a" / name).read_bytes() == (project / "b" / name).read_bytes()


def test_procedure_selection(project: Path):
    result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt", "--procedures", "idpf,rcf")
    assert result.exit_code == 0, result.output
    procedures = [r["procedure"] for r in rows(project / "results" / "results.csv")]
    assert procedures == ["I(DPF+DRE)", "RCF+DRE"]


def test_missing_bound(project: Path):
    (project / "ub.txt").write_text("t2 3\n", encoding="utf8")
    result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt")
    assert result.exit_code == 1
    assert "no upper bound for: t1" in result.output


def test_bound_below_lp_fails(project: Path):
    (project / "ub.txt").write_text("t1 0.5\n", encoding="utf8")
    result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt", "--procedures", "dpf")
    assert result.exit_code == 1
    assert "t1 DPF+DRE failed" in result.output
    assert "Some procedures failed." in result.output


@pytest.mark.parametrize(
    "args",
    [
        ("--instances", "data/t1.txt", "--ub-file", "ub.txt", "--ub", "greedy"),
        ("--ub", "greedy"),
        ("--instances", "data/t1.txt", "--ub", "greedy", "--procedures", "lp"),
    ],
)
def test_usage_errors(project: Path, args: tuple[str, ...]):
    """At most one bound source, some instances and known procedure codes are required."""
    assert run(*args).exit_code == 2


@pytest.mark.parametrize("mode", ["greedy", "exact"])
def test_computed_bounds(project: Path, mode: str):
    """Greedy and exact both find the optimal cover of value 1."""
    result = run("--instances", "data/t1.txt", "--ub", mode, "--procedures", "sf")
    assert result.exit_code == 0, result.output
    assert (project / "results" / "ub.txt").read_text(encoding="utf8") == "t1 1\n"


def test_greedy_bounds_by_default(project: Path):
    """Without --ub-file or --ub the bounds come from the greedy cover."""
    result = run("--instances", "data/t1.txt", "--procedures", "rcf")
    assert result.exit_code == 0, result.output
    assert (project / "results" / "ub.txt").read_text(encoding="utf8") == "t1 1\n"


def test_no_matching_instances(project: Path):
    result = run("--instances", "nothing/*.txt", "--ub", "greedy")
    assert result.exit_code == 1
    assert "no instance files match" in result.output


def test_generate(project: Path):
    args = "--generate sls --n 30 --count 2 --ub greedy --procedures rcf,sf --seed 7 --out gen"
    result = run(*args.split())
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in (project / "gen" / "instances").iterdir()) == [
        "sls30_1.txt",
        "sls30_2.txt",
    ]
    results = rows(project / "gen" / "results.csv")
    assert [(r["instance"], r["n0"]) for r in results] == [
        ("sls30_1", "30"),
        ("sls30_1", "30"),
        ("sls30_2", "30"),
        ("sls30_2", "30"),
    ]
    (summary,) = [s for s in rows(project / "gen" / "summary.csv") if s["procedure"] == "SF+DRE"]
    assert summary["set"] == "sls30"
    assert summary["instances"] == "2"


def test_charts(project: Path):
    result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt", "--charts", "--out", "out")
    assert result.exit_code == 0, result.output
    charts = project / "out" / "charts"
    assert (charts / "summary.svg").is_file()
    assert (charts / "traces" / "t1__dpf.svg").is_file()
    assert (charts / "fixings" / "t1.svg").is_file()
    assert (charts / "average" / "t1.svg").is_file()


def test_bad_log_level(project: Path):
    result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt", env={"COVFIX_LOG": "LOUD"})
    assert result.exit_code == 2
    assert "COVFIX_LOG" in result.output


def test_missing_config_file(project: Path):
    result = run("--config", "missing.toml", "--ub", "greedy", "--instances", "data/t1.txt")
    assert result.exit_code == 1
    assert "could not be located" in result.output


def test_config_file_settings(project: Path):
    """Settings come from the nearest pyproject and the command line overrides them."""
    (project / "pyproject.toml").write_text(
        '[tool.covfix]\ncharts = false\ninstances = ["data/t1.txt"]\nub_file = "ub.txt"\n'
        'procedures = ["sf"]\nout = "configured"\n',
        encoding="utf8",
    )
    result = run("--ub", "exact", "--procedures", "rcf")
    assert result.exit_code == 0, result.output
    assert [r["procedure"] for r in rows(project / "configured" / "results.csv")] == ["RCF+DRE"]


def test_unknown_solver_setting(project: Path):
    """Solver keys the solver does not have are usage errors."""
    (project / "pyproject.toml").write_text(
        "[tool.covfix]\ncharts = false\n\n[tool.covfix.solver]\neps_obj = 1e-6\n", encoding="utf8"
    )
    result = run("--instances", "data/t1.txt", "--ub-file", "ub.txt")
    assert result.exit_code == 2
    assert "eps_obj" in result.output


def test_sf_jobs_option(project: Path):
    """SF with parallel restricted LPs reports the same reduction."""
    result = run("--instances", "data/t1.txt", "--procedures", "sf", "--sf-jobs", "2")
    assert result.exit_code == 0, result.output
    assert "- t1 SF+DRE: (3, 2) -> (0, 0)" in result.output
