from __future__ import annotations

from pathlib import Path
from typing import Any

import pytest

from covfix.harness.config import ConfigError, NoConfigFile, RunConfig
from covfix.pipeline import Procedure
from covfix.simplex import Pricing


def test_nearest_pyproject(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    """The search walks up from the working directory."""
    (tmp_path / "pyproject.toml").write_text(
        '[tool.covfix]\nprocedures = ["sf", "rcf"]\njobs = 3\n\n'
        '[tool.covfix.solver]\npricing = "bland"\n\n[tool.covfix.sls]\nr_max = 0.25\n',
        encoding="utf8",
    )
    nested = tmp_path / "a" / "b"
    nested.mkdir(parents=True)
    monkeypatch.chdir(nested)
    assert RunConfig.get_configfile() == tmp_path / "pyproject.toml"
    config = RunConfig.get_config()
    assert config.procedures == (Procedure.SF, Procedure.RCF)
    assert config.jobs == 3
    assert config.solver.pricing is Pricing.BLAND
    assert config.sls.r_max == 0.25
    assert config.sls.n == 500


def test_explicit_config_file(tmp_path: Path):
    path = tmp_path / "run.toml"
    path.write_text('[tool.covfix]\nub_mode = "greedy"\n', encoding="utf8")
    assert RunConfig.get_config(path).ub_mode == "greedy"
    with pytest.raises(NoConfigFile) as e:
        RunConfig.get_config(tmp_path / "missing.toml")
    assert e.value.config_filename.endswith("missing.toml")


def test_update_layers():
    """Sub-tables update key by key; unknown keys are refused."""
    config = RunConfig().update({"solver": {"max_iters": 10}, "out": "elsewhere"})
    assert config.solver.max_iters == 10
    assert config.solver.eps_feas == RunConfig().solver.eps_feas
    assert config.out == Path("elsewhere")
    with pytest.raises(ConfigError):
        RunConfig().update({"linters": []})


@pytest.mark.parametrize(
    "settings",
    [
        {"instances": ["x.txt"], "ub_mode": "greedy", "ub_file": "ub.txt"},
        {"ub_mode": "greedy"},
        {"instances": ["x.txt"], "ub_mode": "optimal"},
        {"instances": ["x.txt"], "ub_mode": "greedy", "jobs": 0},
        {"instances": ["x.txt"], "sf_jobs": 0},
    ],
)
def test_validate_rejects(settings: dict[str, Any]):
    with pytest.raises(ConfigError):
        RunConfig().update(settings).validate()


def test_validate_defaults_to_greedy():
    config = RunConfig().update({"instances": ["x.txt"]}).validate()
    assert config.ub_mode == "greedy"
    assert config.ub_file is None
    from_file = RunConfig().update({"instances": ["x.txt"], "ub_file": "ub.txt"}).validate()
    assert from_file.ub_mode is None


def test_validate_accepts_generator():
    config = RunConfig().update({"generate": True, "ub_mode": "greedy"}).validate()
    assert config.generate
