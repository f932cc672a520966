from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, ClassVar, Mapping, Sequence

import toml

from ..errors import CovfixError
from ..pipeline import Procedure
from ..simplex import SolverConfig
from ..sls import SlsParams

__all__ = ["ConfigError", "NoConfigFile", "RunConfig", "UB_MODES"]

UB_MODES = ("greedy", "exact")


@dataclass(frozen=True)
class RunConfig:
    """Configuration for one harness run."""

    instances: tuple[str, ...] = ()
    ub_file: Path | None = None
    ub_mode: str | None = None
    procedures: tuple[Procedure, ...] = tuple(Procedure)
    solver: SolverConfig = field(default_factory=SolverConfig)
    generate: bool = False
    count: int = 1
    sls: SlsParams = field(default_factory=lambda: SlsParams(n=500))
    out: Path = Path("results")
    seed: int = 0
    jobs: int = 1
    sf_jobs: int = 1
    cross_certificates: bool = True
    timing: bool = False
    charts: bool = True
    _config_file: ClassVar[Path] = Path("pyproject.toml")

    def __post_init__(self):
        procedures = tuple(
            p if isinstance(p, Procedure) else Procedure.from_code(str(p)) for p in self.procedures
        )
        object.__setattr__(self, "procedures", procedures)
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "out", Path(self.out))
        if self.ub_file is not None:
            object.__setattr__(self, "ub_file", Path(self.ub_file))

    @classmethod
    def get_config(cls, config_file: Path | None = None) -> RunConfig:
        """Defaults overlaid with ``[tool.covfix]`` from `config_file` or the nearest pyproject."""
        if config_file is not None:
            if not config_file.is_file():
                raise NoConfigFile(config_file, search_paths=[config_file.parent])
            pyproject: Path | None = config_file
        else:
            try:
                pyproject = cls.get_configfile()
            except NoConfigFile:
                pyproject = None
        if pyproject is None:
            return RunConfig()
        table: Mapping[str, Any] = toml.load(pyproject).get("tool", {}).get("covfix", {})
        return RunConfig().update(table)

    @classmethod
    def get_configfile(cls) -> Path:
        cwd = Path.cwd().absolute()
        paths = [cwd] + list(cwd.parents)
        for path in paths:
            pyproject = path / cls._config_file
            if pyproject.exists() and pyproject.is_file():
                break
        else:
            raise NoConfigFile(cls._config_file, search_paths=paths)
        return pyproject

    def update(self, config: Mapping[str, Any]) -> RunConfig:
        """
        Layer `config` onto this configuration.

        ``solver`` and ``sls`` sub-mappings update the nested configs key by key; unknown keys
        are an error.
        """
        config = dict(config)
        solver = self.solver.update(config.pop("solver", {}))
        sls = self.sls.update(config.pop("sls", {}))
        unknown = sorted(set(config) - _FIELDS)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        return replace(self, solver=solver, sls=sls, **config)

    def validate(self) -> RunConfig:
        if self.ub_file is not None and self.ub_mode is not None:
            raise ConfigError("--ub-file and --ub (greedy, exact) cannot both be given")
        if self.ub_file is None and self.ub_mode is None:
            return replace(self, ub_mode="greedy").validate()
        if self.ub_mode is not None and self.ub_mode not in UB_MODES:
            raise ConfigError(f"unknown UB mode {self.ub_mode!r}")
        if not self.generate and not self.instances:
            raise ConfigError("no instances given and no generator selected")
        if min(self.jobs, self.sf_jobs, self.count) < 1:
            raise ConfigError("jobs, sf_jobs and count must be at least 1")
        if self.out.exists() and not self.out.is_dir():
            raise ConfigError(f"output path {self.out} is not a directory")
        return self


_FIELDS = frozenset(
    {
        "instances",
        "ub_file",
        "ub_mode",
        "procedures",
        "generate",
        "count",
        "out",
        "seed",
        "jobs",
        "sf_jobs",
        "cross_certificates",
        "timing",
        "charts",
    }
)


class ConfigError(CovfixError):
    """The run configuration is inconsistent."""


class NoConfigFile(CovfixError):
    """No configuration file could be found."""

    def __init__(self, config_filename: Path, search_paths: Sequence[Path]):
        super().__init__(f'"{config_filename}" could not be located')
        self.config_filename = config_filename.as_posix()
        self.search_paths = [path.as_posix() for path in search_paths]
