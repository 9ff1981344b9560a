"""
Experiment configuration files.

A config file is ``key = value`` lines grouped under ``[section]`` headers;
``#`` and ``;`` start comments. Keys left out take their defaults from
Settings, so an empty file is a valid configuration:

    [graph]
    lattice_dim = 1
    lattice_radius = 256

    [problem]
    kind = scalar
    p = 2

    [epsilon]
    min = 0.05
    max = 0.4
    count = 8
"""

import configparser
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import settings
from solver.problem import ProblemKind, SolverControls
from utils.exceptions import ConfigError
from utils.helpers import geometric_grid
from utils.logger import setup_logger

logger = setup_logger(__name__)


class GraphSection(BaseModel):
    """Which graph to run on: a truncated lattice or a graph file."""

    model_config = ConfigDict(extra="forbid")

    lattice_dim: int = Field(1, ge=1, description="Lattice dimension n")
    lattice_radius: int = Field(256, ge=1, description="l1 truncation radius")
    file: Optional[str] = Field(None, description="Graph file; overrides the lattice when set")
    base: Optional[str] = Field(None, description="Base vertex x0; the lattice origin by default")
    metric: Literal["hop", "euclidean"] = Field("hop", description="Distance used by the cutoff")


class ProblemSection(BaseModel):
    """Equation, exponents and initial data shape."""

    model_config = ConfigDict(extra="forbid")

    kind: ProblemKind = ProblemKind.SCALAR
    p: float = Field(2.0, gt=1.0)
    q: Optional[float] = Field(None, gt=1.0)
    data: Literal["bump", "random"] = "bump"
    data_radius: float = Field(2.0, gt=0.0)
    data_mass: float = Field(1.0, gt=0.0)
    nonlinear_coefficient: float = 1.0

    @model_validator(mode="after")
    def system_needs_q(self) -> "ProblemSection":
        if self.kind.is_system and self.q is None:
            raise ValueError(f"kind={self.kind.value} needs q")
        return self


class EpsilonGrid(BaseModel):
    """Geometric grid of data sizes."""

    model_config = ConfigDict(extra="forbid")

    min: float = Field(0.05, gt=0.0)
    max: float = Field(0.4, gt=0.0)
    count: int = Field(8, ge=1)

    @model_validator(mode="after")
    def ordered(self) -> "EpsilonGrid":
        if self.max < self.min:
            raise ValueError("epsilon max must be >= min")
        if self.count > 1 and self.max == self.min:
            raise ValueError("several epsilon values need max > min")
        return self

    def values(self) -> List[float]:
        return geometric_grid(self.min, self.max, self.count)


class CutoffOverrides(BaseModel):
    """Cutoff parameters used by the functionals and the cutoff bound checks."""

    model_config = ConfigDict(extra="forbid")

    beta_margin: int = Field(1, ge=0)
    nu: float = Field(1.0, ge=0.0, le=1.0)
    radii: List[float] = Field(default_factory=lambda: [8.0, 16.0, 32.0])
    quad_points: int = Field(128, ge=2)

    @field_validator("radii", mode="before")
    @classmethod
    def parse_radii(cls, v):
        if isinstance(v, str):
            v = [float(x) for x in v.split(",") if x.strip()]
        return sorted(float(x) for x in v)


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: str = Field(default_factory=lambda: settings.output_dir)
    label: str = "run"


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    workers: int = Field(default_factory=lambda: settings.sweep_workers, ge=1)


class ExperimentConfig(BaseModel):
    """A complete experiment: graph, problem, epsilon grid, controls, cutoff and outputs."""

    model_config = ConfigDict(extra="forbid")

    graph: GraphSection = Field(default_factory=GraphSection)
    problem: ProblemSection = Field(default_factory=ProblemSection)
    epsilon: EpsilonGrid = Field(default_factory=EpsilonGrid)
    solver: SolverControls = Field(default_factory=SolverControls)
    cutoff: CutoffOverrides = Field(default_factory=CutoffOverrides)
    output: OutputSection = Field(default_factory=OutputSection)
    run: RunSection = Field(default_factory=RunSection)

    @classmethod
    def from_sections(cls, sections: Dict[str, Dict[str, Any]]) -> "ExperimentConfig":
        unknown = set(sections) - set(cls.model_fields)
        if unknown:
            raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
        try:
            return cls(**sections)
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(x) for x in first["loc"])
            raise ConfigError(f"invalid config value at {where}: {first['msg']}") from exc

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        """
        Parse config file text.

        Raises:
            ConfigError: on syntax errors, unknown sections or invalid values
        """
        parser = configparser.ConfigParser(
            comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";"), interpolation=None
        )
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
        sections = {name: {k: v for k, v in parser[name].items() if v != ""} for name in parser.sections()}
        return cls.from_sections(sections)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        logger.info(f"Loaded config {path}")
        return cls.from_text(text)

    def to_text(self) -> str:
        """Render as a config file that parses back to an equal config."""
        lines: List[str] = []
        for name in type(self).model_fields:
            lines.append(f"[{name}]")
            for key, value in getattr(self, name).model_dump(mode="json").items():
                if value is None:
                    lines.append(f"# {key} =")
                elif isinstance(value, list):
                    lines.append(f"{key} = {','.join(repr(float(x)) for x in value)}")
                else:
                    lines.append(f"{key} = {value}")
            lines.append("")
        return "\n".join(lines)

    def signature(self) -> Dict[str, Any]:
        """Everything that changes results (outputs and worker count excluded)."""
        data = self.model_dump(mode="json")
        data.pop("output")
        data["run"].pop("workers")
        return data


def defaults_text() -> str:
    """Complete config file holding every default (``config --defaults``)."""
    return ExperimentConfig().to_text()


__all__ = [
    "GraphSection",
    "ProblemSection",
    "EpsilonGrid",
    "CutoffOverrides",
    "OutputSection",
    "RunSection",
    "ExperimentConfig",
    "defaults_text",
]
