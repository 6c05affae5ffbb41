"""Run configurations, one per CLI command."""

from enum import Enum
from pathlib import Path
from typing import Any, List, Optional

from pydantic import BaseModel, Field, model_validator

from ..analytic.models import BASELINE_SPEC, ProblemSpec
from ..data.generator import GenerationSettings
from ..data.models import ParameterRanges
from ..evaluation.models import RegimeThresholds
from ..evaluation.sweeps import LatticeSettings
from ..numerics.models import DEFAULT_NT, DEFAULT_NX
from ..surrogate.models import NetworkConfig


class SolveMethod(str, Enum):
    """Solvers reachable from `rdlab solve`."""
    SERIES = "series"
    FD = "fd"
    DANCKWERTS = "danckwerts"
    STEADY = "steady"
    PURE_DIFFUSION = "pure-diffusion"
    PURE_REACTION = "pure-reaction"


class RangePreset(str, Enum):
    """Named parameter-range sets."""
    FULL = "full"
    DESK = "desk"
    DAMKOHLER = "damkohler"

    def ranges(self) -> ParameterRanges:
        if self == RangePreset.DESK:
            return ParameterRanges.desk_scale()
        if self == RangePreset.DAMKOHLER:
            return ParameterRanges.damkohler_scale()
        return ParameterRanges()


class SweepKind(str, Enum):
    BATCH = "batch"
    K = "k"
    DE = "de"
    DAMKOHLER = "damkohler"


class SolveConfig(BaseModel):
    """Configuration for `rdlab solve`."""
    method: SolveMethod = SolveMethod.SERIES
    spec: ProblemSpec
    x: float = Field(0.0, description="Position, m")
    t_years: float = Field(1.0, ge=0, description="Time, years")
    grid: Optional[Path] = Field(None, description="Write the whole FD field as x,t,c CSV here")
    nx: int = Field(DEFAULT_NX, ge=3)
    nt: int = Field(DEFAULT_NT, ge=1)
    startup_substeps: int = Field(2, ge=0)
    max_terms: int = Field(500, ge=1)
    quad_steps: int = Field(256, ge=8)

    @model_validator(mode="before")
    @classmethod
    def _baseline_spec(cls, data: Any) -> Any:
        """Spec fields left unset come from the baseline problem."""
        if isinstance(data, dict):
            given = data.get("spec") or {}
            if isinstance(given, dict):
                data = {**data, "spec": {**BASELINE_SPEC.model_dump(), **given}}
        return data


class GenConfig(BaseModel):
    """Configuration for `rdlab gen`."""
    generation: GenerationSettings = Field(default_factory=GenerationSettings)
    preset: RangePreset = RangePreset.FULL
    out: Path = Path("data")
    name: str = "dataset"
    jobs: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _apply_preset(self) -> "GenConfig":
        if self.preset != RangePreset.FULL and self.generation.ranges == ParameterRanges():
            self.generation = self.generation.model_copy(update={"ranges": self.preset.ranges()})
        return self


class TrainConfig(BaseModel):
    """Configuration for `rdlab train`."""
    data: Path
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    out: Path = Path("model.json")


class EvalConfig(BaseModel):
    """Configuration for `rdlab eval`."""
    model: str
    data: Path
    thresholds: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    out: Optional[Path] = None

    @model_validator(mode="after")
    def _check_thresholds(self) -> "EvalConfig":
        if not self.thresholds or any(t <= 0 for t in self.thresholds):
            raise ValueError("thresholds must be a non-empty list of positive values")
        return self


class SweepConfig(BaseModel):
    """Configuration for `rdlab sweep`."""
    kind: SweepKind
    model: Optional[str] = None
    values: Optional[List[float]] = None
    thresholds: Optional[List[float]] = None
    lattice: LatticeSettings = Field(default_factory=LatticeSettings)
    similarity: Optional[RangePreset] = None
    regimes: RegimeThresholds = Field(default_factory=RegimeThresholds)
    counts: List[int] = Field(default_factory=lambda: [10, 30, 100])
    generation: GenerationSettings = Field(default_factory=GenerationSettings)
    preset: RangePreset = RangePreset.DESK
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    out: Path = Path("sweep.csv")
    jobs: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_kind(self) -> "SweepConfig":
        if self.kind != SweepKind.BATCH and not self.model:
            raise ValueError(f"sweep kind '{self.kind.value}' needs a model")
        if self.kind == SweepKind.BATCH and self.generation.ranges == ParameterRanges():
            self.generation = self.generation.model_copy(update={"ranges": self.preset.ranges()})
        return self
