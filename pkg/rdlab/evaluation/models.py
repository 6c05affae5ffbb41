"""Data models for evaluation and dimensional analysis."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Regime(str, Enum):
    """Transport regime implied by the Damkohler number."""
    PURE_DIFFUSION = "pure_diffusion"
    REACTION_DIFFUSION = "reaction_diffusion"
    PURE_REACTION = "pure_reaction"


class RegimeThresholds(BaseModel):
    """Da below `diffusion` is diffusion-dominated, above `reaction` reaction-dominated."""

    model_config = ConfigDict(frozen=True)

    diffusion: float = Field(0.1, gt=0)
    reaction: float = Field(10.0, gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "RegimeThresholds":
        if self.diffusion > self.reaction:
            raise ValueError("diffusion threshold must not exceed reaction threshold")
        return self


@dataclass(frozen=True)
class DamkohlerRegime:
    da: float
    regime: Regime


@dataclass(frozen=True)
class DimensionlessGroups:
    """x* = x/L, t* = t/t_c, C* = C/C0, fourier = De*t_c/L^2, k_t = k*t_c."""
    x_star: float
    t_star: float
    c_star: float
    fourier: float
    k_t: float


@dataclass
class EvalReport:
    """MSE in (mol/m^3)^2 and threshold accuracies in percent keyed by theta."""
    mse: float
    threshold_accuracy: Dict[float, float] = field(default_factory=dict)
    n: int = 0
    split: Optional[str] = None
