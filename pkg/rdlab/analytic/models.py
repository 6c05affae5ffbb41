"""Data models for the analytic solutions."""

from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

SECONDS_PER_YEAR = 3.1536e7

# Fourier number De*t/L^2 below which the image series is preferred.
IMAGE_SERIES_FOURIER_LIMIT = 0.25


class ProblemSpec(BaseModel):
    """Physical instance of the slab problem on [-L, L].

    C(+-L, t) = c0 and C(x, 0) = 0 inside the slab.
    """

    model_config = ConfigDict(frozen=True)

    de: float = Field(..., gt=0, description="Effective diffusion coefficient, m^2/s")
    k: float = Field(0.0, ge=0, description="First-order reaction rate, 1/s")
    c0: float = Field(..., ge=0, description="Boundary concentration, mol/m^3")
    half_thickness: float = Field(..., gt=0, description="Slab half-width L, m")

    def without_reaction(self) -> "ProblemSpec":
        """Same slab and diffusivity with k = 0."""
        return self.model_copy(update={"k": 0.0})

    def fourier_number(self, t: float) -> float:
        """De*t/L^2."""
        return self.de * t / self.half_thickness**2


# c0 = 75.5 mol/m^3, L = 0.05 m, De = 2.6e-9 m^2/s, k = 2.125e-7 1/s
BASELINE_SPEC = ProblemSpec(de=2.6e-9, k=2.125e-7, c0=75.5, half_thickness=0.05)


@dataclass(frozen=True)
class SpaceTimePoint:
    """Position x (m) and time t (s)."""
    x: float
    t: float

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError(f"Time must be non-negative, got {self.t}")


class SeriesOptions(BaseModel):
    """Truncation control for the infinite sums."""

    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(500, ge=1, description="Upper bound on summed terms")
    tail_tol: Optional[float] = Field(
        None, ge=0, description="Absolute tail tolerance, mol/m^3 (default 1e-12*c0)"
    )

    def tolerance(self, c0: float) -> float:
        """Resolved tail tolerance for a given boundary concentration."""
        if self.tail_tol is not None:
            return self.tail_tol
        return 1e-12 * c0


@dataclass(frozen=True)
class TermCoefficients:
    """Coefficients of the n-th series term at a given time."""
    a_n: float
    omega_n: float  # 1/m
    psi_n: float  # s, negative
    p: float  # exp(t/psi_n), in (0, 1]
