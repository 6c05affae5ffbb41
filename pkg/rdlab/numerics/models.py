"""Data models for the finite-difference solver."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..analytic.models import ProblemSpec

DEFAULT_NX = 201
DEFAULT_NT = 400


@dataclass(frozen=True)
class Grid:
    """Uniform space-time lattice on [-L, L] x [0, horizon]."""
    nx: int  # node count including both walls, odd so x = 0 is a node
    nt: int  # time steps
    dx: float  # m
    dt: float  # s
    horizon: float  # s

    def __post_init__(self) -> None:
        if self.nx < 3 or self.nx % 2 == 0:
            raise ValueError(f"nx must be odd and at least 3, got {self.nx}")
        if self.nt < 1:
            raise ValueError(f"nt must be at least 1, got {self.nt}")
        if not (self.dx > 0 and self.dt > 0 and self.horizon > 0):
            raise ValueError(f"Grid spacings must be positive (dx={self.dx}, dt={self.dt})")

    @classmethod
    def build(
        cls,
        half_thickness: float,
        horizon: float,
        nx: int = DEFAULT_NX,
        nt: Optional[int] = None,
    ) -> "Grid":
        """Grid for a slab of half-width L up to the given horizon."""
        nt = DEFAULT_NT if nt is None else nt
        if horizon <= 0:
            raise ValueError(f"Horizon must be positive, got {horizon}")
        return cls(
            nx=nx,
            nt=nt,
            dx=2.0 * half_thickness / (nx - 1),
            dt=horizon / nt,
            horizon=horizon,
        )

    @property
    def t_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.nt + 1)


@dataclass(frozen=True)
class SolutionField:
    """Concentrations (mol/m^3) on the lattice: row n is time n*dt, column j is node j."""
    values: np.ndarray
    grid: Grid
    spec: ProblemSpec
    startup_substeps: int = field(default=0)

    def __post_init__(self) -> None:
        expected = (self.grid.nt + 1, self.grid.nx)
        if self.values.shape != expected:
            raise ValueError(f"Field shape {self.values.shape} does not match grid {expected}")
        self.values.setflags(write=False)

    @property
    def x_nodes(self) -> np.ndarray:
        L = self.spec.half_thickness
        return np.linspace(-L, L, self.grid.nx)

    @property
    def t_nodes(self) -> np.ndarray:
        return self.grid.t_nodes

    @property
    def final_row(self) -> np.ndarray:
        return self.values[-1]
