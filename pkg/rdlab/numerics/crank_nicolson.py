"""Crank-Nicolson solver for dC/dt = De d2C/dx2 - kC on [-L, L].

Interior nodes are unknowns; wall nodes are pinned to c0 on every time level.
The reaction term sits inside the matrix on both levels, so each step is
(I - dt/2 A) C^{n+1} = (I + dt/2 A) C^n with A = De*D2 - k*I.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .models import Grid, SolutionField
from .tridiagonal import solve_tridiagonal
from ..analytic.models import ProblemSpec, SeriesOptions, SpaceTimePoint
from ..analytic.series import concentration
from ..errors import OutOfDomainError

logger = logging.getLogger(__name__)

DEFAULT_STARTUP_SUBSTEPS = 2
MIN_ORDER_NX = 51
ORDER_STEPS_PER_CELL = 8


def _theta_step(
    interior: np.ndarray,
    theta: float,
    r: np.ndarray,
    kdt: np.ndarray,
    c0: np.ndarray,
) -> np.ndarray:
    """One theta-scheme step for stacked interiors of shape (n, m).

    theta = 1/2 is Crank-Nicolson, theta = 1 is backward Euler.
    """
    n, m = interior.shape
    rhs = interior.copy()
    if theta < 1.0:
        padded = np.vstack([c0[None, :], interior, c0[None, :]])
        laplacian = padded[:-2] - 2.0 * interior + padded[2:]
        rhs += (1.0 - theta) * (r * laplacian - kdt * interior)
    rhs[0] += theta * r * c0
    rhs[-1] += theta * r * c0

    diag = np.broadcast_to(1.0 + theta * (2.0 * r + kdt), (n, m))
    off = np.broadcast_to(-theta * r, (n - 1, m))
    return solve_tridiagonal(off, diag, off, rhs)


def solve_many(
    specs: Sequence[ProblemSpec],
    grids: Sequence[Grid],
    startup_substeps: int = DEFAULT_STARTUP_SUBSTEPS,
) -> List[SolutionField]:
    """March several problems together; all grids must share nx and nt.

    Args:
        specs: Problem instances, one per grid
        grids: Lattices (spacing and horizon may differ)
        startup_substeps: Backward-Euler sub-steps replacing the first step,
            damping modes excited by the wall/interior jump at t = 0;
            0 gives plain Crank-Nicolson throughout

    Returns:
        One SolutionField per spec, in input order
    """
    if len(specs) != len(grids):
        raise ValueError(f"Got {len(specs)} specs but {len(grids)} grids")
    if not specs:
        return []
    nx, nt = grids[0].nx, grids[0].nt
    if any(g.nx != nx or g.nt != nt for g in grids):
        raise ValueError("All grids passed to solve_many must share nx and nt")
    if startup_substeps < 0:
        raise ValueError(f"startup_substeps must be non-negative, got {startup_substeps}")

    de = np.array([s.de for s in specs])
    k = np.array([s.k for s in specs])
    c0 = np.array([s.c0 for s in specs])
    dx = np.array([g.dx for g in grids])
    dt = np.array([g.dt for g in grids])
    r = de * dt / dx**2
    kdt = k * dt

    m = len(specs)
    values = np.empty((nt + 1, nx, m))
    values[:, 0, :] = c0
    values[:, -1, :] = c0
    values[0, 1:-1, :] = 0.0

    interior = np.zeros((nx - 2, m))
    for step in range(1, nt + 1):
        if step == 1 and startup_substeps > 0:
            for _ in range(startup_substeps):
                interior = _theta_step(interior, 1.0, r / startup_substeps, kdt / startup_substeps, c0)
        else:
            interior = _theta_step(interior, 0.5, r, kdt, c0)
        values[step, 1:-1, :] = interior

    logger.debug(f"Marched {m} problem(s) over {nt} steps on {nx} nodes")
    return [
        SolutionField(
            values=np.ascontiguousarray(values[:, :, i]),
            grid=grids[i],
            spec=specs[i],
            startup_substeps=startup_substeps,
        )
        for i in range(m)
    ]


def solve(
    spec: ProblemSpec, grid: Grid, startup_substeps: int = DEFAULT_STARTUP_SUBSTEPS
) -> SolutionField:
    """Solve one problem on the given lattice."""
    return solve_many([spec], [grid], startup_substeps)[0]


def _fractional_index(value: float, spacing: float, last: int) -> tuple[int, float]:
    """Cell index and weight for linear interpolation, snapping to nodes."""
    position = value / spacing
    nearest = round(position)
    if abs(position - nearest) < 1e-9:
        position = float(nearest)
    index = min(max(int(math.floor(position)), 0), last - 1)
    return index, position - index


def probe(field: SolutionField, x: float, t: float) -> float:
    """Bilinear interpolation of the field at (x, t)."""
    L = field.spec.half_thickness
    grid = field.grid
    if abs(x) > L * (1.0 + 1e-12) or t < 0.0 or t > grid.horizon * (1.0 + 1e-12):
        raise OutOfDomainError(
            f"Point (x={x}, t={t}) outside [-{L}, {L}] x [0, {grid.horizon}]"
        )
    x = min(max(x, -L), L)
    t = min(t, grid.horizon)
    j, wx = _fractional_index(x + L, field_spacing(field), grid.nx - 1)
    n, wt = _fractional_index(t, grid.dt, grid.nt)
    v = field.values
    lower = (1.0 - wx) * v[n, j] + wx * v[n, j + 1]
    upper = (1.0 - wx) * v[n + 1, j] + wx * v[n + 1, j + 1]
    return float((1.0 - wt) * lower + wt * upper)


def field_spacing(field: SolutionField) -> float:
    """Node spacing derived from the field's own slab width."""
    return 2.0 * field.spec.half_thickness / (field.grid.nx - 1)


def export_field_csv(field: SolutionField, path: Path) -> None:
    """Write the field as `x,t,c` rows, one per lattice point."""
    xs, ts = np.meshgrid(field.x_nodes, field.t_nodes)
    frame = pd.DataFrame({"x": xs.ravel(), "t": ts.ravel(), "c": field.values.ravel()})
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Field written to {path} ({len(frame)} rows)")


def observed_order(
    spec: ProblemSpec,
    base_nx: int = MIN_ORDER_NX,
    horizon: float = 3.1536e7,
    base_nt: Optional[int] = None,
    startup_substeps: int = DEFAULT_STARTUP_SUBSTEPS,
) -> float:
    """Richardson order estimate log2(e(h)/e(h/2)) against the analytic solution.

    Both dx and dt are halved; errors are the max over interior base-grid
    nodes at t = horizon. The default base_nt of 8*(base_nx - 1) keeps the
    stiff modes that Crank-Nicolson barely damps below the spatial error.
    """
    if horizon <= 0:
        raise ValueError("Convergence study needs a positive horizon")
    if base_nx < MIN_ORDER_NX:
        raise ValueError(f"base_nx must be at least {MIN_ORDER_NX}, got {base_nx}")
    nt = base_nt if base_nt is not None else ORDER_STEPS_PER_CELL * (base_nx - 1)

    coarse = Grid.build(spec.half_thickness, horizon, nx=base_nx, nt=nt)
    fine = Grid.build(spec.half_thickness, horizon, nx=2 * base_nx - 1, nt=2 * nt)
    L = spec.half_thickness
    nodes = np.unique(np.rint(np.linspace(0, base_nx - 1, 9)[1:-1]).astype(int))
    xs = [-L + j * coarse.dx for j in nodes]
    opts = SeriesOptions(max_terms=2000)
    reference = np.array([concentration(spec, SpaceTimePoint(x, horizon), opts) for x in xs])

    errors = []
    for grid in (coarse, fine):
        field = solve(spec, grid, startup_substeps)
        approx = np.array([probe(field, x, horizon) for x in xs])
        errors.append(float(np.max(np.abs(approx - reference))))
    logger.info(f"Convergence study errors: coarse {errors[0]:.3e}, fine {errors[1]:.3e}")
    if errors[1] == 0.0:
        return math.inf
    return math.log2(errors[0] / errors[1])
