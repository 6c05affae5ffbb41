"""Danckwerts transform: reaction-diffusion from the pure-diffusion solution."""

import logging
import math
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .models import ProblemSpec, SeriesOptions, SpaceTimePoint
from .series import DEFAULT_OPTIONS, concentration

logger = logging.getLogger(__name__)

DEFAULT_QUAD_STEPS = 256
MIN_QUAD_STEPS = 8

# The integral starts at t_min = LOG_FLOOR * min(t, 1/k); the skipped part is below LOG_FLOOR * c0.
LOG_FLOOR = 1e-12


def _pure_diffusion(spec: ProblemSpec, x: float, t: float, opts: SeriesOptions) -> float:
    return concentration(spec.without_reaction(), SpaceTimePoint(x, t), opts)


def danckwerts_transform(
    spec: ProblemSpec,
    pt: SpaceTimePoint,
    quad_steps: int = DEFAULT_QUAD_STEPS,
    opts: Optional[SeriesOptions] = None,
) -> float:
    """C = k * int_0^t C1(x, t') exp(-k t') dt' + C1(x, t) exp(-k t).

    The integral is taken by composite Simpson in s = ln t'. In that variable
    both the weight k t' exp(-k t') and the rise of C1 near the walls change
    on unit scales, whatever the values of k, De and x.
    """
    if quad_steps < MIN_QUAD_STEPS:
        raise ValueError(f"quad_steps must be at least {MIN_QUAD_STEPS}, got {quad_steps}")
    opts = opts or DEFAULT_OPTIONS
    c1_now = _pure_diffusion(spec, pt.x, pt.t, opts)
    if spec.k == 0.0 or pt.t == 0.0:
        return c1_now

    k, t = spec.k, pt.t
    t_min = LOG_FLOOR * min(t, 1.0 / k)
    s = np.linspace(math.log(t_min), math.log(t), quad_steps + 1)
    t_nodes = np.exp(s)
    t_nodes[-1] = t
    c1 = np.array([_pure_diffusion(spec, pt.x, float(tn), opts) for tn in t_nodes])
    integral = float(simpson(k * t_nodes * np.exp(-k * t_nodes) * c1, x=s))
    logger.debug(f"Danckwerts integral at x={pt.x}, t={pt.t}: {integral:.12g}")
    return integral + c1_now * math.exp(-k * t)
