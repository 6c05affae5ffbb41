"""Gaussian feature sampling within the parameter ranges.

c0, L, x and t come from truncated Gaussians centred mid-range with sigma a
quarter of the range. k and de are stratified by decade in log10 space and
Gaussian-jittered inside the chosen decade, so small decades are not starved.
"""

import logging
import math
from typing import Tuple

import numpy as np

from .models import ParameterRanges
from ..analytic.models import SECONDS_PER_YEAR

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000


def batch_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one batch; depends only on (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _truncated_gaussian(
    rng: np.random.Generator, lo: float, hi: float, open_low: bool = False
) -> float:
    """Draw from N(mid, (hi-lo)/4) restricted to [lo, hi] by rejection."""
    mean = 0.5 * (lo + hi)
    sigma = 0.25 * (hi - lo)
    for _ in range(MAX_ATTEMPTS):
        value = rng.normal(mean, sigma)
        if lo <= value <= hi and not (open_low and value == lo):
            return float(value)
    logger.warning(f"Rejection sampling exhausted on [{lo}, {hi}]; clamping")
    value = min(max(value, lo), hi)
    if open_low and value == lo:
        value = float(np.nextafter(lo, hi))
    return float(value)


def _log_stratified(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Pick a decade uniformly, then a Gaussian exponent inside it."""
    e_lo, e_hi = math.log10(lo), math.log10(hi)
    decades = max(int(math.ceil(e_hi - e_lo - 1e-9)), 1)
    start = e_lo + int(rng.integers(decades))
    stop = min(start + 1.0, e_hi)
    exponent = _truncated_gaussian(rng, start, stop)
    return float(min(max(10.0**exponent, lo), hi))


def sample_spec_fields(rng: np.random.Generator, ranges: ParameterRanges) -> Tuple[float, float, float, float]:
    """Draw (c0, L, k, de)."""
    c0 = _truncated_gaussian(rng, *ranges.c0)
    half_thickness = _truncated_gaussian(rng, *ranges.half_thickness, open_low=True)
    k = _log_stratified(rng, *ranges.k)
    de = _log_stratified(rng, *ranges.de)
    return c0, half_thickness, k, de


def sample_point(rng: np.random.Generator, ranges: ParameterRanges, half_thickness: float) -> Tuple[float, float]:
    """Draw (x, t) with x in [-L, L] and t in seconds."""
    x = _truncated_gaussian(rng, -half_thickness, half_thickness)
    t_years = _truncated_gaussian(rng, *ranges.t_years)
    return x, t_years * SECONDS_PER_YEAR


def sample_parameters(rng: np.random.Generator, ranges: ParameterRanges) -> Tuple[float, ...]:
    """Draw one feature tuple (c0, L, x, t, k, de) in SI units."""
    c0, half_thickness, k, de = sample_spec_fields(rng, ranges)
    x, t = sample_point(rng, ranges, half_thickness)
    return (c0, half_thickness, x, t, k, de)
