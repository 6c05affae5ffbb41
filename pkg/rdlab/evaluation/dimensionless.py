"""Damkohler number, dimensionless groups and similarity rescaling.

The slab problem depends on (c0, L, De, k, x, t) only through x/L, De*t/L^2
and k*t, with C scaling linearly in c0. Stretching lengths by s and times by
a, with k -> k/a and De -> s^2 De/a, therefore leaves C unchanged.
"""

import math
from typing import Optional, Tuple

from .models import DamkohlerRegime, DimensionlessGroups, Regime, RegimeThresholds
from ..analytic.models import SECONDS_PER_YEAR, ProblemSpec, SpaceTimePoint
from ..analytic.series import concentration
from ..data.models import ParameterRanges
from ..errors import OutOfDomainError

DEFAULT_THRESHOLDS = RegimeThresholds()
_REL_TOL = 1e-9


def damkohler(spec: ProblemSpec, thresholds: RegimeThresholds = DEFAULT_THRESHOLDS) -> DamkohlerRegime:
    """Da = k L^2 / De and the regime it falls in."""
    da = spec.k * spec.half_thickness**2 / spec.de
    if da < thresholds.diffusion:
        regime = Regime.PURE_DIFFUSION
    elif da > thresholds.reaction:
        regime = Regime.PURE_REACTION
    else:
        regime = Regime.REACTION_DIFFUSION
    return DamkohlerRegime(da=da, regime=regime)


def nondimensionalize(
    spec: ProblemSpec,
    pt: SpaceTimePoint,
    t_c: float,
    c: Optional[float] = None,
) -> DimensionlessGroups:
    """Dimensionless groups for a point, with C from the analytic solution unless given."""
    if t_c <= 0:
        raise ValueError(f"Characteristic time must be positive, got {t_c}")
    if c is None:
        c = concentration(spec, pt)
    L = spec.half_thickness
    return DimensionlessGroups(
        x_star=pt.x / L,
        t_star=pt.t / t_c,
        c_star=c / spec.c0 if spec.c0 > 0 else 0.0,
        fourier=spec.de * t_c / L**2,
        k_t=spec.k * t_c,
    )


def rescale_query(
    spec: ProblemSpec, pt: SpaceTimePoint, length_factor: float, time_factor: float
) -> Tuple[ProblemSpec, SpaceTimePoint]:
    """Similar problem with L, x scaled by s and t by a; k/a and s^2 De/a follow."""
    if length_factor <= 0 or time_factor <= 0:
        raise ValueError("Scale factors must be positive")
    s, a = length_factor, time_factor
    scaled = ProblemSpec(
        de=spec.de * s * s / a,
        k=spec.k / a,
        c0=spec.c0,
        half_thickness=spec.half_thickness * s,
    )
    return scaled, SpaceTimePoint(pt.x * s, pt.t * a)


def damkohler_span(ranges: ParameterRanges) -> Tuple[float, float]:
    """Smallest and largest Da = k L^2 / De a problem drawn from `ranges` can have."""
    lo_l, hi_l = ranges.half_thickness
    return ranges.k[0] * lo_l**2 / ranges.de[1], ranges.k[1] * hi_l**2 / ranges.de[0]


def _log_or_floor(value: float) -> float:
    return math.log(value) if value > 0 else -math.inf


def _closest_to_zero(lo: float, hi: float) -> float:
    return min(max(0.0, lo), max(lo, hi))


def fit_to_ranges(spec: ProblemSpec, horizon: float, ranges: ParameterRanges) -> Tuple[float, float]:
    """Length and time factors (s, a) that move `spec` and [0, horizon] into `ranges`.

    Da, k*horizon and De*horizon/L^2 are invariant under the map, so a fit
    exists exactly when Da lies in damkohler_span(ranges), k*horizon stays
    below k_max*t_max and De*horizon/L^2 below De_max*t_max/L_min^2. Among
    the admissible factors the ones closest to (1, 1) in log scale are
    returned, so a problem already inside `ranges` is left alone.

    Raises:
        OutOfDomainError: if k = 0, or an invariant falls outside what `ranges` spans
    """
    if spec.k == 0.0:
        raise OutOfDomainError("A problem without reaction has no similar problem with k > 0")
    if horizon <= 0:
        raise ValueError(f"Horizon must be positive, got {horizon}")
    L = spec.half_thickness
    lo_l, hi_l = ranges.half_thickness
    t_max = ranges.t_years[1] * SECONDS_PER_YEAR

    da = damkohler(spec).da
    da_lo, da_hi = damkohler_span(ranges)
    if not da_lo * (1.0 - _REL_TOL) <= da <= da_hi * (1.0 + _REL_TOL):
        raise OutOfDomainError(f"Da = {da:.3e} is outside the training Damkohler span [{da_lo:.3e}, {da_hi:.3e}]")
    if spec.k * horizon > ranges.k[1] * t_max * (1.0 + _REL_TOL):
        raise OutOfDomainError(
            f"k*t = {spec.k * horizon:.3e} is outside the training reaction-time span (0, {ranges.k[1] * t_max:.3e}]"
        )
    if lo_l > 0 and spec.de * horizon / L**2 > ranges.de[1] * t_max / lo_l**2 * (1.0 + _REL_TOL):
        raise OutOfDomainError(
            f"Fourier number {spec.de * horizon / L**2:.3e} is outside the training span "
            f"(0, {ranges.de[1] * t_max / lo_l**2:.3e}]"
        )

    # a = e^alpha, s = e^sigma; constraints are linear in (alpha, sigma)
    sigma_lo, sigma_hi = _log_or_floor(lo_l / L), math.log(hi_l / L)
    rho_lo, rho_hi = math.log(ranges.de[0] / spec.de), math.log(ranges.de[1] / spec.de)
    alpha = _closest_to_zero(
        max(math.log(spec.k / ranges.k[1]), 2.0 * sigma_lo - rho_hi),
        min(math.log(spec.k / ranges.k[0]), math.log(t_max / horizon), 2.0 * sigma_hi - rho_lo),
    )
    sigma = _closest_to_zero(
        max(sigma_lo, 0.5 * (rho_lo + alpha)),
        min(sigma_hi, 0.5 * (rho_hi + alpha)),
    )
    return math.exp(sigma), math.exp(alpha)
