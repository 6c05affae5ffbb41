"""Series solutions of the slab problem dC/dt = De d2C/dx2 - kC.

All sums are evaluated in dimensionless form (x/L, De*t/L^2, k*t), so two
problems sharing those groups give identical C/C0.
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.special import erfc, erfcx

from .models import (
    IMAGE_SERIES_FOURIER_LIMIT,
    ProblemSpec,
    SeriesOptions,
    SpaceTimePoint,
    TermCoefficients,
)
from ..errors import NonConvergenceError, OutOfDomainError

logger = logging.getLogger(__name__)

DEFAULT_OPTIONS = SeriesOptions()

# Values outside [0, c0] by less than this fraction of c0 are clamped.
BOUNDS_SLACK = 1e-9


def _relative_position(spec: ProblemSpec, x: float) -> float:
    """Return |x|/L, rejecting points outside the slab."""
    L = spec.half_thickness
    if abs(x) > L * (1.0 + 1e-12):
        raise OutOfDomainError(f"Position {x} m lies outside [-{L}, {L}] m")
    return min(abs(x) / L, 1.0)


def _within_bounds(value: float, c0: float) -> float:
    """Clamp round-off excursions; report anything larger."""
    slack = BOUNDS_SLACK * c0
    if value < 0.0:
        if value < -slack:
            logger.warning(f"Concentration {value:.6e} below 0 by more than {slack:.1e}")
            return value
        return 0.0
    if value > c0:
        if value > c0 + slack:
            logger.warning(f"Concentration {value:.6e} above c0={c0} by more than {slack:.1e}")
            return value
        return c0
    return value


def series_terms(spec: ProblemSpec, n: int, t: float) -> TermCoefficients:
    """Coefficients a_n, omega_n, psi_n and p of the n-th series term."""
    if n < 0:
        raise ValueError(f"Term index must be non-negative, got {n}")
    if t < 0:
        raise ValueError(f"Time must be non-negative, got {t}")
    L = spec.half_thickness
    odd = 2 * n + 1
    a_n = (-1.0) ** n / odd
    omega_n = odd * math.pi / (2.0 * L)
    psi_n = 4.0 * L**2 / (-spec.de * odd**2 * math.pi**2 - 4.0 * spec.k * L**2)
    p = math.exp(t / psi_n)
    return TermCoefficients(a_n=a_n, omega_n=omega_n, psi_n=psi_n, p=p)


def steady_state_profile(spec: ProblemSpec, x: float) -> float:
    """Long-time limit C0*cosh(m*x)/cosh(m*L) with m = sqrt(k/De)."""
    xi = _relative_position(spec, x)
    if spec.k == 0.0 or xi == 1.0:
        return spec.c0
    return spec.c0 * _cosh_ratio(math.sqrt(spec.k / spec.de) * spec.half_thickness, xi)


def _cosh_ratio(s: float, xi: float) -> float:
    """cosh(s*xi)/cosh(s) without overflow for large s."""
    return math.exp(s * (xi - 1.0)) * (1.0 + math.exp(-2.0 * s * xi)) / (1.0 + math.exp(-2.0 * s))


def _fourier_transient(xi: float, fo: float, kt: float, da: float, c0: float, opts: SeriesOptions) -> float:
    """(4/pi) * sum a_n cos(mu_n xi) * mu_n^2/(mu_n^2 + da) * p_n, in units of c0.

    The tail after N terms is bounded by (4/pi)|a_N| p_N / (1 - r_N) where
    r_N = p_{N+1}/p_N, since the ratios of consecutive p_n only shrink.
    """
    n = np.arange(opts.max_terms + 2, dtype=float)
    odd = 2.0 * n + 1.0
    mu = odd * (math.pi / 2.0)
    a = np.where(n % 2 == 0, 1.0, -1.0) / odd
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        p = np.exp(-(fo * mu**2 + kt))
        ratio = np.exp(-fo * (mu[1:] ** 2 - mu[:-1] ** 2))
        tail = np.where(
            p[:-1] == 0.0, 0.0, (4.0 / math.pi) * np.abs(a[:-1]) * p[:-1] / (1.0 - ratio)
        )
    tail = np.nan_to_num(tail, nan=np.inf) * c0
    tol = opts.tolerance(c0)

    converged = np.flatnonzero(tail <= tol)
    if converged.size == 0:
        raise NonConvergenceError(opts.max_terms, float(tail[-1]))
    used = int(converged[0])
    weight = mu[:used] ** 2 / (mu[:used] ** 2 + da)
    terms = a[:used] * np.cos(mu[:used] * xi) * weight * p[:used]
    return (4.0 / math.pi) * float(np.sum(terms))


def _fourier_solution(spec: ProblemSpec, pt: SpaceTimePoint, opts: SeriesOptions) -> float:
    xi = _relative_position(spec, pt.x)
    c0 = spec.c0
    if xi == 1.0:
        return c0
    if pt.t == 0.0 or c0 == 0.0:
        # The t = 0 sum is the square-wave expansion of the indicator of |x| < L.
        return 0.0
    L = spec.half_thickness
    fo = spec.de * pt.t / L**2
    kt = spec.k * pt.t
    da = spec.k * L**2 / spec.de
    steady = c0 if spec.k == 0.0 else c0 * _cosh_ratio(math.sqrt(da), xi)
    transient = _fourier_transient(xi, fo, kt, da, c0, opts)
    return _within_bounds(steady - c0 * transient, c0)


def reaction_diffusion_series(
    spec: ProblemSpec, pt: SpaceTimePoint, opts: Optional[SeriesOptions] = None
) -> float:
    """Closed-form series C0 - (4C0/pi) sum a_n cos(omega_n x)(k psi_n (p - 1) + p).

    The factor k*psi_n*(p-1) + p equals k/(k+lambda_n) + lambda_n*p/(k+lambda_n);
    the first part sums to the steady profile, so only the decaying part is
    truncated.
    """
    return _fourier_solution(spec, pt, opts or DEFAULT_OPTIONS)


def pure_diffusion_series(
    spec: ProblemSpec, pt: SpaceTimePoint, opts: Optional[SeriesOptions] = None
) -> float:
    """C1 = C0[1 - (4/pi) sum a_n cos(omega_n x) exp(-De omega_n^2 t)], ignoring spec.k."""
    return _fourier_solution(spec.without_reaction(), pt, opts or DEFAULT_OPTIONS)


def _half_space(eta: np.ndarray, fo: float, kt: float) -> np.ndarray:
    """Half-space reaction-diffusion response at dimensionless depth eta."""
    root_kt = math.sqrt(kt)
    root_ratio = math.sqrt(kt / fo)
    scaled = eta / (2.0 * math.sqrt(fo))
    z1 = scaled - root_kt
    z2 = scaled + root_kt
    with np.errstate(over="ignore", under="ignore"):
        envelope = np.exp(-(scaled**2) - kt)
        behind = np.where(
            z1 >= 0.0,
            erfcx(np.maximum(z1, 0.0)) * envelope,
            np.exp(-eta * root_ratio) * erfc(z1),
        )
        ahead = erfcx(z2) * envelope
    return 0.5 * (behind + ahead)


def image_series(
    spec: ProblemSpec, pt: SpaceTimePoint, opts: Optional[SeriesOptions] = None
) -> float:
    """Short-time form: alternating sum of half-space solutions over wall images."""
    opts = opts or DEFAULT_OPTIONS
    xi = _relative_position(spec, pt.x)
    c0 = spec.c0
    if xi == 1.0:
        return c0
    if pt.t == 0.0 or c0 == 0.0:
        return 0.0
    fo = spec.fourier_number(pt.t)
    kt = spec.k * pt.t

    m = np.arange(opts.max_terms + 2, dtype=float)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    pairs = _half_space(2.0 * m + 1.0 - xi, fo, kt) + _half_space(2.0 * m + 1.0 + xi, fo, kt)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(pairs[:-1] > 0.0, pairs[1:] / pairs[:-1], 0.0)
        tail = np.where(ratio < 1.0, pairs[:-1] / (1.0 - ratio), np.inf) * c0
    tol = opts.tolerance(c0)

    converged = np.flatnonzero(tail <= tol)
    if converged.size == 0:
        raise NonConvergenceError(opts.max_terms, float(tail[-1]))
    used = int(converged[0])
    return _within_bounds(c0 * float(np.sum(sign[:used] * pairs[:used])), c0)


def concentration(
    spec: ProblemSpec, pt: SpaceTimePoint, opts: Optional[SeriesOptions] = None
) -> float:
    """Analytic C(x, t) using whichever representation converges fastest."""
    if pt.t > 0.0 and spec.fourier_number(pt.t) < IMAGE_SERIES_FOURIER_LIMIT:
        return image_series(spec, pt, opts)
    return reaction_diffusion_series(spec, pt, opts)


def pure_reaction(c_init: float, k: float, t: float) -> float:
    """Exponential decay c_init*exp(-k*t) of a well-mixed concentration."""
    if c_init < 0 or k < 0 or t < 0:
        raise ValueError(f"pure_reaction needs non-negative inputs, got c={c_init}, k={k}, t={t}")
    return c_init * math.exp(-k * t)
