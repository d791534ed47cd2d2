"""Fourier-side objects: interval transforms, the sector-variance constant,
and empirical narrow-sector statistics.

The Fourier transform convention is f_hat(xi) = integral f(t) e(-t xi) dt
with e(x) = exp(2*pi*i*x).  For an interval indicator the transform is the
shifted sinc

    chi_hat_[a,b](xi) = (b-a) * sinc((b-a)*xi) * e(-(a+b)/2 * xi),

evaluated in that product form so the xi -> 0 limit b-a comes out exactly
(no small-xi branch needed) and |chi_hat| <= min(b-a, 1/(pi*|xi|)) holds.

The sector-variance constant is the lattice sum

    D(I) = 1/(2*pi^2) * sum over nonzero integer lambda of
           |chi_hat_I(|lambda|)|^2 / |lambda|,

computed by grouping equal norms (sum-of-two-squares counts) and truncated
at |lambda| <= lambda_max with a certified tail bound from the crude
comparison sum_{|lambda|>L} |lambda|^-3 <= 2*pi/L * (1 + 2/L).

``sector_variance_empirical`` measures the same variance on a circle: the
mean squared deviation of narrow-sector counts from their expectation over a
uniform grid of sector positions, computed with one global sort and sliding
half-open windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import INV_SQRT2
from .intervals import IntervalSpec
from .lattice import GammaList

TWO_PI = 2.0 * math.pi


def chi_hat(I, xi):
    """Fourier transform of the indicator of the closed interval I at
    frequency xi (scalar or array); complex-valued."""
    a, b = float(I[0]), float(I[1])
    xi = np.asarray(xi, dtype=np.float64)
    width = b - a
    mid = 0.5 * (a + b)
    # np.sinc(x) = sin(pi x)/(pi x); exact value width at xi = 0
    mag = width * np.sinc(width * xi)
    phase = np.exp(-1j * TWO_PI * mid * xi)
    out = mag * phase
    return complex(out) if out.ndim == 0 else out


def _r2_counts(n_max: int) -> np.ndarray:
    """r2[n] = number of integer pairs (a, b) with a^2 + b^2 = n, n <= n_max."""
    r2 = np.zeros(n_max + 1, dtype=np.int64)
    a_max = math.isqrt(n_max)
    for a in range(0, a_max + 1):
        rest = n_max - a * a
        b = np.arange(0, math.isqrt(rest) + 1, dtype=np.int64)
        n = a * a + b * b
        mult = np.full(b.shape, 4, dtype=np.int64)  # (+-a, +-b)
        mult[b == 0] = 2
        if a == 0:
            mult //= 2
        np.add.at(r2, n, mult)
    r2[0] = 0
    return r2


@dataclass(frozen=True)
class DTruncation:
    """Truncated sector-variance constant with a certified tail bound:
    |full sum - value| <= tail_bound."""

    lambda_max: float
    value: float
    tail_bound: float


def d_of_i(I, lambda_max: float) -> DTruncation:
    """The sector-variance constant for radial interval I, truncated at
    norms <= lambda_max (grouped by squared norm with multiplicity r2)."""
    I = IntervalSpec(*I)
    lam = float(lambda_max)
    if lam < 10.0:
        raise ValueError("lambda_max must be >= 10")
    n_max = int(lam * lam)
    r2 = _r2_counts(n_max)
    ns = np.nonzero(r2)[0]
    norms = np.sqrt(ns.astype(np.float64))
    terms = np.abs(chi_hat(I, norms)) ** 2 / norms * r2[ns]
    value = float(terms.sum()) / (2.0 * math.pi**2)
    # |chi_hat(xi)| <= 1/(pi xi) gives sum_{|l|>L} |chi|^2/|l| <= sum |l|^-3/pi^2,
    # and the comparison bound sum_{|l|>L}|l|^-3 <= 2 pi/L (1 + 2/L)
    tail = (1.0 + 2.0 / lam) / (math.pi**3 * lam)
    return DTruncation(lambda_max=lam, value=value, tail_bound=tail)


def default_grid(R: float, width: float) -> int:
    """Grid fine enough to resolve window transitions: at least four sample
    points per expected annulus point spacing inside the window band."""
    calK = math.sqrt(8.0) * math.pi * R
    return min(max(1000, int(math.ceil(4.0 * calK * width))), 10**6)


def sector_variance_empirical(gamma: GammaList, I, width: float, grid: int | None = None) -> float:
    """Mean squared deviation of narrow-sector counts from R*width*|I|.

    Sectors are half-open angular windows [theta, theta + width) with theta
    on a uniform grid of [0, pi/2); counted points must also have r in the
    closed interval I.  width must lie in [1/R, R^(-9/10)].
    """
    R = gamma.R
    I = IntervalSpec(*I).validate_radial()
    if not (1.0 / R <= width <= R ** (-0.9)):
        raise ValueError(f"width={width:g} outside [R^-1, R^-9/10] for R={R:g}")
    if grid is None:
        grid = default_grid(R, width)
    if grid < 1000:
        raise ValueError("grid must be >= 1000")

    mask = I.contains(gamma.r)
    thetas = gamma.theta[mask]  # sorted since gamma.theta is sorted
    grid_theta = (0.5 * math.pi) * np.arange(grid) / grid
    lo = np.searchsorted(thetas, grid_theta, side="left")
    hi = np.searchsorted(thetas, grid_theta + width, side="left")
    counts = (hi - lo).astype(np.float64)
    expected = R * width * I.length
    return float(np.mean((counts - expected) ** 2))


@dataclass(frozen=True)
class CountCheck:
    count: int
    main_term: float
    normalized_error: float


def equidist_count_check(gamma: GammaList, c: float, d: float, I) -> CountCheck:
    """Narrow-sector count against its area prediction.

    Counts annulus points with angle in [c, d) mod 2pi and r in the closed
    interval I; the main term is R*(d-c)*|I| and the error is normalized by
    (d-c)^(1/3) * R^(2/3) (the classical sector-count error scale).
    """
    R = gamma.R
    I = IntervalSpec(*I).validate_radial()
    span = d - c
    if not (R ** (-0.5) <= span <= TWO_PI):
        raise ValueError(f"window d-c={span:g} outside [R^-1/2, 2*pi]")

    mask = I.contains(gamma.r)
    thetas = gamma.theta[mask]
    lo = math.fmod(c, TWO_PI)
    if lo < 0.0:
        lo += TWO_PI
    hi = lo + span
    if hi <= TWO_PI:
        count = int(np.searchsorted(thetas, hi, side="left") - np.searchsorted(thetas, lo, side="left"))
    else:
        count = int(
            thetas.shape[0]
            - np.searchsorted(thetas, lo, side="left")
            + np.searchsorted(thetas, hi - TWO_PI, side="left")
        )
    main = R * span * I.length
    norm_err = abs(count - main) / (span ** (1.0 / 3.0) * R ** (2.0 / 3.0))
    return CountCheck(count=count, main_term=main, normalized_error=norm_err)
