"""Lattice points of the width-sqrt(2) annulus around the radius-R circle.

The point set is every integer pair strictly between the circles of radii
R - 1/sqrt(2) and R + 1/sqrt(2), ordered by polar angle.  Because 1/sqrt(2)
is irrational and squared norms are integers, no lattice point can sit
exactly on either boundary circle for rational R; the enumeration therefore
resolves the two strict inequalities *exactly* (integer/rational arithmetic
on the squared norms) instead of tolerating an epsilon.

Enumeration is a band scan: for each integer x the admissible squared norms
give at most two integer y-intervals, so the cost is O(R) time and O(K)
memory.  Angular order is nondecreasing atan2 in [0, 2*pi); genuinely equal
angles happen only for collinear-with-origin points (in this annulus, only
on the coordinate axes) and are broken by increasing norm, which makes the
ordering fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .geometry import SQRT2, _r2_parts

R_MAX = 1.0e8  # resource guard; K(R) ~ 8.9e8 at the limit


class LatticePoint(NamedTuple):
    x: int
    y: int


class AnnulusPoint(NamedTuple):
    """One annulus point with its shifted polar coordinates.

    r is the signed distance to the radius-R circle (positive outside),
    theta the angle in [0, 2*pi), index the 1-based angular rank.
    """

    point: LatticePoint
    norm: float
    r: float
    theta: float
    index: int


@dataclass(frozen=True)
class GammaList:
    """The angularly ordered annulus point set for one radius.

    Arrays are aligned: (x[j], y[j]) has squared norm n[j], shifted radius
    r[j] and angle theta[j], and angular rank j+1.  calK = sqrt(8)*pi*R is
    the annulus area, which the count K approaches as R grows.
    """

    R: float
    x: np.ndarray
    y: np.ndarray
    n: np.ndarray
    norm: np.ndarray
    r: np.ndarray
    theta: np.ndarray

    @property
    def K(self) -> int:
        return int(self.x.shape[0])

    @property
    def calK(self) -> float:
        return SQRT2 * 2.0 * math.pi * self.R

    def __len__(self) -> int:
        return self.K

    def __getitem__(self, j: int) -> AnnulusPoint:
        return AnnulusPoint(
            LatticePoint(int(self.x[j]), int(self.y[j])),
            float(self.norm[j]),
            float(self.r[j]),
            float(self.theta[j]),
            j + 1,
        )

    def __iter__(self) -> Iterator[AnnulusPoint]:
        return (self[j] for j in range(self.K))


def _norm_bounds_exact(R: float) -> tuple[int, int]:
    """Smallest and largest integer squared norms inside the open annulus.

    n is admissible iff (R - 1/sqrt2)^2 < n < (R + 1/sqrt2)^2, i.e. with
    T = n - R^2 - 1/2:  -sqrt(2)*R < T < sqrt(2)*R.  Both comparisons reduce
    to exact rational tests against T^2 < 2R^2 (R is a binary float, so R^2
    is an exact Fraction).
    """
    R_frac = Fraction(R)
    two_r2 = 2 * R_frac * R_frac

    def inside(n: int) -> bool:
        # whichever side of the annulus center n falls on, only one of the
        # two strict constraints is active and both reduce to T^2 < 2R^2
        T = Fraction(n) - R_frac * R_frac - Fraction(1, 2)
        return T * T < two_r2

    r = float(R)
    lo_guess = int(math.floor(r * r - SQRT2 * r + 0.5))
    hi_guess = int(math.floor(r * r + SQRT2 * r + 0.5))
    n_min = max(lo_guess - 2, 1)
    while not inside(n_min):
        n_min += 1
    while n_min > 1 and inside(n_min - 1):
        n_min -= 1
    n_max = hi_guess + 2
    while not inside(n_max):
        n_max -= 1
    while inside(n_max + 1):
        n_max += 1
    return n_min, n_max


def _isqrt_floor(u: np.ndarray) -> np.ndarray:
    """Elementwise floor(sqrt(u)) for nonnegative int64 u, exactly."""
    c = np.sqrt(u.astype(np.float64)).astype(np.int64)
    # one fixup pass each way covers the float rounding (< 1 for u < 2^53)
    c += (c + 1) * (c + 1) <= u
    c -= c * c > u
    return c


def enumerate_gamma(R: float) -> GammaList:
    """All integer points strictly inside the annulus of radii R -+ 1/sqrt2,
    sorted by angle (ties on the axes broken by increasing norm).

    R must satisfy 1 < R <= 1e8; larger radii are refused outright rather
    than truncated.
    """
    R = float(R)
    if not R >= 1.0:
        raise ValueError("R must be at least 1")
    if R > R_MAX:
        raise ValueError(f"R too large (limit {R_MAX:g}): refusing to enumerate")

    n_min, n_max = _norm_bounds_exact(R)
    x_max = _isqrt_floor(np.array([n_max], dtype=np.int64))[0]

    xs = np.arange(-x_max, x_max + 1, dtype=np.int64)
    x2 = xs * xs
    u_hi = n_max - x2
    valid = u_hi >= 0
    xs = xs[valid]
    x2 = x2[valid]
    u_hi = u_hi[valid]
    y_hi = _isqrt_floor(u_hi)

    u_lo = n_min - x2  # need y^2 >= u_lo
    two_bands = u_lo > 0
    y_lo = np.zeros_like(y_hi)
    y_lo[two_bands] = _isqrt_floor(np.maximum(u_lo[two_bands] - 1, 0)) + 1

    # per x: y in [-y_hi, -y_lo] u [y_lo, y_hi]  (single band when y_lo = 0)
    out_x = []
    out_y = []
    single = ~two_bands
    if np.any(single):
        cnt = 2 * y_hi[single] + 1
        rep_x = np.repeat(xs[single], cnt)
        starts = np.repeat(np.cumsum(cnt) - cnt, cnt)
        rep_y = np.arange(cnt.sum(), dtype=np.int64) - starts - np.repeat(y_hi[single], cnt)
        out_x.append(rep_x)
        out_y.append(rep_y)
    if np.any(two_bands):
        ok = y_hi[two_bands] >= y_lo[two_bands]
        bx = xs[two_bands][ok]
        blo = y_lo[two_bands][ok]
        bhi = y_hi[two_bands][ok]
        cnt = bhi - blo + 1
        starts = np.repeat(np.cumsum(cnt) - cnt, cnt)
        off = np.arange(cnt.sum(), dtype=np.int64) - starts
        rep_y = off + np.repeat(blo, cnt)
        rep_x = np.repeat(bx, cnt)
        out_x.extend([rep_x, rep_x])
        out_y.extend([rep_y, -rep_y])

    px = np.concatenate(out_x) if out_x else np.empty(0, dtype=np.int64)
    py = np.concatenate(out_y) if out_y else np.empty(0, dtype=np.int64)
    n = px * px + py * py

    theta = np.arctan2(py.astype(np.float64), px.astype(np.float64))
    theta = np.where(theta < 0.0, theta + 2.0 * math.pi, theta)
    order = np.lexsort((n, theta))
    px, py, n, theta = px[order], py[order], n[order], theta[order]

    nf = n.astype(np.float64)
    norm = np.sqrt(nf)
    r2hi, r2lo = _r2_parts(R)
    r = ((nf - r2hi) - r2lo) / (norm + R)

    return GammaList(R=R, x=px, y=py, n=n, norm=norm, r=r, theta=theta)


def polar(point, R: float) -> tuple[float, float]:
    """Shifted polar coordinates (r, theta) of an integer point: the signed
    distance to the radius-R circle and the angle in [0, 2*pi).

    r is computed as (x^2 + y^2 - R^2) / (|point| + R) with the squared norm
    in exact integer arithmetic, which avoids the catastrophic cancellation
    of |point| - R at large R.
    """
    x, y = int(point[0]), int(point[1])
    if x == 0 and y == 0:
        raise ValueError("polar coordinates undefined at the origin")
    n = x * x + y * y
    r2hi, r2lo = _r2_parts(float(R))
    r = ((float(n) - r2hi) - r2lo) / (math.sqrt(n) + float(R))
    theta = math.atan2(y, x)
    if theta < 0.0:
        theta += 2.0 * math.pi
    return r, theta


def sector_count(gamma: GammaList, theta1: float, theta2: float, interval=None) -> int:
    """Number of annulus points with angle in the half-open window
    [theta1, theta2) mod 2*pi, optionally restricted to r in the closed
    interval.  theta2 - theta1 >= 2*pi means the full circle."""
    two_pi = 2.0 * math.pi
    if theta2 - theta1 >= two_pi:
        lo, width = 0.0, two_pi
    else:
        lo = math.fmod(theta1, two_pi)
        if lo < 0.0:
            lo += two_pi
        width = math.fmod(theta2 - theta1, two_pi)
        if width < 0.0:
            width += two_pi

    if interval is None:
        thetas = gamma.theta
    else:
        a, b = float(interval[0]), float(interval[1])
        mask = (gamma.r >= a) & (gamma.r <= b)
        thetas = gamma.theta[mask]
    if width >= two_pi:
        return int(thetas.shape[0])
    hi = lo + width
    if hi <= two_pi:
        return int(np.searchsorted(thetas, hi, side="left") - np.searchsorted(thetas, lo, side="left"))
    hi -= two_pi
    wrap = np.searchsorted(thetas, hi, side="left")
    tail = thetas.shape[0] - np.searchsorted(thetas, lo, side="left")
    return int(wrap + tail)


@dataclass(frozen=True)
class NeighborStats:
    """Circular successive-gap statistics of the angular ordering."""

    R: float
    gaps: np.ndarray = field(repr=False)
    max_gap_times_R: float
    min_gap_times_R2: float
    max_neighbor_distance: float

    def frac_small_gaps(self, C: float) -> float:
        """Fraction of consecutive pairs with angle gap <= C / R^2."""
        return float(np.mean(self.gaps <= C / (self.R * self.R)))


def neighbor_stats(gamma: GammaList) -> NeighborStats:
    """Gap statistics between angularly consecutive annulus points (circular
    indexing: the last point's successor is the first)."""
    if gamma.K < 2:
        raise ValueError("need at least two points for neighbor statistics")
    two_pi = 2.0 * math.pi
    gaps = np.diff(gamma.theta)
    wrap = gamma.theta[0] + two_pi - gamma.theta[-1]
    gaps = np.append(gaps, wrap)

    dx = np.diff(gamma.x, append=gamma.x[:1]).astype(np.float64)
    dy = np.diff(gamma.y, append=gamma.y[:1]).astype(np.float64)
    dist = np.hypot(dx, dy)

    return NeighborStats(
        R=gamma.R,
        gaps=gaps,
        max_gap_times_R=float(np.max(gaps) * gamma.R),
        min_gap_times_R2=float(np.min(gaps) * gamma.R * gamma.R),
        max_neighbor_distance=float(np.max(dist)),
    )


def gamma_to_csv(gamma: GammaList, path) -> None:
    """CSV export with columns x,y,norm,r,theta,index (17 significant digits)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y,norm,r,theta,index\n")
        for j in range(gamma.K):
            fh.write(
                f"{int(gamma.x[j])},{int(gamma.y[j])},{gamma.norm[j]:.17g},"
                f"{gamma.r[j]:.17g},{gamma.theta[j]:.17g},{j + 1}\n"
            )
