"""Empirical estimators over the boundary-square areas of one annulus.

Everything here is a deterministic function of the annulus point set (plus a
seed where Monte Carlo reference samples are drawn): the mean and variance of
the areas, circular autocorrelations at angular-index lag k, their averages
over k, pair sums and counts over thin angular windows of unit expected pair
count, windowed joint moments, and distributional comparisons against the
flat-boundary limit law.

Angular pair windows follow the half-open convention [lo, hi): the window of
index k is (theta_lam - theta_mu) mod 2pi in [k/calK, (k+2pi)/calK), with
calK = sqrt(8)*pi*R, so that consecutive windows partition the circle.  All
window sums are evaluated by binary search over the sorted angle array with
wraparound (O(K log K)), never by the O(K^2) double loop, which the tests
keep around as the oracle at small R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .geometry import INV_SQRT2, a_inf_many, area_disc_square_many
from .intervals import IntervalSpec
from .lattice import GammaList

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CorrelationEstimate:
    """A correlation value with its standard error and sample count
    (stderr = 0 for deterministic lattice sums)."""

    value: float
    stderr: float
    n: int


@dataclass(frozen=True)
class AreaSeries:
    """Boundary-square areas aligned with the angular order of one annulus."""

    R: float
    values: np.ndarray

    @property
    def K(self) -> int:
        return int(self.values.shape[0])


def area_series(gamma: GammaList) -> AreaSeries:
    """Areas inside the disc of the unit squares at each annulus point, in
    angular order."""
    return AreaSeries(R=gamma.R, values=area_disc_square_many(gamma.x, gamma.y, gamma.R))


def expectation_variance(series: AreaSeries) -> tuple[float, float]:
    """Mean and population variance of the area collection."""
    if series.K < 2:
        raise ValueError("need at least two areas")
    v = series.values
    mean = float(np.mean(v))
    return mean, float(np.mean((v - mean) ** 2))


def empirical_ck(series: AreaSeries, k: int) -> CorrelationEstimate:
    """Centered circular autocorrelation at angular-index lag k:
    (1/K) * sum_j (A_j * A_{j+k mod K} - 1/4).  Deterministic (stderr 0)."""
    K = series.K
    if not 0 <= k < K:
        raise ValueError(f"lag k={k} outside [0, K={K})")
    v = series.values
    value = float(v @ np.roll(v, -k) / K - 0.25)
    return CorrelationEstimate(value=value, stderr=0.0, n=K)


def ck_average(series: AreaSeries, L: int) -> float:
    """Average of the lag-k autocorrelations over k = 1..L."""
    if not 1 <= L < series.K:
        raise ValueError(f"L={L} outside [1, K)")
    v = series.values
    K = series.K
    total = 0.0
    for k in range(1, L + 1):
        total += float(v @ np.roll(v, -k)) / K - 0.25
    return total / L


def _window_bounds(gamma: GammaList, k: int) -> tuple[float, float]:
    calK = gamma.calK
    return k / calK, (k + TWO_PI) / calK


def _window_index_ranges(theta: np.ndarray, lo: float, hi: float):
    """For each j, the index range (a_j, b_j] of points mu with
    (theta_j - theta_mu) mod 2pi in [lo, hi).  Returned as searchsorted
    positions into the sorted theta array, b possibly < a meaning wraparound.
    """
    left = np.mod(theta - hi, TWO_PI)   # exclusive lower end in mu-angle
    right = np.mod(theta - lo, TWO_PI)  # inclusive upper end
    a = np.searchsorted(theta, left, side="right")
    b = np.searchsorted(theta, right, side="right")
    return a, b


def _window_sums(weights: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Sum of weights over each (a_j, b_j] index window with wraparound."""
    P = np.concatenate(([0.0], np.cumsum(weights)))
    total = P[-1]
    direct = P[b] - P[a]
    return np.where(b >= a, direct, total + direct)


def mixed_corr_sum(gamma: GammaList, series: AreaSeries, k: int) -> float:
    """Normalized sum over ordered pairs whose angular difference falls in
    the index-k window of the centered products
    (A_lam - 1/2) * (A_mu - 1/2); the window has unit expected pair count."""
    if not 1 <= k <= math.floor(math.sqrt(gamma.R)):
        raise ValueError(f"k={k} outside [1, floor(sqrt(R))]")
    lo, hi = _window_bounds(gamma, k)
    a, b = _window_index_ranges(gamma.theta, lo, hi)
    centered = series.values - 0.5
    inner = _window_sums(centered, a, b)
    return float(np.sum(centered * inner) / gamma.calK)


def pair_corr_count(
    gamma: GammaList,
    k: int,
    I1: IntervalSpec,
    I2: IntervalSpec,
    J: IntervalSpec,
) -> float:
    """Normalized count of ordered pairs with angular difference in the
    index-k window, r_lam in I1, r_mu in I2, theta_lam in J.  The limit is
    the product of the box measures: |I1|/sqrt2 * |I2|/sqrt2 * |J|/2pi."""
    if k < 1:
        raise ValueError("k must be >= 1")
    I1 = IntervalSpec(*I1).validate_radial()
    I2 = IntervalSpec(*I2).validate_radial()
    J = IntervalSpec(*J).validate_angular()
    lo, hi = _window_bounds(gamma, k)
    a, b = _window_index_ranges(gamma.theta, lo, hi)
    in_I2 = I2.contains(gamma.r).astype(np.float64)
    inner = _window_sums(in_I2, a, b)
    outer = I1.contains(gamma.r) & (gamma.theta >= J.a) & (gamma.theta < J.b)
    return float(np.sum(inner[outer]) / gamma.calK)


@dataclass(frozen=True)
class JointMoments:
    mean1: float
    mean2: float
    product_mean: float


def windowed_joint_moments(gamma: GammaList, series: AreaSeries, M: int, L: int) -> JointMoments:
    """Moments of the pairs (A_j, A_{j+k}) averaged over all j and over the
    lag window k in [M, M+L]."""
    if M < 1 or L < 1 or M + L >= series.K:
        raise ValueError("need 1 <= M, 1 <= L, M+L < K")
    v = series.values
    K = series.K
    prod = 0.0
    m2 = 0.0
    lags = range(M, M + L + 1)
    for k in lags:
        rolled = np.roll(v, -k)
        prod += float(v @ rolled) / K
        m2 += float(np.mean(rolled))
    nlag = len(lags)
    return JointMoments(
        mean1=float(np.mean(v)),
        mean2=m2 / nlag,
        product_mean=prod / nlag,
    )


@dataclass(frozen=True)
class JointHistogram:
    """3-D histogram of (r_lam, theta_lam, r_mu) over window pairs, with a
    chi-square test against the uniform product measure."""

    counts: np.ndarray
    n_pairs: int
    chi2: float
    p_value: float
    ks_r_marginal: float


def pair_joint_hist(gamma: GammaList, k: int, bins: int) -> JointHistogram:
    """Distribution of (r_lam, theta_lam, r_mu) over ordered pairs in the
    index-k angular window, binned on a bins^3 grid of the product box."""
    if not 4 <= bins <= 64:
        raise ValueError("bins must lie in [4, 64]")
    lo, hi = _window_bounds(gamma, k)
    a, b = _window_index_ranges(gamma.theta, lo, hi)
    counts_per_j = np.where(b >= a, b - a, gamma.K + b - a)

    # expand the (a_j, b_j] windows into explicit pair lists
    lam = np.repeat(np.arange(gamma.K), counts_per_j)
    total = int(counts_per_j.sum())
    if total == 0:
        empty = np.zeros((bins, bins, bins))
        return JointHistogram(counts=empty, n_pairs=0, chi2=0.0, p_value=1.0, ks_r_marginal=1.0)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts_per_j) - counts_per_j, counts_per_j)
    mu = np.mod(np.repeat(a, counts_per_j) + offsets, gamma.K)

    r1 = gamma.r[lam]
    th = gamma.theta[lam]
    r2 = gamma.r[mu]
    edges_r = np.linspace(-INV_SQRT2, INV_SQRT2, bins + 1)
    edges_t = np.linspace(0.0, TWO_PI, bins + 1)
    counts, _ = np.histogramdd((r1, th, r2), bins=(edges_r, edges_t, edges_r))

    expected = total / bins**3
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    dof = bins**3 - 1
    p = float(sps.chi2.sf(chi2, dof))
    u = (r1 + INV_SQRT2) / math.sqrt(2.0)
    ks = float(sps.kstest(u, "uniform").statistic)
    return JointHistogram(counts=counts, n_pairs=total, chi2=chi2, p_value=p, ks_r_marginal=ks)


def limit_distribution_test(series: AreaSeries, n_model: int, seed: int) -> float:
    """Two-sample Kolmogorov-Smirnov distance between the area collection and
    n_model samples of the flat-boundary limit functional at uniform (r,
    theta)."""
    if n_model < 10**5:
        raise ValueError("n_model must be >= 1e5")
    rng = np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), 0x1A77], dtype=np.uint64)))
    r = rng.uniform(-INV_SQRT2, INV_SQRT2, size=n_model)
    theta = rng.uniform(0.0, TWO_PI, size=n_model)
    model = a_inf_many(r, theta)
    return float(sps.ks_2samp(series.values, model).statistic)


def rtheta_uniformity_chi2(gamma: GammaList, bins: int = 16) -> tuple[float, float]:
    """Chi-square statistic and p-value for uniformity of the shifted polar
    coordinates (r, theta) on a bins x bins grid of the product box."""
    edges_r = np.linspace(-INV_SQRT2, INV_SQRT2, bins + 1)
    edges_t = np.linspace(0.0, TWO_PI, bins + 1)
    counts, _, _ = np.histogram2d(gamma.r, gamma.theta, bins=(edges_r, edges_t))
    expected = gamma.K / bins**2
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    p = float(sps.chi2.sf(chi2, bins**2 - 1))
    return chi2, p
