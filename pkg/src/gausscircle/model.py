"""The semi-infinite tilted rectangle model for annulus autocorrelations.

For parameters (r, theta) in G = [-1/sqrt2, 1/sqrt2] x [0, 2pi) the model
region is the semi-infinite rectangle of width sqrt(2), tilted by theta and
shifted by r along its short side:

    region(r, theta) = T_theta([0, inf) x [-1/sqrt2, 1/sqrt2]) + r*e^{i(theta+pi/2)}.

Its lattice points kappa_1, kappa_2, ... (origin excluded) are ordered by
nondecreasing projection t onto the long side; rho_k is the projection of
kappa_k onto the short side.  ``rect_points`` enumerates them by rasterizing
the tilted strip column by column; ``model_ck`` estimates the model
autocorrelations by seeded, stratified Monte Carlo over uniform (r, theta).

Orientation of the circle correspondence
----------------------------------------
Matching the strip to the neighborhood of an annulus point at angle phi sends
the long axis along the forward tangent e^{i(phi+pi/2)}; the strip coordinates
of the k-th next annulus point then come out with *rho equal to minus its
signed distance to the circle* (the short-side axis of the tilted strip, as
constructed above, points toward the circle's center).  The outward radial
offset that feeds the limit functional is therefore -rho_k, with the k = 0
case reducing to the point's own offset r.  ``a_inf_k`` applies that sign;
``rho_k`` itself reports the raw strip projection.  The rectangle-vs-sector
diagnostic checks this orientation directly against true circle areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .geometry import INV_SQRT2, a_inf, a_inf_many, area_disc_square_many
from .lattice import GammaList, LatticePoint
from .stats import CorrelationEstimate

TWO_PI = 2.0 * math.pi
_BOUNDARY_TOL = 1e-12
_T_LIMIT = 1.0e9
_N_STRATA = 256
_INIT_WINDOW_PER_POINT = 2.0 / math.sqrt(2.0)  # strip holds sqrt2 points per unit t

# a_inf argument of the k-th neighbor square = _CIRCLE_SIDE_SIGN * rho_k
# (see module docstring; validated numerically against empirical_ck and by
# the rectangle diagnostic).
_CIRCLE_SIDE_SIGN = -1.0


class ModelPoint(NamedTuple):
    """One strip lattice point with long-side projection t > 0 and
    short-side projection rho in [-1/sqrt2, 1/sqrt2]."""

    kappa: LatticePoint
    t: float
    rho: float


@dataclass(frozen=True)
class ModelSequence:
    """Strip lattice points for one (r, theta), sorted by t (ties broken by
    increasing rho, then lexicographic kappa).  Complete up to truncation_t:
    every lattice point with 0 < t <= truncation_t and |rho| <= 1/sqrt2 is
    present.  boundary_flag marks any point within 1e-12 of |rho| = 1/sqrt2
    (measure-zero configurations, excluded from Monte Carlo averages)."""

    r: float
    theta: float
    a: np.ndarray
    b: np.ndarray
    t: np.ndarray
    rho: np.ndarray
    truncation_t: float
    boundary_flag: bool

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def __getitem__(self, i: int) -> ModelPoint:
        return ModelPoint(LatticePoint(int(self.a[i]), int(self.b[i])), float(self.t[i]), float(self.rho[i]))

    def __iter__(self) -> Iterator[ModelPoint]:
        return (self[i] for i in range(len(self)))


def _strip_window_points(r: float, ct: float, st: float, t0: float, t1: float):
    """Integer points of the tilted strip with t in (t0, t1], |rho| within
    the flagged boundary tolerance of [-1/sqrt2, 1/sqrt2].

    t(a, b) = a*ct + b*st,  rho(a, b) = -a*st + b*ct - r.
    Rasterized along the integer coordinate more transverse to the short
    side, so each column meets the strip in at most ~3 integer points.
    """
    hw = INV_SQRT2 + _BOUNDARY_TOL
    # corners of the (t, rho) window in (a, b) coordinates:
    # a = t*ct - (rho + r)*st ; b = t*st + (rho + r)*ct
    p_lo, p_hi = r - hw, r + hw
    corners_a = [t * ct - p * st for t in (t0, t1) for p in (p_lo, p_hi)]
    corners_b = [t * st + p * ct for t in (t0, t1) for p in (p_lo, p_hi)]

    if abs(ct) >= abs(st):
        # iterate over a; solve the rho band for b
        a_min = math.floor(min(corners_a))
        a_max = math.ceil(max(corners_a))
        aa = np.arange(a_min, a_max + 1, dtype=np.int64)
        lo = (p_lo + aa * st) / ct
        hi = (p_hi + aa * st) / ct
        blo = np.minimum(lo, hi)
        bhi = np.maximum(lo, hi)
        b0 = np.ceil(blo).astype(np.int64)
        span = int(np.max(np.floor(bhi) - b0 + 1)) if len(aa) else 0
        span = max(span, 0)
        cand_a = np.repeat(aa, span)
        cand_b = (b0[:, None] + np.arange(span)[None, :]).ravel()
        keep = cand_b <= np.repeat(np.floor(bhi).astype(np.int64), span)
        cand_a, cand_b = cand_a[keep], cand_b[keep]
    else:
        b_min = math.floor(min(corners_b))
        b_max = math.ceil(max(corners_b))
        bb = np.arange(b_min, b_max + 1, dtype=np.int64)
        lo = (bb * ct - p_hi) / st
        hi = (bb * ct - p_lo) / st
        alo = np.minimum(lo, hi)
        ahi = np.maximum(lo, hi)
        a0 = np.ceil(alo).astype(np.int64)
        span = int(np.max(np.floor(ahi) - a0 + 1)) if len(bb) else 0
        span = max(span, 0)
        cand_b = np.repeat(bb, span)
        cand_a = (a0[:, None] + np.arange(span)[None, :]).ravel()
        keep = cand_a <= np.repeat(np.floor(ahi).astype(np.int64), span)
        cand_a, cand_b = cand_a[keep], cand_b[keep]

    af = cand_a.astype(np.float64)
    bf = cand_b.astype(np.float64)
    t = af * ct + bf * st
    rho = -af * st + bf * ct - r
    ok = (t > t0) & (t <= t1) & (np.abs(rho) <= hw)
    return cand_a[ok], cand_b[ok], t[ok], rho[ok]


def rect_points(r: float, theta: float, k: int) -> ModelSequence:
    """At least the first k strip lattice points for parameters (r, theta),
    ordered by nondecreasing t.

    Scans successive t-windows (initial width max(4, sqrt(2)*k), growth
    factor 2) until k points are found; fails loudly if t exceeds 1e9, which
    cannot happen for valid inputs (the strip holds sqrt(2) points per unit
    of t on average).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > 10**6:
        raise ValueError("k exceeds the 1e6 resource guard")
    if not -INV_SQRT2 <= r <= INV_SQRT2:
        raise ValueError(f"r={r} outside [-1/sqrt2, 1/sqrt2]")
    ct, st = math.cos(theta), math.sin(theta)

    window = max(4.0, _INIT_WINDOW_PER_POINT * k)
    t0 = 0.0
    parts = []
    found = 0
    while found < k:
        if t0 > _T_LIMIT:
            raise RuntimeError("strip scan passed t = 1e9 without finding enough points")
        t1 = t0 + window
        part = _strip_window_points(r, ct, st, t0, t1)
        parts.append(part)
        found += len(part[0])
        t0 = t1
        window *= 2.0

    a = np.concatenate([p[0] for p in parts])
    b = np.concatenate([p[1] for p in parts])
    t = np.concatenate([p[2] for p in parts])
    rho = np.concatenate([p[3] for p in parts])
    order = np.lexsort((b, a, rho, t))
    a, b, t, rho = a[order], b[order], t[order], rho[order]
    flag = bool(np.any(np.abs(np.abs(rho) - INV_SQRT2) <= _BOUNDARY_TOL))
    return ModelSequence(
        r=float(r), theta=float(theta), a=a, b=b, t=t, rho=rho,
        truncation_t=float(t0), boundary_flag=flag,
    )


def rho_k(r: float, theta: float, k: int) -> float:
    """Short-side projection of the k-th strip lattice point."""
    seq = rect_points(r, theta, k)
    return float(seq.rho[k - 1])


def a_inf_k(r: float, theta: float, k: int) -> float:
    """The limit functional of the k-th neighbor square in the strip model:
    a_inf evaluated at the k-th point's outward radial offset (see module
    docstring for the orientation), with k = 0 reducing to a_inf(r, theta).
    """
    if k == 0:
        return a_inf(r, theta)
    return a_inf(_CIRCLE_SIDE_SIGN * rho_k(r, theta, k), theta)


# ---------------------------------------------------------------------------
# vectorized projection profiles and Monte Carlo correlations
# ---------------------------------------------------------------------------

_CANDIDATE_CACHE: dict[int, tuple[np.ndarray, np.ndarray, float]] = {}


def _candidate_points(kmax: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Integer candidate set covering every strip with tilt in [0, pi/4],
    any admissible shift, out to the t needed for kmax points (with margin).

    Returns (a, b) arrays and the window t_max they are guaranteed to cover.
    """
    cached = _CANDIDATE_CACHE.get(kmax)
    if cached is not None:
        return cached
    t_max = max(4.0, (kmax + 6.0 * math.sqrt(kmax + 4.0) + 8.0) * INV_SQRT2)
    rad = t_max + 2.0
    n = int(math.ceil(rad))
    aa, bb = np.meshgrid(np.arange(-2, n + 1, dtype=np.int64), np.arange(-n - 1, n + 1, dtype=np.int64), indexing="ij")
    aa = aa.ravel()
    bb = bb.ravel()
    norm2 = (aa * aa + bb * bb).astype(np.float64)
    keep = (norm2 > 0) & (norm2 <= rad * rad)
    aa, bb = aa[keep], bb[keep]

    # transverse reach: a point can belong to some tilt-theta strip iff its
    # perpendicular coordinate p(theta) = -a sin + b cos meets [-sqrt2, sqrt2]
    # for some theta in [0, pi/4]; p is monotone-or-single-extremum, so its
    # range is spanned by p(0), p(pi/4) and the interior extremum when the
    # critical angle lands inside.
    af = aa.astype(np.float64)
    bf = bb.astype(np.float64)
    p0 = bf
    p1 = (bf - af) * INV_SQRT2
    pmin = np.minimum(p0, p1)
    pmax = np.maximum(p0, p1)
    norm = np.hypot(af, bf)
    tc = np.arctan2(-af, bf)  # critical angle of p(theta)
    inside = (tc >= 0.0) & (tc <= 0.25 * math.pi)
    pmax = np.where(inside & (np.abs(norm) > 0), np.maximum(pmax, norm), pmax)
    tc2 = np.arctan2(af, -bf)
    inside2 = (tc2 >= 0.0) & (tc2 <= 0.25 * math.pi)
    pmin = np.where(inside2, np.minimum(pmin, -norm), pmin)
    hw = math.sqrt(2.0) + 1e-9
    keep = (pmin <= hw) & (pmax >= -hw)
    result = (aa[keep], bb[keep], t_max)
    _CANDIDATE_CACHE[kmax] = result
    return result


def _rho_profiles(rs: np.ndarray, thetas: np.ndarray, kmax: int, chunk: int = 2048):
    """rho_1..rho_kmax for each sample (r_i, theta_i), vectorized.

    Reduces theta into [0, pi/4] by the exact strip symmetries
    (theta mod pi/2 leaves projections unchanged; the reflection
    theta -> pi/2 - theta negates rho and r), evaluates all candidates
    against each sample, and extracts the kmax smallest admissible t per
    sample.  Returns (profiles, flags): profiles[i, j] = rho_{j+1}(r_i,
    theta_i); flags marks samples with a projection within 1e-12 of the strip
    boundary (to be excluded from averages).
    """
    rs = np.asarray(rs, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    n = rs.shape[0]

    t_red = np.mod(thetas, 0.5 * math.pi)
    reflect = t_red > 0.25 * math.pi
    t_red = np.where(reflect, 0.5 * math.pi - t_red, t_red)
    r_red = np.where(reflect, -rs, rs)
    sign = np.where(reflect, -1.0, 1.0)

    aa, bb, t_cov = _candidate_points(kmax)
    af = aa.astype(np.float64)
    bf = bb.astype(np.float64)

    profiles = np.empty((n, kmax), dtype=np.float64)
    flags = np.zeros(n, dtype=bool)
    hw = INV_SQRT2 + _BOUNDARY_TOL

    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        ct = np.cos(t_red[sl])[:, None]
        st = np.sin(t_red[sl])[:, None]
        rr = r_red[sl][:, None]
        t = af[None, :] * ct + bf[None, :] * st
        rho = -af[None, :] * st + bf[None, :] * ct - rr
        valid = (t > 0.0) & (t <= t_cov) & (np.abs(rho) <= hw)
        flags[sl] |= np.any(valid & (np.abs(np.abs(rho) - INV_SQRT2) <= _BOUNDARY_TOL), axis=1)

        tv = np.where(valid, t, np.inf)
        counts = valid.sum(axis=1)
        idx = np.argpartition(tv, kmax - 1, axis=1)[:, :kmax]
        rows = np.arange(idx.shape[0])[:, None]
        t_small = tv[rows, idx]
        order = np.argsort(t_small, axis=1, kind="stable")
        idx_sorted = idx[rows, order]
        profiles[sl] = rho[rows, idx_sorted]

        short = np.nonzero(counts < kmax)[0]
        for i in short:
            seq = rect_points(float(r_red[sl][i]), float(t_red[sl][i]), kmax)
            profiles[start + i] = seq.rho[:kmax]
            flags[start + i] |= seq.boundary_flag

    return profiles * sign[:, None], flags


def _stratum_rng(seed: int, stratum: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & (2**64 - 1)), np.uint64(stratum)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def model_ck_batch(ks, n_samples: int, seed: int) -> list[CorrelationEstimate]:
    """Monte Carlo estimates of the model autocorrelations for every lag in
    ks, sharing one sample stream.

    Sampling is uniform on G, stratified over theta in 256 equal strata with
    one counter-based (Philox) stream per stratum keyed by (seed, stratum):
    results are bit-reproducible and independent of any parallel execution
    order.  Samples whose projection profile touches the strip boundary
    (within 1e-12) are excluded.
    """
    ks = [int(k) for k in ks]
    if any(k < 0 for k in ks):
        raise ValueError("lags must be >= 0")
    if n_samples < 10**4:
        raise ValueError("n_samples must be >= 1e4")
    kmax = max(ks)
    n_per = [n_samples // _N_STRATA + (1 if s < n_samples % _N_STRATA else 0) for s in range(_N_STRATA)]

    # per-stratum means and variances; strata carry equal probability mass,
    # so estimate = mean of stratum means and SE^2 = sum var_s / (n_s S^2)
    means = np.zeros((_N_STRATA, len(ks)))
    sevar = np.zeros((_N_STRATA, len(ks)))
    n_eff = 0
    width = TWO_PI / _N_STRATA
    for s in range(_N_STRATA):
        m = n_per[s]
        if m == 0:
            continue
        rng = _stratum_rng(seed, s)
        u = rng.random(m)
        theta = (s + u) * width
        r = rng.uniform(-INV_SQRT2, INV_SQRT2, size=m)
        a0 = a_inf_many(r, theta)
        if kmax >= 1:
            prof, flags = _rho_profiles(r, theta, kmax)
        else:
            prof = np.empty((m, 0))
            flags = np.zeros(m, dtype=bool)
        good = ~flags
        ngood = int(good.sum())
        if ngood == 0:
            raise RuntimeError("entire stratum flagged as boundary-degenerate")
        n_eff += ngood
        for j, k in enumerate(ks):
            if k == 0:
                ak = a0
            else:
                ak = a_inf_many(_CIRCLE_SIDE_SIGN * prof[:, k - 1], theta)
            x = (a0 * ak - 0.25)[good]
            means[s, j] = x.mean()
            sevar[s, j] = x.var() / ngood

    value = means.mean(axis=0)
    stderr = np.sqrt(sevar.sum(axis=0)) / _N_STRATA
    return [
        CorrelationEstimate(value=float(value[j]), stderr=float(stderr[j]), n=n_eff)
        for j in range(len(ks))
    ]


def model_ck(k: int, n_samples: int, seed: int) -> CorrelationEstimate:
    """Monte Carlo estimate of the model autocorrelation at lag k: the
    covariance of a_inf(r, theta) with the k-th neighbor functional over
    uniform (r, theta).  Deterministic for fixed seed."""
    return model_ck_batch([k], n_samples, seed)[0]


# ---------------------------------------------------------------------------
# rectangle-vs-sector diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RectDiagnostic:
    """How well tangent rectangles reproduce annulus sectors at one radius.

    For each annulus point, the tilted box [0, Cprime*k] x [-1/sqrt2,
    1/sqrt2] along the forward tangent is compared against the sector
    spanned by the next k' annulus points (k' + 1 = box lattice count):
    set mismatch, ordering mismatch, the worst gap between true areas and
    the model functional along matched runs, and the range of k'.
    """

    R: float
    k: int
    cprime: float
    frac_set_mismatch: float
    frac_order_mismatch: float  # among set-matched runs
    max_area_gap: float         # worst gap over the first k points of matched runs
    max_area_gap_full: float    # same over the whole matched run (grows like (C'k)^2/R)
    kprime_min: int
    kprime_max: int
    kprime_mean: float


def rect_approx_diagnostic(gamma: GammaList, k: int, cprime: float) -> RectDiagnostic:
    """Compare, for every annulus point, the lattice content of the tangent
    rectangle with long side cprime*k against the angular sector of the next
    k' points, and the true boundary-square areas against the model
    functional evaluated at the box projections."""
    if k < 1 or cprime <= 0.0:
        raise ValueError("need k >= 1 and cprime > 0")
    K = gamma.K
    R = gamma.R
    areas = area_disc_square_many(gamma.x, gamma.y, R)

    # candidate displacements: all integer vectors within the box diameter
    reach = cprime * k + 2.0
    nmax = int(math.ceil(reach))
    da, db = np.meshgrid(np.arange(-nmax, nmax + 1, dtype=np.int64), np.arange(-nmax, nmax + 1, dtype=np.int64), indexing="ij")
    da = da.ravel()
    db = db.ravel()
    keep = (da * da + db * db).astype(np.float64) <= reach * reach
    da, db = da[keep], db[keep]
    daf = da.astype(np.float64)
    dbf = db.astype(np.float64)

    # extended (unwrapped) copies for circular index windows
    ext_x = np.concatenate([gamma.x, gamma.x])
    ext_y = np.concatenate([gamma.y, gamma.y])
    ext_theta = np.concatenate([gamma.theta, gamma.theta + TWO_PI])
    ext_areas = np.concatenate([areas, areas])

    ulim = cprime * k
    set_mismatch = 0
    order_mismatch = 0
    max_gap = 0.0
    max_gap_full = 0.0
    kprimes = np.empty(K, dtype=np.int64)

    chunk = 1024
    for start in range(0, K, chunk):
        stop = min(start + chunk, K)
        th = gamma.theta[start:stop]
        rj = gamma.r[start:stop]
        cos_t = np.cos(th)[:, None]
        sin_t = np.sin(th)[:, None]
        # u along e^{i(theta+pi/2)} = (-sin, cos); v = -r_j - <xi, e^{i theta}>
        u = -daf[None, :] * sin_t + dbf[None, :] * cos_t
        v = -rj[:, None] - (daf[None, :] * cos_t + dbf[None, :] * sin_t)
        inbox = (u >= 0.0) & (u <= ulim) & (np.abs(v) <= INV_SQRT2)

        for i in range(stop - start):
            j = start + i
            sel = np.nonzero(inbox[i])[0]
            kp = len(sel) - 1
            kprimes[j] = kp
            if kp < 0:
                set_mismatch += 1
                continue
            # box points sorted by long-side projection
            order = np.argsort(u[i, sel], kind="stable")
            box_x = gamma.x[j] + da[sel][order]
            box_y = gamma.y[j] + db[sel][order]

            hi = j + kp
            # closed sector [theta_j, theta_{j+k'}]: extend through angle ties
            # at both ends (equal angles occur only on the coordinate axes)
            while hi + 1 < j + K and ext_theta[hi + 1] == ext_theta[hi]:
                hi += 1
            lo = j
            while lo > 0 and ext_theta[lo - 1] == ext_theta[j]:
                lo -= 1
            sec_x = ext_x[lo:hi + 1]
            sec_y = ext_y[lo:hi + 1]

            box_set = set(zip(box_x.tolist(), box_y.tolist()))
            sec_set = set(zip(sec_x.tolist(), sec_y.tolist()))
            if box_set != sec_set:
                set_mismatch += 1
                continue
            if not (np.array_equal(box_x, sec_x) and np.array_equal(box_y, sec_y)):
                order_mismatch += 1
                continue
            # matched run: compare true areas against the model functional at
            # the outward offsets -v of the box points
            offs = _CIRCLE_SIDE_SIGN * v[i, sel][order]
            model_vals = a_inf_many(offs, th[i])
            gaps = np.abs(ext_areas[lo:hi + 1] - model_vals)
            max_gap = max(max_gap, float(np.max(gaps[: k + 1])))
            max_gap_full = max(max_gap_full, float(np.max(gaps)))

    return RectDiagnostic(
        R=R,
        k=k,
        cprime=float(cprime),
        frac_set_mismatch=set_mismatch / K,
        frac_order_mismatch=order_mismatch / K,
        max_area_gap=max_gap,
        max_area_gap_full=max_gap_full,
        kprime_min=int(kprimes.min()),
        kprime_max=int(kprimes.max()),
        kprime_mean=float(kprimes.mean()),
    )
