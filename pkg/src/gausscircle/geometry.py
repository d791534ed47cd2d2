"""Exact square-disc intersection areas and the tilted-square limit functional.

Two families of areas live here:

* ``area_disc_square(point, R)`` -- the area of the axis-aligned unit square
  centered at an integer point that falls inside the closed disc of radius R.
  Summed over all lattice points these areas tile the disc exactly, which is
  the classical counting argument for the circle problem; for points in the
  width-sqrt(2) annulus around the boundary they are the quantities whose
  statistics the rest of the package studies.

* ``a_inf(r, theta)`` -- the flat-boundary limit: the area of a unit square,
  tilted by theta and shifted by r along the horizontal axis, that lies left
  of the vertical axis.  It is the pointwise limit of the boundary-square
  areas when the circle is replaced by its tangent line, and admits a
  five-branch closed form on theta in [0, pi/4] (two parabolic pieces, one
  linear piece, two constant pieces).  ``a_inf_oracle`` recomputes it by
  explicit convex-polygon clipping and serves as an independent check of the
  transcribed formula.

The unit-square areas must stay accurate to ~1e-12 *absolute* even at
R ~ 1e5, where the naive corner decomposition of the disc area loses seven
digits to cancellation (each corner term is ~pi R^2 / 4).  The large-radius
path therefore works in coordinates local to the square: every intermediate
quantity is O(R * interval_length) or smaller, the residual m = R^2 - x^2 -
y^2 is carried exactly (double-double R^2, integer x^2 + y^2), and the
circular-segment correction is reduced to R^2 * (asin(s) - s) with s = O(1/R),
evaluated by series.
"""

from __future__ import annotations

import math

import numpy as np

SQRT2 = math.sqrt(2.0)
INV_SQRT2 = 1.0 / SQRT2

# Below this radius the plain corner decomposition is exact to ~3e-13 and
# handles every geometric configuration; above it the local path is required.
_CORNER_RADIUS_LIMIT = 32.0


def _two_product(a: float, b: float) -> tuple[float, float]:
    """Dekker product: a*b = hi + lo exactly (|a|,|b| < 2**995)."""
    hi = a * b
    c = 134217729.0 * a  # 2**27 + 1
    ahi = c - (c - a)
    alo = a - ahi
    c = 134217729.0 * b
    bhi = c - (c - b)
    blo = b - bhi
    lo = ((ahi * bhi - hi) + ahi * blo + alo * bhi) + alo * blo
    return hi, lo


def _r2_parts(R: float) -> tuple[float, float]:
    """R**2 as an exact double-double pair."""
    return _two_product(float(R), float(R))


# ---------------------------------------------------------------------------
# area of disc(R) cap square(point), small-radius corner decomposition
# ---------------------------------------------------------------------------

def _hh(t: float, R: float) -> float:
    """Antiderivative of 2*sqrt(R^2 - v^2): t*sqrt(R^2-t^2) + R^2*asin(t/R)."""
    t = min(max(t, -R), R)
    return t * math.sqrt(max(R * R - t * t, 0.0)) + R * R * math.asin(min(max(t / R, -1.0), 1.0))


def _corner_area(a: float, b: float, R: float) -> float:
    """Area of {u <= a, v <= b, u^2+v^2 <= R^2}."""
    if a <= -R or b <= -R:
        return 0.0
    if a >= R and b >= R:
        return math.pi * R * R
    if a >= R:
        return _hh(b, R) + 0.5 * math.pi * R * R  # pure horizontal cut {v <= b}
    if b >= R:
        return _hh(a, R) + 0.5 * math.pi * R * R  # pure vertical cut {u <= a}

    def seg2g(p: float, q: float) -> float:
        # integral of 2*sqrt(R^2-v^2) over [p, q]
        return _hh(q, R) - _hh(p, R) if q > p else 0.0

    def seg_ag(p: float, q: float) -> float:
        # integral of (a + sqrt(R^2-v^2)) over [p, q]
        if q <= p:
            return 0.0
        return a * (q - p) + 0.5 * (_hh(q, R) - _hh(p, R))

    va = math.sqrt(max(R * R - a * a, 0.0))
    if a >= 0.0:
        return (
            seg2g(-R, min(b, -va))
            + seg_ag(-va, min(b, va))
            + seg2g(va, min(b, R))
        )
    return seg_ag(-va, min(b, va))


def _area_box_disc_small(x: int, y: int, R: float) -> float:
    """Inclusion-exclusion over the four square corners (safe for R <= ~32)."""
    x1, x2 = x - 0.5, x + 0.5
    y1, y2 = y - 0.5, y + 0.5
    return (
        _corner_area(x2, y2, R)
        - _corner_area(x1, y2, R)
        - _corner_area(x2, y1, R)
        + _corner_area(x1, y1, R)
    )


# ---------------------------------------------------------------------------
# large-radius path: first-octant slice integral in local coordinates
# ---------------------------------------------------------------------------

def _asin_minus_id(s):
    """asin(s) - s without cancellation; series for small s (|s| < 0.088)."""
    s2 = s * s
    return s * s2 * (1.0 / 6.0 + s2 * (3.0 / 40.0 + s2 * (15.0 / 336.0 + s2 * (105.0 / 3456.0))))


def _areas_first_octant(x, y, m, r2hi, R):
    """Vectorized boundary-square areas for first-octant points (x >= max(y,1)).

    x, y : float arrays (integer-valued), m : exact R^2 - x^2 - y^2,
    all points assumed within ~sqrt(2) of the circle so the slice
    representation (single arc, right edge only) is valid.

    The slice integral over v in [y-1/2, y+1/2] of
    clamp(sqrt(R^2-v^2), x-1/2, x+1/2) - (x-1/2) is evaluated with every
    intermediate kept O(1): widths via difference-of-squares quotients and the
    arc-vs-chord excess via R^2*(asin(s)-s), s = (v2*g1 - v1*g2)/R^2.
    """
    a1 = x - 0.5
    a2 = x + 0.5

    # q(v) := y^2 - v^2 carried exactly for each candidate v; then
    # R^2 - v^2 = (m + x^2 + y^2) - v^2 = m + x*x + q(v).
    # v-candidates: b1 = y-1/2, b2 = y+1/2 (b1 -> 1/2 when y = 0, by evenness),
    # v22 = sqrt(R^2 - a2^2) (width saturates at 1 below), v11 = sqrt(R^2 - a1^2)
    # (width reaches 0 above).
    y0 = y == 0.0
    vb2 = y + 0.5
    qb2 = -y - 0.25
    vb1 = np.where(y0, 0.0, y - 0.5)
    qb1 = np.where(y0, 0.0, y - 0.25)

    # exact numerators N(v) = R^2 - v^2 - a^2 for the two edges at each v:
    #   n1(v) = m + q(v) + x - 1/4   (edge a1),  n2(v) = m + q(v) - x - 1/4 (a2)
    # v22^2 = R^2 - a2^2  =>  q(v22) = y^2 - R^2 + a2^2 = -m + x + 1/4
    q22 = -m + x + 0.25
    q11 = -m - x + 0.25
    v22sq = np.maximum(r2hi - a2 * a2, 0.0)  # fine in double: only locates v22
    v11sq = np.maximum(r2hi - a1 * a1, 0.0)
    v22 = np.sqrt(v22sq)
    v11 = np.sqrt(v11sq)

    # integration endpoints of the partial-width region: [lo, hi] =
    # [clip(b, v22, v11)] for b in {b1, b2}
    def clip_to(vc, qc, vlim, qlim, upper):
        if upper:
            take = vlim < vc
        else:
            take = vc < vlim
        return np.where(take, vlim, vc), np.where(take, qlim, qc)

    # full-width segment: v in [b1', min(b2', v22)] has width exactly 1
    b1c_v, b1c_q = clip_to(vb1, qb1, v22, q22, upper=True)   # min(b1, v22)
    b2c_v, b2c_q = clip_to(vb2, qb2, v22, q22, upper=True)   # min(b2, v22)
    # stable length: (v_b - v_a) = (q_a - q_b) / (v_a + v_b)
    denom = b1c_v + b2c_v
    full_len = np.where(denom > 0.0, (b1c_q - b2c_q) / np.where(denom > 0.0, denom, 1.0), 0.0)
    full_len = np.maximum(full_len, 0.0)

    # partial segment: v in [max(b1, v22), min(b2, v11)]
    lo_v, lo_q = clip_to(vb1, qb1, v22, q22, upper=False)    # max(b1, v22)
    hi_v, hi_q = clip_to(vb2, qb2, v11, q11, upper=True)     # min(b2, v11)
    have = hi_v > lo_v
    lo_v = np.where(have, lo_v, 0.0)
    hi_v = np.where(have, hi_v, 0.0)
    lo_q = np.where(have, lo_q, 0.0)
    hi_q = np.where(have, hi_q, 0.0)

    g1sq = np.maximum(m + x * x + lo_q, 0.0)
    g2sq = np.maximum(m + x * x + hi_q, 0.0)
    g1 = np.sqrt(g1sq)
    g2 = np.sqrt(g2sq)
    # widths w_i = g_i - a1 = (m + q_i + x - 1/4) / (g_i + a1)
    w1 = (m + lo_q + x - 0.25) / (g1 + a1)
    w2 = (m + hi_q + x - 0.25) / (g2 + a1)
    dv = np.where(have, (lo_q - hi_q) / np.where(have, hi_v + lo_v, 1.0), 0.0)
    dv = np.maximum(dv, 0.0)

    # s = (v2*g1 - v1*g2)/R^2 = dv*(g1 + v1*(v1+v2)/(g1+g2))/R^2  (sin of the
    # arc's angular extent); the chord-to-arc excess is R^2/2*(asin(s)-s).
    gsum = np.where(g1 + g2 > 0.0, g1 + g2, 1.0)
    s = dv * (g1 + lo_v * (lo_v + hi_v) / gsum) / r2hi
    arc_excess = 0.5 * r2hi * _asin_minus_id(s)

    area = full_len + dv * 0.5 * (w1 + w2) + np.where(have, arc_excess, 0.0)
    # mirror half for y = 0: the v-range [-1/2, 1/2] is twice [0, 1/2]
    area = np.where(y0, 2.0 * area, area)
    return np.clip(area, 0.0, 1.0)


def area_disc_square_many(xs, ys, R: float):
    """Areas inside the closed disc of radius R of the unit squares centered
    at the integer points (xs[i], ys[i]).  Absolute accuracy ~1e-12 up to
    R ~ 1e7 (exactness of the integer norms requires x^2+y^2 < 2^53)."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    R = float(R)
    if R <= 0.0:
        raise ValueError("R must be positive")
    if R <= _CORNER_RADIUS_LIMIT:
        return np.array([_area_box_disc_small(int(x), int(y), R) for x, y in zip(xs, ys)])

    ax = np.abs(xs)
    ay = np.abs(ys)
    # D4 symmetry: reflect into the first octant x >= y >= 0
    swap = ay > ax
    fx = np.where(swap, ay, ax).astype(np.float64)
    fy = np.where(swap, ax, ay).astype(np.float64)

    n = (ax * ax + ay * ay).astype(np.float64)
    r2hi, r2lo = _r2_parts(R)
    m = (r2hi - n) + r2lo  # exact R^2 - |point|^2 up to one rounding at O(R)

    out = np.empty(len(n), dtype=np.float64)
    # coarse classification; anything within |m| <= 4R of the circle gets the
    # exact slice treatment, the rest is strictly inside/outside
    far_in = m > 4.0 * R
    far_out = m < -4.0 * R
    near = ~(far_in | far_out)
    out[far_in] = 1.0
    out[far_out] = 0.0
    if np.any(near):
        out[near] = _areas_first_octant(fx[near], fy[near], m[near], r2hi, R)
    return out


def area_disc_square(point, R: float) -> float:
    """Area of the unit square centered at the lattice point inside the
    closed disc of radius R (unit square = area 1)."""
    x, y = int(point[0]), int(point[1])
    return float(area_disc_square_many([x], [y], R)[0])


# ---------------------------------------------------------------------------
# the flat-boundary limit functional
# ---------------------------------------------------------------------------

def _theta_octant(theta):
    """Reduce theta to [0, pi/4] using the square's pi/2 symmetry and the
    reflection theta -> pi/2 - theta (both leave the functional invariant)."""
    t = np.mod(theta, 0.5 * math.pi)
    return np.where(t > 0.25 * math.pi, 0.5 * math.pi - t, t)


def a_inf_many(r, theta):
    """Vectorized limit functional; see ``a_inf``."""
    r = np.asarray(r, dtype=np.float64)
    t = _theta_octant(np.asarray(theta, dtype=np.float64))
    s = np.sin(t + 0.25 * math.pi) * INV_SQRT2   # outer breakpoint
    c = np.cos(t + 0.25 * math.pi) * INV_SQRT2   # inner breakpoint
    sin2t = np.sin(2.0 * t)
    safe_sin2t = np.where(sin2t > 0.0, sin2t, 1.0)

    # theta in (0, pi/4): 1 | 1-parabola | linear | parabola | 0; the branch
    # formulas extend continuously to theta = 0 and pi/4.
    lin = 0.5 * np.tan(t) - (r - c) / np.cos(t)
    par_lo = 1.0 - (r + s) ** 2 / safe_sin2t
    par_hi = (s - r) ** 2 / safe_sin2t

    out = np.where(r < -s, 1.0, np.where(r < -c, par_lo, np.where(r < c, lin, np.where(r < s, par_hi, 0.0))))
    return np.clip(out, 0.0, 1.0)


def a_inf(r: float, theta: float) -> float:
    """Area of the unit square, tilted by theta and centered at (r, 0), that
    lies in the half-plane {x <= 0}.

    r must lie in [-1/sqrt(2), 1/sqrt(2)] (the square meets the axis only
    there); theta may be any real angle.
    """
    if not -INV_SQRT2 - 1e-15 <= r <= INV_SQRT2 + 1e-15:
        raise ValueError(f"r={r} outside [-1/sqrt2, 1/sqrt2]")
    return float(a_inf_many(np.float64(r), np.float64(theta)))


def a_inf_oracle(r: float, theta: float) -> float:
    """Independent evaluation of ``a_inf`` by clipping the tilted square
    against {x <= 0} and applying the shoelace formula."""
    if not -INV_SQRT2 - 1e-15 <= r <= INV_SQRT2 + 1e-15:
        raise ValueError(f"r={r} outside [-1/sqrt2, 1/sqrt2]")
    ct, st = math.cos(theta), math.sin(theta)
    corners = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
    poly = [(r + ct * px - st * py, st * px + ct * py) for px, py in corners]

    clipped = []
    m = len(poly)
    for i in range(m):
        px, py = poly[i]
        qx, qy = poly[(i + 1) % m]
        pin = px <= 0.0
        qin = qx <= 0.0
        if pin:
            clipped.append((px, py))
        if pin != qin:
            ty = py + (qy - py) * (0.0 - px) / (qx - px)
            clipped.append((0.0, ty))
    if len(clipped) < 3:
        return 0.0
    area = 0.0
    for i in range(len(clipped)):
        x0, y0 = clipped[i]
        x1, y1 = clipped[(i + 1) % len(clipped)]
        area += x0 * y1 - x1 * y0
    return abs(area) * 0.5


def cond_expectation(theta: float, n_quad: int = 64) -> float:
    """Mean of the limit functional over the shift at fixed tilt:
    (1/sqrt2) * integral of a_inf(r, theta) dr over [-1/sqrt2, 1/sqrt2].

    Gauss-Legendre with n_quad nodes per formula branch; the integrand is a
    polynomial of degree <= 2 on each branch, so the result is exact and
    equals 1/2 for every theta.
    """
    if n_quad < 16:
        raise ValueError("n_quad must be >= 16")
    t = float(_theta_octant(np.float64(theta)))
    s = math.sin(t + 0.25 * math.pi) * INV_SQRT2
    c = math.cos(t + 0.25 * math.pi) * INV_SQRT2
    cuts = [-INV_SQRT2, -s, -c, c, s, INV_SQRT2]
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        total += half * float(np.sum(weights * a_inf_many(mid + half * nodes, t)))
    return total * INV_SQRT2


def c0_constant() -> float:
    """The limiting variance of the boundary-square areas,
    1/4 - (4/15 + 2*ln(1+sqrt2)/3 + 2*sqrt2/15) / (2*pi*sqrt2) = 0.132642545...
    """
    inner = 4.0 / 15.0 + 2.0 * math.log(1.0 + SQRT2) / 3.0 + 2.0 * SQRT2 / 15.0
    return 0.25 - inner / (2.0 * math.pi * SQRT2)


def a_r_vs_a_inf_gap(gamma) -> float:
    """max over the annulus set of |A_R(point) - a_inf(r, theta)|: the
    empirical distance between the circle areas and their flat-boundary
    limits (guaranteed O(1/R))."""
    areas = area_disc_square_many(gamma.x, gamma.y, gamma.R)
    return float(np.max(np.abs(areas - a_inf_many(gamma.r, gamma.theta))))
