"""Pure-Python twin of the compiled conflict kernels.

Same signatures and semantics as ``_speedups``; used when the compiled
extension is unavailable or when PREFLIGHT_PURE_KERNELS=1. Correct but
roughly two orders of magnitude slower on large fleets.
"""

from __future__ import annotations

import math

INF = math.inf
NAN = math.nan


def closest_approach(
    px: float, py: float, pz: float,
    vx: float, vy: float, vz: float,
    length: float,
) -> tuple[float, float]:
    """Min of |p + v*tau| for tau in [0, length]; returns (dist, tau)."""
    dv2 = vx * vx + vy * vy + vz * vz
    if dv2 > 0.0:
        tau = -(px * vx + py * vy + pz * vz) / dv2
        if tau < 0.0:
            tau = 0.0
        elif tau > length:
            tau = length
    else:
        tau = 0.0
    cx = px + vx * tau
    cy = py + vy * tau
    cz = pz + vz * tau
    return math.sqrt(cx * cx + cy * cy + cz * cz), tau


def segment_min_separation(
    ax0: float, ay0: float, az0: float, at0: float,
    ax1: float, ay1: float, az1: float, at1: float,
    bx0: float, by0: float, bz0: float, bt0: float,
    bx1: float, by1: float, bz1: float, bt1: float,
) -> tuple[float, float]:
    """Closest approach of two constant-velocity motions over their common window.

    Returns (distance, time of minimum); (inf, nan) when the time windows
    are disjoint. Touching windows are evaluated at the shared instant.
    """
    w0 = at0 if at0 > bt0 else bt0
    w1 = at1 if at1 < bt1 else bt1
    if w1 < w0:
        return INF, NAN
    if at1 > at0:
        f = (w0 - at0) / (at1 - at0)
        avx = (ax1 - ax0) / (at1 - at0)
        avy = (ay1 - ay0) / (at1 - at0)
        avz = (az1 - az0) / (at1 - at0)
    else:
        f = 0.0
        avx = avy = avz = 0.0
    pax = ax0 + (ax1 - ax0) * f
    pay = ay0 + (ay1 - ay0) * f
    paz = az0 + (az1 - az0) * f
    if bt1 > bt0:
        f = (w0 - bt0) / (bt1 - bt0)
        bvx = (bx1 - bx0) / (bt1 - bt0)
        bvy = (by1 - by0) / (bt1 - bt0)
        bvz = (bz1 - bz0) / (bt1 - bt0)
    else:
        f = 0.0
        bvx = bvy = bvz = 0.0
    pbx = bx0 + (bx1 - bx0) * f
    pby = by0 + (by1 - by0) * f
    pbz = bz0 + (bz1 - bz0) * f
    dist, tau = closest_approach(
        pax - pbx, pay - pby, paz - pbz,
        avx - bvx, avy - bvy, avz - bvz,
        w1 - w0,
    )
    return dist, w0 + tau


def _segment_hits_path(
    times, xs, ys, zs, base: int, npts: int,
    qx0: float, qy0: float, qz0: float,
    qx1: float, qy1: float, qz1: float,
    qt0: float, qt1: float,
    thresh: float,
) -> bool:
    """True if the query motion comes within thresh of any path segment."""
    if npts < 2 or times[base + npts - 1] < qt0 or times[base] > qt1:
        return False
    # First segment whose end time reaches the query window.
    lo, hi = 0, npts - 2
    while lo < hi:
        mid = (lo + hi) // 2
        if times[base + mid + 1] < qt0:
            lo = mid + 1
        else:
            hi = mid
    k = lo
    while k <= npts - 2 and times[base + k] <= qt1:
        i = base + k
        d, _ = segment_min_separation(
            qx0, qy0, qz0, qt0, qx1, qy1, qz1, qt1,
            xs[i], ys[i], zs[i], times[i],
            xs[i + 1], ys[i + 1], zs[i + 1], times[i + 1],
        )
        if d <= thresh:
            return True
        k += 1
    return False


def count_conflicting_paths(
    offsets, times, xs, ys, zs, radii, bounds,
    wx: float, wy: float, wz: float, wt0: float, wt1: float, has_wait: int,
    mx0: float, my0: float, mz0: float,
    mx1: float, my1: float, mz1: float,
    mt0: float, mt1: float,
    dwell: float,
    radius: float, gamma: float,
) -> int:
    """Number of packed paths conflicting with a hold/move/hold motion.

    The motion is an optional hold at (wx,wy,wz) over [wt0,wt1], a straight
    move over [mt0,mt1], and an optional hold of `dwell` seconds at the move
    end point. A path counts at most once. `bounds` rows are
    (t_lo, t_hi, x_lo, x_hi, y_lo, y_hi, z_lo, z_hi) per path.
    """
    qt_lo = wt0 if has_wait else mt0
    qt_hi = mt1 + dwell
    qx_lo = min(mx0, mx1)
    qx_hi = max(mx0, mx1)
    qy_lo = min(my0, my1)
    qy_hi = max(my0, my1)
    qz_lo = min(mz0, mz1)
    qz_hi = max(mz0, mz1)
    if has_wait:
        qx_lo = min(qx_lo, wx); qx_hi = max(qx_hi, wx)
        qy_lo = min(qy_lo, wy); qy_hi = max(qy_hi, wy)
        qz_lo = min(qz_lo, wz); qz_hi = max(qz_hi, wz)
    count = 0
    npaths = len(offsets) - 1
    for p in range(npaths):
        thresh = radius + radii[p] + gamma
        if bounds[p, 0] > qt_hi or bounds[p, 1] < qt_lo:
            continue
        if (
            qx_lo - thresh > bounds[p, 3] or qx_hi + thresh < bounds[p, 2]
            or qy_lo - thresh > bounds[p, 5] or qy_hi + thresh < bounds[p, 4]
            or qz_lo - thresh > bounds[p, 7] or qz_hi + thresh < bounds[p, 6]
        ):
            continue
        base = int(offsets[p])
        npts = int(offsets[p + 1]) - base
        hit = False
        if has_wait and wt1 >= wt0:
            hit = _segment_hits_path(
                times, xs, ys, zs, base, npts,
                wx, wy, wz, wx, wy, wz, wt0, wt1, thresh,
            )
        if not hit:
            hit = _segment_hits_path(
                times, xs, ys, zs, base, npts,
                mx0, my0, mz0, mx1, my1, mz1, mt0, mt1, thresh,
            )
        if not hit and dwell > 0.0:
            hit = _segment_hits_path(
                times, xs, ys, zs, base, npts,
                mx1, my1, mz1, mx1, my1, mz1, mt1, mt1 + dwell, thresh,
            )
        if hit:
            count += 1
    return count


def path_pair_min_separation(
    tA, xA, yA, zA,
    tB, xB, yB, zB,
) -> tuple[float, float]:
    """Global minimum separation of two piecewise-linear paths over their
    overlapping time span. Returns (inf, nan) if the spans are disjoint."""
    nA = len(tA)
    nB = len(tB)
    if nA < 2 or nB < 2 or tA[nA - 1] < tB[0] or tB[nB - 1] < tA[0]:
        return INF, NAN
    best = INF
    best_t = NAN
    i = 0
    j = 0
    # Skip leading segments that end before the other path starts.
    while i < nA - 2 and tA[i + 1] < tB[0]:
        i += 1
    while j < nB - 2 and tB[j + 1] < tA[0]:
        j += 1
    while i < nA - 1 and j < nB - 1:
        a1 = tA[i + 1]
        b1 = tB[j + 1]
        d, t = segment_min_separation(
            xA[i], yA[i], zA[i], tA[i],
            xA[i + 1], yA[i + 1], zA[i + 1], a1,
            xB[j], yB[j], zB[j], tB[j],
            xB[j + 1], yB[j + 1], zB[j + 1], b1,
        )
        if d < best:
            best = d
            best_t = t
        if a1 <= b1:
            i += 1
        else:
            j += 1
    return best, best_t
