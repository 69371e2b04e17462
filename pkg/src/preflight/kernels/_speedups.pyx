# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled conflict kernels; signature-compatible with ``_pure``."""

from libc.math cimport INFINITY, NAN, sqrt


cdef inline double _clamp(double x, double lo, double hi) nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


cdef inline double _seg_min(
    double ax0, double ay0, double az0, double at0,
    double ax1, double ay1, double az1, double at1,
    double bx0, double by0, double bz0, double bt0,
    double bx1, double by1, double bz1, double bt1,
    double *t_out,
) nogil:
    cdef double w0 = at0 if at0 > bt0 else bt0
    cdef double w1 = at1 if at1 < bt1 else bt1
    cdef double f, avx, avy, avz, bvx, bvy, bvz
    cdef double pax, pay, paz, pbx, pby, pbz
    cdef double px, py, pz, vx, vy, vz, dv2, tau, cx, cy, cz
    if w1 < w0:
        t_out[0] = NAN
        return INFINITY
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
    px = pax - pbx
    py = pay - pby
    pz = paz - pbz
    vx = avx - bvx
    vy = avy - bvy
    vz = avz - bvz
    dv2 = vx * vx + vy * vy + vz * vz
    if dv2 > 0.0:
        tau = _clamp(-(px * vx + py * vy + pz * vz) / dv2, 0.0, w1 - w0)
    else:
        tau = 0.0
    cx = px + vx * tau
    cy = py + vy * tau
    cz = pz + vz * tau
    t_out[0] = w0 + tau
    return sqrt(cx * cx + cy * cy + cz * cz)


def segment_min_separation(
    double ax0, double ay0, double az0, double at0,
    double ax1, double ay1, double az1, double at1,
    double bx0, double by0, double bz0, double bt0,
    double bx1, double by1, double bz1, double bt1,
):
    """Closest approach of two constant-velocity motions over their common window."""
    cdef double t
    cdef double d = _seg_min(
        ax0, ay0, az0, at0, ax1, ay1, az1, at1,
        bx0, by0, bz0, bt0, bx1, by1, bz1, bt1, &t,
    )
    return d, t


cdef inline bint _segment_hits_path(
    const double[:] times, const double[:] xs, const double[:] ys, const double[:] zs,
    Py_ssize_t base, Py_ssize_t npts,
    double qx0, double qy0, double qz0,
    double qx1, double qy1, double qz1,
    double qt0, double qt1, double thresh,
) nogil:
    cdef Py_ssize_t lo, hi, mid, k, i
    cdef double d, t
    if npts < 2 or times[base + npts - 1] < qt0 or times[base] > qt1:
        return False
    lo = 0
    hi = npts - 2
    while lo < hi:
        mid = (lo + hi) // 2
        if times[base + mid + 1] < qt0:
            lo = mid + 1
        else:
            hi = mid
    k = lo
    while k <= npts - 2 and times[base + k] <= qt1:
        i = base + k
        d = _seg_min(
            qx0, qy0, qz0, qt0, qx1, qy1, qz1, qt1,
            xs[i], ys[i], zs[i], times[i],
            xs[i + 1], ys[i + 1], zs[i + 1], times[i + 1],
            &t,
        )
        if d <= thresh:
            return True
        k += 1
    return False


def count_conflicting_paths(
    const long long[:] offsets,
    const double[:] times, const double[:] xs, const double[:] ys, const double[:] zs,
    const double[:] radii, const double[:, :] bounds,
    double wx, double wy, double wz, double wt0, double wt1, int has_wait,
    double mx0, double my0, double mz0,
    double mx1, double my1, double mz1,
    double mt0, double mt1,
    double dwell,
    double radius, double gamma,
):
    """Number of packed paths conflicting with a hold/move/hold motion."""
    cdef double qt_lo = wt0 if has_wait else mt0
    cdef double qt_hi = mt1 + dwell
    cdef double qx_lo = mx0 if mx0 < mx1 else mx1
    cdef double qx_hi = mx0 if mx0 > mx1 else mx1
    cdef double qy_lo = my0 if my0 < my1 else my1
    cdef double qy_hi = my0 if my0 > my1 else my1
    cdef double qz_lo = mz0 if mz0 < mz1 else mz1
    cdef double qz_hi = mz0 if mz0 > mz1 else mz1
    cdef Py_ssize_t npaths = offsets.shape[0] - 1
    cdef Py_ssize_t p, base, npts
    cdef double thresh
    cdef bint hit
    cdef int count = 0
    if has_wait:
        if wx < qx_lo: qx_lo = wx
        if wx > qx_hi: qx_hi = wx
        if wy < qy_lo: qy_lo = wy
        if wy > qy_hi: qy_hi = wy
        if wz < qz_lo: qz_lo = wz
        if wz > qz_hi: qz_hi = wz
    with nogil:
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
            base = <Py_ssize_t>offsets[p]
            npts = <Py_ssize_t>offsets[p + 1] - base
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
    const double[:] tA, const double[:] xA, const double[:] yA, const double[:] zA,
    const double[:] tB, const double[:] xB, const double[:] yB, const double[:] zB,
):
    """Global minimum separation of two piecewise-linear paths."""
    cdef Py_ssize_t nA = tA.shape[0]
    cdef Py_ssize_t nB = tB.shape[0]
    cdef double best = INFINITY
    cdef double best_t = NAN
    cdef double d, t, a1, b1
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t j = 0
    if nA < 2 or nB < 2 or tA[nA - 1] < tB[0] or tB[nB - 1] < tA[0]:
        return INFINITY, NAN
    with nogil:
        while i < nA - 2 and tA[i + 1] < tB[0]:
            i += 1
        while j < nB - 2 and tB[j + 1] < tA[0]:
            j += 1
        while i < nA - 1 and j < nB - 1:
            a1 = tA[i + 1]
            b1 = tB[j + 1]
            d = _seg_min(
                xA[i], yA[i], zA[i], tA[i],
                xA[i + 1], yA[i + 1], zA[i + 1], a1,
                xB[j], yB[j], zB[j], tB[j],
                xB[j + 1], yB[j + 1], zB[j + 1], b1,
                &t,
            )
            if d < best:
                best = d
                best_t = t
            if a1 <= b1:
                i += 1
            else:
                j += 1
    return best, best_t
