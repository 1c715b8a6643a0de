# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot, NAN
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double CLIP_TOL = 1e-12
cdef double MERGE_TOL = 1e-9
cdef double LP_EPS = 1e-9
cdef double CONTACT_TOL = 1e-6


cdef inline const double[:, ::1] _as2(obj):
    return np.ascontiguousarray(obj, dtype=np.float64).reshape(-1, 2)


cdef int _clean(double* pts, int m) noexcept nogil:
    cdef int k = 0, i
    for i in range(m):
        if k > 0 and fabs(pts[2 * i] - pts[2 * (k - 1)]) <= MERGE_TOL and fabs(pts[2 * i + 1] - pts[2 * (k - 1) + 1]) <= MERGE_TOL:
            continue
        pts[2 * k] = pts[2 * i]
        pts[2 * k + 1] = pts[2 * i + 1]
        k += 1
    while k > 1 and fabs(pts[0] - pts[2 * (k - 1)]) <= MERGE_TOL and fabs(pts[1] - pts[2 * (k - 1) + 1]) <= MERGE_TOL:
        k -= 1
    if k < 3:
        return 0
    return k


cdef int _clip(const double* src, int m, double* dst, double px, double py, double nx, double ny) noexcept nogil:
    # dst must hold 2 * (m + 1) doubles
    cdef int k = 0, i
    cdef double sp, sc, t, ax, ay, bx, by
    if m == 0:
        return 0
    ax = src[2 * (m - 1)]
    ay = src[2 * (m - 1) + 1]
    sp = (ax - px) * nx + (ay - py) * ny
    for i in range(m):
        bx = src[2 * i]
        by = src[2 * i + 1]
        sc = (bx - px) * nx + (by - py) * ny
        if sc >= -CLIP_TOL:
            if sp < -CLIP_TOL:
                t = sp / (sp - sc)
                dst[2 * k] = ax + t * (bx - ax)
                dst[2 * k + 1] = ay + t * (by - ay)
                k += 1
            dst[2 * k] = bx
            dst[2 * k + 1] = by
            k += 1
        elif sp >= -CLIP_TOL:
            t = sp / (sp - sc)
            dst[2 * k] = ax + t * (bx - ax)
            dst[2 * k + 1] = ay + t * (by - ay)
            k += 1
        ax = bx
        ay = by
        sp = sc
    return _clean(dst, k)


cdef object _out(const double* pts, int m):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.empty((m, 2))
    cdef int i
    for i in range(m):
        arr[i, 0] = pts[2 * i]
        arr[i, 1] = pts[2 * i + 1]
    return arr


def clip(verts, double px, double py, double nx, double ny):
    """Clip a CCW convex polygon to {q : (q - p) . n >= 0}."""
    cdef const double[:, ::1] v = _as2(verts)
    cdef int m = v.shape[0]
    cdef double* dst = <double*> malloc(2 * (m + 1) * sizeof(double))
    cdef int k
    try:
        k = _clip(&v[0, 0] if m else NULL, m, dst, px, py, nx, ny)
        return _out(dst, k)
    finally:
        free(dst)


cdef void _area_centroid(const double* pts, int m, double* area, double* cx, double* cy) noexcept nogil:
    cdef double x0, y0, a2 = 0.0, sx = 0.0, sy = 0.0, ax, ay, bx, by, cr
    cdef int k
    area[0] = 0.0
    cx[0] = NAN
    cy[0] = NAN
    if m < 3:
        return
    x0 = pts[0]
    y0 = pts[1]
    for k in range(1, m - 1):
        ax = pts[2 * k] - x0
        ay = pts[2 * k + 1] - y0
        bx = pts[2 * k + 2] - x0
        by = pts[2 * k + 3] - y0
        cr = ax * by - ay * bx
        a2 += cr
        sx += (ax + bx) * cr
        sy += (ay + by) * cr
    if a2 <= 0.0:
        return
    area[0] = 0.5 * a2
    cx[0] = x0 + sx / (3.0 * a2)
    cy[0] = y0 + sy / (3.0 * a2)


cdef double _central_moment(const double* pts, int m, double gx, double gy) noexcept nogil:
    cdef double total = 0.0, ux, uy, vx, vy, tri
    cdef int k, k1
    for k in range(m):
        k1 = (k + 1) % m
        ux = pts[2 * k] - gx
        uy = pts[2 * k + 1] - gy
        vx = pts[2 * k1] - gx
        vy = pts[2 * k1 + 1] - gy
        tri = 0.5 * (ux * vy - uy * vx)
        total += tri * (ux * ux + uy * uy + vx * vx + vy * vy + ux * vx + uy * vy) / 6.0
    return total


def area_centroid(verts):
    """Return ``(area, cx, cy)``; centroid is NaN for degenerate input."""
    cdef const double[:, ::1] v = _as2(verts)
    cdef double a, cx, cy
    if v.shape[0] < 3:
        return 0.0, NAN, NAN
    _area_centroid(&v[0, 0], v.shape[0], &a, &cx, &cy)
    return a, cx, cy


def second_moment(verts, double px, double py):
    """Integral of |q - p|^2 over the polygon (exact, uniform density)."""
    cdef const double[:, ::1] v = _as2(verts)
    cdef double a, gx, gy
    cdef int m = v.shape[0]
    if m < 3:
        return 0.0
    _area_centroid(&v[0, 0], m, &a, &gx, &gy)
    if a <= 0.0:
        return 0.0
    return _central_moment(&v[0, 0], m, gx, gy) + a * ((px - gx) * (px - gx) + (py - gy) * (py - gy))


cdef int _cell(const double* gens, int n, int i, const double* arena, int m, double* buf_a, double* buf_b, double** result) noexcept nogil:
    # buffers must hold 2 * (m + n + 1) doubles; returns vertex count, *result points at the live buffer
    cdef double xi = gens[2 * i], yi = gens[2 * i + 1], xj, yj, dx, dy, d
    cdef int j, k = m
    cdef double* cur = buf_a
    cdef double* nxt = buf_b
    cdef double* tmp
    for j in range(2 * m):
        cur[j] = arena[j]
    for j in range(n):
        if j == i:
            continue
        xj = gens[2 * j]
        yj = gens[2 * j + 1]
        dx = xi - xj
        dy = yi - yj
        d = hypot(dx, dy)
        k = _clip(cur, k, nxt, 0.5 * (xi + xj), 0.5 * (yi + yj), dx / d, dy / d)
        tmp = cur
        cur = nxt
        nxt = tmp
        if k == 0:
            break
    result[0] = cur
    return k


def voronoi_cells(gens, arena):
    """Bounded Voronoi cells by iterated bisector clipping, index-aligned."""
    cdef const double[:, ::1] g = _as2(gens)
    cdef const double[:, ::1] q = _as2(arena)
    cdef int n = g.shape[0], m = q.shape[0], i, k
    cdef double* a = <double*> malloc(2 * (m + n + 1) * sizeof(double))
    cdef double* b = <double*> malloc(2 * (m + n + 1) * sizeof(double))
    cdef double* res
    out = []
    try:
        for i in range(n):
            k = _cell(&g[0, 0], n, i, &q[0, 0], m, a, b, &res)
            out.append(_out(res, k))
    finally:
        free(a)
        free(b)
    return out


def cell_stats(gens, arena):
    """Per-cell area, centroid and second moment about its own generator."""
    cdef const double[:, ::1] g = _as2(gens)
    cdef const double[:, ::1] q = _as2(arena)
    cdef int n = g.shape[0], m = q.shape[0], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] areas = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cents = np.full((n, 2), np.nan)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] moments = np.zeros(n)
    cdef double* a = <double*> malloc(2 * (m + n + 1) * sizeof(double))
    cdef double* b = <double*> malloc(2 * (m + n + 1) * sizeof(double))
    cdef double* res
    cdef double ar, cx, cy, dx, dy
    try:
        for i in range(n):
            k = _cell(&g[0, 0], n, i, &q[0, 0], m, a, b, &res)
            _area_centroid(res, k, &ar, &cx, &cy)
            if ar <= 0.0:
                continue
            areas[i] = ar
            cents[i, 0] = cx
            cents[i, 1] = cy
            dx = g[i, 0] - cx
            dy = g[i, 1] - cy
            moments[i] = _central_moment(res, k, cx, cy) + ar * (dx * dx + dy * dy)
    finally:
        free(a)
        free(b)
    return areas, cents, moments


def orca_adjust(double px, double py, double vx, double vy, double combined_radius, double tau, double dt_recover):
    """Smallest change ``w`` taking ``v`` onto the VO boundary, plus the outward normal."""
    cdef double out[4]
    _orca_adjust(px, py, vx, vy, combined_radius, tau, dt_recover, out)
    return out[0], out[1], out[2], out[3]


def orca_rows(pos, radii, est, int i, double vx, double vy, double tau, double dt_recover):
    """ORCA half-planes of agent ``i`` against every other agent; see ``_kernels_py.orca_rows``."""
    cdef const double[:, ::1] p = _as2(pos)
    cdef const double[:, ::1] e = _as2(est)
    cdef const double[::1] r = np.ascontiguousarray(radii, dtype=np.float64)
    cdef int n = p.shape[0], k, row = 0
    cdef double buf[4]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((max(n - 1, 0), 4))
    for k in range(n):
        if k == i:
            continue
        _orca_adjust(p[k, 0] - p[i, 0], p[k, 1] - p[i, 1], vx - e[k, 0], vy - e[k, 1], r[i] + r[k], tau, dt_recover, buf)
        out[row, 0] = vx + 0.5 * buf[0]
        out[row, 1] = vy + 0.5 * buf[1]
        out[row, 2] = buf[2]
        out[row, 3] = buf[3]
        row += 1
    return out


cdef void _orca_adjust(double px, double py, double vx, double vy, double combined_radius, double tau, double dt_recover, double* out) noexcept nogil:
    cdef double r = combined_radius, dist2 = px * px + py * py, r2 = r * r
    cdef double inv, wx, wy, wl2, wl, dot1, ux, uy, s, leg, dx, dy, dp, d
    if dist2 <= r2 and dist2 > 0.0:
        d = sqrt(dist2)
        if r - d <= CONTACT_TOL:
            r = d * (1.0 - 1e-12)
            r2 = r * r
    if dist2 > r2:
        inv = 1.0 / tau
        wx = vx - px * inv
        wy = vy - py * inv
        wl2 = wx * wx + wy * wy
        dot1 = wx * px + wy * py
        if dot1 < 0.0 and dot1 * dot1 > r2 * wl2:
            wl = sqrt(wl2)
            ux = wx / wl
            uy = wy / wl
            s = r * inv - wl
            out[0] = s * ux
            out[1] = s * uy
            out[2] = ux
            out[3] = uy
            return
        leg = sqrt(dist2 - r2)
        if px * wy - py * wx >= 0.0:
            dx = (px * leg - py * r) / dist2
            dy = (px * r + py * leg) / dist2
        else:
            dx = -(px * leg + py * r) / dist2
            dy = -(-px * r + py * leg) / dist2
        dp = vx * dx + vy * dy
        out[0] = dp * dx - vx
        out[1] = dp * dy - vy
        out[2] = -dy
        out[3] = dx
        return
    inv = 1.0 / dt_recover
    wx = vx - px * inv
    wy = vy - py * inv
    wl = hypot(wx, wy)
    if wl > 0.0:
        ux = wx / wl
        uy = wy / wl
    else:
        d = sqrt(dist2)
        if d > 0.0:
            ux = -py / d
            uy = px / d
        else:
            ux = 1.0
            uy = 0.0
    s = r * inv - wl
    out[0] = s * ux
    out[1] = s * uy
    out[2] = ux
    out[3] = uy


cdef bint _lp1(const double* L, int i, double radius, double ox, double oy, bint direction_opt, double* rx, double* ry) noexcept nogil:
    cdef double px = L[4 * i], py = L[4 * i + 1], dx = L[4 * i + 2], dy = L[4 * i + 3]
    cdef double dot = px * dx + py * dy
    cdef double disc = dot * dot + radius * radius - (px * px + py * py)
    cdef double s, t_left, t_right, qx, qy, ex, ey, denom, numer, t
    cdef int j
    if disc < 0.0:
        return False
    s = sqrt(disc)
    t_left = -dot - s
    t_right = -dot + s
    for j in range(i):
        qx = L[4 * j]
        qy = L[4 * j + 1]
        ex = L[4 * j + 2]
        ey = L[4 * j + 3]
        denom = dx * ey - dy * ex
        numer = ex * (py - qy) - ey * (px - qx)
        if fabs(denom) <= LP_EPS:
            if numer < 0.0:
                return False
            continue
        t = numer / denom
        if denom >= 0.0:
            if t < t_right:
                t_right = t
        else:
            if t > t_left:
                t_left = t
        if t_left > t_right:
            return False
    if direction_opt:
        t = t_right if ox * dx + oy * dy > 0.0 else t_left
    else:
        t = dx * (ox - px) + dy * (oy - py)
        if t < t_left:
            t = t_left
        elif t > t_right:
            t = t_right
    rx[0] = px + t * dx
    ry[0] = py + t * dy
    return True


cdef int _lp2(const double* L, int n, double radius, double ox, double oy, bint direction_opt, double* rx, double* ry) noexcept nogil:
    cdef double n2, k, tx, ty
    cdef int i
    if direction_opt:
        rx[0] = ox * radius
        ry[0] = oy * radius
    else:
        n2 = ox * ox + oy * oy
        if n2 > radius * radius:
            k = radius / sqrt(n2)
            rx[0] = ox * k
            ry[0] = oy * k
        else:
            rx[0] = ox
            ry[0] = oy
    for i in range(n):
        if L[4 * i + 2] * (L[4 * i + 1] - ry[0]) - L[4 * i + 3] * (L[4 * i] - rx[0]) > 0.0:
            tx = rx[0]
            ty = ry[0]
            if not _lp1(L, i, radius, ox, oy, direction_opt, rx, ry):
                rx[0] = tx
                ry[0] = ty
                return i
    return n


cdef void _lp3(const double* L, int n, int n_fixed, int begin, double radius, double* rx, double* ry, double* proj) noexcept nogil:
    # proj must hold 4 * n doubles
    cdef double distance = 0.0, px, py, dx, dy, qx, qy, ex, ey, det, t, ax, ay, bx, by, bl, sx, sy
    cdef int i, j, k
    for i in range(begin, n):
        px = L[4 * i]
        py = L[4 * i + 1]
        dx = L[4 * i + 2]
        dy = L[4 * i + 3]
        if dx * (py - ry[0]) - dy * (px - rx[0]) > distance:
            for k in range(4 * n_fixed):
                proj[k] = L[k]
            k = n_fixed
            for j in range(n_fixed, i):
                qx = L[4 * j]
                qy = L[4 * j + 1]
                ex = L[4 * j + 2]
                ey = L[4 * j + 3]
                det = dx * ey - dy * ex
                if fabs(det) <= LP_EPS:
                    if dx * ex + dy * ey > 0.0:
                        continue
                    ax = 0.5 * (px + qx)
                    ay = 0.5 * (py + qy)
                else:
                    t = (ex * (py - qy) - ey * (px - qx)) / det
                    ax = px + t * dx
                    ay = py + t * dy
                bx = ex - dx
                by = ey - dy
                bl = hypot(bx, by)
                proj[4 * k] = ax
                proj[4 * k + 1] = ay
                proj[4 * k + 2] = bx / bl
                proj[4 * k + 3] = by / bl
                k += 1
            if _lp2(proj, k, radius, -dy, dx, True, &sx, &sy) == k:
                rx[0] = sx
                ry[0] = sy
            distance = dx * (py - ry[0]) - dy * (px - rx[0])


def solve_lp(halfplanes, int n_fixed, double vmax, double pref_x, double pref_y):
    """Velocity in D(0, vmax) nearest ``pref`` satisfying every half-plane.

    Rows are ``(px, py, nx, ny)``; see ``_kernels_py.solve_lp``.
    """
    cdef const double[:, ::1] h = np.ascontiguousarray(halfplanes, dtype=np.float64).reshape(-1, 4)
    cdef int n = h.shape[0], i, fail
    cdef double rx, ry
    cdef double* L = <double*> malloc((4 * n + 4) * sizeof(double))
    cdef double* proj = <double*> malloc((4 * n + 4) * sizeof(double))
    try:
        for i in range(n):
            L[4 * i] = h[i, 0]
            L[4 * i + 1] = h[i, 1]
            L[4 * i + 2] = h[i, 3]
            L[4 * i + 3] = -h[i, 2]
        fail = _lp2(L, n, vmax, pref_x, pref_y, False, &rx, &ry)
        if fail < n:
            _lp3(L, n, n_fixed, fail, vmax, &rx, &ry, proj)
            return rx, ry, False
        return rx, ry, True
    finally:
        free(L)
        free(proj)


def pair_clearance(start, end, radii):
    """Closed-form minimum over the step of |x_i - x_j| - (r_i + r_j), all pairs i < j."""
    cdef const double[:, ::1] p0 = _as2(start)
    cdef const double[:, ::1] p1 = _as2(end)
    cdef const double[::1] r = np.ascontiguousarray(radii, dtype=np.float64)
    cdef int n = p0.shape[0], i, j, k = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n * (n - 1) // 2)
    cdef double dx, dy, ex, ey, e2, s
    for i in range(n):
        for j in range(i + 1, n):
            dx = p0[j, 0] - p0[i, 0]
            dy = p0[j, 1] - p0[i, 1]
            ex = (p1[j, 0] - p1[i, 0]) - dx
            ey = (p1[j, 1] - p1[i, 1]) - dy
            e2 = ex * ex + ey * ey
            s = 0.0
            if e2 > 0.0:
                s = -(dx * ex + dy * ey) / e2
                if s < 0.0:
                    s = 0.0
                elif s > 1.0:
                    s = 1.0
            out[k] = hypot(dx + s * ex, dy + s * ey) - (r[i] + r[j])
            k += 1
    return out
