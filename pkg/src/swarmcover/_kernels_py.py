"""Pure-Python numerical kernels.

Function-for-function mirror of ``_kernels.pyx``. Used when the compiled
extension is unavailable or when ``SWARMCOVER_PURE=1`` is set. Arrays go in
and come out as float64 numpy arrays; internally everything runs on plain
Python floats because the inputs are tiny (a handful of vertices/agents).
"""

import math

import numpy as np

# Vertices whose signed distance to a clipping line is above -CLIP_TOL are kept.
CLIP_TOL = 1e-12
# Consecutive vertices closer than this are merged.
MERGE_TOL = 1e-9
# Parallel-line threshold for the 2D LP (directions are unit vectors).
LP_EPS = 1e-9
# Overlaps up to this depth are contact, handled by the cone rather than recovery.
CONTACT_TOL = 1e-6


def _pairs(a):
    if isinstance(a, np.ndarray):
        return a.tolist()
    return [(float(p[0]), float(p[1])) for p in a]


def _to_array(pts):
    if not pts:
        return np.empty((0, 2))
    return np.array(pts, dtype=float)


def _clean(pts):
    out = []
    for p in pts:
        if out and abs(p[0] - out[-1][0]) <= MERGE_TOL and abs(p[1] - out[-1][1]) <= MERGE_TOL:
            continue
        out.append(p)
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) <= MERGE_TOL and abs(out[0][1] - out[-1][1]) <= MERGE_TOL:
        out.pop()
    if len(out) < 3:
        return []
    return out


def _clip(pts, px, py, nx, ny):
    if not pts:
        return []
    out = []
    prev = pts[-1]
    sp = (prev[0] - px) * nx + (prev[1] - py) * ny
    for cur in pts:
        sc = (cur[0] - px) * nx + (cur[1] - py) * ny
        if sc >= -CLIP_TOL:
            if sp < -CLIP_TOL:
                t = sp / (sp - sc)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
            out.append((cur[0], cur[1]))
        elif sp >= -CLIP_TOL:
            t = sp / (sp - sc)
            out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
        prev = cur
        sp = sc
    return _clean(out)


def clip(verts, px, py, nx, ny):
    """Clip a CCW convex polygon to {q : (q - p) . n >= 0}."""
    return _to_array(_clip(_pairs(verts), px, py, nx, ny))


def _area_centroid(pts):
    if len(pts) < 3:
        return 0.0, math.nan, math.nan
    x0, y0 = pts[0]
    a2 = 0.0
    sx = 0.0
    sy = 0.0
    for k in range(1, len(pts) - 1):
        ax = pts[k][0] - x0
        ay = pts[k][1] - y0
        bx = pts[k + 1][0] - x0
        by = pts[k + 1][1] - y0
        cr = ax * by - ay * bx
        a2 += cr
        sx += (ax + bx) * cr
        sy += (ay + by) * cr
    if a2 <= 0.0:
        return 0.0, math.nan, math.nan
    return 0.5 * a2, x0 + sx / (3.0 * a2), y0 + sy / (3.0 * a2)


def area_centroid(verts):
    """Return ``(area, cx, cy)``; centroid is NaN for degenerate input."""
    return _area_centroid(_pairs(verts))


def _central_moment(pts, gx, gy):
    # fan from the centroid; per triangle (0, u, v): A/6 (u.u + v.v + u.v)
    total = 0.0
    m = len(pts)
    for k in range(m):
        ux = pts[k][0] - gx
        uy = pts[k][1] - gy
        vx = pts[(k + 1) % m][0] - gx
        vy = pts[(k + 1) % m][1] - gy
        tri = 0.5 * (ux * vy - uy * vx)
        total += tri * (ux * ux + uy * uy + vx * vx + vy * vy + ux * vx + uy * vy) / 6.0
    return total


def _moment(pts, px, py):
    area, gx, gy = _area_centroid(pts)
    if area <= 0.0:
        return 0.0
    dx = px - gx
    dy = py - gy
    return _central_moment(pts, gx, gy) + area * (dx * dx + dy * dy)


def second_moment(verts, px, py):
    """Integral of |q - p|^2 over the polygon (exact, uniform density)."""
    return _moment(_pairs(verts), px, py)


def _cell(gens, i, arena):
    xi, yi = gens[i]
    poly = arena
    for j, (xj, yj) in enumerate(gens):
        if j == i:
            continue
        dx = xi - xj
        dy = yi - yj
        d = math.hypot(dx, dy)
        poly = _clip(poly, 0.5 * (xi + xj), 0.5 * (yi + yj), dx / d, dy / d)
        if not poly:
            break
    return poly


def voronoi_cells(gens, arena):
    """Bounded Voronoi cells by iterated bisector clipping, index-aligned."""
    g = _pairs(gens)
    q = _pairs(arena)
    return [_to_array(_cell(g, i, q)) for i in range(len(g))]


def cell_stats(gens, arena):
    """Per-cell area, centroid and second moment about its own generator."""
    g = _pairs(gens)
    q = _pairs(arena)
    n = len(g)
    areas = np.zeros(n)
    cents = np.full((n, 2), math.nan)
    moments = np.zeros(n)
    for i in range(n):
        cell = _cell(g, i, q)
        a, cx, cy = _area_centroid(cell)
        if a <= 0.0:
            continue
        areas[i] = a
        cents[i, 0] = cx
        cents[i, 1] = cy
        dx = g[i][0] - cx
        dy = g[i][1] - cy
        moments[i] = _central_moment(cell, cx, cy) + a * (dx * dx + dy * dy)
    return areas, cents, moments


def orca_adjust(px, py, vx, vy, combined_radius, tau, dt_recover):
    """Smallest change ``w`` taking ``v`` onto the VO boundary, plus the outward normal.

    ``(px, py)`` is the relative position x_B - x_A, ``(vx, vy)`` the relative
    velocity v_A - v_B. Returns ``(wx, wy, nx, ny)``.

    Agents in contact (overlap no deeper than ``CONTACT_TOL``) get the cone for
    a radius just under their distance, so they may slide but never approach.
    Deeper overlaps use the disc ``D(p / dt_recover, r / dt_recover)``, outside
    of which the pair is separated after ``dt_recover``.
    """
    r = combined_radius
    dist2 = px * px + py * py
    r2 = r * r
    if dist2 <= r2 and dist2 > 0.0:
        d = math.sqrt(dist2)
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
            wl = math.sqrt(wl2)
            ux = wx / wl
            uy = wy / wl
            s = r * inv - wl
            return s * ux, s * uy, ux, uy
        leg = math.sqrt(dist2 - r2)
        if px * wy - py * wx >= 0.0:
            dx = (px * leg - py * r) / dist2
            dy = (px * r + py * leg) / dist2
        else:
            dx = -(px * leg + py * r) / dist2
            dy = -(-px * r + py * leg) / dist2
        dp = vx * dx + vy * dy
        return dp * dx - vx, dp * dy - vy, -dy, dx
    inv = 1.0 / dt_recover
    wx = vx - px * inv
    wy = vy - py * inv
    wl = math.hypot(wx, wy)
    if wl > 0.0:
        ux = wx / wl
        uy = wy / wl
    else:
        d = math.sqrt(dist2)
        if d > 0.0:
            ux = -py / d
            uy = px / d
        else:
            ux = 1.0
            uy = 0.0
    s = r * inv - wl
    return s * ux, s * uy, ux, uy


def orca_rows(pos, radii, est, i, vx, vy, tau, dt_recover):
    """ORCA half-planes of agent ``i`` against every other agent.

    ``est[k]`` is agent i's estimate of agent k's preferred velocity and
    ``(vx, vy)`` its own preferred velocity. Rows are ``(px, py, nx, ny)``,
    anchored at ``v_pref + w / 2``.
    """
    p = _pairs(pos)
    e = _pairs(est)
    r = radii.tolist() if isinstance(radii, np.ndarray) else list(radii)
    xi, yi = p[i]
    out = []
    for k in range(len(p)):
        if k == i:
            continue
        wx, wy, nx, ny = orca_adjust(
            p[k][0] - xi, p[k][1] - yi, vx - e[k][0], vy - e[k][1], r[i] + r[k], tau, dt_recover
        )
        out.append((vx + 0.5 * wx, vy + 0.5 * wy, nx, ny))
    if not out:
        return np.empty((0, 4))
    return np.array(out, dtype=float)


# 2D LP: lines are (px, py, dx, dy) with the permitted side to the left of d.

def _lp1(lines, i, radius, ox, oy, direction_opt):
    px, py, dx, dy = lines[i]
    dot = px * dx + py * dy
    disc = dot * dot + radius * radius - (px * px + py * py)
    if disc < 0.0:
        return None
    s = math.sqrt(disc)
    t_left = -dot - s
    t_right = -dot + s
    for j in range(i):
        qx, qy, ex, ey = lines[j]
        denom = dx * ey - dy * ex
        numer = ex * (py - qy) - ey * (px - qx)
        if abs(denom) <= LP_EPS:
            if numer < 0.0:
                return None
            continue
        t = numer / denom
        if denom >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return None
    if direction_opt:
        t = t_right if ox * dx + oy * dy > 0.0 else t_left
    else:
        t = dx * (ox - px) + dy * (oy - py)
        if t < t_left:
            t = t_left
        elif t > t_right:
            t = t_right
    return px + t * dx, py + t * dy


def _lp2(lines, radius, ox, oy, direction_opt):
    if direction_opt:
        rx, ry = ox * radius, oy * radius
    else:
        n2 = ox * ox + oy * oy
        if n2 > radius * radius:
            k = radius / math.sqrt(n2)
            rx, ry = ox * k, oy * k
        else:
            rx, ry = ox, oy
    for i, (px, py, dx, dy) in enumerate(lines):
        if dx * (py - ry) - dy * (px - rx) > 0.0:
            res = _lp1(lines, i, radius, ox, oy, direction_opt)
            if res is None:
                return i, rx, ry
            rx, ry = res
    return len(lines), rx, ry


def _lp3(lines, n_fixed, begin, radius, rx, ry):
    distance = 0.0
    for i in range(begin, len(lines)):
        px, py, dx, dy = lines[i]
        if dx * (py - ry) - dy * (px - rx) > distance:
            proj = list(lines[:n_fixed])
            for j in range(n_fixed, i):
                qx, qy, ex, ey = lines[j]
                det = dx * ey - dy * ex
                if abs(det) <= LP_EPS:
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
                bl = math.hypot(bx, by)
                proj.append((ax, ay, bx / bl, by / bl))
            fail, sx, sy = _lp2(proj, radius, -dy, dx, True)
            if fail == len(proj):
                rx, ry = sx, sy
            distance = dx * (py - ry) - dy * (px - rx)
    return rx, ry


def solve_lp(halfplanes, n_fixed, vmax, pref_x, pref_y):
    """Velocity in D(0, vmax) nearest ``pref`` satisfying every half-plane.

    ``halfplanes`` rows are ``(px, py, nx, ny)``: permitted where
    ``(v - p) . n >= 0``. The first ``n_fixed`` rows are never relaxed. If the
    program is infeasible, returns the velocity minimising the largest
    violation of the remaining rows. Returns ``(vx, vy, feasible)``.
    """
    lines = [(p[0], p[1], p[3], -p[2]) for p in _pairs_rows(halfplanes)]
    fail, rx, ry = _lp2(lines, vmax, pref_x, pref_y, False)
    if fail < len(lines):
        rx, ry = _lp3(lines, n_fixed, fail, vmax, rx, ry)
        return rx, ry, False
    return rx, ry, True


def _pairs_rows(a):
    if isinstance(a, np.ndarray):
        return a.tolist()
    return [tuple(float(v) for v in row) for row in a]


def pair_clearance(start, end, radii):
    """Closed-form minimum over the step of |x_i - x_j| - (r_i + r_j), all pairs i < j.

    Positions move linearly from ``start`` to ``end``.
    """
    p0 = _pairs(start)
    p1 = _pairs(end)
    r = radii.tolist() if isinstance(radii, np.ndarray) else list(radii)
    n = len(p0)
    out = np.empty(n * (n - 1) // 2)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = p0[j][0] - p0[i][0]
            dy = p0[j][1] - p0[i][1]
            ex = (p1[j][0] - p1[i][0]) - dx
            ey = (p1[j][1] - p1[i][1]) - dy
            e2 = ex * ex + ey * ey
            s = 0.0
            if e2 > 0.0:
                s = -(dx * ex + dy * ey) / e2
                if s < 0.0:
                    s = 0.0
                elif s > 1.0:
                    s = 1.0
            out[k] = math.hypot(dx + s * ex, dy + s * ey) - (r[i] + r[j])
            k += 1
    return out
