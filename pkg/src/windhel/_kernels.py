"""Numba kernels for the O(N^2) pairwise reductions and field-line stepping.

Every pairwise kernel writes one partial sum per row into a caller-supplied
array; rows are independent (safe under prange) and the caller reduces them
serially, so results are bit-identical across runs and thread counts.
fastmath stays off: the dual-route identities rely on IEEE arithmetic.
"""

import numpy as np
from numba import njit, prange

# termination reason codes shared with fieldline.py
RUNNING = 0
EXIT_TOP = 1
EXIT_BOTTOM = 2
EXIT_SIDE = 3
NULL = 4
CLOSED_LOOP = 5
MAX_STEPS = 6


@njit(parallel=True, cache=True)
def pair_rows(px, py, bx, by, bz, out):
    """Row sums over unordered pairs of B(x).(B(y) x (x-y))/|x-y|^2.

    out[i] accumulates pairs (i, j) with j > i only; the ordered double sum
    is exactly twice the total because the kernel is symmetric term by term.
    """
    n = px.size
    for i in prange(n):
        acc = 0.0
        x1 = px[i]; x2 = py[i]
        bxi = bx[i]; byi = by[i]; bzi = bz[i]
        for j in range(i + 1, n):
            r1 = x1 - px[j]
            r2 = x2 - py[j]
            rr = r1 * r1 + r2 * r2
            acc += (r1 * (byi * bz[j] - bzi * by[j])
                    - r2 * (bxi * bz[j] - bzi * bx[j])) / rr
        out[i] = acc


@njit(parallel=True, cache=True)
def pair_rows_labeled(px, py, bx, by, bz, lab, row_buckets, row_total):
    """Like pair_rows but routes each unordered pair into the label bucket of j.

    lab holds non-negative labels only (excluded cells are filtered out by the
    caller).  row_buckets has shape (n, nlabels); row_total[i] is the plain
    row sum used for the independent reconstruction check.
    """
    n = px.size
    for i in prange(n):
        x1 = px[i]; x2 = py[i]
        bxi = bx[i]; byi = by[i]; bzi = bz[i]
        tot = 0.0
        for j in range(i + 1, n):
            r1 = x1 - px[j]
            r2 = x2 - py[j]
            rr = r1 * r1 + r2 * r2
            k = (r1 * (byi * bz[j] - bzi * by[j])
                 - r2 * (bxi * bz[j] - bzi * bx[j])) / rr
            row_buckets[i, lab[j]] += k
            tot += k
        row_total[i] = tot


@njit(parallel=True, cache=True)
def gauge_rows(px, py, bx, by, bz, a1, a2, a3):
    """Per-sample winding-gauge sums (1/dA units): A_i = sum_j B_j x r_ij / |r_ij|^2."""
    n = px.size
    for i in prange(n):
        s1 = 0.0; s2 = 0.0; s3 = 0.0
        x1 = px[i]; x2 = py[i]
        for j in range(n):
            if j == i:
                continue
            r1 = x1 - px[j]
            r2 = x2 - py[j]
            rr = r1 * r1 + r2 * r2
            s1 += -bz[j] * r2 / rr
            s2 += bz[j] * r1 / rr
            s3 += (bx[j] * r2 - by[j] * r1) / rr
        a1[i] = s1; a2[i] = s2; a3[i] = s3


@njit(parallel=True, cache=True)
def gauge_rows_cross(tpx, tpy, tidx, spx, spy, sbx, sby, sbz, sidx, a1, a2, a3):
    """Gauge sums of a source field evaluated at target cells of another field.

    tidx/sidx are flat slice indices; a source coinciding with a target cell
    is excluded (same principal-value convention as the self kernel).
    """
    n = tpx.size
    m = spx.size
    for i in prange(n):
        s1 = 0.0; s2 = 0.0; s3 = 0.0
        x1 = tpx[i]; x2 = tpy[i]
        ti = tidx[i]
        for j in range(m):
            if sidx[j] == ti:
                continue
            r1 = x1 - spx[j]
            r2 = x2 - spy[j]
            rr = r1 * r1 + r2 * r2
            s1 += -sbz[j] * r2 / rr
            s2 += sbz[j] * r1 / rr
            s3 += (sbx[j] * r2 - sby[j] * r1) / rr
        a1[i] = s1; a2[i] = s2; a3[i] = s3


@njit(parallel=True, cache=True)
def gauge_at_targets(tx, ty, spx, spy, sbx, sby, sbz, half_dx, half_dy, a1, a2, a3):
    """Gauge sums at arbitrary target points, excluding the cell containing each target."""
    n = tx.size
    m = spx.size
    for i in prange(n):
        s1 = 0.0; s2 = 0.0; s3 = 0.0
        x1 = tx[i]; x2 = ty[i]
        for j in range(m):
            r1 = x1 - spx[j]
            r2 = x2 - spy[j]
            if abs(r1) < half_dx and abs(r2) < half_dy:
                continue
            rr = r1 * r1 + r2 * r2
            s1 += -sbz[j] * r2 / rr
            s2 += sbz[j] * r1 / rr
            s3 += (sbx[j] * r2 - sby[j] * r1) / rr
        a1[i] = s1; a2[i] = s2; a3[i] = s3


@njit(parallel=True, cache=True)
def flux_pair_rows(px, py, wx, wy, bz, out):
    """Row sums of the footpoint-velocity winding-rate kernel.

    K = [r1 (wy_i - wy_j) - r2 (wx_i - wx_j)] / |r|^2 * Bz_i Bz_j, over
    unordered pairs (j > i).
    """
    n = px.size
    for i in prange(n):
        acc = 0.0
        x1 = px[i]; x2 = py[i]
        wxi = wx[i]; wyi = wy[i]; bzi = bz[i]
        for j in range(i + 1, n):
            r1 = x1 - px[j]
            r2 = x2 - py[j]
            rr = r1 * r1 + r2 * r2
            acc += (r1 * (wyi - wy[j]) - r2 * (wxi - wx[j])) / rr * bzi * bz[j]
        out[i] = acc


@njit(parallel=True, cache=True)
def flux_pair_rows_labeled(px, py, wx, wy, bz, lab, row_buckets, row_total):
    n = px.size
    for i in prange(n):
        x1 = px[i]; x2 = py[i]
        wxi = wx[i]; wyi = wy[i]; bzi = bz[i]
        tot = 0.0
        for j in range(i + 1, n):
            r1 = x1 - px[j]
            r2 = x2 - py[j]
            rr = r1 * r1 + r2 * r2
            k = (r1 * (wyi - wy[j]) - r2 * (wxi - wx[j])) / rr * bzi * bz[j]
            row_buckets[i, lab[j]] += k
            tot += k
        row_total[i] = tot


# ---------------------------------------------------------------------------
# Field-line stepping

@njit(cache=True)
def _interp_clamped(arr, fx, fy, fz, nx, ny, nz):
    """Trilinear interpolation with coordinates clamped into the box.

    Clamping only affects Runge-Kutta stage points that poke marginally
    outside; trajectory termination is decided on positions, not here.
    """
    if fx < 0.0:
        fx = 0.0
    elif fx > nx - 1:
        fx = nx - 1.0
    if fy < 0.0:
        fy = 0.0
    elif fy > ny - 1:
        fy = ny - 1.0
    if fz < 0.0:
        fz = 0.0
    elif fz > nz - 1:
        fz = nz - 1.0
    i = int(fx)
    j = int(fy)
    k = int(fz)
    if i > nx - 2:
        i = nx - 2
    if j > ny - 2:
        j = ny - 2
    if k > nz - 2:
        k = nz - 2
    tx = fx - i
    ty = fy - j
    tz = fz - k
    c00 = arr[k, j, i] * (1 - tx) + arr[k, j, i + 1] * tx
    c01 = arr[k, j + 1, i] * (1 - tx) + arr[k, j + 1, i + 1] * tx
    c10 = arr[k + 1, j, i] * (1 - tx) + arr[k + 1, j, i + 1] * tx
    c11 = arr[k + 1, j + 1, i] * (1 - tx) + arr[k + 1, j + 1, i + 1] * tx
    return (c00 * (1 - ty) + c01 * ty) * (1 - tz) + (c10 * (1 - ty) + c11 * ty) * tz


@njit(cache=True)
def _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz, x, y, z, sgn, eps_abs):
    fx = (x - ox) / dx
    fy = (y - oy) / dy
    fz = (z - oz) / dz
    vx = _interp_clamped(bx, fx, fy, fz, nx, ny, nz)
    vy = _interp_clamped(by, fx, fy, fz, nx, ny, nz)
    vz = _interp_clamped(bz, fx, fy, fz, nx, ny, nz)
    norm = np.sqrt(vx * vx + vy * vy + vz * vz)
    if norm < eps_abs:
        return 0.0, 0.0, 0.0, False
    return sgn * vx / norm, sgn * vy / norm, sgn * vz / norm, True


@njit(cache=True)
def _exit_clip(x0, y0, z0, x1, y1, z1, xlo, xhi, ylo, yhi, zlo, zhi):
    """Clip the chord (p0, p1) to the box; return (t, face) of the first exit.

    Faces: 1 top (z=zhi), 2 bottom (z=zlo), 3 any side.
    """
    t = 2.0
    face = 0
    if z1 > zhi:
        tt = (zhi - z0) / (z1 - z0)
        if tt < t:
            t = tt; face = EXIT_TOP
    if z1 < zlo:
        tt = (zlo - z0) / (z1 - z0)
        if tt < t:
            t = tt; face = EXIT_BOTTOM
    if x1 > xhi:
        tt = (xhi - x0) / (x1 - x0)
        if tt < t:
            t = tt; face = EXIT_SIDE
    if x1 < xlo:
        tt = (xlo - x0) / (x1 - x0)
        if tt < t:
            t = tt; face = EXIT_SIDE
    if y1 > yhi:
        tt = (yhi - y0) / (y1 - y0)
        if tt < t:
            t = tt; face = EXIT_SIDE
    if y1 < ylo:
        tt = (ylo - y0) / (y1 - y0)
        if tt < t:
            t = tt; face = EXIT_SIDE
    return t, face


@njit(cache=True)
def trace_path(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
               sx, sy, sz, sgn, step, max_steps, eps_abs, check_loop, path):
    """Fixed-step RK4 integration of dx/ds = sgn * B/|B| from a seed.

    Fills path (max_steps+1, 3); returns (vertex_count, reason).  The final
    vertex lies on the box boundary for exit terminations.
    """
    xlo = ox; xhi = ox + (nx - 1) * dx
    ylo = oy; yhi = oy + (ny - 1) * dy
    zlo = oz; zhi = oz + (nz - 1) * dz
    x = sx; y = sy; z = sz
    path[0, 0] = x; path[0, 1] = y; path[0, 2] = z
    count = 1
    for istep in range(max_steps):
        v1x, v1y, v1z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x, y, z, sgn, eps_abs)
        if not ok:
            return count, NULL
        h2 = 0.5 * step
        v2x, v2y, v2z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x + h2 * v1x, y + h2 * v1y, z + h2 * v1z, sgn, eps_abs)
        if not ok:
            return count, NULL
        v3x, v3y, v3z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x + h2 * v2x, y + h2 * v2y, z + h2 * v2z, sgn, eps_abs)
        if not ok:
            return count, NULL
        v4x, v4y, v4z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x + step * v3x, y + step * v3y, z + step * v3z, sgn, eps_abs)
        if not ok:
            return count, NULL
        xn = x + (step / 6.0) * (v1x + 2 * v2x + 2 * v3x + v4x)
        yn = y + (step / 6.0) * (v1y + 2 * v2y + 2 * v3y + v4y)
        zn = z + (step / 6.0) * (v1z + 2 * v2z + 2 * v3z + v4z)
        if xn < xlo or xn > xhi or yn < ylo or yn > yhi or zn < zlo or zn > zhi:
            t, face = _exit_clip(x, y, z, xn, yn, zn, xlo, xhi, ylo, yhi, zlo, zhi)
            path[count, 0] = x + t * (xn - x)
            path[count, 1] = y + t * (yn - y)
            path[count, 2] = z + t * (zn - z)
            count += 1
            return count, face
        x = xn; y = yn; z = zn
        path[count, 0] = x; path[count, 1] = y; path[count, 2] = z
        count += 1
        if check_loop and istep >= 2:
            ddx = x - sx; ddy = y - sy; ddz = z - sz
            if ddx * ddx + ddy * ddy + ddz * ddz < 0.25 * step * step:
                return count, CLOSED_LOOP
    return count, MAX_STEPS


@njit(cache=True)
def _trace_endpoint(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                    sx, sy, sz, sgn, step, max_steps, eps_abs):
    """Endpoint-only variant of trace_path (no path storage)."""
    xlo = ox; xhi = ox + (nx - 1) * dx
    ylo = oy; yhi = oy + (ny - 1) * dy
    zlo = oz; zhi = oz + (nz - 1) * dz
    x = sx; y = sy; z = sz
    for _ in range(max_steps):
        v1x, v1y, v1z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x, y, z, sgn, eps_abs)
        if not ok:
            return NULL
        h2 = 0.5 * step
        v2x, v2y, v2z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x + h2 * v1x, y + h2 * v1y, z + h2 * v1z, sgn, eps_abs)
        if not ok:
            return NULL
        v3x, v3y, v3z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x + h2 * v2x, y + h2 * v2y, z + h2 * v2z, sgn, eps_abs)
        if not ok:
            return NULL
        v4x, v4y, v4z, ok = _direction(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                       x + step * v3x, y + step * v3y, z + step * v3z, sgn, eps_abs)
        if not ok:
            return NULL
        xn = x + (step / 6.0) * (v1x + 2 * v2x + 2 * v3x + v4x)
        yn = y + (step / 6.0) * (v1y + 2 * v2y + 2 * v3y + v4y)
        zn = z + (step / 6.0) * (v1z + 2 * v2z + 2 * v3z + v4z)
        if xn < xlo or xn > xhi or yn < ylo or yn > yhi or zn < zlo or zn > zhi:
            _, face = _exit_clip(x, y, z, xn, yn, zn, xlo, xhi, ylo, yhi, zlo, zhi)
            return face
        x = xn; y = yn; z = zn
    return MAX_STEPS


@njit(parallel=True, cache=True)
def endpoints_batch(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                    pts, step, max_steps, eps_abs, out):
    """Trace both directions from each point; out[i] = (forward, backward) reasons."""
    n = pts.shape[0]
    for i in prange(n):
        out[i, 0] = _trace_endpoint(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                    pts[i, 0], pts[i, 1], pts[i, 2], 1.0,
                                    step, max_steps, eps_abs)
        out[i, 1] = _trace_endpoint(bx, by, bz, ox, oy, oz, dx, dy, dz, nx, ny, nz,
                                    pts[i, 0], pts[i, 1], pts[i, 2], -1.0,
                                    step, max_steps, eps_abs)
