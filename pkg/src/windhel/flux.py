"""Helicity flux through a plane: time-integrated totals, self/mutual split,
and the space-time C-field diagnostic.

The flux kernel is the time analogue of the winding-rate kernel,

    dtheta/dt = [r1 (w2(x) - w2(y)) - r2 (w1(x) - w1(y))] / |r|^2,

built from footpoint-velocity differences, so no tracking of intersection
points across frames is needed.  The time-integrated flux carries a leading
minus sign; the stack of planes [0, T] plays the role the slice stack [0, h]
plays for a static field, one mapping onto the other under t <-> z with an
orientation flip.
"""

import json
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import FieldFormatError
from .grid import EPS_BZ_DEFAULT, slice_at
from .helicity import HelicityReport

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PlaneGrid:
    """Uniform 2D sample grid of the boundary plane."""

    nx: int
    ny: int
    dx: float
    dy: float
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        if min(self.nx, self.ny) < 2 or min(self.dx, self.dy) <= 0:
            raise ValueError("plane grid needs nx, ny >= 2 and positive spacings")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))


@dataclass(frozen=True)
class PlanarSeries:
    """Time series of B_z and footpoint velocity w on a plane.

    bz, wx, wy have shape (ntimes, ny, nx); NaN in wx/wy marks cells where
    the footpoint velocity is undefined (those are excluded from the pair
    sums with their |B_z| weight reported).  labels, when present, routes the
    self/mutual decomposition and uses the RegionMask conventions.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    origin: tuple
    times: np.ndarray = field(repr=False)
    bz: np.ndarray = field(repr=False)
    wx: np.ndarray = field(repr=False)
    wy: np.ndarray = field(repr=False)
    labels: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, float)
        if t.ndim != 1 or t.size < 2 or (np.diff(t) <= 0).any():
            raise ValueError("times must be strictly increasing with at least 2 entries")
        shape = (t.size, self.ny, self.nx)
        for name in ("bz", "wx", "wy"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if a.shape != shape:
                raise ValueError(f"{name} has shape {a.shape}, expected {shape}")
            object.__setattr__(self, name, a)
        if not np.isfinite(self.bz).all():
            raise ValueError("B_z maps must be finite")
        object.__setattr__(self, "times", t)
        if self.labels is not None:
            lab = np.ascontiguousarray(self.labels, dtype=np.int32)
            if lab.shape != shape:
                raise ValueError(f"labels have shape {lab.shape}, expected {shape}")
            object.__setattr__(self, "labels", lab)

    @property
    def ntimes(self):
        return self.times.size

    def slice_xy(self):
        xs = self.origin[0] + self.dx * np.arange(self.nx)
        ys = self.origin[1] + self.dy * np.arange(self.ny)
        Y, X = np.meshgrid(ys, xs, indexing="ij")
        return X, Y

    def reversed(self):
        """Time-reversed series: t -> T - t, maps reversed, velocities negated."""
        T = self.times[-1]
        lab = None if self.labels is None else self.labels[::-1].copy()
        return PlanarSeries(self.nx, self.ny, self.dx, self.dy, self.origin,
                            (T - self.times)[::-1].copy(),
                            self.bz[::-1].copy(), -self.wx[::-1], -self.wy[::-1],
                            labels=lab)


@dataclass(frozen=True)
class CFieldSlice:
    """Space-time vector C = E x e_t + B_z e_t on the plane at one instant."""

    cx: np.ndarray = field(repr=False)
    cy: np.ndarray = field(repr=False)
    ct: np.ndarray = field(repr=False)
    div_residual: float = None


def footpoint_velocity(u, B, eps_bz=EPS_BZ_DEFAULT):
    """Apparent in-plane velocity of field-line footpoints, w = u_P - (u_z/B_z) B_P.

    u and B are (ux, uy, uz) and (bx, by, bz) map triples on the plane.
    Cells with |B_z| <= eps_bz * max|B_z| get NaN (undefined) and are
    excluded downstream with their |B_z| weight reported.
    """
    ux, uy, uz = (np.asarray(a, float) for a in u)
    bx, by, bz = (np.asarray(a, float) for a in B)
    if not (ux.shape == uy.shape == uz.shape == bx.shape == by.shape == bz.shape):
        raise ValueError("velocity and field maps must share one shape")
    bmax = np.abs(bz).max()
    defined = np.abs(bz) > eps_bz * bmax if bmax > 0 else np.zeros_like(bz, dtype=bool)
    wx = np.full(bz.shape, np.nan)
    wy = np.full(bz.shape, np.nan)
    ratio = np.zeros_like(bz)
    np.divide(uz, bz, out=ratio, where=defined)
    wx[defined] = ux[defined] - ratio[defined] * bx[defined]
    wy[defined] = uy[defined] - ratio[defined] * by[defined]
    return wx, wy


def c_field(u, B, dx, dy, bz_stencil=None):
    """The divergence-free space-time vector C = E x e_t + B_z e_t, E = -u x B.

    Componentwise C = (E_y, -E_x, B_z).  If bz_stencil = (bz_before,
    bz_after, dt) is given, div_residual is the maximum over interior cells
    of |dC_x/dx + dC_y/dy + dB_z/dt| by centred differences (the space-time
    divergence, which vanishes by Faraday's law for consistent data);
    otherwise div_residual is None.
    """
    ux, uy, uz = (np.asarray(a, float) for a in u)
    bx, by, bz = (np.asarray(a, float) for a in B)
    ex = -(uy * bz - uz * by)
    ey = -(uz * bx - ux * bz)
    cx = ey
    cy = -ex
    ct = bz
    residual = None
    if bz_stencil is not None:
        bz_before, bz_after, dt = bz_stencil
        dbzdt = (np.asarray(bz_after, float) - np.asarray(bz_before, float)) / (2.0 * dt)
        div = ((cx[1:-1, 2:] - cx[1:-1, :-2]) / (2.0 * dx)
               + (cy[2:, 1:-1] - cy[:-2, 1:-1]) / (2.0 * dy)
               + dbzdt[1:-1, 1:-1])
        residual = float(np.abs(div).max())
    return CFieldSlice(cx, cy, ct, residual)


def _t_weights(times):
    w = np.empty(times.size)
    dt = np.diff(times)
    w[0] = 0.5 * dt[0]
    w[-1] = 0.5 * dt[-1]
    if times.size > 2:
        w[1:-1] = 0.5 * (dt[:-1] + dt[1:])
    return w


def _active_time(series, it):
    bz = series.bz[it].ravel()
    wx = series.wx[it].ravel()
    wy = series.wy[it].ravel()
    defined = np.isfinite(wx) & np.isfinite(wy)
    act = (bz != 0.0) & defined
    skipped = (bz != 0.0) & ~defined
    idx = np.nonzero(act)[0]
    X, Y = series.slice_xy()
    return (X.ravel()[idx], Y.ravel()[idx], wx[idx], wy[idx], bz[idx], idx,
            float(np.abs(bz[skipped]).sum()) if skipped.any() else 0.0)


def flux_total(series):
    """Time-integrated helicity flux through the plane (leading minus included).

    -(1/2pi) sum_t w_t sum_{pairs} dtheta/dt * B_z(x) B_z(y) dA^2 with
    trapezoidal weights in time.  Cells with undefined w but nonzero B_z are
    excluded; their total |B_z| weight triggers a warning.
    """
    dA = series.dx * series.dy
    wt = _t_weights(series.times)
    per_time = []
    skipped_weight = 0.0
    for it in range(series.ntimes):
        px, py, wx, wy, bz, _, skipped = _active_time(series, it)
        skipped_weight += skipped * dA * wt[it]
        if px.size < 2:
            continue
        rows = np.zeros(px.size)
        _kernels.flux_pair_rows(px, py, wx, wy, bz, rows)
        per_time.append(2.0 * float(rows.sum()) * wt[it])
    if skipped_weight > 0:
        warnings.warn(f"excluded undefined-velocity cells with |B_z| weight {skipped_weight:.3e}")
    # exact time reduction: reversing the series negates the result exactly
    return -math.fsum(per_time) * dA * dA / TWO_PI


def flux_decompose(series):
    """Self/mutual decomposition of the time-integrated flux by the series labels.

    Same conventions as the static decomposition: label -1 cells excluded
    with reported weight, mutual stored symmetrically, total accumulated
    independently of the routing.  A change in the number of labels between
    frames warns (region identity across time is the caller's contract).
    """
    if series.labels is None:
        raise ValueError("series carries no labels; flux_decompose needs them")
    nlab = int(series.labels.max()) + 1 if (series.labels >= 0).any() else 1
    counts = set()
    for it in range(series.ntimes):
        frame = series.labels[it]
        counts.add(int(frame.max()) + 1 if (frame >= 0).any() else 0)
    if len(counts) > 1:
        warnings.warn(f"label count changes across time: {sorted(counts)}")
    dA = series.dx * series.dy
    wt = _t_weights(series.times)
    scale = dA * dA / TWO_PI
    self_acc = np.zeros(nlab)
    cross_acc = np.zeros((nlab, nlab))
    total = 0.0
    excluded = 0.0
    for it in range(series.ntimes):
        px, py, wx, wy, bz, idx, skipped = _active_time(series, it)
        excluded += skipped * dA * wt[it]
        lab = series.labels[it].ravel()[idx]
        exc = lab < 0
        if exc.any():
            excluded += float(np.abs(bz[exc]).sum()) * dA * wt[it]
        keep = ~exc
        if keep.sum() < 2:
            continue
        px = px[keep]; py = py[keep]
        wx = wx[keep]; wy = wy[keep]; bz = bz[keep]
        lab_k = np.ascontiguousarray(lab[keep], dtype=np.int64)
        rb = np.zeros((px.size, nlab))
        rt = np.zeros(px.size)
        _kernels.flux_pair_rows_labeled(px, py, wx, wy, bz, lab_k, rb, rt)
        w = wt[it] * scale
        total += 2.0 * float(rt.sum()) * w
        for a in range(nlab):
            rows_a = lab_k == a
            if not rows_a.any():
                continue
            contrib = rb[rows_a].sum(axis=0)
            self_acc[a] += 2.0 * contrib[a] * w
            for b in range(nlab):
                if b == a:
                    continue
                lo, hi = (a, b) if a < b else (b, a)
                cross_acc[lo, hi] += contrib[b] * w
    mutual = -(cross_acc + cross_acc.T)
    meta = {
        "kind": "flux",
        "grid": [series.nx, series.ny],
        "spacing": [series.dx, series.dy],
        "times": series.ntimes,
        "regions": nlab,
        "sign": "leading minus of the time-integrated flux",
        "quadrature": "midpoint in plane, trapezoid in time",
    }
    return HelicityReport(-total, {i: float(-v) for i, v in enumerate(self_acc)},
                          mutual, excluded, meta)


def series_from_field(field3, eps_bz=EPS_BZ_DEFAULT):
    """Reinterpret a static field's slice stack as a planar time series.

    Heights become times and the slope field B_perp/B_z becomes the
    footpoint velocity; flux_total of the result is minus the winding
    helicity of the field (same discrete sums reindexed, orientation flip).
    """
    g = field3.grid
    nmaps = g.nz
    bz = np.empty((nmaps, g.ny, g.nx))
    wx = np.empty_like(bz)
    wy = np.empty_like(bz)
    for k in range(nmaps):
        s = slice_at(field3, k, eps_bz=eps_bz)
        bz[k] = np.where(s.defined, s.bz, 0.0)
        wx[k] = np.where(s.defined, s.sx, np.nan)
        wy[k] = np.where(s.defined, s.sy, np.nan)
    times = g.z_coords() - g.origin[2]
    if times[0] != 0.0:
        times = times - times[0]
    return PlanarSeries(g.nx, g.ny, g.dx, g.dy, (g.origin[0], g.origin[1]),
                        times, bz, wx, wy)


# ---------------------------------------------------------------------------
# Series file I/O ("WHPS v1")

def save_series(series, path):
    """Write a WHPS v1 file: JSON header line, then per time Bz, wx, wy maps.

    Maps are little-endian float64, row-major (j then i, i fastest).
    Undefined velocities are stored as NaN.
    """
    header = {
        "format": "WHPS",
        "version": 1,
        "nx": series.nx, "ny": series.ny,
        "dx": series.dx, "dy": series.dy,
        "origin": list(series.origin),
        "times": [float(t) for t in series.times],
        "layout": ["Bz", "wx", "wy"],
    }
    blocks = [(json.dumps(header, sort_keys=True) + "\n").encode("utf-8")]
    for it in range(series.ntimes):
        for arr in (series.bz[it], series.wx[it], series.wy[it]):
            blocks.append(arr.astype("<f8").tobytes())
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(b"".join(blocks))
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_series(path):
    with open(path, "rb") as fh:
        line = fh.readline()
        if not line.endswith(b"\n"):
            raise FieldFormatError(f"{path}: missing header line")
        try:
            header = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FieldFormatError(f"{path}: malformed header: {exc}") from exc
        if header.get("format") != "WHPS" or header.get("version") != 1:
            raise FieldFormatError(f"{path}: not a WHPS v1 file")
        if header.get("layout") != ["Bz", "wx", "wy"]:
            raise FieldFormatError(f"{path}: unexpected layout")
        try:
            nx = int(header["nx"]); ny = int(header["ny"])
            dx = float(header["dx"]); dy = float(header["dy"])
            origin = tuple(header["origin"])
            times = np.asarray(header["times"], float)
        except (KeyError, TypeError, ValueError) as exc:
            raise FieldFormatError(f"{path}: malformed header: {exc}") from exc
        raw = fh.read()
    per_map = nx * ny * 8
    expected = times.size * 3 * per_map
    if len(raw) != expected:
        raise FieldFormatError(
            f"{path}: payload length mismatch (got {len(raw)} bytes, expected {expected})")
    flat = np.frombuffer(raw, dtype="<f8").reshape(times.size, 3, ny, nx)
    return PlanarSeries(nx, ny, dx, dy, origin, times,
                        flat[:, 0].copy(), flat[:, 1].copy(), flat[:, 2].copy())
