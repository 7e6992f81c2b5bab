"""Pairwise winding of curves: polar angles, unwrapping, and net winding numbers.

The turning-point-aware winding of two curves is the sum over pairs of
z-monotone segments of sigma(x_i)*sigma(y_j)/(2*pi) times the angle swept by
the horizontal separation vector over the mutual z-range of the pair.  Sweeps
are evaluated exactly per common-z chord via atan2(cross, dot), which is the
converged limit of resample-and-unwrap: between adjacent stations both curves
move linearly in z, so the separation vector moves linearly and cannot sweep
pi or more unless the curves touch.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPointsError, UndersampledAngleError
from .fieldline import partition_monotone, segment_vertices

TWO_PI = 2.0 * np.pi


def polar_angle(x, y):
    """Polar angle of x - y in the horizontal plane, branch (-pi, pi].

    The angle is measured from the +x axis; coincident points are an error.
    """
    r1 = float(x[0]) - float(y[0])
    r2 = float(x[1]) - float(y[1])
    if r1 == 0.0 and r2 == 0.0:
        raise CoincidentPointsError(f"points coincide at {tuple(x)}")
    theta = np.arctan2(r2, r1)
    if theta == -np.pi:
        theta = np.pi
    return float(theta)


def _wrap(d):
    """Wrap an angle difference into [-pi, pi)."""
    return (d + np.pi) % TWO_PI - np.pi


def unwrap(series):
    """Continuous angle series from raw (-pi, pi] samples.

    The first element is returned unchanged; each successive difference is
    the wrapped difference of the raw samples, which must be smaller than pi
    in magnitude.  A jump of exactly pi (antipodal consecutive samples) means
    the series is undersampled and raises, naming the offending index.
    """
    a = np.asarray(series, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("need a non-empty 1D angle series")
    d = _wrap(np.diff(a))
    bad = np.nonzero(np.abs(d) >= np.pi)[0]
    if bad.size:
        raise UndersampledAngleError(int(bad[0]))
    out = np.empty_like(a)
    out[0] = a[0]
    out[1:] = a[0] + np.cumsum(d)
    return out


@dataclass(frozen=True)
class WindingResult:
    """Net winding L in turns plus the per-segment-pair breakdown.

    contributions holds ((i, j), sigma_product, swept_angle_radians) and
    L * 2*pi equals the sum of sigma_product * swept_angle exactly as summed.
    """

    L: float
    contributions: tuple

    @property
    def full_turns(self):
        return int(self.L)


def _chord_sweeps(r):
    """Signed angle swept between consecutive separation vectors r[k] -> r[k+1].

    Exact for linear motion of r; |sweep| < pi always.  A chord passing
    through the origin (antiparallel endpoints) means the curves touch
    between stations.
    """
    if (np.abs(r).sum(axis=1) == 0.0).any():
        raise CoincidentPointsError("curves touch at a shared height")
    cross = r[:-1, 0] * r[1:, 1] - r[:-1, 1] * r[1:, 0]
    dot = r[:-1, 0] * r[1:, 0] + r[:-1, 1] * r[1:, 1]
    if ((cross == 0.0) & (dot < 0.0)).any():
        raise CoincidentPointsError("curves cross at a shared height between samples")
    return np.arctan2(cross, dot)


def _monotone_block(curve, seg=None):
    """Vertex array of a monotone run, oriented with increasing z."""
    v = curve.vertices if seg is None else segment_vertices(curve, seg)
    if v[0, 2] > v[-1, 2]:
        v = v[::-1]
    return v


def _sweep_over_range(v1, v2, z_lo, z_hi):
    """Angle swept by (curve1 - curve2) over [z_lo, z_hi], both blocks rising in z.

    Both curves are resampled at the union of their vertex heights clipped to
    the range (plus the exact range endpoints); positions interpolate
    linearly in z within each chord.
    """
    z1 = v1[:, 2]
    z2 = v2[:, 2]
    zs = np.concatenate([z1[(z1 > z_lo) & (z1 < z_hi)],
                         z2[(z2 > z_lo) & (z2 < z_hi)],
                         [z_lo, z_hi]])
    zs = np.unique(zs)
    p1 = np.column_stack([np.interp(zs, z1, v1[:, 0]), np.interp(zs, z1, v1[:, 1])])
    p2 = np.column_stack([np.interp(zs, z2, v2[:, 0]), np.interp(zs, z2, v2[:, 1])])
    return float(np.sum(_chord_sweeps(p1 - p2)))


def winding_monotone(c1, c2):
    """Winding of two z-monotone curves over their mutual height range.

    Curves may be supplied rising or falling; they are oriented rising first.
    An empty mutual range gives L = 0 with no contributions.
    """
    for c in (c1, c2):
        segs = partition_monotone(c)
        if len(segs) != 1 or segs[0].sigma == 0:
            raise ValueError("curve is not strictly z-monotone")
    v1 = _monotone_block(c1)
    v2 = _monotone_block(c2)
    z_lo = max(v1[0, 2], v2[0, 2])
    z_hi = min(v1[-1, 2], v2[-1, 2])
    if z_hi <= z_lo:
        return WindingResult(0.0, ())
    sweep = _sweep_over_range(v1, v2, z_lo, z_hi)
    return WindingResult(sweep / TWO_PI, (((0, 0), 1, sweep),))


def winding_general(c1, c2):
    """Turning-point-aware net winding of two arbitrary curves.

    Both curves are partitioned into z-monotone segments; every segment pair
    with a non-empty mutual z-range contributes sigma*sigma times the angle
    swept over that range, with the range endpoints evaluated exactly (this
    is what reproduces the distributional turning-point jumps of grouped
    calculations once all pairs are summed).  Horizontal (sigma = 0) segments
    carry zero weight.
    """
    segs1 = partition_monotone(c1)
    segs2 = partition_monotone(c2)
    contributions = []
    total = 0.0
    for i, s1 in enumerate(segs1):
        if s1.sigma == 0:
            continue
        v1 = _monotone_block(c1, s1)
        for j, s2 in enumerate(segs2):
            if s2.sigma == 0:
                continue
            v2 = _monotone_block(c2, s2)
            z_lo = max(v1[0, 2], v2[0, 2])
            z_hi = min(v1[-1, 2], v2[-1, 2])
            if z_hi <= z_lo:
                continue
            sweep = _sweep_over_range(v1, v2, z_lo, z_hi)
            ss = s1.sigma * s2.sigma
            contributions.append(((i, j), ss, sweep))
            total += ss * sweep
    return WindingResult(total / TWO_PI, tuple(contributions))


def footpoint_winding(c, footpoint, footpoint_height, sigma_f):
    """Winding of a curve about a vertical line anchored at a footpoint.

    The vertical surrogate line spans [0, footpoint_height] and carries the
    sign sigma_f of the field direction it stands in for.  The value is
    sigma_f times the total angle swept by the curve's horizontal projection
    about the footpoint, in turns.  Sections of the curve above the surrogate
    enter through their clamped-height limit, which contributes exactly the
    swept angle of the excursion: the distributional jump of grouped
    turning-point calculations is therefore built in, and the value does not
    depend on footpoint_height (kept for interface symmetry and validation).
    """
    if sigma_f not in (-1, 1):
        raise ValueError("sigma_f must be +1 or -1")
    if footpoint_height <= 0:
        raise ValueError("footpoint height must be positive")
    fp = np.asarray(footpoint, float)
    r = c.vertices[:, :2] - fp[None, :]
    sweeps = _chord_sweeps(r)
    total = float(sigma_f) * float(np.sum(sweeps))
    return WindingResult(total / TWO_PI, (((0, 0), int(sigma_f), float(np.sum(sweeps))),))
