"""Closed-form thin-flux-tube helicities: L*Phi^2 self, L*Phi_i*Phi_j mutual,
and the footpoint-angle formula for two non-crossing arches."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError
from .fieldline import partition_monotone
from .winding import winding_general

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ThinTube:
    """Thin flux tube: an axis curve, a flux, and an internal twist rate (rad per unit z)."""

    axis: object
    flux: float
    twist: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.flux):
            raise ValueError("tube flux must be finite")


@dataclass(frozen=True)
class ArchAngles:
    """Footpoint angles of the two-arch geometry, signed, in (-pi, pi].

    nu is the angle subtended at the first arch's positive footpoint by the
    second arch's footpoints (swept from the positive to the negative one,
    clockwise positive); rho is the same angle at the negative footpoint.
    In the canonical non-crossing orientation both lie in [0, pi]; the sign
    carries the chirality of mirrored configurations.
    """

    nu: float
    rho: float

    def __post_init__(self):
        if not (abs(self.nu) <= math.pi and abs(self.rho) <= math.pi):
            raise ValueError("footpoint angles must lie in (-pi, pi]")


def self_helicity_thin(tube):
    """Self helicity L_self * Phi^2 of a z-monotone thin tube.

    L_self = twist * (z_top - z_bottom) / 2pi; the writhe of a bent monotone
    axis is not included (treated as zero), so for strongly curved axes the
    numerical decomposition is the authoritative value.  Non-monotone axes
    are outside this formula's regime and raise.
    """
    segs = partition_monotone(tube.axis)
    if len(segs) != 1 or segs[0].sigma == 0:
        raise RegimeError(
            "tube axis is not z-monotone; use the numerical decomposition instead")
    dz = abs(tube.axis.z[-1] - tube.axis.z[0])
    l_self = tube.twist * dz / TWO_PI
    return l_self * tube.flux**2


def mutual_helicity_thin(t_i, t_j):
    """Mutual helicity L(axis_i, axis_j) * Phi_i * Phi_j of two thin tubes."""
    result = winding_general(t_i.axis, t_j.axis)
    return result.L * t_i.flux * t_j.flux


def _wrap(d):
    return (d + math.pi) % TWO_PI - math.pi


def _segments_cross(p1, p2, p3, p4):
    """True if segments [p1, p2] and [p3, p4] intersect (touching counts)."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 \
            and d3 != 0 and d4 != 0:
        return True
    for d, a, b, c in ((d1, p3, p4, p1), (d2, p3, p4, p2),
                       (d3, p1, p2, p3), (d4, p1, p2, p4)):
        if d == 0 and on_seg(a, b, c):
            return True
    return False


def arch_angles(fp_a_pos, fp_a_neg, fp_b_pos, fp_b_neg):
    """Footpoint angles (nu, rho) of two non-crossing arches from their footpoints.

    nu = -wrap(angle(b_neg - a_pos) - angle(b_pos - a_pos)) and likewise rho
    at a_neg, both in the (-pi, pi] branch.  For a point not on the segment
    [b_pos, b_neg] the sweep is always below pi in magnitude, so the wrapped
    principal value is the exact swept angle.  Crossing footpoint segments
    are outside the formula's regime and raise.
    """
    pts = [np.asarray(p, float) for p in (fp_a_pos, fp_a_neg, fp_b_pos, fp_b_neg)]
    for i in range(4):
        for j in range(i + 1, 4):
            if np.array_equal(pts[i], pts[j]):
                raise ValueError("footpoints must be four distinct points")
    ap, am, bp, bm = pts
    if _segments_cross(ap, am, bp, bm):
        raise RegimeError("arch footprints cross; the footpoint-angle formula does not apply")

    def angle(v):
        return math.atan2(v[1], v[0])

    nu = -_wrap(angle(bm - ap) - angle(bp - ap))
    rho = -_wrap(angle(bm - am) - angle(bp - am))
    return ArchAngles(nu, rho)


def arch_mutual_helicity(angles, phi_i, phi_j):
    """Mutual helicity (rho - nu) * Phi_i * Phi_j / 2pi of two non-crossing arches."""
    return (angles.rho - angles.nu) * phi_i * phi_j / TWO_PI
