"""Closed-form test fields and curves with analytically known helicities.

These generators are the oracle suite: every field here has a helicity,
winding rate, or flux value that can be written down in closed form, so the
numerical quadratures can be checked against exact answers.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fieldline import Polyline3
from .grid import make_field


@dataclass(frozen=True)
class TubeSpec:
    """Rigid-rotor flux tube: straight vertical tube of radius R about center.

    Inside the tube B = B0 * (-tau*(y-yc), tau*(x-xc), 1), zero outside, so
    every pair of interior field lines winds at rate dtheta/dz = tau and the
    tube flux is Phi = b0 * pi * radius**2.
    """

    center: tuple
    radius: float
    b0: float = 1.0
    tau: float = 0.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("tube radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def flux(self):
        return self.b0 * math.pi * self.radius**2


@dataclass(frozen=True)
class ArchSpec:
    """Arch connecting two footpoints on z=0; semicircular unless apex is overridden."""

    footpoint_pos: tuple
    footpoint_neg: tuple
    apex_height: float = None
    flux: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.footpoint_pos, float)
        q = np.asarray(self.footpoint_neg, float)
        sep = float(np.linalg.norm(q - p))
        if sep == 0:
            raise ValueError("arch footpoints must be distinct")
        object.__setattr__(self, "footpoint_pos", (float(p[0]), float(p[1])))
        object.__setattr__(self, "footpoint_neg", (float(q[0]), float(q[1])))
        apex = self.apex_height if self.apex_height is not None else 0.5 * sep
        if apex <= 0:
            raise ValueError("apex height must be positive")
        object.__setattr__(self, "apex_height", float(apex))


@dataclass(frozen=True)
class DomeSpec:
    """Buried vertical dipole under a uniform background: a spherical separatrix dome.

    With background B0 and dipole depth d, choosing the moment m = B0*r_sphere^3/2
    makes the separatrix the part of the sphere |x - (center, -d)| = r_sphere
    above z=0.  Field lines inside return to z=0 (closed); outside they connect
    to the top plane (open).
    """

    center: tuple
    depth: float
    sphere_radius: float

    def __post_init__(self):
        if self.depth <= 0 or self.sphere_radius <= 0:
            raise ValueError("depth and sphere radius must be positive")
        if self.sphere_radius <= self.depth:
            raise ValueError("sphere must poke above the plane (radius > depth)")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def footprint_radius(self):
        return math.sqrt(self.sphere_radius**2 - self.depth**2)

    @property
    def apex_height(self):
        return self.sphere_radius - self.depth

    @property
    def cap_volume(self):
        """Volume of the dome (spherical cap above z=0)."""
        a = self.apex_height
        return math.pi * a * a * (3 * self.sphere_radius - a) / 3.0


# ---------------------------------------------------------------------------
# Helpers

def disk_coverage(X, Y, cx, cy, radius, dx, dy, nsub=32):
    """Fraction of each grid cell covered by the disk, by edge-cell subsampling.

    Cells well inside get 1, well outside 0; cells crossing the rim are
    subsampled on an nsub x nsub grid.  Keeps the discrete flux within
    O(1/nsub^2) of b0*pi*R^2 per rim cell.
    """
    d = np.hypot(X - cx, Y - cy)
    half = 0.5 * math.hypot(dx, dy)
    frac = np.where(d <= radius - half, 1.0, 0.0)
    band = (d > radius - half) & (d < radius + half)
    if band.any():
        offs = (np.arange(nsub) + 0.5) / nsub - 0.5
        oy, ox = np.meshgrid(offs * dy, offs * dx, indexing="ij")
        sx = X[band][:, None] + ox.ravel()[None, :]
        sy = Y[band][:, None] + oy.ravel()[None, :]
        frac[band] = (np.hypot(sx - cx, sy - cy) <= radius).mean(axis=1)
    return frac


def _disk_profile(X, Y, cx, cy, radius, dx, dy, edge, edge_width=None):
    if edge == "area":
        return disk_coverage(X, Y, cx, cy, radius, dx, dy)
    d = np.hypot(X - cx, Y - cy)
    if edge == "hard":
        return np.where(d <= radius, 1.0, 0.0)
    if edge == "cosine":
        # raised-cosine taper ending exactly at the rim; default one cell wide,
        # but a fixed physical width keeps the profile smooth under refinement
        w = edge_width if edge_width is not None else math.hypot(dx, dy)
        inner = radius - w
        f = np.zeros_like(d)
        f[d <= inner] = 1.0
        ramp = (d > inner) & (d < radius)
        f[ramp] = np.cos(0.5 * math.pi * (d[ramp] - inner) / w) ** 2
        return f
    raise ValueError(f"unknown edge mode {edge!r} (use 'area', 'hard' or 'cosine')")


def _check_inside_footprint(grid, cx, cy, radius, what):
    (xlo, xhi), (ylo, yhi), _ = grid.bounds()
    margin = max(grid.dx, grid.dy)
    if (cx - radius < xlo + margin or cx + radius > xhi - margin
            or cy - radius < ylo + margin or cy + radius > yhi - margin):
        raise ValueError(f"{what} does not fit inside the grid footprint with one-cell margin")


# ---------------------------------------------------------------------------
# Field generators

def uniform_vertical(grid, b0):
    """B = (0, 0, b0) everywhere; all winding helicities vanish."""
    z = np.zeros(grid.shape)
    return make_field(grid, z, z.copy(), np.full(grid.shape, float(b0)))


def twisted_tube(grid, spec, edge="area", edge_width=None):
    """Rigid-rotor tube field; exact self winding L = tau*h/(2*pi).

    The edge mode controls the rim cells only: 'area' weights them by covered
    fraction (keeps the discrete flux at b0*pi*R^2 to high order), 'hard' is a
    binary cut at the rim, 'cosine' a one-cell raised-cosine taper.  The slope
    field B_perp/B_z is the same rigid rotation in all three modes, so the
    winding rate between any two interior field lines is tau regardless.
    """
    cx, cy = spec.center
    _check_inside_footprint(grid, cx, cy, spec.radius, "tube cross-section")
    X, Y = grid.slice_xy()
    f = _disk_profile(X, Y, cx, cy, spec.radius, grid.dx, grid.dy, edge, edge_width)
    bz2 = spec.b0 * f
    bx2 = -spec.tau * (Y - cy) * bz2
    by2 = spec.tau * (X - cx) * bz2
    shape = grid.shape
    return make_field(grid,
                      np.broadcast_to(bx2, shape).copy(),
                      np.broadcast_to(by2, shape).copy(),
                      np.broadcast_to(bz2, shape).copy())


def double_helix_pair(grid, spec_i, spec_j, turns, edge="area", edge_width=None):
    """Two internally untwisted tubes whose axes co-rotate about their centroid.

    The axis of each tube follows a_i(z) = c + Rot(2*pi*turns*z/h) (a_i0 - c)
    about the common centroid c, and each cross-section translates rigidly
    with its axis: B_perp = B_z * da_i/dz uniformly over the section.  Pairs
    within one tube therefore never rotate (self winding exactly 0) while
    every cross pair completes exactly `turns` rotations between the planes,
    giving mutual helicity turns * Phi_i * Phi_j per ordered pair.
    """
    c1 = np.asarray(spec_i.center, float)
    c2 = np.asarray(spec_j.center, float)
    sep = float(np.linalg.norm(c1 - c2))
    if sep <= spec_i.radius + spec_j.radius:
        raise ValueError("tubes overlap at some height (separation <= R_i + R_j)")
    centroid = 0.5 * (c1 + c2)
    h = grid.height
    omega = 2.0 * math.pi * turns / h
    orbit = max(np.linalg.norm(c1 - centroid), np.linalg.norm(c2 - centroid))
    _check_inside_footprint(grid, centroid[0], centroid[1],
                            orbit + max(spec_i.radius, spec_j.radius), "helix pair orbit")
    X, Y = grid.slice_xy()
    bx = np.empty(grid.shape)
    by = np.empty(grid.shape)
    bz = np.empty(grid.shape)
    zs = grid.z_coords() - grid.origin[2]
    for k, z in enumerate(zs):
        phi = omega * z
        rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        bz_k = np.zeros((grid.ny, grid.nx))
        bx_k = np.zeros_like(bz_k)
        by_k = np.zeros_like(bz_k)
        for spec, c0 in ((spec_i, c1), (spec_j, c2)):
            a = centroid + rot @ (c0 - centroid)
            vel = omega * np.array([-(a[1] - centroid[1]), a[0] - centroid[0]])
            f = _disk_profile(X, Y, a[0], a[1], spec.radius, grid.dx, grid.dy, edge,
                              edge_width)
            bzt = spec.b0 * f
            bz_k += bzt
            bx_k += vel[0] * bzt
            by_k += vel[1] * bzt
        bx[k] = bx_k
        by[k] = by_k
        bz[k] = bz_k
    return make_field(grid, bx, by, bz)


def dome_field(grid, b0, domes):
    """Uniform background b0 plus one buried dipole per DomeSpec.

    Divergence-free in closed form.  For a single dome the separatrix is
    exactly the sphere of DomeSpec; for several well-separated domes the
    structure persists to good approximation and the open/closed labelling
    is done numerically anyway.
    """
    if isinstance(domes, DomeSpec):
        domes = [domes]
    X, Y = grid.slice_xy()
    zs = grid.z_coords()
    bx = np.zeros(grid.shape)
    by = np.zeros(grid.shape)
    bz = np.full(grid.shape, float(b0))
    for dome in domes:
        m = 0.5 * b0 * dome.sphere_radius**3
        DX = X - dome.center[0]
        DY = Y - dome.center[1]
        r2 = DX * DX + DY * DY
        for k, z in enumerate(zs):
            zd = z + dome.depth
            s = r2 + zd * zd
            s32 = s**1.5
            s52 = s32 * s
            br_over_r = -3.0 * m * zd / s52
            bx[k] += br_over_r * DX
            by[k] += br_over_r * DY
            bz[k] += -2.0 * m / s32 + 3.0 * m * r2 / s52
    return make_field(grid, bx, by, bz)


def azimuthal_twist(grid, center, amplitude, r_extent, z_extent):
    """Axisymmetric azimuthal field bump about a vertical axis; exactly solenoidal.

    B_phi = amplitude * (r/r_extent) * cos^2(pi r / (2 r_extent))
            * cos^2(pi z / (2 z_extent)) inside r < r_extent, z < z_extent.
    Any axisymmetric purely azimuthal field has zero divergence, so adding
    this to another solenoidal field keeps it solenoidal while twisting the
    field lines threading the bump.
    """
    cx, cy = (float(center[0]), float(center[1]))
    X, Y = grid.slice_xy()
    DX = X - cx
    DY = Y - cy
    r = np.hypot(DX, DY)
    with np.errstate(invalid="ignore"):
        ex = np.where(r > 0, DX / r, 0.0)
        ey = np.where(r > 0, DY / r, 0.0)
    radial = np.where(r < r_extent,
                      (r / r_extent) * np.cos(0.5 * math.pi * r / r_extent) ** 2, 0.0)
    zs = grid.z_coords()
    bx = np.zeros(grid.shape)
    by = np.zeros(grid.shape)
    for k, z in enumerate(zs):
        if 0 <= z < z_extent:
            bphi = amplitude * radial * math.cos(0.5 * math.pi * z / z_extent) ** 2
            bx[k] = -bphi * ey
            by[k] = bphi * ex
    return make_field(grid, bx, by, np.zeros(grid.shape))


def add_fields(f1, f2):
    """Pointwise sum of two fields on the same grid."""
    if f1.grid != f2.grid:
        raise ValueError("fields live on different grids")
    return make_field(f1.grid, f1.bx + f2.bx, f1.by + f2.by, f1.bz + f2.bz)


# ---------------------------------------------------------------------------
# Curves

def arch_pair_curves(a, b, samples=256):
    """Discretise two arches as planar polylines from positive to negative footpoint.

    Each arch lies in the vertical plane through its footpoints; the default
    shape is a semicircle (apex = half the separation), scaled vertically if
    the apex height was overridden.  Orientation follows the field: up on the
    first leg, down on the second.
    """
    if samples < 16:
        raise ValueError("need at least 16 samples per arch")

    def one(spec):
        p = np.asarray(spec.footpoint_pos, float)
        q = np.asarray(spec.footpoint_neg, float)
        mid = 0.5 * (p + q)
        half = 0.5 * np.linalg.norm(q - p)
        u = (q - p) / (2 * half)
        # always include the apex station so the two legs meet at one vertex
        t = np.unique(np.concatenate([np.linspace(0.0, math.pi, samples),
                                      [0.5 * math.pi]]))
        xy = mid[None, :] + (-np.cos(t))[:, None] * half * u[None, :]
        z = spec.apex_height * np.sin(t)
        z[0] = 0.0
        z[-1] = 0.0
        return Polyline3(np.column_stack([xy[:, 0], xy[:, 1], z]))

    return one(a), one(b)


# ---------------------------------------------------------------------------
# Planar series generator (flux oracle)

def rotating_patch_series(phi_i, phi_j, separation, omega, t_final, steps, plane,
                          radius=None, edge="area"):
    """Two top-hat B_z patches co-rotating rigidly about the plane centre.

    Footpoint velocity is the rigid rotation w = omega * e_z x (x - c), so
    every cell pair (within and across patches) rotates at exactly omega and
    the per-pair winding over [0, T] is omega*T/(2*pi).  Patch labels (1, 2)
    ride along for the self/mutual flux decomposition; a patch with zero flux
    is omitted.  With separation 0 the remaining patch spins on the axis.
    """
    from .flux import PlanarSeries  # local import to avoid a cycle

    if radius is None:
        if separation <= 0:
            raise ValueError("give an explicit radius when separation is 0")
        radius = separation / 4.0
    specs = []
    if phi_i != 0.0:
        specs.append((phi_i, np.array([separation / 2.0, 0.0]), 1))
    if phi_j != 0.0:
        specs.append((phi_j, np.array([-separation / 2.0, 0.0]), 2))
    if len(specs) == 2 and separation <= 2 * radius:
        raise ValueError("patches overlap (separation <= 2*radius)")
    xs = plane.origin[0] + plane.dx * np.arange(plane.nx)
    ys = plane.origin[1] + plane.dy * np.arange(plane.ny)
    Y, X = np.meshgrid(ys, xs, indexing="ij")
    cx = plane.origin[0] + 0.5 * (plane.nx - 1) * plane.dx
    cy = plane.origin[1] + 0.5 * (plane.ny - 1) * plane.dy
    centre = np.array([cx, cy])
    times = np.linspace(0.0, t_final, steps + 1)
    nmaps = steps + 1
    bz = np.zeros((nmaps, plane.ny, plane.nx))
    wx = np.empty_like(bz)
    wy = np.empty_like(bz)
    labels = np.zeros((nmaps, plane.ny, plane.nx), dtype=np.int32)
    area = math.pi * radius**2
    for it, t in enumerate(times):
        phi = omega * t
        rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        wx[it] = -omega * (Y - cy)
        wy[it] = omega * (X - cx)
        for flux_val, off0, lab in specs:
            c = centre + rot @ off0
            f = _disk_profile(X, Y, c[0], c[1], radius, plane.dx, plane.dy, edge)
            bz[it] += (flux_val / area) * f
            labels[it][f > 0.0] = lab
    if len(specs) == 2:
        relabel = labels
    else:
        relabel = np.where(labels > 0, 1, 0).astype(np.int32)
    return PlanarSeries(plane.nx, plane.ny, plane.dx, plane.dy,
                        (plane.origin[0], plane.origin[1]),
                        times, bz, wx, wy, labels=relabel)
