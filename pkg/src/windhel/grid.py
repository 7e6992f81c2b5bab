"""Uniform Cartesian grids, 3-vector fields between two horizontal planes, and file I/O.

Field arrays are stored with shape (nz, ny, nx), so B[k] is the horizontal
slice at height z_k = origin_z + k*dz.  The "WH3D v1" file format is a single
JSON header line followed by raw little-endian float64 payload, component
major (Bx, By, Bz), k-major then j then i within each component.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import FieldFormatError, OutOfDomainError

EPS_BZ_DEFAULT = 1e-8

_HEADER_COMPONENTS = ["Bx", "By", "Bz"]


@dataclass(frozen=True)
class Grid3:
    """Uniform node-centred grid spanning [origin, origin + (n-1)*d] per axis."""

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    origin: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 2:
            raise ValueError("grid needs at least 2 samples per axis")
        if min(self.dx, self.dy, self.dz) <= 0:
            raise ValueError("grid spacings must be positive")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))

    @property
    def height(self):
        """Distance between the two bounding planes, (nz-1)*dz."""
        return (self.nz - 1) * self.dz

    @property
    def shape(self):
        return (self.nz, self.ny, self.nx)

    def x_coords(self):
        return self.origin[0] + self.dx * np.arange(self.nx)

    def y_coords(self):
        return self.origin[1] + self.dy * np.arange(self.ny)

    def z_coords(self):
        return self.origin[2] + self.dz * np.arange(self.nz)

    def bounds(self):
        """((xmin, xmax), (ymin, ymax), (zmin, zmax)) of the sample box."""
        ox, oy, oz = self.origin
        return ((ox, ox + (self.nx - 1) * self.dx),
                (oy, oy + (self.ny - 1) * self.dy),
                (oz, oz + (self.nz - 1) * self.dz))

    def slice_xy(self):
        """Meshgrids X[j, i], Y[j, i] of the horizontal sample coordinates."""
        Y, X = np.meshgrid(self.y_coords(), self.x_coords(), indexing="ij")
        return X, Y


def _as_component(grid, arr, name):
    a = np.ascontiguousarray(arr, dtype=np.float64)
    if a.shape != grid.shape:
        raise ValueError(f"{name} has shape {a.shape}, expected {grid.shape}")
    return a


@dataclass(frozen=True)
class VectorField3:
    """Three float64 component arrays on a Grid3; immutable by convention."""

    grid: Grid3
    bx: np.ndarray = field(repr=False)
    by: np.ndarray = field(repr=False)
    bz: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bx", _as_component(self.grid, self.bx, "bx"))
        object.__setattr__(self, "by", _as_component(self.grid, self.by, "by"))
        object.__setattr__(self, "bz", _as_component(self.grid, self.bz, "bz"))

    def components(self):
        return (self.bx, self.by, self.bz)

    def max_norm(self):
        """Maximum |B| over all samples."""
        return float(np.sqrt(self.bx**2 + self.by**2 + self.bz**2).max())


@dataclass(frozen=True)
class SliceField:
    """One horizontal slice: B_z plus the in-plane slope field B_perp/B_z.

    Slopes are NaN (and flagged undefined) where |B_z| falls below
    eps_bz * max|B_z| on the slice; those cells must not be read as slopes.
    The pairwise helicity kernels never use slopes, only component products,
    so undefined cells are harmless downstream.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    origin: tuple
    z: float
    bz: np.ndarray = field(repr=False)
    sx: np.ndarray = field(repr=False)
    sy: np.ndarray = field(repr=False)
    defined: np.ndarray = field(repr=False)

    def slice_xy(self):
        xs = self.origin[0] + self.dx * np.arange(self.nx)
        ys = self.origin[1] + self.dy * np.arange(self.ny)
        Y, X = np.meshgrid(ys, xs, indexing="ij")
        return X, Y


def _check_finite(name, arr):
    bad = ~np.isfinite(arr)
    if bad.any():
        k, j, i = (int(v) for v in np.argwhere(bad)[0])
        raise FieldFormatError(f"non-finite value in {name} at (i={i}, j={j}, k={k})")


def make_field(grid, bx, by, bz):
    """Construct a VectorField3, rejecting non-finite samples."""
    f = VectorField3(grid, bx, by, bz)
    for name, arr in zip(_HEADER_COMPONENTS, f.components()):
        _check_finite(name, arr)
    return f


# ---------------------------------------------------------------------------
# File I/O ("WH3D v1")

def _header_dict(grid):
    return {
        "format": "WH3D",
        "version": 1,
        "nx": grid.nx, "ny": grid.ny, "nz": grid.nz,
        "dx": grid.dx, "dy": grid.dy, "dz": grid.dz,
        "origin": list(grid.origin),
        "components": _HEADER_COMPONENTS,
    }


def _encode_header(d):
    return (json.dumps(d, sort_keys=True) + "\n").encode("utf-8")


def save_field(field3, path):
    """Write a WH3D v1 file; written atomically (temp file + rename)."""
    payload = b"".join(c.astype("<f8").tobytes() for c in field3.components())
    data = _encode_header(_header_dict(field3.grid)) + payload
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_header_line(fh, path):
    line = fh.readline()
    if not line.endswith(b"\n"):
        raise FieldFormatError(f"{path}: missing header line")
    try:
        header = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FieldFormatError(f"{path}: malformed header: {exc}") from exc
    if not isinstance(header, dict):
        raise FieldFormatError(f"{path}: header is not a record")
    return header


def _grid_from_header(header, path, fmt):
    if header.get("format") != fmt or header.get("version") != 1:
        raise FieldFormatError(f"{path}: not a {fmt} v1 file")
    try:
        grid = Grid3(int(header["nx"]), int(header["ny"]), int(header["nz"]),
                     float(header["dx"]), float(header["dy"]), float(header["dz"]),
                     tuple(header["origin"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldFormatError(f"{path}: malformed header: {exc}") from exc
    return grid


def load_field(path):
    """Read a WH3D v1 file back into a VectorField3."""
    with open(path, "rb") as fh:
        header = _read_header_line(fh, path)
        grid = _grid_from_header(header, path, "WH3D")
        if header.get("components") != _HEADER_COMPONENTS:
            raise FieldFormatError(f"{path}: unexpected component list")
        n = grid.nx * grid.ny * grid.nz
        raw = fh.read()
    expected = 3 * n * 8
    if len(raw) != expected:
        raise FieldFormatError(
            f"{path}: payload length mismatch (got {len(raw)} bytes, expected {expected})")
    flat = np.frombuffer(raw, dtype="<f8")
    comps = [flat[c * n:(c + 1) * n].reshape(grid.shape) for c in range(3)]
    return make_field(grid, *comps)


# ---------------------------------------------------------------------------
# Interpolation

def sample(field3, point):
    """Trilinear interpolation of B at a point inside the grid box (inclusive).

    Exact at sample points and for globally affine fields.  Raises
    OutOfDomainError outside the box; the field line tracer relies on that.
    """
    g = field3.grid
    x, y, z = (float(v) for v in point)
    fx = (x - g.origin[0]) / g.dx
    fy = (y - g.origin[1]) / g.dy
    fz = (z - g.origin[2]) / g.dz
    if not (0.0 <= fx <= g.nx - 1 and 0.0 <= fy <= g.ny - 1 and 0.0 <= fz <= g.nz - 1):
        raise OutOfDomainError(f"point {point} outside grid box")
    i = min(int(fx), g.nx - 2)
    j = min(int(fy), g.ny - 2)
    k = min(int(fz), g.nz - 2)
    tx, ty, tz = fx - i, fy - j, fz - k
    out = np.empty(3)
    for c, arr in enumerate(field3.components()):
        c00 = arr[k, j, i] * (1 - tx) + arr[k, j, i + 1] * tx
        c01 = arr[k, j + 1, i] * (1 - tx) + arr[k, j + 1, i + 1] * tx
        c10 = arr[k + 1, j, i] * (1 - tx) + arr[k + 1, j, i + 1] * tx
        c11 = arr[k + 1, j + 1, i] * (1 - tx) + arr[k + 1, j + 1, i + 1] * tx
        out[c] = (c00 * (1 - ty) + c01 * ty) * (1 - tz) + (c10 * (1 - ty) + c11 * ty) * tz
    return out


# ---------------------------------------------------------------------------
# Diagnostics

def divergence_max(field3):
    """Maximum dimensionless divergence over interior samples.

    Convention: |div B| * min(dx, dy, dz) / scale, where scale is the largest
    |B| over the seven samples of the centred-difference stencil, floored at
    1% of the global max |B| so the diagnostic stays meaningful where the
    field vanishes.  For B = (x, 0, 0) on a cubic grid with an interior node
    at x = 0 the value is exactly 1, attained on the x = 0 plane.
    """
    g = field3.grid
    bx, by, bz = field3.components()
    div = ((bx[1:-1, 1:-1, 2:] - bx[1:-1, 1:-1, :-2]) / (2 * g.dx)
           + (by[1:-1, 2:, 1:-1] - by[1:-1, :-2, 1:-1]) / (2 * g.dy)
           + (bz[2:, 1:-1, 1:-1] - bz[:-2, 1:-1, 1:-1]) / (2 * g.dz))
    norm = np.sqrt(bx**2 + by**2 + bz**2)
    gmax = norm.max()
    if gmax == 0.0:
        return 0.0
    stencil = norm[1:-1, 1:-1, 1:-1].copy()
    np.maximum(stencil, norm[1:-1, 1:-1, 2:], out=stencil)
    np.maximum(stencil, norm[1:-1, 1:-1, :-2], out=stencil)
    np.maximum(stencil, norm[1:-1, 2:, 1:-1], out=stencil)
    np.maximum(stencil, norm[1:-1, :-2, 1:-1], out=stencil)
    np.maximum(stencil, norm[2:, 1:-1, 1:-1], out=stencil)
    np.maximum(stencil, norm[:-2, 1:-1, 1:-1], out=stencil)
    np.maximum(stencil, 0.01 * gmax, out=stencil)
    scaled = np.abs(div) * min(g.dx, g.dy, g.dz) / stencil
    return float(scaled.max())


def slice_at(field3, k, eps_bz=EPS_BZ_DEFAULT):
    """Extract slice k as a SliceField with slope fields B_perp/B_z.

    The B_z array is the k-plane of the field with no resampling.  Slopes are
    defined where |B_z| > eps_bz * max|B_z| on the slice; an all-undefined
    slice is legal (it contributes no winding).
    """
    g = field3.grid
    if not 0 <= k < g.nz:
        raise IndexError(f"slice index {k} out of range [0, {g.nz})")
    bz = field3.bz[k]
    bmax = np.abs(bz).max()
    defined = np.abs(bz) > eps_bz * bmax if bmax > 0 else np.zeros_like(bz, dtype=bool)
    sx = np.full_like(bz, np.nan)
    sy = np.full_like(bz, np.nan)
    np.divide(field3.bx[k], bz, out=sx, where=defined)
    np.divide(field3.by[k], bz, out=sy, where=defined)
    return SliceField(g.nx, g.ny, g.dx, g.dy, (g.origin[0], g.origin[1]),
                      float(g.z_coords()[k]), bz, sx, sy, defined)
