"""Subdomain masks: open/closed field labelling and mask file I/O.

A RegionMask assigns every grid sample to exactly one disjoint subdomain:
label 0 is the open field (connected to the top plane), labels 1..K-1 are
connected components of closed field, and -1 marks cells whose connectivity
could not be determined (excluded from helicity integrals, with their
|B_z|-weighted area reported as a diagnostic).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import FieldFormatError
from .fieldline import endpoint_reasons
from .grid import Grid3, _encode_header, _grid_from_header, _read_header_line, divergence_max

import os


@dataclass(frozen=True)
class RegionMask:
    """Integer subdomain labels per grid sample; -1 marks excluded cells."""

    grid: Grid3
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        lab = np.ascontiguousarray(self.labels, dtype=np.int32)
        if lab.shape != self.grid.shape:
            raise ValueError(f"labels shape {lab.shape} does not match grid {self.grid.shape}")
        _check_contiguous_labels(lab)
        object.__setattr__(self, "labels", lab)

    @property
    def num_regions(self):
        nonneg = self.labels[self.labels >= 0]
        return int(nonneg.max()) + 1 if nonneg.size else 0

    @property
    def undetermined_fraction(self):
        return float((self.labels < 0).mean())


def _check_contiguous_labels(lab):
    present = np.unique(lab)
    nonneg = present[present >= 0]
    if (present < -1).any():
        raise FieldFormatError("labels below -1 are not allowed")
    if nonneg.size and not np.array_equal(nonneg, np.arange(nonneg.size)):
        raise FieldFormatError(f"non-contiguous labels {nonneg.tolist()}")


def label_open_closed(field3, seeds_per_cell=1, step=None, max_steps=20000,
                      eps_null=1e-10):
    """Label every grid sample open (0), closed (1..K-1), or undetermined (-1).

    Each sample is classified by tracing the field line through it in both
    directions: reaching the top plane at either end makes it open, both ends
    on the bottom plane make it closed, anything else (null, step budget,
    side-wall exit) is undetermined.  Closed cells are then split into
    6-connected components.  seeds_per_cell > 1 repeats the classification on
    a jittered sub-grid per cell and marks disagreements undetermined, which
    is a cheap estimate of the open/closed boundary cells.
    """
    g = field3.grid
    if step is None:
        step = 0.5 * min(g.dx, g.dy, g.dz)
    div = divergence_max(field3)
    if div > 1e-3:
        warnings.warn(f"field divergence diagnostic {div:.3e} above 1e-3 (advisory)")

    zs, ys, xs = np.meshgrid(g.z_coords(), g.y_coords(), g.x_coords(), indexing="ij")
    base = np.column_stack([xs.ravel(), ys.ravel(), zs.ravel()])

    def classify(points):
        ends = endpoint_reasons(field3, points, step, max_steps, eps_null)
        fwd, bwd = ends[:, 0], ends[:, 1]
        top = (fwd == _kernels.EXIT_TOP) | (bwd == _kernels.EXIT_TOP)
        bottom = (fwd == _kernels.EXIT_BOTTOM) & (bwd == _kernels.EXIT_BOTTOM)
        out = np.full(points.shape[0], -1, dtype=np.int32)
        out[top] = 0
        out[~top & bottom] = 1
        return out

    cls = classify(base)
    if seeds_per_cell > 1:
        rng = np.random.default_rng(20230607)
        half = 0.5 * np.array([g.dx, g.dy, g.dz])
        (xlo, xhi), (ylo, yhi), (zlo, zhi) = g.bounds()
        lo = np.array([xlo, ylo, zlo])
        hi = np.array([xhi, yhi, zhi])
        for _ in range(seeds_per_cell - 1):
            jitter = rng.uniform(-1, 1, size=base.shape) * half[None, :]
            pts = np.clip(base + jitter, lo[None, :], hi[None, :])
            other = classify(pts)
            cls[other != cls] = -1

    cls3 = cls.reshape(g.shape)
    labels = np.full(g.shape, -1, dtype=np.int32)
    labels[cls3 == 0] = 0
    closed = cls3 == 1
    if closed.any():
        comp, ncomp = ndimage.label(closed)  # default structure = 6-connectivity
        labels[closed] = comp[closed]  # components become labels 1..ncomp
        if not (labels == 0).any():
            # no open cells: shift component ids down to keep labels contiguous
            labels[closed] -= 1
    mask = RegionMask(g, labels)
    return mask


# ---------------------------------------------------------------------------
# Mask file I/O ("WHMSK v1")

def save_mask(mask, path):
    header = {
        "format": "WHMSK",
        "version": 1,
        "nx": mask.grid.nx, "ny": mask.grid.ny, "nz": mask.grid.nz,
        "dx": mask.grid.dx, "dy": mask.grid.dy, "dz": mask.grid.dz,
        "origin": list(mask.grid.origin),
        "components": ["label"],
    }
    data = _encode_header(header) + mask.labels.astype("<i4").tobytes()
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_mask(path):
    with open(path, "rb") as fh:
        header = _read_header_line(fh, path)
        grid = _grid_from_header(header, path, "WHMSK")
        if header.get("components") != ["label"]:
            raise FieldFormatError(f"{path}: unexpected component list")
        n = grid.nx * grid.ny * grid.nz
        raw = fh.read()
    if len(raw) != n * 4:
        raise FieldFormatError(
            f"{path}: payload length mismatch (got {len(raw)} bytes, expected {n * 4})")
    labels = np.frombuffer(raw, dtype="<i4").reshape(grid.shape).astype(np.int32)
    return RegionMask(grid, labels)
