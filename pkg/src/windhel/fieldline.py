"""Field-line tracing, monotone-segment partitioning, and connectivity classes.

Tracing integrates dx/ds = B/|B| with fixed-step classical RK4 in arclength,
so turning points and field lines that return to the lower plane need no
special casing; the z-monotone structure is recovered afterwards by
partition_monotone.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import OutOfDomainError

EPS_NULL_DEFAULT = 1e-10

OPEN = "open"
CLOSED = "closed"
UNDETERMINED = "undetermined"

_REASONS = {
    _kernels.EXIT_TOP: "exit-top",
    _kernels.EXIT_BOTTOM: "exit-bottom",
    _kernels.EXIT_SIDE: "exit-side",
    _kernels.NULL: "null",
    _kernels.CLOSED_LOOP: "closed-loop",
    _kernels.MAX_STEPS: "max-steps",
}


@dataclass(frozen=True)
class Polyline3:
    """Ordered 3D vertices of a traced or constructed curve."""

    vertices: np.ndarray = field(repr=False)
    reason: str = None

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 2:
            raise ValueError("polyline needs an (n, 3) array with n >= 2")
        if (np.abs(np.diff(v, axis=0)).sum(axis=1) == 0).any():
            raise ValueError("polyline has coincident consecutive vertices")
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return self.vertices.shape[0]

    @property
    def z(self):
        return self.vertices[:, 2]

    def reversed(self):
        return Polyline3(self.vertices[::-1].copy(), reason=self.reason)


@dataclass(frozen=True)
class MonotoneSegment:
    """One z-monotone run of a polyline.

    start/stop index the vertex range [start, stop) in the spine tiling; the
    run of vertices actually spanned is start..stop inclusive, so adjacent
    segments share their boundary vertex.  sigma is +1 rising, -1 falling,
    0 for exactly horizontal runs.  z_min/z_max carry the sub-vertex refined
    turning heights (quadratic fit through the bracketing vertices).
    """

    start: int
    stop: int
    sigma: int
    z_min: float
    z_max: float


def _refine_turning(z0, z1, z2):
    """Vertex of the parabola through three consecutive (index, z) samples.

    Written so that swapping z0 and z2 gives the bit-identical result, which
    keeps partitioning exactly invariant under curve reversal.
    """
    denom = (z0 + z2) - 2.0 * z1
    if denom == 0.0:
        return z1
    t = 0.5 * (z0 - z2) / denom
    if not -1.0 <= t <= 1.0:
        return z1
    return z1 + 0.5 * t * (z2 - z0) + 0.5 * t * t * denom


def partition_monotone(curve):
    """Split a polyline into maximal z-monotone segments with +-1/0 weights.

    Segments tile the vertex range; adjacent segments carry different sigma.
    Turning heights shared by two segments are refined by a quadratic through
    the three bracketing vertices, so an arch's two legs report the same
    (refined) apex height.
    """
    z = curve.z
    n = len(z)
    signs = np.sign(np.diff(z)).astype(int)
    runs = []
    a = 0
    for i in range(1, n - 1):
        if signs[i] != signs[a]:
            runs.append((a, i, signs[a]))
            a = i
    runs.append((a, n - 1, signs[a]))

    # refined z at each internal turning vertex (shared by both neighbours)
    refined = {}
    for a, b, _ in runs[:-1]:
        v = b  # turning vertex index
        refined[v] = _refine_turning(z[v - 1], z[v], z[v + 1])

    segments = []
    for a, b, s in runs:
        z_lo = refined.get(a, z[a])
        z_hi = refined.get(b, z[b])
        lo, hi = (z_lo, z_hi) if z_lo <= z_hi else (z_hi, z_lo)
        segments.append(MonotoneSegment(a, b, int(s), float(lo), float(hi)))
    return segments


def segment_vertices(curve, seg):
    """Vertex block spanned by a segment (inclusive of the shared boundary vertex)."""
    return curve.vertices[seg.start:seg.stop + 1]


def trace(field3, seed, step, max_steps=10000, eps_null=EPS_NULL_DEFAULT,
          direction=1.0):
    """Trace the field line through a seed; returns a Polyline3 with a stop reason.

    Fixed-step RK4 along the unit field direction until the trajectory exits
    the box (reason 'exit-top'/'exit-bottom'/'exit-side', final vertex on the
    boundary), returns within step/2 of the seed ('closed-loop'), meets a
    null |B| < eps_null * max|B| ('null'), or 'max-steps'.
    """
    g = field3.grid
    seed = np.asarray(seed, float)
    (xlo, xhi), (ylo, yhi), (zlo, zhi) = g.bounds()
    if not (xlo <= seed[0] <= xhi and ylo <= seed[1] <= yhi and zlo <= seed[2] <= zhi):
        raise OutOfDomainError(f"seed {seed} outside grid box")
    if step <= 0:
        raise ValueError("step must be positive")
    eps_abs = eps_null * field3.max_norm()
    path = np.empty((max_steps + 2, 3))
    count, code = _kernels.trace_path(
        field3.bx, field3.by, field3.bz,
        g.origin[0], g.origin[1], g.origin[2], g.dx, g.dy, g.dz,
        g.nx, g.ny, g.nz,
        seed[0], seed[1], seed[2], float(direction), float(step),
        int(max_steps), eps_abs, True, path)
    verts = path[:count]
    if count >= 2 and (verts[-1] == verts[-2]).all():
        verts = verts[:-1]  # degenerate boundary clip at an on-boundary seed
    if len(verts) < 2:
        if code == _kernels.NULL:
            raise ValueError(f"field is null at seed {seed}")
        raise ValueError(f"field line exits the domain immediately at seed {seed}")
    return Polyline3(verts.copy(), reason=_REASONS[code])


def classify_connectivity(field3, seed, step=None, max_steps=20000,
                          eps_null=EPS_NULL_DEFAULT):
    """Classify a bottom-plane footpoint as open, closed, or undetermined.

    Seeds with B_z > 0 are traced along the field, B_z < 0 against it; a
    trace reaching z = h is open, one returning to z = 0 is closed.  Null
    terminations, step exhaustion, side-wall exits, and B_z = 0 seeds are
    undetermined.
    """
    g = field3.grid
    if step is None:
        step = 0.5 * min(g.dx, g.dy, g.dz)
    seed = np.asarray(seed, float)
    from .grid import sample
    b = sample(field3, seed)
    if b[2] == 0.0:
        return UNDETERMINED
    direction = 1.0 if b[2] > 0 else -1.0
    try:
        line = trace(field3, seed, step, max_steps=max_steps,
                     eps_null=eps_null, direction=direction)
    except ValueError:
        return UNDETERMINED
    if line.reason == "exit-top":
        return OPEN
    if line.reason in ("exit-bottom", "closed-loop"):
        return CLOSED
    return UNDETERMINED


def endpoint_reasons(field3, points, step, max_steps, eps_null=EPS_NULL_DEFAULT):
    """Both-direction termination reasons for a batch of points (labelling core)."""
    g = field3.grid
    pts = np.ascontiguousarray(points, dtype=np.float64)
    out = np.empty((pts.shape[0], 2), dtype=np.int64)
    eps_abs = eps_null * field3.max_norm()
    _kernels.endpoints_batch(
        field3.bx, field3.by, field3.bz,
        g.origin[0], g.origin[1], g.origin[2], g.dx, g.dy, g.dz,
        g.nx, g.ny, g.nz,
        pts, float(step), int(max_steps), eps_abs, out)
    return out


# ---------------------------------------------------------------------------
# Curve file I/O ("WHCRV v1")

def save_curves(curves, path):
    """Write polylines as WHCRV v1 text: '# curve <id>' then one x y z per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for cid, curve in enumerate(curves):
            fh.write(f"# curve {cid}\n")
            for x, y, z in curve.vertices:
                fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")


def load_curves(path):
    """Read a WHCRV v1 file back into a list of Polyline3."""
    curves = []
    block = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if block:
                    curves.append(Polyline3(np.array(block)))
                    block = []
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}: bad vertex line {line!r}")
            block.append([float(p) for p in parts])
    if block:
        curves.append(Polyline3(np.array(block)))
    return curves
