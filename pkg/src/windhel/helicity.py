"""Winding-helicity quadratures: gauge form, pairwise form, and decomposition.

Both forms discretise the same double integral over horizontal slices,

    H = (1/2pi) int_0^h int int B(x) . B(y) x (x - y) / |x - y|^2 dA dA dz,

with midpoint weights in the plane, trapezoid weights in z, and the diagonal
cell pair excluded (principal-value surrogate; the omitted mass vanishes with
cell area).  The pairwise form sums the triple-product kernel directly and
never divides by B_z; the gauge form first accumulates the in-plane vector
potential per sample and then contracts it with B.  The two routes are the
same discrete sum regrouped, which is the primary internal cross-check.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np

from . import _kernels

TWO_PI = 2.0 * np.pi


def _z_weights(grid):
    w = np.full(grid.nz, grid.dz)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _active_slice(field3, k):
    """Flat coordinates/components of cells with any nonzero B component.

    Dropping exact zeros cannot change any pair sum (their kernel terms are
    identically zero) and is what makes sparse tube fields cheap.
    """
    bx = field3.bx[k].ravel()
    by = field3.by[k].ravel()
    bz = field3.bz[k].ravel()
    act = (bx != 0.0) | (by != 0.0) | (bz != 0.0)
    idx = np.nonzero(act)[0]
    X, Y = field3.grid.slice_xy()
    return (X.ravel()[idx], Y.ravel()[idx], bx[idx], by[idx], bz[idx], idx)


def helicity_pairwise_form(field3):
    """Winding helicity by direct summation of the pairwise triple-product kernel."""
    g = field3.grid
    dA = g.dx * g.dy
    wz = _z_weights(g)
    total = 0.0
    for k in range(g.nz):
        px, py, bx, by, bz, _ = _active_slice(field3, k)
        if px.size < 2:
            continue
        rows = np.zeros(px.size)
        _kernels.pair_rows(px, py, bx, by, bz, rows)
        total += 2.0 * float(rows.sum()) * wz[k]
    return total * dA * dA / TWO_PI


def helicity_gauge_form(field3):
    """Winding helicity as the volume integral of A^W . B.

    A^W is accumulated per sample from the same slice kernel and the same
    diagonal exclusion as the pairwise form, so the two agree to rounding.
    """
    g = field3.grid
    dA = g.dx * g.dy
    wz = _z_weights(g)
    total = 0.0
    for k in range(g.nz):
        px, py, bx, by, bz, _ = _active_slice(field3, k)
        if px.size < 2:
            continue
        a1 = np.zeros(px.size)
        a2 = np.zeros(px.size)
        a3 = np.zeros(px.size)
        _kernels.gauge_rows(px, py, bx, by, bz, a1, a2, a3)
        total += float(np.sum(a1 * bx + a2 * by + a3 * bz)) * wz[k]
    return total * dA * dA / TWO_PI


def winding_gauge_slice(slice_field, targets):
    """In-plane winding-gauge potential at arbitrary target points of one slice.

    Midpoint quadrature of A(x) = (1/2pi) sum_y B(y) x (x - y)/|x - y|^2 dA
    over the slice cells, excluding the cell containing each target.  Returns
    an (n, 3) array; the first two columns are the horizontal components
    (sourced by B_z alone), the third the vertical component sourced by the
    in-plane field (needed for the full A . B contraction).
    """
    s = slice_field
    X, Y = s.slice_xy()
    t_check = np.atleast_2d(np.asarray(targets, float))
    if (t_check[:, 0].min() < s.origin[0] or t_check[:, 1].min() < s.origin[1]
            or t_check[:, 0].max() > s.origin[0] + (s.nx - 1) * s.dx
            or t_check[:, 1].max() > s.origin[1] + (s.ny - 1) * s.dy):
        raise ValueError("target point outside the slice footprint")
    bz = s.bz.ravel()
    # reconstruct in-plane components from slopes where defined (B_perp = s * B_z)
    bx = np.where(s.defined.ravel(), np.nan_to_num(s.sx.ravel()) * bz, 0.0)
    by = np.where(s.defined.ravel(), np.nan_to_num(s.sy.ravel()) * bz, 0.0)
    act = (bx != 0.0) | (by != 0.0) | (bz != 0.0)
    t = np.atleast_2d(np.asarray(targets, float))
    a1 = np.zeros(t.shape[0])
    a2 = np.zeros(t.shape[0])
    a3 = np.zeros(t.shape[0])
    if act.any():
        _kernels.gauge_at_targets(
            np.ascontiguousarray(t[:, 0]), np.ascontiguousarray(t[:, 1]),
            X.ravel()[act], Y.ravel()[act], bx[act], by[act], bz[act],
            0.5 * s.dx, 0.5 * s.dy, a1, a2, a3)
    return np.column_stack([a1, a2, a3]) * (s.dx * s.dy) / TWO_PI


def winding_bilinear(field1, field2):
    """Discrete bilinear pairing W(B1, B2) = int A^W(B1) . B2 dV.

    Symmetric in its arguments and linear in each, to rounding; W(B, B) is
    the winding helicity of B.
    """
    if field1.grid != field2.grid:
        raise ValueError("fields live on different grids")
    g = field1.grid
    dA = g.dx * g.dy
    wz = _z_weights(g)
    total = 0.0
    for k in range(g.nz):
        spx, spy, sbx, sby, sbz, sidx = _active_slice(field1, k)
        tpx, tpy, tbx, tby, tbz, tidx = _active_slice(field2, k)
        if spx.size == 0 or tpx.size == 0:
            continue
        a1 = np.zeros(tpx.size)
        a2 = np.zeros(tpx.size)
        a3 = np.zeros(tpx.size)
        _kernels.gauge_rows_cross(tpx, tpy, tidx, spx, spy, sbx, sby, sbz, sidx,
                                  a1, a2, a3)
        total += float(np.sum(a1 * tbx + a2 * tby + a3 * tbz)) * wz[k]
    return total * dA * dA / TWO_PI


# ---------------------------------------------------------------------------
# Self/mutual decomposition

@dataclass(frozen=True)
class HelicityReport:
    """Totals, per-region self helicities, and the symmetric mutual matrix.

    mutual[i, j] is the ordered-pair sum over x in region i, y in region j;
    the total mutual exchanged between i and j is mutual[i, j] + mutual[j, i]
    = 2 * mutual[i, j].  excluded_weight is the |B_z|-weighted measure of
    cells labelled -1, which are dropped from all sums.
    """

    total: float
    self_: dict
    mutual: np.ndarray = field(repr=False)
    excluded_weight: float
    meta: dict

    @property
    def reconstruction_error(self):
        """|total - (sum self + sum mutual)|; totals are independently summed."""
        parts = sum(self.self_.values()) + float(self.mutual.sum())
        return abs(self.total - parts)

    def mutual_pairs(self):
        """{(i, j): H_ij} for i < j with nonzero entries present."""
        k = self.mutual.shape[0]
        return {(i, j): float(self.mutual[i, j]) for i in range(k) for j in range(i + 1, k)}


def decompose(field3, mask, kind="helicity"):
    """Route the pairwise kernel into self and mutual accumulators per region.

    Same quadrature as helicity_pairwise_form: a pair with both cells in
    region i feeds self_i, a pair straddling i != j feeds mutual_ij (stored
    symmetrically, bit-equal), pairs touching label -1 are dropped and their
    cells' |B_z| weight accumulates into excluded_weight.  The reported total
    is summed independently of the routing, so total vs sum-of-parts is a
    real regrouping check, not a tautology.
    """
    g = field3.grid
    if mask.grid.shape != g.shape:
        raise ValueError(f"mask shape {mask.grid.shape} does not match field {g.shape}")
    nlab = max(mask.num_regions, 1)
    dA = g.dx * g.dy
    wz = _z_weights(g)
    scale = dA * dA / TWO_PI

    self_acc = np.zeros(nlab)
    cross_acc = np.zeros((nlab, nlab))  # unordered accumulation, i < j
    total = 0.0
    excluded = 0.0
    for k in range(g.nz):
        px, py, bx, by, bz, idx = _active_slice(field3, k)
        lab = mask.labels[k].ravel()[idx]
        exc = lab < 0
        if exc.any():
            excluded += float(np.abs(bz[exc]).sum()) * dA * wz[k]
        keep = ~exc
        if keep.sum() < 2:
            continue
        px = px[keep]; py = py[keep]
        bx = bx[keep]; by = by[keep]; bz = bz[keep]
        lab_k = np.ascontiguousarray(lab[keep], dtype=np.int64)
        rb = np.zeros((px.size, nlab))
        rt = np.zeros(px.size)
        _kernels.pair_rows_labeled(px, py, bx, by, bz, lab_k, rb, rt)
        w = wz[k] * scale
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
    mutual = cross_acc + cross_acc.T  # symmetric by construction, diagonal zero
    meta = {
        "kind": kind,
        "grid": [g.nx, g.ny, g.nz],
        "spacing": [g.dx, g.dy, g.dz],
        "regions": nlab,
        "diagonal": "excluded (principal-value surrogate)",
        "quadrature": "midpoint in plane, trapezoid in z",
    }
    return HelicityReport(total, {i: float(v) for i, v in enumerate(self_acc)},
                          mutual, excluded, meta)


def relative_helicity(field3, reference, boundary_rtol=1e-8):
    """Gauge-invariant relative helicity as a difference of winding helicities.

    The two fields must share a grid and (up to boundary_rtol, relative to
    the reference plane maximum) the same B_z on the bottom and top planes;
    disagreement warns but does not fail.
    """
    if field3.grid != reference.grid:
        raise ValueError("fields live on different grids")
    for k, name in ((0, "bottom"), (field3.grid.nz - 1, "top")):
        scale = np.abs(reference.bz[k]).max() or 1.0
        diff = np.abs(field3.bz[k] - reference.bz[k]).max()
        if diff > boundary_rtol * scale:
            warnings.warn(
                f"B_z mismatch on {name} plane (max {diff:.3e}, scale {scale:.3e}); "
                "relative helicity is only gauge invariant for matching boundary flux")
    return helicity_pairwise_form(field3) - helicity_pairwise_form(reference)
