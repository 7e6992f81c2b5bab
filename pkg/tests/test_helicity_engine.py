"""Winding-gauge quadratures: the two helicity forms and the decomposition."""

import numpy as np
import pytest

from windhel import (DomeSpec, RegionMask, TubeSpec, decompose, dome_field,
                     double_helix_pair, helicity_gauge_form, helicity_pairwise_form,
                     make_field, relative_helicity, slice_at, twisted_tube,
                     uniform_vertical, winding_bilinear, winding_gauge_slice)
from conftest import random_labels, random_solenoidal_field, small_grid


def unit_flux_tube(tau=2 * np.pi):
    return TubeSpec((0.0, 0.0), 1.0 / np.sqrt(np.pi), 1.0, tau)


def test_gauge_slice_disk_solid_rotation():
    # uniform B_z = b0 on a disk: the in-plane potential at interior radius r
    # is azimuthal with magnitude b0*r/2 (solid-rotation form)
    g = small_grid(96)
    b0, R = 2.0, 0.7
    f = twisted_tube(g, TubeSpec((0.0, 0.0), R, b0, 0.0))
    s = slice_at(f, 3)
    targets = np.array([[0.2, 0.0], [0.0, -0.35], [0.25, 0.25]])
    a = winding_gauge_slice(s, targets)
    for (tx, ty), row in zip(targets, a):
        r = np.hypot(tx, ty)
        expect = 0.5 * b0 * np.array([-ty, tx])
        assert np.allclose(row[:2], expect, atol=2e-2 * b0 * r + 1e-4)
        assert row[2] == 0.0  # no in-plane source field


def test_gauge_slice_zero_field():
    g = small_grid(16)
    s = slice_at(uniform_vertical(g, 0.0), 2)
    a = winding_gauge_slice(s, [(0.1, 0.2), (-0.3, 0.0)])
    assert (a == 0).all()


def test_gauge_slice_horizontal_divergence_free():
    # discrete horizontal divergence of the returned potential decreases
    # under refinement (the winding gauge satisfies div_perp A = 0)
    def div_at(n):
        g = small_grid(n)
        f = twisted_tube(g, TubeSpec((0.1, -0.05), 0.6, 1.0, 0.0))
        s = slice_at(f, 1)
        h = 0.02
        pts = []
        base = np.array([[0.15, 0.1], [-0.2, 0.3], [0.05, -0.25]])
        for bx, by in base:
            pts += [(bx + h, by), (bx - h, by), (bx, by + h), (bx, by - h)]
        a = winding_gauge_slice(s, pts)
        worst = 0.0
        for i in range(len(base)):
            q = a[4 * i:4 * i + 4]
            div = (q[0, 0] - q[1, 0]) / (2 * h) + (q[2, 1] - q[3, 1]) / (2 * h)
            worst = max(worst, abs(div))
        return worst

    d48, d96 = div_at(48), div_at(96)
    assert d96 < d48
    assert d96 < 2e-2


def test_uniform_field_zero_helicity():
    g = small_grid(16)
    for b0 in (1.0, -3.0):
        f = uniform_vertical(g, b0)
        assert helicity_pairwise_form(f) == 0.0
        assert helicity_gauge_form(f) == 0.0


def test_twisted_tube_helicity_and_dual_form():
    g = small_grid(32)
    f = twisted_tube(g, unit_flux_tube())
    hp = helicity_pairwise_form(f)
    hg = helicity_gauge_form(f)
    assert hp == pytest.approx(1.0, rel=5e-3)
    assert abs(hp - hg) <= 1e-12 * abs(hp)


def test_helicity_quadratic_in_field():
    g = small_grid(24)
    f = twisted_tube(g, unit_flux_tube())
    neg = make_field(g, -f.bx, -f.by, -f.bz)
    assert helicity_pairwise_form(neg) == pytest.approx(helicity_pairwise_form(f), rel=1e-14)


def test_double_helix_total():
    g = small_grid(32)
    r = 0.2
    b0 = 1.0 / (np.pi * r * r)  # unit flux per tube
    f = double_helix_pair(g, TubeSpec((0.45, 0.0), r, b0), TubeSpec((-0.45, 0.0), r, b0), 1.0)
    assert helicity_pairwise_form(f) == pytest.approx(2.0, rel=2e-2)


def test_double_helix_opposite_flux_sign():
    g = small_grid(32)
    r = 0.2
    b0 = 1.0 / (np.pi * r * r)
    f = double_helix_pair(g, TubeSpec((0.45, 0.0), r, b0), TubeSpec((-0.45, 0.0), r, -b0), 1.0)
    # the tubes rotate, so label by flux sign, which tracks them at every height
    labels = np.zeros(g.shape, dtype=np.int32)
    labels[f.bz > 0] = 1
    labels[f.bz < 0] = 2
    rep = decompose(f, RegionMask(g, labels))
    assert rep.mutual[1, 2] == pytest.approx(-1.0, rel=2e-2)


def test_decompose_tube_mask():
    g = small_grid(32)
    f = twisted_tube(g, unit_flux_tube())
    labels = np.where(f.bz != 0, 1, 0).astype(np.int32)
    rep = decompose(f, RegionMask(g, labels))
    assert rep.self_[1] == pytest.approx(1.0, rel=5e-3)
    assert rep.self_[0] == 0.0
    assert rep.mutual[0, 1] == 0.0
    assert rep.excluded_weight == 0.0


def test_decompose_single_label_equals_total():
    g = small_grid(24)
    f = random_solenoidal_field(g, seed=5)
    rep = decompose(f, RegionMask(g, np.zeros(g.shape, dtype=np.int32)))
    assert rep.self_[0] == rep.total  # identical accumulation regrouped
    assert rep.mutual.shape == (1, 1)


def test_decompose_random_fields_identities():
    for trial in range(4):
        g = small_grid(14)
        f = random_solenoidal_field(g, seed=100 + trial)
        mask = RegionMask(g, random_labels(g, seed=200 + trial))
        rep = decompose(f, mask)
        parts = sum(rep.self_.values()) + rep.mutual.sum()
        assert abs(rep.total - parts) <= 1e-12 * abs(rep.total)
        assert (rep.mutual == rep.mutual.T).all()
        assert (np.diag(rep.mutual) == 0).all()


def test_decompose_excluded_cells_accounting():
    g = small_grid(16)
    f = twisted_tube(g, unit_flux_tube())
    labels = np.where(f.bz != 0, 1, 0).astype(np.int32)
    labels[:, :2, :] = -1  # carve out an excluded slab (outside the tube)
    rep = decompose(f, RegionMask(g, labels))
    assert rep.excluded_weight == 0.0  # B_z vanishes there
    labels2 = labels.copy()
    half = g.nx // 2
    labels2[:, :, :half] = -1  # excise half the tube
    rep2 = decompose(f, RegionMask(g, labels2))
    assert rep2.excluded_weight > 0.0
    assert abs(rep2.total) < abs(rep.total)


def test_gauge_bilinear_symmetry_and_linearity():
    g = small_grid(12)
    f1 = random_solenoidal_field(g, seed=1)
    f2 = random_solenoidal_field(g, seed=2)
    f3 = random_solenoidal_field(g, seed=3)
    w12 = winding_bilinear(f1, f2)
    w21 = winding_bilinear(f2, f1)
    assert abs(w12 - w21) <= 1e-12 * max(abs(w12), 1e-30)
    f12 = make_field(g, f1.bx + f2.bx, f1.by + f2.by, f1.bz + f2.bz)
    lhs = winding_bilinear(f12, f3)
    rhs = winding_bilinear(f1, f3) + winding_bilinear(f2, f3)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_bilinear_diagonal_is_helicity():
    g = small_grid(12)
    f = random_solenoidal_field(g, seed=9)
    assert winding_bilinear(f, f) == pytest.approx(helicity_gauge_form(f), rel=1e-13)


def test_relative_helicity_properties():
    g = small_grid(24)
    f = twisted_tube(g, unit_flux_tube())
    ref = twisted_tube(g, unit_flux_tube(tau=0.0))
    assert relative_helicity(f, f) == 0.0
    assert relative_helicity(f, ref) == -relative_helicity(ref, f)
    # untwisted reference of equal flux: relative helicity = winding helicity
    assert relative_helicity(f, ref) == pytest.approx(1.0, rel=1e-2)


def test_relative_helicity_boundary_warning():
    g = small_grid(12)
    f = twisted_tube(g, unit_flux_tube())
    other = uniform_vertical(g, 1.0)
    with pytest.warns(UserWarning, match="B_z mismatch"):
        relative_helicity(f, other)


def test_helicity_isotropy_under_rotation():
    # rotating the configuration rigidly about the z axis (regenerated
    # analytically at the rotated centre) leaves the total unchanged within
    # quadrature tolerance
    g = small_grid(32)
    spec1 = TubeSpec((0.3, 0.0), 0.4, 1.0, 2 * np.pi)
    ang = 2 * np.pi / 3
    c2 = (0.3 * np.cos(ang), 0.3 * np.sin(ang))
    spec2 = TubeSpec(c2, 0.4, 1.0, 2 * np.pi)
    h1 = helicity_pairwise_form(twisted_tube(g, spec1))
    h2 = helicity_pairwise_form(twisted_tube(g, spec2))
    assert h2 == pytest.approx(h1, rel=1e-2)


def test_dome_helicity_is_tiny():
    # mirror-symmetric poloidal field: winding helicity vanishes
    g = small_grid(24)
    f = dome_field(g, 1.0, DomeSpec((0.0, 0.0), 0.3, 0.55))
    scale = f.max_norm()**2 * g.height**4
    assert abs(helicity_pairwise_form(f)) < 1e-10 * scale


def test_gauge_slice_rejects_outside_targets():
    g = small_grid(12)
    s = slice_at(uniform_vertical(g, 1.0), 2)
    with pytest.raises(ValueError, match="footprint"):
        winding_gauge_slice(s, [(2.0, 0.0)])
