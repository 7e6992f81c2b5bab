"""Helicity flux through a plane: kernels, decomposition, C field, and duality."""

import numpy as np
import pytest

from windhel import (PlaneGrid, PlanarSeries, TubeSpec, c_field, flux_decompose,
                     flux_total, footpoint_velocity, load_series,
                     rotating_patch_series, save_series, series_from_field,
                     twisted_tube)
from conftest import small_grid


def _plane(n=48, extent=1.0):
    return PlaneGrid(n, n, 2 * extent / (n - 1), 2 * extent / (n - 1),
                     (-extent, -extent))


def test_footpoint_velocity_cases():
    shape = (4, 4)
    zero = np.zeros(shape)
    one = np.ones(shape)
    # pure vertical emergence of vertical field moves no footpoints
    wx, wy = footpoint_velocity((zero, zero, one), (zero, zero, one))
    assert (wx == 0).all() and (wy == 0).all()
    # horizontal motion of vertical field: w = u_P
    wx, wy = footpoint_velocity((2 * one, -one, zero), (zero, zero, one))
    assert (wx == 2).all() and (wy == -1).all()
    # u_z = 1, B = (1, 0, 1): w = u_P - (1, 0)
    wx, wy = footpoint_velocity((zero, zero, one), (one, zero, one))
    assert (wx == -1).all() and (wy == 0).all()


def test_footpoint_velocity_undefined_cells():
    shape = (3, 3)
    bz = np.ones(shape)
    bz[1, 1] = 0.0
    wx, wy = footpoint_velocity((np.ones(shape),) * 3, (np.zeros(shape), np.zeros(shape), bz))
    assert np.isnan(wx[1, 1]) and np.isnan(wy[1, 1])
    assert np.isfinite(wx).sum() == 8


def test_c_field_static():
    shape = (6, 6)
    zero = np.zeros(shape)
    bz = np.full(shape, 2.0)
    c = c_field((zero, zero, zero), (zero, zero, bz), 0.1, 0.1,
                bz_stencil=(bz, bz, 0.05))
    assert (c.cx == 0).all() and (c.cy == 0).all()
    assert (c.ct == bz).all()
    assert c.div_residual == 0.0


def test_c_field_uniform_translation():
    shape = (6, 6)
    zero = np.zeros(shape)
    one = np.ones(shape)
    c = c_field((3 * one, zero, zero), (zero, zero, one), 0.1, 0.1,
                bz_stencil=(one, one, 0.05))
    # u x B = (0, -3, 0), E = -u x B = (0, 3, 0): C = (E_y, -E_x, B_z) = (3, 0, 1)
    assert (c.cx == 3.0).all()
    assert (c.cy == 0.0).all()
    assert c.div_residual == 0.0


def test_c_field_without_stencil():
    shape = (4, 4)
    zero = np.zeros(shape)
    c = c_field((zero, zero, zero), (zero, zero, np.ones(shape)), 0.1, 0.1)
    assert c.div_residual is None


def _smooth_rotation_series(n, steps, omega=1.0, t_final=0.5):
    """Rigidly rotating smooth B_z profile with the exact rotation velocity."""
    plane = _plane(n)
    xs = plane.origin[0] + plane.dx * np.arange(plane.nx)
    Y, X = np.meshgrid(xs, xs, indexing="ij")
    times = np.linspace(0.0, t_final, steps + 1)
    R = 0.55
    c0 = np.array([0.25, 0.0])

    def bz_at(t):
        ang = omega * t
        cx = np.cos(ang) * c0[0] - np.sin(ang) * c0[1]
        cy = np.sin(ang) * c0[0] + np.cos(ang) * c0[1]
        r = np.hypot(X - cx, Y - cy)
        # cos^4 profile: C^3 at the rim, so centred differences stay second order
        return np.where(r < R, np.cos(0.5 * np.pi * np.minimum(r / R, 1.0)) ** 4, 0.0)

    return plane, times, bz_at, omega


def test_c_field_divergence_second_order_in_refinement():
    # rigid rotation: u = omega e_z x (x - c), B = (0, 0, bz) advected rigidly;
    # div C vanishes analytically, the discrete residual is truncation error
    residuals = []
    for n, steps in ((32, 8), (64, 16), (128, 32)):
        plane, times, bz_at, omega = _smooth_rotation_series(n, steps)
        xs = plane.origin[0] + plane.dx * np.arange(plane.nx)
        Y, X = np.meshgrid(xs, xs, indexing="ij")
        ux, uy = -omega * Y, omega * X
        it = steps // 2
        dt = times[1] - times[0]
        zero = np.zeros_like(X)
        c = c_field((ux, uy, zero), (zero, zero, bz_at(times[it])), plane.dx, plane.dy,
                    bz_stencil=(bz_at(times[it] - dt), bz_at(times[it] + dt), dt))
        residuals.append(c.div_residual)
    assert residuals[1] < residuals[0] / 3.0
    assert residuals[2] < residuals[1] / 3.0


def test_flux_static_series_zero():
    plane = _plane(24)
    s = rotating_patch_series(1.0, 1.0, 0.9, 0.0, 1.0, 6, plane)
    assert flux_total(s) == 0.0


def test_flux_full_rotation_all_pairs():
    # omega*T = 2pi and rigid co-rotation: every pair winds once, so the
    # total is -(phi_i + phi_j)^2
    plane = _plane(64)
    s = rotating_patch_series(1.0, 1.0, 0.9, 2 * np.pi, 1.0, 24, plane)
    assert flux_total(s) == pytest.approx(-4.0, rel=2e-2)


def test_flux_time_reversal_antisymmetry():
    plane = _plane(32)
    s = rotating_patch_series(1.0, 0.7, 0.9, 2 * np.pi, 1.0, 8, plane)
    assert flux_total(s.reversed()) == -flux_total(s)


def test_flux_decompose_rotating_patches():
    plane = _plane(64)
    s = rotating_patch_series(1.0, 1.0, 0.9, 2 * np.pi, 1.0, 24, plane)
    rep = flux_decompose(s)
    assert rep.self_[1] == pytest.approx(-1.0, rel=2e-2)
    assert rep.self_[2] == pytest.approx(-1.0, rel=2e-2)
    assert rep.mutual[1, 2] == pytest.approx(-1.0, rel=2e-2)
    assert rep.mutual[1, 2] == rep.mutual[2, 1]
    parts = sum(rep.self_.values()) + rep.mutual.sum()
    assert abs(rep.total - parts) <= 1e-12 * abs(rep.total)


def test_flux_patch_on_axis_spins_itself():
    # a single patch centred on the rotation axis acquires self flux
    # -(omega*T/2pi) * phi^2
    plane = _plane(48)
    s = rotating_patch_series(1.0, 0.0, 0.0, np.pi, 1.0, 16, plane, radius=0.35)
    rep = flux_decompose(s)
    assert rep.self_[1] == pytest.approx(-0.5, rel=2e-2)
    assert abs(rep.mutual).max() == 0.0


def test_flux_spinning_patch_far_from_static_one():
    # patch 1 spins about its own centre; a far static patch picks up no
    # mutual flux (orbit term zero, spin is internal)
    plane = PlaneGrid(72, 72, 6.0 / 71, 6.0 / 71, (-3.0, -3.0))
    xs = plane.origin[0] + plane.dx * np.arange(plane.nx)
    Y, X = np.meshgrid(xs, xs, indexing="ij")
    omega, T, steps = np.pi, 1.0, 12
    times = np.linspace(0.0, T, steps + 1)
    c1 = np.array([-2.0, 0.0])
    c2 = np.array([2.0, 0.0])
    R = 0.5
    bz = np.zeros((steps + 1, plane.ny, plane.nx))
    wx = np.zeros_like(bz)
    wy = np.zeros_like(bz)
    labels = np.zeros(bz.shape, dtype=np.int32)
    area = np.pi * R * R
    for it in range(steps + 1):
        r1 = np.hypot(X - c1[0], Y - c1[1])
        r2 = np.hypot(X - c2[0], Y - c2[1])
        bz[it] = np.where(r1 < R, 1.0 / area, 0.0) + np.where(r2 < R, 1.0 / area, 0.0)
        spin = r1 < 2 * R
        wx[it][spin] = -omega * (Y[spin] - c1[1])
        wy[it][spin] = omega * (X[spin] - c1[0])
        labels[it][r1 < R] = 1
        labels[it][r2 < R] = 2
    s = PlanarSeries(plane.nx, plane.ny, plane.dx, plane.dy, plane.origin,
                     times, bz, wx, wy, labels=labels)
    rep = flux_decompose(s)
    assert rep.self_[1] == pytest.approx(-omega * T / (2 * np.pi), rel=5e-2)
    assert abs(rep.mutual[1, 2]) < 5e-3
    assert abs(rep.self_[2]) < 1e-12


def test_z_duality_static_tube():
    # a static field's slice stack read as a time series: the flux equals
    # minus the winding helicity, the same discrete sums reindexed
    from windhel import helicity_pairwise_form
    g = small_grid(24)
    f = twisted_tube(g, TubeSpec((0.0, 0.0), 1.0 / np.sqrt(np.pi), 1.0, 2 * np.pi))
    s = series_from_field(f)
    h = helicity_pairwise_form(f)
    assert flux_total(s) == pytest.approx(-h, rel=1e-13)


def test_series_roundtrip(tmp_path):
    plane = _plane(16)
    s = rotating_patch_series(1.0, -0.5, 0.8, 1.0, 0.7, 5, plane, radius=0.15)
    p = tmp_path / "s.whps"
    save_series(s, p)
    s2 = load_series(p)
    assert np.array_equal(s.times, s2.times)
    assert np.array_equal(s.bz, s2.bz)
    assert np.array_equal(s.wx, s2.wx, equal_nan=True)
    p2 = tmp_path / "s2.whps"
    save_series(s2, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_flux_warns_on_undefined_velocity_cells():
    plane = _plane(12)
    times = np.linspace(0, 1.0, 3)
    bz = np.ones((3, plane.ny, plane.nx))
    wx = np.zeros_like(bz)
    wy = np.zeros_like(bz)
    wx[:, 2, 2] = np.nan
    wy[:, 2, 2] = np.nan
    s = PlanarSeries(plane.nx, plane.ny, plane.dx, plane.dy, plane.origin,
                     times, bz, wx, wy)
    with pytest.warns(UserWarning, match="undefined-velocity"):
        flux_total(s)
