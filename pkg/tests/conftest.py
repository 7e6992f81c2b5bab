"""Shared fixtures and oracle helpers for the test suite."""

import numpy as np
import pytest

from windhel import Grid3, make_field


def small_grid(n=16, extent=1.0, height=1.0):
    return Grid3(n, n, n, 2 * extent / (n - 1), 2 * extent / (n - 1),
                 height / (n - 1), (-extent, -extent, 0.0))


def random_solenoidal_field(grid, seed, modes=4, amplitude=1.0):
    """Random divergence-free field: the analytic curl of a random trig potential.

    A_c(x) = sum_m a_cm sin(k_m . x + phi_cm); B = curl A is evaluated in
    closed form, so div B = 0 holds to the accuracy of the sampled derivative
    identities (exactly, analytically).
    """
    rng = np.random.default_rng(seed)
    Z, Y, X = np.meshgrid(grid.z_coords(), grid.y_coords(), grid.x_coords(),
                          indexing="ij")
    dA = [np.zeros(grid.shape) for _ in range(9)]  # dA_c/dx, dA_c/dy, dA_c/dz per c
    for c in range(3):
        for _ in range(modes):
            k = rng.uniform(-3.0, 3.0, size=3)
            phi = rng.uniform(0, 2 * np.pi)
            amp = amplitude * rng.uniform(0.2, 1.0)
            arg = k[0] * X + k[1] * Y + k[2] * Z + phi
            cos = amp * np.cos(arg)
            dA[3 * c + 0] += k[0] * cos
            dA[3 * c + 1] += k[1] * cos
            dA[3 * c + 2] += k[2] * cos
    bx = dA[3 * 2 + 1] - dA[3 * 1 + 2]  # dAz/dy - dAy/dz
    by = dA[3 * 0 + 2] - dA[3 * 2 + 0]  # dAx/dz - dAz/dx
    bz = dA[3 * 1 + 0] - dA[3 * 0 + 1]  # dAy/dx - dAx/dy
    return make_field(grid, bx, by, bz)


def random_labels(grid, seed, nregions=3):
    """Random smooth label field with the given number of contiguous regions."""
    rng = np.random.default_rng(seed)
    Z, Y, X = np.meshgrid(grid.z_coords(), grid.y_coords(), grid.x_coords(),
                          indexing="ij")
    s = np.zeros(grid.shape)
    for _ in range(3):
        k = rng.uniform(-2.0, 2.0, size=3)
        s += rng.uniform(0.5, 1.0) * np.sin(k[0] * X + k[1] * Y + k[2] * Z
                                            + rng.uniform(0, 2 * np.pi))
    edges = np.quantile(s, np.linspace(0, 1, nregions + 1)[1:-1])
    return np.digitize(s, edges).astype(np.int32)


@pytest.fixture(scope="session")
def grid16():
    return small_grid(16)
