import numpy as np
import pytest

from helmscat import (Grid2D, DiskScene, analytic_disk_field, relative_error,
                      sample_green_kernel, apply_green_convolution, solve_lis,
                      plane_wave)
from helmscat.lis import green_value, _singular_cell_integral


def test_green_value_frozen_point():
    # (j/4) H0^(1)(1) with H0^(1)(1) = J0(1) + j Y0(1)
    g = green_value(1.0, 1.0)
    assert g.real == pytest.approx(-0.25 * 0.08825696421567696, abs=1e-14)
    assert g.imag == pytest.approx(0.25 * 0.7651976865579666, abs=1e-14)


def test_green_value_outgoing_decay():
    # amplitude decays like 1/sqrt(r) at large argument
    r = np.array([50.0, 200.0])
    vals = np.abs(green_value(1.0, r))
    assert vals[1] == pytest.approx(vals[0] / 2.0, rel=1e-2)


def test_singular_cell_against_brute_force():
    k, h = 0.9, 0.25
    # midpoint rule over the singular cell; an even count keeps the sample
    # points away from the singularity at the center
    n = 800
    t = (np.arange(n) + 0.5) / n * h - h / 2.0
    x, y = np.meshgrid(t, t, indexing="ij")
    r = np.hypot(x, y)
    brute = np.sum(green_value(k, r)) * (h / n) ** 2
    exact = _singular_cell_integral(k, h)
    assert abs(brute - exact) < 1e-6 * abs(exact)


def test_convolution_matches_direct_sum():
    g = Grid2D(9, 4.0, (-2.0, -2.0))
    kernel = sample_green_kernel(g, 1.3, 1.0)
    rng = np.random.default_rng(0)
    w = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    out = apply_green_convolution(kernel, w)
    x, y = g.coords()
    k = 1.3
    direct = np.zeros((9, 9), dtype=complex)
    for i in range(9):
        for j in range(9):
            r = np.hypot(x - x[i, j], y - y[i, j])
            gv = np.where(r > 0, green_value(k, np.maximum(r, 1e-12)), 0.0)
            gv = gv * g.h ** 2
            gv[i, j] = kernel.singular_value
            direct[i, j] = np.sum(gv * w)
    np.testing.assert_allclose(out, direct, rtol=1e-11, atol=1e-13)


def test_zero_potential_returns_incident():
    g = Grid2D(17, 16.0, (-8.0, -8.0))
    kernel = sample_green_kernel(g, 2.0 * np.pi / 10.0, 1.0)
    u_in = plane_wave(g, (1.0, 0.0), 2.0 * np.pi / 10.0, 1.0)
    u, report = solve_lis(kernel, np.zeros((17, 17)), u_in)
    assert report.converged
    assert report.iterations <= 1
    np.testing.assert_allclose(u, u_in)


def test_disk_field_accuracy():
    lam, eta_b, eta_d = 10.0, 1.0, 1.4
    k0 = 2.0 * np.pi / lam
    g = Grid2D(65, 32.0, (-16.0, -16.0))
    x, y = g.coords()
    f = np.where(np.hypot(x, y) <= 12.5,
                 k0 ** 2 * (eta_d ** 2 - eta_b ** 2), 0.0)
    kernel = sample_green_kernel(g, k0, eta_b)
    u_in = plane_wave(g, (0.0, -1.0), k0, eta_b)
    u, report = solve_lis(kernel, f, u_in, tol=1e-8, max_iter=1000)
    assert report.converged
    scene = DiskScene(12.5, eta_d, eta_b, lam)
    u_ref = analytic_disk_field(scene, g, (0.0, -1.0))
    assert relative_error(u, u_ref) < 1e-2


def test_shape_validation():
    g = Grid2D(9, 4.0)
    kernel = sample_green_kernel(g, 1.0, 1.0)
    with pytest.raises(ValueError):
        apply_green_convolution(kernel, np.zeros((5, 5)))
    with pytest.raises(ValueError):
        solve_lis(kernel, np.zeros((5, 5)), np.zeros((9, 9)))
    with pytest.raises(ValueError):
        sample_green_kernel(g, 0.0, 1.0)
