"""Lippmann-Schwinger baseline: free-space Green's function sampled on a
2x-padded grid, FFT convolution, and the total-field solve
(I - G diag(f)) u = u_in via un-preconditioned Bi-CGSTAB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import hankel1, j1, y1

from .grid import Grid2D
from .krylov import SolveReport, bicgstab


def green_value(k: float, r) -> np.ndarray:
    """Free-space 2-D Green's function (j/4) H0^(1)(k r), no cell weight."""
    return 0.25j * hankel1(0, k * np.asarray(r))


def _singular_cell_integral(k: float, h: float) -> complex:
    """Integral of the Green's function over the h-by-h cell centered at the
    singularity.

    In polar coordinates the radial integral is analytic:
        int_0^R J0(kr) r dr = R J1(kR) / k
        int_0^R Y0(kr) r dr = R Y1(kR) / k + 2 / (pi k^2),
    which leaves a smooth 1-D integral over the angle (8-fold symmetry of
    the square cell).
    """
    def radius(theta):
        return 0.5 * h / np.cos(theta)

    def re_part(theta):
        R = radius(theta)
        # Re[(j/4)(J0 + jY0)] = -(1/4) * Y0-part
        return -0.25 * (R * y1(k * R) / k + 2.0 / (np.pi * k**2))

    def im_part(theta):
        R = radius(theta)
        return 0.25 * R * j1(k * R) / k

    re, _ = quad(re_part, 0.0, np.pi / 4.0, epsabs=1e-13, epsrel=1e-12)
    im, _ = quad(im_part, 0.0, np.pi / 4.0, epsabs=1e-13, epsrel=1e-12)
    return 8.0 * (re + 1j * im)


@dataclass
class GreenKernel:
    """Discretized Green's kernel with the quadrature weight h^2 folded in;
    ``spectrum`` is the FFT of the kernel on the (2s)^2 padded grid."""

    grid: Grid2D
    k0: float
    eta_b: float
    spectrum: np.ndarray
    singular_value: complex


def sample_green_kernel(grid: Grid2D, k0: float, eta_b: float) -> GreenKernel:
    if k0 * eta_b <= 0.0:
        raise ValueError("k0 * eta_b must be positive")
    s = grid.points_per_side
    h = grid.h
    k = k0 * eta_b
    idx = np.arange(2 * s)
    off = np.where(idx < s, idx, idx - 2 * s)
    om, on = np.meshgrid(off, off, indexing="ij")
    r = h * np.hypot(om, on)
    kern = np.zeros((2 * s, 2 * s), dtype=complex)
    nz = r > 0
    kern[nz] = h**2 * green_value(k, r[nz])
    g0 = _singular_cell_integral(k, h)
    kern[0, 0] = g0
    return GreenKernel(grid, k0, eta_b, np.fft.fft2(kern), g0)


def apply_green_convolution(kernel: GreenKernel, w: np.ndarray) -> np.ndarray:
    """Aperiodic convolution of a field on the region of interest with the
    Green's kernel, via zero padding to twice the side."""
    s = kernel.grid.points_per_side
    if w.shape != (s, s):
        raise ValueError(f"field shape {w.shape} does not match grid {s}")
    padded = np.zeros((2 * s, 2 * s), dtype=complex)
    padded[:s, :s] = w
    conv = np.fft.ifft2(np.fft.fft2(padded) * kernel.spectrum)
    return conv[:s, :s]


def solve_lis(kernel: GreenKernel, f: np.ndarray, u_in: np.ndarray,
              tol: float = 1e-6, max_iter: int = 1000
              ) -> tuple[np.ndarray, SolveReport]:
    """Total field on the region of interest from the scattering potential
    ``f`` and incident field ``u_in``."""
    s = kernel.grid.points_per_side
    if f.shape != (s, s) or u_in.shape != (s, s):
        raise ValueError("f and u_in must live on the kernel grid")

    def apply_A(u):
        return u - apply_green_convolution(kernel, f * u)

    return bicgstab(apply_A, u_in.astype(complex), tol=tol,
                    max_iter=max_iter)
