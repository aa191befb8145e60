"""Geometric multigrid cycle used as a preconditioner for the Helmholtz
system: damped-Jacobi smoothing, full-weighting restriction, bilinear
prolongation, rediscretized coarse operators, and an exact coarsest solve.

As written, the transfer stencils satisfy P = 4*R^T (the prolongation is the
adjoint of the restriction up to the scale 4 absorbed by the 1/16 weights).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import splu

from .helmholtz import HelmholtzOperator


def damped_jacobi(op: HelmholtzOperator, b: np.ndarray, v: np.ndarray,
                  omega: float, sweeps: int) -> np.ndarray:
    """v <- v - omega * D^{-1} (A v - b), repeated ``sweeps`` times."""
    if not 0.0 < omega <= 1.0:
        raise ValueError("omega must be in (0, 1]")
    if sweeps < 0:
        raise ValueError("sweeps must be nonnegative")
    d = op.diagonal()
    if np.any(d == 0.0):
        raise ZeroDivisionError("operator has a zero diagonal entry")
    out = v
    for _ in range(sweeps):
        out = out - omega * (op.apply(out) - b) / d
    return out


def restrict_full_weighting(r_fine: np.ndarray) -> np.ndarray:
    """Full-weighting transfer to the twice-coarser grid; fine samples that
    fall outside the grid read as zero."""
    sf = r_fine.shape[0]
    if sf % 2 == 0:
        raise ValueError("fine side must be odd")
    p = np.zeros((sf + 2, sf + 2), dtype=r_fine.dtype)
    p[1:-1, 1:-1] = r_fine
    c = p[1:-1:2, 1:-1:2]
    edges = (p[0:-2:2, 1:-1:2] + p[2::2, 1:-1:2]
             + p[1:-1:2, 0:-2:2] + p[1:-1:2, 2::2])
    corners = (p[0:-2:2, 0:-2:2] + p[0:-2:2, 2::2]
               + p[2::2, 0:-2:2] + p[2::2, 2::2])
    return (4.0 * c + 2.0 * edges + corners) / 16.0


def prolong_bilinear(e_coarse: np.ndarray) -> np.ndarray:
    """Bilinear interpolation to the twice-finer grid: even-even indices
    copy, mixed parities average two coarse neighbors, odd-odd four."""
    sc = e_coarse.shape[0]
    sf = 2 * sc - 1
    out = np.zeros((sf, sf), dtype=e_coarse.dtype)
    out[0::2, 0::2] = e_coarse
    out[1::2, 0::2] = 0.5 * (e_coarse[:-1, :] + e_coarse[1:, :])
    out[0::2, 1::2] = 0.5 * (e_coarse[:, :-1] + e_coarse[:, 1:])
    out[1::2, 1::2] = 0.25 * (e_coarse[:-1, :-1] + e_coarse[:-1, 1:]
                              + e_coarse[1:, :-1] + e_coarse[1:, 1:])
    return out


def coarsen_operator(fine_op: HelmholtzOperator) -> HelmholtzOperator:
    """Rediscretize at double mesh size: the Laplacian is rebuilt at 2h, the
    squared-index field is transferred by full weighting with its boundary
    ring reset to the background value, and the ABL profile is recomputed
    from the coarse geometry."""
    geom_c = fine_op.geom.coarsen()
    eta_sq_c = restrict_full_weighting(fine_op.eta_sq)
    background = fine_op.eta_sq[0, 0]
    eta_sq_c[0, :] = background
    eta_sq_c[-1, :] = background
    eta_sq_c[:, 0] = background
    eta_sq_c[:, -1] = background
    return HelmholtzOperator(geom_c, eta_sq_c, fine_op.k0, fine_op.beta)


@dataclass
class WorkUnitMeter:
    """Tallies smoother sweeps, weighted 2^(-2p) at level p (d = 2)."""

    sweeps_per_level: dict[int, int] = field(default_factory=dict)

    def record(self, level: int, sweeps: int):
        self.sweeps_per_level[level] = (
            self.sweeps_per_level.get(level, 0) + sweeps)

    @property
    def total(self) -> float:
        return sum(n * 4.0**(-p) for p, n in self.sweeps_per_level.items())

    def reset(self):
        self.sweeps_per_level.clear()


class MgHierarchy:
    """Per-level operators plus smoothing/cycling configuration."""

    def __init__(self, fine_op: HelmholtzOperator, n_levels: int,
                 nu1: int = 1, nu2: int = 1, omega: float = 0.8,
                 cycle_type: int = 1):
        if n_levels < 1:
            raise ValueError("need at least one level")
        if cycle_type < 1:
            raise ValueError("cycle_type must be >= 1")
        self.nu1, self.nu2, self.omega = nu1, nu2, omega
        self.cycle_type = cycle_type
        self.levels = [fine_op]
        for _ in range(n_levels - 1):
            self.levels.append(coarsen_operator(self.levels[-1]))
        coarsest = self.levels[-1]
        if coarsest.side < 3:
            raise ValueError("coarsest grid degenerate")
        wavelength = 2.0 * np.pi / (coarsest.k0 * np.sqrt(np.max(coarsest.eta_sq)))
        ppw = wavelength / coarsest.h
        if ppw < 10.0:
            warnings.warn(
                f"coarsest level has {ppw:.1f} points per wavelength "
                "(rule of thumb is 10)", stacklevel=2)
        self._coarse_lu = splu(coarsest.as_sparse())
        self.meter = WorkUnitMeter()

    def coarsest_solve(self, b: np.ndarray) -> np.ndarray:
        s = self.levels[-1].side
        return self._coarse_lu.solve(b.ravel()).reshape(s, s)

    def as_preconditioner(self):
        """Callable applying one multigrid cycle from a zero initial guess
        (a fixed linear operator, as a Krylov preconditioner requires)."""
        def apply_m(b):
            return mg_cycle(self, b, np.zeros_like(b))
        return apply_m


def mg_cycle(hier: MgHierarchy, b: np.ndarray, v0: np.ndarray,
             level: int = 0) -> np.ndarray:
    """One multigrid cycle (V for cycle_type=1, W for 2) on ``level``."""
    op = hier.levels[level]
    if level == len(hier.levels) - 1:
        return hier.coarsest_solve(b)
    v = damped_jacobi(op, b, v0, hier.omega, hier.nu1)
    hier.meter.record(level, hier.nu1)
    r = b - op.apply(v)
    r_c = restrict_full_weighting(r)
    e_c = np.zeros_like(r_c)
    for _ in range(hier.cycle_type):
        e_c = mg_cycle(hier, r_c, e_c, level + 1)
    v = v + prolong_bilinear(e_c)
    v = damped_jacobi(op, b, v, hier.omega, hier.nu2)
    hier.meter.record(level, hier.nu2)
    return v


def lfa_symbols(k_times_h: float, omega: float,
                theta: tuple[float, float]) -> dict[str, complex]:
    """Constant-coefficient symbols of the operator (with h^2 folded out)
    and of the damped-Jacobi iteration at frequency theta."""
    kh2 = k_times_h**2
    if kh2 == 4.0:
        raise ZeroDivisionError("smoother symbol undefined at (kh)^2 = 4")
    c = np.cos(theta[0]) + np.cos(theta[1])
    a = 4.0 - 2.0 * c - kh2
    s = 1.0 - omega + (2.0 * omega / (4.0 - kh2)) * c
    return {"a_symbol": complex(a), "s_symbol": complex(s)}
