"""Acquisition geometry, incident plane waves, the sensor propagation
operator, and the two forward imaging models (Helmholtz/multigrid and
Lippmann-Schwinger)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (Grid2D, build_extended_grid, embed_potential,
                   restrict_to_roi)
from .helmholtz import assemble
from .krylov import SolveReport, bicgstab
from .lis import GreenKernel, green_value, sample_green_kernel, solve_lis
from .multigrid import MgHierarchy


@dataclass(frozen=True)
class AcquisitionGeometry:
    """Per-view incident directions, sensor positions, and the boolean mask
    of sensors active for each view."""

    directions: np.ndarray        # (Q, 2) unit vectors
    sensors: np.ndarray           # (M, 2) physical positions
    active: np.ndarray            # (Q, M) bool
    wavelength: float
    u0: complex = 1.0 + 0.0j

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if not np.allclose(np.hypot(d[:, 0], d[:, 1]), 1.0, atol=1e-12):
            raise ValueError("directions must be unit vectors")
        if self.active.shape != (d.shape[0], self.sensors.shape[0]):
            raise ValueError("active mask shape mismatch")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")

    @property
    def num_views(self) -> int:
        return self.directions.shape[0]

    @property
    def k0(self) -> float:
        return 2.0 * np.pi / self.wavelength


def make_circular_geometry(num_views: int, num_sensors: int,
                           sensor_radius: float, wavelength: float,
                           center: tuple[float, float] = (0.0, 0.0),
                           active_count: int | None = None,
                           u0: complex = 1.0) -> AcquisitionGeometry:
    """Sources uniformly spread on a circle, shining toward the center;
    sensors uniformly on the same-center circle of ``sensor_radius``.  For
    each view, the ``active_count`` sensors farthest from the source are
    recorded (all of them when None)."""
    va = 2.0 * np.pi * np.arange(num_views) / num_views
    directions = -np.column_stack([np.cos(va), np.sin(va)])
    sa = 2.0 * np.pi * np.arange(num_sensors) / num_sensors
    sensors = np.column_stack([center[0] + sensor_radius * np.cos(sa),
                               center[1] + sensor_radius * np.sin(sa)])
    if active_count is None:
        active_count = num_sensors
    source_pos = np.column_stack([center[0] + sensor_radius * np.cos(va),
                                  center[1] + sensor_radius * np.sin(va)])
    active = np.zeros((num_views, num_sensors), dtype=bool)
    for q in range(num_views):
        dist = np.linalg.norm(sensors - source_pos[q], axis=1)
        idx = np.argsort(-dist, kind="stable")[:active_count]
        active[q, np.sort(idx)] = True
    return AcquisitionGeometry(directions, sensors, active, wavelength, u0)


@dataclass
class MeasurementSet:
    """Per-view complex measurement vectors (one entry per active sensor)."""

    views: list[np.ndarray]

    def __post_init__(self):
        for y in self.views:
            if not np.all(np.isfinite(y)):
                raise ValueError("measurements must be finite")

    @property
    def num_views(self) -> int:
        return len(self.views)


@dataclass(frozen=True)
class ScatteringScene:
    """Region of interest, background index, and acquisition geometry."""

    grid: Grid2D
    eta_b: float
    geometry: AcquisitionGeometry

    @property
    def k0(self) -> float:
        return self.geometry.k0


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and solver settings shared by the forward models."""

    abl_points: int = 0
    beta: float = 0.0
    levels: int = 2
    nu1: int = 1
    nu2: int = 1
    omega: float = 0.8
    cycle_type: int = 1
    tol: float = 1e-6
    max_iter: int = 500


def plane_wave(grid: Grid2D, direction: tuple[float, float], k0: float,
               eta_b: float, u0: complex = 1.0) -> np.ndarray:
    """Samples u0 * exp(j * k0 * eta_b * <direction, x>) on the grid."""
    d = np.asarray(direction, dtype=float)
    if not np.isclose(np.hypot(*d), 1.0):
        raise ValueError("direction must be a unit vector")
    x, y = grid.coords()
    return u0 * np.exp(1j * k0 * eta_b * (d[0] * x + d[1] * y))


def sensor_green_operator(grid: Grid2D, sensors: np.ndarray, k0: float,
                          eta_b: float) -> np.ndarray:
    """Dense M-by-N map from a source density on the grid to the scattered
    field at the sensors: entry (s, n) = h^2 * g(|x_s - x_n|)."""
    x, y = grid.coords()
    pts = np.column_stack([x.ravel(), y.ravel()])
    lo = np.array(grid.origin)
    hi = lo + grid.side_length
    inside = np.all((sensors >= lo) & (sensors <= hi), axis=1)
    if np.any(inside):
        raise ValueError("sensors must lie strictly outside the domain")
    dist = np.linalg.norm(sensors[:, None, :] - pts[None, :, :], axis=2)
    return grid.h**2 * green_value(k0 * eta_b, dist)


class HelmholtzForward:
    """Helmholtz forward model for a fixed scattering potential: caches the
    extended grid, operator, and multigrid hierarchy across views."""

    def __init__(self, scene: ScatteringScene, f: np.ndarray,
                 cfg: SolverConfig):
        k0 = scene.k0
        if np.min(f) < -k0**2 * scene.eta_b**2:
            raise ValueError("f would make eta^2 nonpositive")
        self.scene = scene
        self.cfg = cfg
        self.f = np.asarray(f, dtype=float)
        self.eg = build_extended_grid(scene.grid, cfg.abl_points, cfg.beta,
                                      cfg.levels)
        self.f_ext = embed_potential(self.f, self.eg)
        eta_sq = scene.eta_b**2 + self.f_ext / k0**2
        self.op = assemble(self.eg, eta_sq, k0, cfg.beta)
        self.hier = MgHierarchy(self.op, cfg.levels, cfg.nu1, cfg.nu2,
                                cfg.omega, cfg.cycle_type)
        self._precond = self.hier.as_preconditioner()
        ext_grid_like = _extended_as_grid(self.eg)
        self._ext_grid = ext_grid_like

    def incident_extended(self, view: int) -> np.ndarray:
        g = self.scene.geometry
        return plane_wave(self._ext_grid, g.directions[view], self.scene.k0,
                          self.scene.eta_b, g.u0)

    def scattered_field(self, view: int) -> tuple[np.ndarray, SolveReport]:
        """Scattered field on the extended domain."""
        u_in = self.incident_extended(view)
        b = self.f_ext * u_in
        u_sc, report = bicgstab(self.op.apply, b, apply_M=self._precond,
                                tol=self.cfg.tol, max_iter=self.cfg.max_iter,
                                work_meter=self.hier.meter)
        return u_sc, report

    def total_field(self, view: int) -> tuple[np.ndarray, SolveReport]:
        """Total field on the region of interest."""
        u_sc, report = self.scattered_field(view)
        u_tot = restrict_to_roi(u_sc + self.incident_extended(view), self.eg)
        return u_tot, report

    def jvp(self, view: int, v: np.ndarray,
            g_full: np.ndarray) -> tuple[np.ndarray, SolveReport]:
        """Directional derivative of the measurement map at the stored
        potential, in the direction ``v`` (a real field on the region of
        interest): d/dt [G (f + t v) u(f + t v)] at t = 0."""
        u_tot, _ = self.total_field(view)
        rhs = embed_potential((v * u_tot).astype(complex), self.eg)
        du_ext, report = bicgstab(self.op.apply, rhs, apply_M=self._precond,
                                  tol=self.cfg.tol,
                                  max_iter=self.cfg.max_iter,
                                  work_meter=self.hier.meter)
        du = restrict_to_roi(du_ext, self.eg)
        mask = self.scene.geometry.active[view]
        dy = g_full[mask] @ (v * u_tot + self.f * du).ravel()
        return dy, report

    def adjoint_solve(self, rhs: np.ndarray) -> tuple[np.ndarray, SolveReport]:
        """Solve A^H z = rhs on the extended domain.  The operator is
        complex symmetric, so this is a conjugated solve with the same
        multigrid hierarchy."""
        x, report = bicgstab(self.op.apply, np.conj(rhs),
                             apply_M=self._precond, tol=self.cfg.tol,
                             max_iter=self.cfg.max_iter,
                             work_meter=self.hier.meter)
        return np.conj(x), report


def _extended_as_grid(eg) -> Grid2D:
    side = eg.points_per_side
    return Grid2D(side, (side - 1) * eg.h, eg.origin)


def _predict(scene: ScatteringScene, f: np.ndarray, u_total: np.ndarray,
             view: int, g_full: np.ndarray) -> np.ndarray:
    mask = scene.geometry.active[view]
    return g_full[mask] @ (f * u_total).ravel()


def forward_mgh(scene: ScatteringScene, f: np.ndarray, view: int,
                cfg: SolverConfig) -> tuple[np.ndarray, SolveReport]:
    """Predicted scattered-field measurements for one view with the
    multigrid-preconditioned Helmholtz model."""
    fwd = HelmholtzForward(scene, f, cfg)
    u_tot, report = fwd.total_field(view)
    g_full = sensor_green_operator(scene.grid, scene.geometry.sensors,
                                   scene.k0, scene.eta_b)
    return _predict(scene, fwd.f, u_tot, view, g_full), report


def forward_lis(scene: ScatteringScene, f: np.ndarray, view: int,
                cfg: SolverConfig,
                kernel: GreenKernel | None = None
                ) -> tuple[np.ndarray, SolveReport]:
    """Predicted scattered-field measurements for one view with the
    Lippmann-Schwinger model."""
    if kernel is None:
        kernel = sample_green_kernel(scene.grid, scene.k0, scene.eta_b)
    g = scene.geometry
    u_in = plane_wave(scene.grid, g.directions[view], scene.k0, scene.eta_b,
                      g.u0)
    u_tot, report = solve_lis(kernel, f, u_in, tol=cfg.tol,
                              max_iter=cfg.max_iter)
    g_full = sensor_green_operator(scene.grid, g.sensors, scene.k0,
                                   scene.eta_b)
    return _predict(scene, np.asarray(f, float), u_tot, view, g_full), report
