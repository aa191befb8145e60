"""Reconstruction engine: quadratic data fidelity, its gradient through the
adjoint of the forward-model Jacobian, the isotropic-TV proximal step with
nonnegativity, and accelerated forward-backward splitting over stochastic
view subsets."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .forward import HelmholtzForward, ScatteringScene, SolverConfig, \
    sensor_green_operator
from .grid import embed_potential, restrict_to_roi


@dataclass
class ReconstructionConfig:
    gamma: float
    tau: float
    iterations: int
    subset_size: int
    seed: int = 0
    inner_prox_iterations: int = 50
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.gamma <= 0.0 or self.tau <= 0.0:
            raise ValueError("gamma and tau must be positive")
        if self.subset_size < 1:
            raise ValueError("subset_size must be at least 1")


@dataclass
class ReconstructionHistory:
    objective: list[float] = field(default_factory=list)
    snr_db: list[float] = field(default_factory=list)
    work_units: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)


def data_fidelity(scene: ScatteringScene, f: np.ndarray, view: int,
                  y: np.ndarray, cfg: SolverConfig,
                  fwd: HelmholtzForward | None = None,
                  g_full: np.ndarray | None = None) -> float:
    """0.5 * || H(f) - y ||^2 for one view."""
    if fwd is None:
        fwd = HelmholtzForward(scene, f, cfg)
    if g_full is None:
        g_full = sensor_green_operator(scene.grid, scene.geometry.sensors,
                                       scene.k0, scene.eta_b)
    u_tot, _ = fwd.total_field(view)
    mask = scene.geometry.active[view]
    resid = g_full[mask] @ (fwd.f * u_tot).ravel() - y
    return 0.5 * float(np.linalg.norm(resid)**2)


def gradient_data_fidelity(scene: ScatteringScene, f: np.ndarray,
                           subset, measurements, cfg: SolverConfig
                           ) -> tuple[np.ndarray, float, float]:
    """Summed gradient of the per-view quadratic fidelities over ``subset``
    (fixed ascending view order), plus the subset fidelity value and the
    multigrid work units spent.

    Per view: r = H(f) - y, w = G^H r on the region of interest, then
    grad += Re(conj(u) * (w + restrict(A^{-H} embed(f * w)))).
    """
    subset = sorted(subset)
    fwd = HelmholtzForward(scene, f, cfg)
    g_full = sensor_green_operator(scene.grid, scene.geometry.sensors,
                                   scene.k0, scene.eta_b)
    s = scene.grid.points_per_side
    grad = np.zeros((s, s))
    fidelity = 0.0
    for q in subset:
        u_tot, rep = fwd.total_field(q)
        if not rep.converged:
            raise RuntimeError(f"forward solve failed for view {q}")
        mask = scene.geometry.active[q]
        g_active = g_full[mask]
        resid = g_active @ (fwd.f * u_tot).ravel() - measurements.views[q]
        fidelity += 0.5 * float(np.linalg.norm(resid)**2)
        w = (g_active.conj().T @ resid).reshape(s, s)
        rhs = embed_potential((fwd.f * w).astype(complex), fwd.eg)
        z, rep_adj = fwd.adjoint_solve(rhs)
        if not rep_adj.converged:
            raise RuntimeError(f"adjoint solve failed for view {q}")
        grad += np.real(np.conj(u_tot) * (w + restrict_to_roi(z, fwd.eg)))
    return grad, fidelity, fwd.hier.meter.total


def _forward_diff(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dx = np.zeros_like(w)
    dy = np.zeros_like(w)
    dx[:-1, :] = w[1:, :] - w[:-1, :]
    dy[:, :-1] = w[:, 1:] - w[:, :-1]
    return dx, dy


def _neg_divergence(px: np.ndarray, py: np.ndarray) -> np.ndarray:
    # adjoint of _forward_diff
    out = np.zeros_like(px)
    out[:-1, :] -= px[:-1, :]
    out[1:, :] += px[:-1, :]
    out[:, :-1] -= py[:, :-1]
    out[:, 1:] += py[:, :-1]
    return out


def tv_value(w: np.ndarray) -> float:
    """Isotropic total variation with forward differences and a replicate
    (zero-gradient) far boundary."""
    dx, dy = _forward_diff(w)
    return float(np.sum(np.hypot(dx, dy)))


def tv_prox(w: np.ndarray, weight: float, inner_iters: int = 50
            ) -> np.ndarray:
    """Proximal map of weight*TV restricted to the nonnegative orthant,
    via fast gradient projection on the dual."""
    if weight < 0.0:
        raise ValueError("weight must be nonnegative")
    if weight == 0.0:
        return np.maximum(w, 0.0)
    px = np.zeros_like(w)
    py = np.zeros_like(w)
    bx, by = px.copy(), py.copy()
    t = 1.0
    out = np.maximum(w, 0.0)
    for _ in range(inner_iters):
        out = np.maximum(w - weight * _neg_divergence(bx, by), 0.0)
        gx, gy = _forward_diff(out)
        cx = bx + gx / (8.0 * weight)
        cy = by + gy / (8.0 * weight)
        norm = np.maximum(1.0, np.hypot(cx, cy))
        px_new, py_new = cx / norm, cy / norm
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / t_new
        bx = px_new + mom * (px_new - px)
        by = py_new + mom * (py_new - py)
        px, py, t = px_new, py_new, t_new
    return np.maximum(w - weight * _neg_divergence(px, py), 0.0)


def snr(eta_star: np.ndarray, eta_true: np.ndarray) -> float:
    """20 log10(||eta_true|| / ||eta_true - eta_star||), +inf at equality."""
    err = np.linalg.norm(eta_true - eta_star)
    if err == 0.0:
        return float("inf")
    return float(20.0 * np.log10(np.linalg.norm(eta_true) / err))


def eta_from_potential(f: np.ndarray, eta_b: float, k0: float) -> np.ndarray:
    return np.sqrt(eta_b**2 + f / k0**2)


def select_subset(rng: np.random.Generator, num_views: int,
                  subset_size: int) -> list[int]:
    """Seeded draw of a view subset; a pure function of the generator state
    and (num_views, subset_size)."""
    return sorted(rng.permutation(num_views)[:subset_size].tolist())


def reconstruct_fbs(measurements, scene: ScatteringScene,
                    config: ReconstructionConfig,
                    eta_true: np.ndarray | None = None
                    ) -> tuple[np.ndarray, ReconstructionHistory]:
    """Accelerated forward-backward splitting on the scattering potential.

    Momentum follows the classic alpha update; the gradient is evaluated at
    the extrapolated point.  The logged objective is the selected subset's
    data fidelity at the extrapolated point plus tau * TV of the new
    iterate.
    """
    if measurements.num_views != scene.geometry.num_views:
        raise ValueError("measurement views do not match geometry")
    s = scene.grid.points_per_side
    f = np.zeros((s, s))
    f_bar = f.copy()
    alpha = 1.0
    rng = np.random.default_rng(config.seed)
    history = ReconstructionHistory()
    t0 = time.perf_counter()
    work = 0.0
    for _ in range(config.iterations):
        subset = select_subset(rng, scene.geometry.num_views,
                               config.subset_size)
        grad, fidelity, wu = gradient_data_fidelity(
            scene, f_bar, subset, measurements, config.solver)
        f_new = tv_prox(f_bar - config.gamma * grad,
                        config.gamma * config.tau,
                        config.inner_prox_iterations)
        alpha_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * alpha * alpha))
        f_bar = f_new + ((alpha - 1.0) / alpha_new) * (f_new - f)
        f, alpha = f_new, alpha_new

        work += wu
        history.objective.append(fidelity + config.tau * tv_value(f_new))
        if eta_true is not None:
            eta_star = eta_from_potential(f_new, scene.eta_b, scene.k0)
            history.snr_db.append(snr(eta_star, eta_true))
        history.work_units.append(work)
        history.seconds.append(time.perf_counter() - t0)
    return f, history
