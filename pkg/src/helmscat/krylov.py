"""Preconditioned Bi-CGSTAB, generic over operator and preconditioner
callables operating on complex 2-D fields (or flat vectors)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# near machine-zero: transient loss of significance in rho is survivable,
# so only a scalar at roughly eps^2 of the problem scale stops the run
BREAKDOWN_TOL = float(np.finfo(float).eps) ** 2


class BicgstabBreakdown(RuntimeError):
    """A Bi-CGSTAB scalar (rho, <r0hat, v>, or <t, t>) vanished relative to
    the problem scale; the recurrence cannot continue."""


@dataclass
class SolveReport:
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    work_units: float = 0.0


def _inner(a, b):
    return np.vdot(a, b)


def bicgstab(apply_A, b, apply_M=None, x0=None, tol=1e-6, max_iter=1000,
             work_meter=None):
    """Solve A x = b with Bi-CGSTAB, applying the (linear, zero-started)
    preconditioner ``apply_M`` to the search directions.

    Stops when ||r|| <= tol * ||b||.  Returns ``(x, SolveReport)``; on
    non-convergence the partial iterate is returned with
    ``converged=False``.  Raises :class:`BicgstabBreakdown` on a vanishing
    recurrence scalar.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if apply_M is None:
        apply_M = lambda v: v

    b = np.asarray(b, dtype=complex)
    x = np.zeros_like(b) if x0 is None else np.asarray(x0, dtype=complex).copy()
    wu0 = work_meter.total if work_meter is not None else 0.0

    b_norm = float(np.linalg.norm(b))
    r = b - apply_A(x)
    r_hat = r.copy()
    rho_prev = 1.0 + 0.0j
    alpha = 1.0 + 0.0j
    sigma = 1.0 + 0.0j
    v = np.zeros_like(b)
    p = np.zeros_like(b)

    report = SolveReport(iterations=0,
                         residual_history=[float(np.linalg.norm(r))])
    threshold = tol * b_norm
    if report.residual_history[0] <= threshold:
        report.converged = True
        return x, report

    for it in range(1, max_iter + 1):
        rho = _inner(r_hat, r)
        scale = np.linalg.norm(r_hat) * np.linalg.norm(r)
        if abs(rho) < BREAKDOWN_TOL * max(scale, 1e-300):
            raise BicgstabBreakdown(f"rho breakdown at iteration {it}")
        beta = (rho / rho_prev) * (alpha / sigma)
        p = r + beta * (p - sigma * v)
        y = apply_M(p)
        v = apply_A(y)
        denom = _inner(r_hat, v)
        scale = np.linalg.norm(r_hat) * np.linalg.norm(v)
        if abs(denom) < BREAKDOWN_TOL * max(scale, 1e-300):
            raise BicgstabBreakdown(f"<r0hat, v> breakdown at iteration {it}")
        alpha = rho / denom
        h = x + alpha * y
        s = r - alpha * v
        s_norm = float(np.linalg.norm(s))
        if s_norm <= threshold:
            # half-step already converged; the stabilization solve would
            # divide by <t,t> ~ 0
            x, r = h, s
            report.iterations = it
            report.residual_history.append(s_norm)
            report.converged = True
            break
        z = apply_M(s)
        t = apply_A(z)
        tt = _inner(t, t)
        if abs(tt) < BREAKDOWN_TOL * max(float(np.linalg.norm(t))**2, 1e-300):
            raise BicgstabBreakdown(f"<t, t> breakdown at iteration {it}")
        sigma = _inner(t, s) / tt
        x = h + sigma * z
        r = s - sigma * t
        rho_prev = rho
        r_norm = float(np.linalg.norm(r))
        report.iterations = it
        report.residual_history.append(r_norm)
        if r_norm <= threshold:
            report.converged = True
            break

    if work_meter is not None:
        report.work_units = work_meter.total - wu0
    return x, report
