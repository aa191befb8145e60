"""2-D diffraction tomography: Helmholtz forward model with a geometric
multigrid preconditioner, a Lippmann-Schwinger baseline, and TV-regularized
refractive-index reconstruction."""

from .grid import (Grid2D, ExtendedGrid2D, build_extended_grid,
                   embed_potential, restrict_to_roi)
from .helmholtz import HelmholtzOperator, assemble
from .multigrid import (MgHierarchy, WorkUnitMeter, damped_jacobi,
                        restrict_full_weighting, prolong_bilinear,
                        coarsen_operator, mg_cycle, lfa_symbols)
from .krylov import SolveReport, BicgstabBreakdown, bicgstab
from .lis import GreenKernel, sample_green_kernel, apply_green_convolution, \
    solve_lis
from .forward import (AcquisitionGeometry, MeasurementSet, ScatteringScene,
                      SolverConfig, HelmholtzForward, plane_wave,
                      sensor_green_operator, make_circular_geometry,
                      forward_mgh, forward_lis)
from .oracle import (DiskScene, analytic_disk_field, dense_reference_solve,
                     relative_error)
from .inverse import (ReconstructionConfig, ReconstructionHistory,
                      data_fidelity, gradient_data_fidelity, tv_value,
                      tv_prox, reconstruct_fbs, snr, eta_from_potential)

__all__ = [
    "Grid2D", "ExtendedGrid2D", "build_extended_grid", "embed_potential",
    "restrict_to_roi", "HelmholtzOperator", "assemble", "MgHierarchy",
    "WorkUnitMeter", "damped_jacobi", "restrict_full_weighting",
    "prolong_bilinear", "coarsen_operator", "mg_cycle", "lfa_symbols",
    "SolveReport", "BicgstabBreakdown", "bicgstab", "GreenKernel",
    "sample_green_kernel", "apply_green_convolution", "solve_lis",
    "AcquisitionGeometry", "MeasurementSet", "ScatteringScene",
    "SolverConfig", "HelmholtzForward", "plane_wave",
    "sensor_green_operator", "make_circular_geometry", "forward_mgh",
    "forward_lis", "DiskScene", "analytic_disk_field",
    "dense_reference_solve", "relative_error", "ReconstructionConfig",
    "ReconstructionHistory", "data_fidelity", "gradient_data_fidelity",
    "tv_value", "tv_prox", "reconstruct_fbs", "snr", "eta_from_potential",
]
