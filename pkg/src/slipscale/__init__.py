"""Energy-scaling laboratory for linearised single-crystal plasticity with
infinite cross-hardening (single slip) and dislocation surface energy."""

__version__ = "0.1.0"

from .analysis import BoundPair, analytic_bounds, harmonic_complete, q_alpha, q_alpha_mc, q_alpha_reflected
from .energy import EnergyBreakdown, MaterialParams, curl_energy, elastic_energy, energy_3d, hardening_energy, scalar_energy, slice_energy, total_energy
from .fields import DisplacementField, PlasticField, beta_matrix, beta_matrix_x_frame, project_single_slip
from .geometry import BCKind, BoundaryCondition, Dimension, DomainSpec, Grid, RotatedFrame, make_grid
from .minimizer import AnnealConfig, MinimizeResult, SolverConfig, brute_force_minimize, minimize, solve_convex, update_labels
from .sweep import SweepRecord, boundary_case_study, regime_map, sweep_L, sweep_gamma

__all__ = [
    "AnnealConfig", "BCKind", "BoundPair", "BoundaryCondition", "Dimension",
    "DisplacementField", "DomainSpec", "EnergyBreakdown", "Grid",
    "MaterialParams", "MinimizeResult", "PlasticField", "RotatedFrame",
    "SolverConfig", "SweepRecord", "analytic_bounds", "beta_matrix",
    "beta_matrix_x_frame", "boundary_case_study", "brute_force_minimize",
    "curl_energy", "elastic_energy", "energy_3d", "hardening_energy",
    "harmonic_complete", "make_grid", "minimize", "project_single_slip",
    "q_alpha", "q_alpha_mc", "q_alpha_reflected", "regime_map",
    "scalar_energy", "slice_energy", "solve_convex", "sweep_L",
    "sweep_gamma", "total_energy", "update_labels",
]
