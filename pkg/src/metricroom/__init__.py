"""Hyperbolic, Hurwitz and pair-supremum densities of planar domains."""
from .barmetrics import OptimizerBudget, PairSupremumResult, delta_bar, eta_bar, kappa
from .estimator import DensityEstimator
from .geometry import (Annulus, Disk, ExteriorDisk, HalfPlane, Polygon, PuncturedPlane, WithPunctures,
                       boundary_distance, contains)
from .hurwitz import HurwitzEstimate, hurwitz_general, hyperbolic_density
from .liouville import DensityField, SolverConfig, solve_density
from .modular import constant_K, density_C01, density_two_punctures

__version__ = "0.1.0"

__all__ = [
    "Annulus", "Disk", "ExteriorDisk", "HalfPlane", "Polygon", "PuncturedPlane", "WithPunctures",
    "boundary_distance", "contains", "constant_K", "density_C01", "density_two_punctures",
    "DensityField", "SolverConfig", "solve_density", "HurwitzEstimate", "hurwitz_general", "hyperbolic_density",
    "OptimizerBudget", "PairSupremumResult", "kappa", "eta_bar", "delta_bar", "DensityEstimator",
]
