"""Grid solver for the curvature equation ``Laplace(log rho) = rho**2``."""
from .grids import CartGrid, PolarGrid
from .layout import Layout, LayoutParams, build_layout
from .solver import DensityField, SolverConfig, eval_density, refine, solve_density, supersolution

__all__ = [
    "CartGrid", "PolarGrid", "Layout", "LayoutParams", "build_layout",
    "DensityField", "SolverConfig", "eval_density", "refine", "solve_density", "supersolution",
]
