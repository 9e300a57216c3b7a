"""Harmonic analysis and pseudo-differential operators on homogeneous trees."""
from .boundary import (CylinderPartition, TruncationError, averaging, boundary_integral,
                       build_partition, height)
from .estimators import FourierHelgasonTransform, PseudoDifferentialOperator
from .io import ConfigError, FormatError, RunConfig
from .psdo import NuclearDecomposition, kernel_from_symbol, operator_report, symbol_from_decomposition
from .spectral import PoleError, SpectralGrid, build_grid, c_function, plancherel_density
from .suite import run_suite
from .transform import fh_forward, fh_inverse, plancherel_pairing
from .tree import TreeBall, build_ball

__version__ = "0.1.0"

__all__ = [
    "TreeBall",
    "build_ball",
    "CylinderPartition",
    "TruncationError",
    "build_partition",
    "height",
    "averaging",
    "boundary_integral",
    "SpectralGrid",
    "PoleError",
    "build_grid",
    "c_function",
    "plancherel_density",
    "fh_forward",
    "fh_inverse",
    "plancherel_pairing",
    "NuclearDecomposition",
    "symbol_from_decomposition",
    "kernel_from_symbol",
    "operator_report",
    "FourierHelgasonTransform",
    "PseudoDifferentialOperator",
    "RunConfig",
    "ConfigError",
    "FormatError",
    "run_suite",
]
