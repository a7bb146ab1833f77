"""Approximate invariant sets of maps by minimizing a point-cloud invariance energy."""

__version__ = "0.1.0"

from .dynamics import MapSystem, VectorField, make_map  # noqa: E402
from .energy import EnergyReport, LJParams, augmented, energy  # noqa: E402
from .geometry import AxisBox, PointCloud, hausdorff_exact, modified_hausdorff  # noqa: E402
from .optimize import OptimOptions, OptimRun, Termination, minimize  # noqa: E402

__all__ = [
    "AxisBox",
    "EnergyReport",
    "LJParams",
    "MapSystem",
    "OptimOptions",
    "OptimRun",
    "PointCloud",
    "Termination",
    "VectorField",
    "augmented",
    "energy",
    "hausdorff_exact",
    "make_map",
    "minimize",
    "modified_hausdorff",
]
