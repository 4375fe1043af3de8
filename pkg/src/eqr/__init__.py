"""Equivariant regulator (EqR) tracking for a thrust-vectored vehicle on S^2 x R^3 x R^3."""

from .kernels import BACKEND
from .geometry import AlgebraElement, GroupElement
from .vehicle import ORIGIN, ChartSingularity, Input, Params, State
from .flatness import DesiredSchedule, Helix, Hover, Polynomial, sample_trajectory
from .lifting import LiftedTrajectory, lift_trajectory
from .lqr import GainSchedule, WeightSet, solve_riccati
from .simulator import SimConfig, SimResult, SweepResult, integrate_closed_loop, prepare, run, sweep

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AlgebraElement", "GroupElement", "ORIGIN", "ChartSingularity", "Input", "Params",
    "State", "DesiredSchedule", "Helix", "Hover", "Polynomial", "sample_trajectory",
    "LiftedTrajectory", "lift_trajectory", "GainSchedule", "WeightSet", "solve_riccati",
    "SimConfig", "SimResult", "SweepResult", "integrate_closed_loop", "prepare", "run", "sweep",
]
