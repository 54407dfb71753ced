"""Mission planning for multi-UAV, multi-baseline SAR interferometry.

Evaluates a closed-form sensing, link and energy model of a UAV swarm and
minimises the fused DEM height error over formation, swarm velocity and
offloading power with a co-evolutionary particle swarm, plus genetic and
annealing baselines.
"""

from .baselines import GaConfig, SaConfig, cga_solve, sa_solve
from .coevolution import CoevolutionConfig, InnerConfig, Solution, solve
from .estimators import AnnealingPlanner, CoevolutionPlanner, GeneticPlanner
from .objective import ConstraintReport, SwarmPlan, evaluate_plan
from .params import ScenarioError, ScenarioParams

__all__ = [
    "ScenarioParams",
    "ScenarioError",
    "SwarmPlan",
    "ConstraintReport",
    "evaluate_plan",
    "CoevolutionConfig",
    "InnerConfig",
    "Solution",
    "solve",
    "GaConfig",
    "SaConfig",
    "cga_solve",
    "sa_solve",
    "CoevolutionPlanner",
    "GeneticPlanner",
    "AnnealingPlanner",
]

__version__ = "0.1.0"
