"""Deterministic dynamic-grasping benchmark simulator.

An XY platform drives a cube along seeded random-walk trajectories (exported
and replayed as Grbl-dialect G-code) while an image-based visual servoing
controller, fed by analytic eye-in-hand camera models, tries to grasp it.
Trials, sweeps, and reports are fully deterministic given their seeds.
"""

__version__ = "0.1.0"

from .bench import Report, SweepSpec, run_benchmark
from .control import ControllerConfig
from .gcode import MotionTimeline, PlannerConfig
from .percept import CameraModel, Observation, PerceptionConfig, perception_by_kind
from .plant import ControlAction, PlantConfig, PlantState
from .traj import Trajectory, TrajectoryParams, generate
from .trial import Outcome, TrialConfig, TrialResult, run_trial

__all__ = [
    "__version__",
    "CameraModel",
    "ControlAction",
    "ControllerConfig",
    "MotionTimeline",
    "Observation",
    "Outcome",
    "PerceptionConfig",
    "PlannerConfig",
    "PlantConfig",
    "PlantState",
    "Report",
    "SweepSpec",
    "Trajectory",
    "TrajectoryParams",
    "TrialConfig",
    "TrialResult",
    "generate",
    "perception_by_kind",
    "run_benchmark",
    "run_trial",
]
