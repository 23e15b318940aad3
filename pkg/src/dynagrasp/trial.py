"""Single-grasp trial: home, simultaneous start, servo, closure, lift, verdict.

A trial drives the full pipeline end to end: the trajectory is exported to
G-code, parsed and planned back into a platform timeline, and the controller
and platform start on the same tick. The loop runs at the controller rate
until the fingers close, the object is lost for ``loss_frames`` consecutive
frames, the object leaves the platform, or the time budget runs out.
"""

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum

from . import control, gcode, percept, plant, traj
from .control import ControllerConfig
from .percept import PerceptionConfig
from .plant import GripperMode, ObjectStatus, PlantConfig
from .traj import Trajectory, TrajectoryParams

LIFT_DISTANCE_MM = 100.0


class Outcome(Enum):
    SUCCESS = "success"
    GRASP_FAILURE = "grasp_failure"
    PERCEPTION_FAILURE = "perception_failure"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class TrialConfig:
    """Everything one trial needs; a seed stands in for a prebuilt trajectory."""

    trajectory: Trajectory | int
    speed: float  # mm/s along the trajectory
    plant: PlantConfig
    perception: PerceptionConfig
    controller: ControllerConfig
    traj_params: TrajectoryParams | None = None  # template when trajectory is a seed
    loss_frames: int = 12
    max_duration: float = 30.0

    def __post_init__(self) -> None:
        if not (0.0 < self.speed <= traj.PLATFORM_SPEED_CAP):
            raise ValueError(f"speed must be in (0, {traj.PLATFORM_SPEED_CAP}]")
        if self.loss_frames < 1:
            raise ValueError("loss_frames must be >= 1")
        if self.max_duration <= 0.0:
            raise ValueError("max_duration must be > 0")


@dataclass(frozen=True)
class TrialResult:
    outcome: Outcome
    grasp_time: float | None  # s, present for SUCCESS
    frames: int
    trace_path: str | None = None


DEFAULT_TRIAL_SEGMENTS = 40  # long enough to outlast any realistic trial


def resolve_trajectory(config: TrialConfig) -> Trajectory:
    if isinstance(config.trajectory, Trajectory):
        return config.trajectory
    params = config.traj_params or TrajectoryParams(
        n_segments=DEFAULT_TRIAL_SEGMENTS, seed=config.trajectory
    )
    if params.seed != config.trajectory:
        params = replace(params, seed=config.trajectory)
    return traj.generate(params)


class _Trace:
    _FIELDS = (
        "t", "platform_x", "platform_y", "object_x", "object_y", "object_z",
        "ee_x", "ee_y", "ee_z", "gripper_gap", "gripper_mode",
    )

    def __init__(self, path: str):
        self._file = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file)
        self._writer.writerow(self._FIELDS)

    def record(self, s: plant.PlantState) -> None:
        self._writer.writerow(
            [
                repr(s.t),
                repr(s.platform_pos[0]), repr(s.platform_pos[1]),
                repr(s.object_center[0]), repr(s.object_center[1]), repr(s.object_center[2]),
                repr(s.ee_pos[0]), repr(s.ee_pos[1]), repr(s.ee_pos[2]),
                repr(s.gripper_gap), s.gripper_mode.value,
            ]
        )

    def close(self) -> None:
        self._file.close()


def run_trial(config: TrialConfig, trace_path: str | None = None) -> TrialResult:
    """Run one deterministic trial and classify its outcome.

    The grasp time is the simulation clock at finger closure, i.e. the time
    from the simultaneous start of platform and controller to the end of the
    closing motion.
    """
    trajectory = resolve_trajectory(config)
    program = traj.emit_gcode(trajectory, config.speed) if trajectory.elements else None
    if program is None:
        timeline = gcode.MotionTimeline((0.0, 0.0), ())
    else:
        timeline = gcode.plan(gcode.parse(program), gcode.PlannerConfig())

    cameras = {c.id: c for c in config.perception.cameras}
    goals = {c.id: percept.desired_point(c, config.plant) for c in config.perception.cameras}
    grasp_height = config.plant.grasp_height
    dt = 1.0 / config.controller.rate

    state = plant.init(config.plant, timeline)
    ctrl = control.initial_state()
    trace = _Trace(trace_path) if trace_path else None
    if trace:
        trace.record(state)

    frames = 0
    unseen_streak = 0
    outcome: Outcome | None = None
    grasp_time: float | None = None
    try:
        while state.t < config.max_duration - 1e-9:
            observations = [
                percept.observe(cam, config.plant, state)
                for cam in config.perception.cameras
            ]
            if any(o.visible for o in observations):
                unseen_streak = 0
            else:
                unseen_streak += 1
                if unseen_streak >= config.loss_frames:
                    outcome = Outcome.PERCEPTION_FAILURE
                    break

            action, ctrl = control.compute_action(
                ctrl, observations, goals, cameras, config.controller,
                state.ee_pos[2], grasp_height,
            )
            state = plant.step(config.plant, state, action, timeline, dt)
            frames += 1
            if trace:
                trace.record(state)

            if state.object_status is ObjectStatus.OFF_PLATFORM:
                outcome = Outcome.GRASP_FAILURE
                break
            if state.gripper_mode is GripperMode.CLOSED:
                grasp_time = state.t
                if state.object_status is ObjectStatus.GRASPED:
                    state = _lift(config, state, timeline, dt, trace)
                    outcome = (
                        Outcome.SUCCESS
                        if state.object_status is ObjectStatus.GRASPED
                        else Outcome.GRASP_FAILURE
                    )
                else:
                    outcome = Outcome.GRASP_FAILURE
                break
        if outcome is None:
            outcome = Outcome.TIMEOUT
    finally:
        if trace:
            trace.close()

    return TrialResult(
        outcome=outcome,
        grasp_time=grasp_time if outcome is Outcome.SUCCESS else None,
        frames=frames,
        trace_path=trace_path,
    )


def _lift(config, state, timeline, dt, trace):
    """Raise the grasped object by the lift distance at the axis speed cap."""
    target_z = state.ee_pos[2] + LIFT_DISTANCE_MM
    ticks = math.ceil(LIFT_DISTANCE_MM / (config.plant.vmax_axis * dt)) + 1
    action = plant.ControlAction((0.0, 0.0, config.plant.vmax_axis), False)
    for _ in range(ticks):
        if state.ee_pos[2] >= target_z:
            break
        state = plant.step(config.plant, state, action, timeline, dt)
        if trace:
            trace.record(state)
    return state
