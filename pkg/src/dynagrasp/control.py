"""Image-based visual servoing controller with dual-camera arbitration.

Every control tick maps the selected camera's normalized image error to a
lateral end-effector velocity through a PD law, descends at a constant rate
until the grasp height is reached, and raises the close command once the
error sits inside the asymmetric close box. With two cameras, the one
currently measuring the larger object area drives the robot.

The controller holds no pose estimate: per-camera centroid history for the
derivative term is its only state, and that history is dropped for any
camera that loses sight of the object, so the derivative restarts at zero on
reacquisition instead of spiking.
"""

import math
from dataclasses import dataclass, field

from .percept import CameraModel, Observation
from .plant import ControlAction

Point2 = tuple[float, float]


@dataclass(frozen=True)
class ControllerConfig:
    """Servo gains and thresholds. Velocities are in m/s, image errors unitless.

    ``deriv_tau`` low-passes the error rate fed to the D term. A raw
    one-frame difference reacts to the camera's own last step with loop gain
    above one at close range, which turns into a tick-rate velocity chatter;
    a~0.1 s filter removes that while leaving real object motion visible.
    """

    kp: float = 0.3
    kd: float = 0.06
    vmax: float = 0.3  # per-axis lateral clamp, m/s
    descent: float = 0.075  # m/s
    close_ex: float = 0.8  # |error| bound along the finger closing axis
    close_ey: float = 0.15  # |error| bound across the fingers
    rate: float = 25.0  # Hz
    deriv_tau: float = 0.08  # s, derivative low-pass time constant

    def __post_init__(self) -> None:
        for name in ("kp", "kd", "vmax", "descent", "close_ex", "close_ey", "rate"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.close_ex >= 1.0 or self.close_ey >= 1.0:
            raise ValueError("close thresholds must be < 1")
        if self.deriv_tau < 0.0:
            raise ValueError("deriv_tau must be >= 0")


@dataclass(frozen=True)
class ImageError:
    """Normalized image error and its finite-difference rate."""

    e: Point2
    e_dot: Point2


@dataclass(frozen=True)
class ControllerState:
    """Per-camera tracking memory plus the last arbitration winner.

    ``prev`` maps camera id to (centroid, timestamp, filtered e_dot); entries
    survive only for cameras that saw the object on the latest frame.
    """

    prev: dict = field(default_factory=dict)
    last_selected: str | None = None


def initial_state() -> ControllerState:
    return ControllerState()


def _lateral_axes(camera: CameraModel) -> tuple[Point2, Point2]:
    """Workspace-plane directions of the camera's image axes (unit vectors)."""
    out = []
    for axis in camera.axes[:2]:
        n = math.hypot(axis[0], axis[1])
        if n < 1e-9:
            raise ValueError(f"camera {camera.id}: image axis has no workspace component")
        out.append((axis[0] / n, axis[1] / n))
    return out[0], out[1]


def image_error(
    observation: Observation, goal: Point2, previous: tuple | None
) -> ImageError:
    """Raw finite-difference error of one visible observation.

    The rate is the one-frame difference of the error (equivalently the
    negated centroid rate, the goal being constant); it is zero on the first
    frame after a gap.
    """
    c = observation.centroid
    e = (goal[0] - c[0], goal[1] - c[1])
    if previous is None:
        return ImageError(e, (0.0, 0.0))
    prev_c, prev_t = previous[0], previous[1]
    dt = observation.t - prev_t
    if dt <= 0.0:
        return ImageError(e, (0.0, 0.0))
    e_prev = (goal[0] - prev_c[0], goal[1] - prev_c[1])
    return ImageError(e, ((e[0] - e_prev[0]) / dt, (e[1] - e_prev[1]) / dt))


def compute_action(
    state: ControllerState,
    observations: list[Observation],
    goals: dict[str, Point2],
    cameras: dict[str, CameraModel],
    config: ControllerConfig,
    ee_z: float,
    grasp_height: float,
) -> tuple[ControlAction, ControllerState]:
    """One servo tick: observations in, (velocity command, new state) out.

    An unobserved frame is a defined state, not an error: lateral motion
    stops, the descent pauses, and the close command stays off.
    """
    visible = [o for o in observations if o.visible]
    new_prev = {}
    errors: dict[str, ImageError] = {}
    rates: dict[str, Point2] = {}
    for obs in visible:
        goal = goals[obs.camera_id]
        previous = state.prev.get(obs.camera_id)
        err = image_error(obs, goal, previous)
        errors[obs.camera_id] = err
        if previous is None or obs.t <= previous[1]:
            filt = (0.0, 0.0)
        else:
            frame_dt = obs.t - previous[1]
            alpha = frame_dt / (config.deriv_tau + frame_dt) if config.deriv_tau > 0.0 else 1.0
            prev_filt = previous[2]
            filt = (
                prev_filt[0] + alpha * (err.e_dot[0] - prev_filt[0]),
                prev_filt[1] + alpha * (err.e_dot[1] - prev_filt[1]),
            )
        rates[obs.camera_id] = filt
        new_prev[obs.camera_id] = (obs.centroid, obs.t, filt)

    at_height = ee_z <= grasp_height
    if not visible:
        return (
            ControlAction((0.0, 0.0, 0.0), False),
            ControllerState(new_prev, None),
        )

    selected = max(visible, key=lambda o: o.area)
    err = errors[selected.camera_id]
    e_dot = rates[selected.camera_id]
    cmd_u = config.kp * err.e[0] + config.kd * e_dot[0]
    cmd_v = config.kp * err.e[1] + config.kd * e_dot[1]
    cmd_u = min(max(cmd_u, -config.vmax), config.vmax)
    cmd_v = min(max(cmd_v, -config.vmax), config.vmax)

    # Image-to-workspace mapping: drive the camera so the measured centroid
    # moves toward the goal, i.e. against the projected image axes.
    u_dir, v_dir = _lateral_axes(cameras[selected.camera_id])
    vx = -(u_dir[0] * cmd_u + v_dir[0] * cmd_v) * 1000.0
    vy = -(u_dir[1] * cmd_u + v_dir[1] * cmd_v) * 1000.0
    vmax_mm = config.vmax * 1000.0
    vx = min(max(vx, -vmax_mm), vmax_mm)
    vy = min(max(vy, -vmax_mm), vmax_mm)

    vz = 0.0 if at_height else -config.descent * 1000.0
    # Closing is armed only once the descent is complete; firing on the loose
    # error box alone would close the fingers hundreds of mm above the cube.
    close = (
        at_height
        and abs(err.e[0]) < config.close_ex
        and abs(err.e[1]) < config.close_ey
    )
    return (
        ControlAction((vx, vy, vz), close),
        ControllerState(new_prev, selected.camera_id),
    )
