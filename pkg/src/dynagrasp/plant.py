"""Geometric world model: platform, cube, end-effector, antipodal gripper.

The plant is a pure discrete-time transition on an immutable state. There is
no dynamics engine: finger/cube contact is resolved quasi-statically by
translating the cube along the smallest horizontal vector that removes the
overlap. A translation larger than ``push_limit`` in one tick, or one that
moves the cube centre off the platform, counts as knocking the object off.

Frames: world z up, platform top at ``platform_top_z``. ``ee_pos`` is the
midpoint between the two fingertip centres; the fingers extend upward from
there by ``finger_length`` and close along the x axis.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

from .gcode import MotionTimeline

Vec3 = tuple[float, float, float]


class ObjectStatus(Enum):
    ON_PLATFORM = "on_platform"
    GRASPED = "grasped"
    KNOCKED = "knocked"
    OFF_PLATFORM = "off_platform"


class GripperMode(Enum):
    OPEN = "open"
    CLOSING = "closing"
    CLOSED = "closed"


@dataclass(frozen=True)
class PlantConfig:
    """Fixed geometry and kinematic limits of the simulated cell."""

    cube_side: float = 30.0
    platform_top_z: float = 0.0
    home_height: float = 500.0
    finger_gap_open: float = 100.0
    finger_length: float = 50.0
    finger_thickness: float = 15.0
    finger_width: float = 20.0
    grasp_height_z: float | None = None  # fingertip target height; None = cube_side/2
    close_speed: float = 200.0
    vmax_axis: float = 300.0
    descent_speed: float = 75.0
    push_limit: float = 20.0  # mm of contact push tolerated per control tick
    platform_half: float = 130.0  # 260x260 mm platform
    overlap_min_frac: float = 0.30  # min cube/finger overlap across the finger width

    def __post_init__(self) -> None:
        if self.cube_side >= self.finger_gap_open:
            raise ValueError("cube_side must be smaller than finger_gap_open")
        for name in (
            "cube_side",
            "home_height",
            "finger_gap_open",
            "finger_length",
            "finger_thickness",
            "finger_width",
            "close_speed",
            "vmax_axis",
            "descent_speed",
            "push_limit",
            "platform_half",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.grasp_height_z is not None and self.grasp_height_z <= 0.0:
            raise ValueError("grasp_height_z must be > 0")
        if not (0.0 < self.overlap_min_frac <= 1.0):
            raise ValueError("overlap_min_frac must be in (0, 1]")

    @property
    def grasp_height(self) -> float:
        """Resolved fingertip target height above the platform top."""
        if self.grasp_height_z is not None:
            return self.grasp_height_z
        return self.platform_top_z + self.cube_side / 2.0


@dataclass(frozen=True)
class ControlAction:
    """End-effector velocity command (mm/s) plus the binary close command."""

    v: Vec3
    close: bool


@dataclass(frozen=True)
class PlantState:
    t: float
    platform_pos: tuple[float, float]
    object_center: Vec3
    object_status: ObjectStatus
    ee_pos: Vec3
    gripper_gap: float
    gripper_mode: GripperMode
    grasp_offset: Vec3 | None = None  # cube centre relative to ee once grasped
    pinch_ok: bool | None = None  # closure verdict frozen at first finger contact


def init(config: PlantConfig, timeline: MotionTimeline) -> PlantState:
    """Initial state: ee at home above the platform centre, fingers open."""
    p0 = timeline.position_at(0.0)
    if math.hypot(p0[0], p0[1]) > 1e-6:
        raise ValueError("timeline must start at the workspace origin")
    rest_z = config.platform_top_z + config.cube_side / 2.0
    return PlantState(
        t=0.0,
        platform_pos=p0,
        object_center=(p0[0], p0[1], rest_z),
        object_status=ObjectStatus.ON_PLATFORM,
        ee_pos=(0.0, 0.0, config.home_height),
        gripper_gap=config.finger_gap_open,
        gripper_mode=GripperMode.OPEN,
    )


def _interval_overlap(a0: float, a1: float, b0: float, b1: float) -> float:
    return min(a1, b1) - max(a0, b0)


def _finger_boxes(config: PlantConfig, ee: Vec3, gap: float):
    """The two finger volumes as ((x0,x1),(y0,y1),(z0,z1)) tuples."""
    half_w = config.finger_width / 2.0
    y = (ee[1] - half_w, ee[1] + half_w)
    z = (ee[2], ee[2] + config.finger_length)
    right = ((ee[0] + gap / 2.0, ee[0] + gap / 2.0 + config.finger_thickness), y, z)
    left = ((ee[0] - gap / 2.0 - config.finger_thickness, ee[0] - gap / 2.0), y, z)
    return left, right


def _push_out(box, cube_min, cube_max) -> tuple[float, float]:
    """Smallest horizontal translation moving the cube box out of ``box``.

    Returns (0, 0) when there is no full 3-axis overlap. Vertical pushes are
    not modelled: a finger bearing down on the cube resolves sideways, which
    is the failure the push limit is meant to catch.
    """
    (bx0, bx1), (by0, by1), (bz0, bz1) = box
    if _interval_overlap(cube_min[2], cube_max[2], bz0, bz1) <= 0.0:
        return (0.0, 0.0)
    if _interval_overlap(cube_min[0], cube_max[0], bx0, bx1) <= 0.0:
        return (0.0, 0.0)
    if _interval_overlap(cube_min[1], cube_max[1], by0, by1) <= 0.0:
        return (0.0, 0.0)
    candidates = (
        (bx1 - cube_min[0], 0),  # push +x
        (-(cube_max[0] - bx0), 0),  # push -x
        (by1 - cube_min[1], 1),  # push +y
        (-(cube_max[1] - by0), 1),  # push -y
    )
    d, axis = min(candidates, key=lambda c: abs(c[0]))
    return (d, 0.0) if axis == 0 else (0.0, d)


def _resolve_pushes(
    config: PlantConfig, ee: Vec3, gap: float, obj: Vec3
) -> tuple[Vec3, float]:
    """Push the cube out of any finger volume; returns (new centre, push distance)."""
    h = config.cube_side / 2.0
    total = 0.0
    for box in _finger_boxes(config, ee, gap):
        cmin = (obj[0] - h, obj[1] - h, obj[2] - h)
        cmax = (obj[0] + h, obj[1] + h, obj[2] + h)
        dx, dy = _push_out(box, cmin, cmax)
        if dx != 0.0 or dy != 0.0:
            obj = (obj[0] + dx, obj[1] + dy, obj[2])
            total += math.hypot(dx, dy)
    return obj, total


def classify_closure(config: PlantConfig, state: PlantState) -> ObjectStatus:
    """Grasp/knock verdict from the geometry at finger contact.

    Grasped requires the cube centred well enough along the closing axis to
    lie inside the initial finger sweep, enough overlap across the finger
    width for a stable pinch, and fingertips no higher than the cube top.
    """
    s = config.cube_side
    obj = state.object_center
    ee = state.ee_pos
    tol = 1e-9  # geometric comparisons must not knock on float dust
    if abs(obj[0] - ee[0]) > (config.finger_gap_open - s) / 2.0 + tol:
        return ObjectStatus.KNOCKED
    half_w = config.finger_width / 2.0
    y_overlap = _interval_overlap(obj[1] - s / 2.0, obj[1] + s / 2.0, ee[1] - half_w, ee[1] + half_w)
    if y_overlap < config.overlap_min_frac * s - tol:
        return ObjectStatus.KNOCKED
    if ee[2] > obj[2] + s / 2.0 + tol:
        return ObjectStatus.KNOCKED
    return ObjectStatus.GRASPED


def step(
    config: PlantConfig,
    state: PlantState,
    action: ControlAction,
    timeline: MotionTimeline,
    dt: float,
) -> PlantState:
    """Advance the world by one control tick.

    Order within a tick: platform (and a riding cube) moves per the timeline,
    the ee integrates its clamped velocity command, finger/cube overlaps are
    resolved, then the gripper closes. A closing gripper stops on the cube
    (pinch) or at gap zero; the pinch verdict is frozen at first contact.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    vmax = config.vmax_axis
    vx = min(max(action.v[0], -vmax), vmax)
    vy = min(max(action.v[1], -vmax), vmax)
    vz = min(max(action.v[2], -vmax), vmax)

    t2 = state.t + dt
    plat2 = timeline.position_at(t2)
    ee2 = (state.ee_pos[0] + vx * dt, state.ee_pos[1] + vy * dt, state.ee_pos[2] + vz * dt)

    status = state.object_status
    obj = state.object_center
    if status is ObjectStatus.ON_PLATFORM:
        obj = (
            obj[0] + plat2[0] - state.platform_pos[0],
            obj[1] + plat2[1] - state.platform_pos[1],
            config.platform_top_z + config.cube_side / 2.0,
        )
    elif status is ObjectStatus.GRASPED:
        off = state.grasp_offset
        obj = (ee2[0] + off[0], ee2[1] + off[1], ee2[2] + off[2])

    mode = state.gripper_mode
    gap = state.gripper_gap
    pinch = state.pinch_ok
    grasp_offset = state.grasp_offset
    if action.close and mode is GripperMode.OPEN:
        mode = GripperMode.CLOSING

    if status is ObjectStatus.ON_PLATFORM and mode is not GripperMode.CLOSED:
        obj, pushed = _resolve_pushes(config, ee2, gap, obj)
        if pushed > config.push_limit:
            status = ObjectStatus.OFF_PLATFORM
        elif (
            abs(obj[0] - plat2[0]) > config.platform_half
            or abs(obj[1] - plat2[1]) > config.platform_half
        ):
            status = ObjectStatus.OFF_PLATFORM

    if mode is GripperMode.CLOSING:
        s = config.cube_side
        gap_target = max(gap - config.close_speed * dt, 0.0)
        if status is not ObjectStatus.ON_PLATFORM and pinch is not True:
            # Nothing graspable between the fingers; close freely.
            gap = gap_target
            if gap == 0.0:
                mode = GripperMode.CLOSED
        else:
            ox = obj[0] - ee2[0]
            half_w = config.finger_width / 2.0
            y_overlap = _interval_overlap(
                obj[1] - s / 2.0, obj[1] + s / 2.0, ee2[1] - half_w, ee2[1] + half_w
            )
            z_overlap = _interval_overlap(
                obj[2] - s / 2.0, obj[2] + s / 2.0, ee2[2], ee2[2] + config.finger_length
            )
            engaged = y_overlap > 0.0 and z_overlap > 0.0 and abs(ox) < (gap + s) / 2.0
            if pinch is None and engaged and gap_target < s + 2.0 * abs(ox):
                probe = replace(state, object_center=obj, ee_pos=ee2)
                pinch = classify_closure(config, probe) is ObjectStatus.GRASPED
            if pinch:
                gap = max(gap_target, s)
                allowed = (gap - s) / 2.0
                ox = min(max(ox, -allowed), allowed)
                obj = (ee2[0] + ox, obj[1], obj[2])
                if gap <= s:
                    gap = s
                    mode = GripperMode.CLOSED
                    status = ObjectStatus.GRASPED
                    grasp_offset = (obj[0] - ee2[0], obj[1] - ee2[1], obj[2] - ee2[2])
            else:
                gap = gap_target
                if gap == 0.0:
                    mode = GripperMode.CLOSED
                    if status is ObjectStatus.ON_PLATFORM:
                        status = ObjectStatus.KNOCKED

    return PlantState(
        t=t2,
        platform_pos=plat2,
        object_center=obj,
        object_status=status,
        ee_pos=ee2,
        gripper_gap=gap,
        gripper_mode=mode,
        grasp_offset=grasp_offset,
        pinch_ok=pinch,
    )
