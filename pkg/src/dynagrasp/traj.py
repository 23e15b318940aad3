"""Random-walk object trajectories: seeded generation, sampling, G-code export.

Paths start at the workspace centre and alternate fixed-length straight
segments with circular fillets whose signed sweep realizes each sampled
direction change, so the heading is continuous along the whole path.

Generation is deterministic: the only randomness source is a numpy PCG64
generator seeded from ``TrajectoryParams.seed``. Draw order is fixed (initial
heading first, then one or more direction draws per junction under rejection
sampling), so equal seeds reproduce equal paths bit-for-bit.
"""

import bisect
import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .geometry import Arc, Line, PathElement, Point

PLATFORM_SPEED_CAP = 250.0  # mm/s, XY platform capability

_TWO_PI = 2.0 * math.pi

TRAJECTORY_FORMAT = "dynagrasp-trajectory"
TRAJECTORY_VERSION = 1


class BoundsUnsatisfiable(RuntimeError):
    """A segment could not be placed inside the bounds after max_resamples draws."""


class OutOfRange(ValueError):
    """Arc-length query outside [0, total_length]."""


class SpeedExceedsPlatform(ValueError):
    """Requested feed is beyond what the platform can execute."""


@dataclass(frozen=True)
class TrajectoryParams:
    """Geometry and sampling parameters for one random-walk path family."""

    n_segments: int
    seed: int
    segment_length: float = 50.0
    fillet_radius: float = 10.0
    turn_min: float = 45.0  # degrees
    turn_max: float = 315.0  # degrees
    bounds_half: float = 140.0  # half-extent of the square travel area
    max_resamples: int = 100

    def __post_init__(self) -> None:
        if self.n_segments < 0:
            raise ValueError("n_segments must be >= 0")
        if self.segment_length <= 0.0:
            raise ValueError("segment_length must be > 0")
        if self.fillet_radius < 0.0:
            raise ValueError("fillet_radius must be >= 0")
        if not (0.0 < self.turn_min <= self.turn_max < 360.0):
            raise ValueError("need 0 < turn_min <= turn_max < 360")
        if self.bounds_half <= 0.0:
            raise ValueError("bounds_half must be > 0")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be >= 1")


@dataclass(frozen=True)
class PathSample:
    """One point on a trajectory: position, tangent heading, arc length."""

    position: Point
    heading: float
    arc_length: float


@dataclass(frozen=True)
class Trajectory:
    """Alternating line/arc path, parameterized by arc length from the start."""

    elements: tuple[PathElement, ...]
    params: TrajectoryParams

    @cached_property
    def _cum_lengths(self) -> tuple[float, ...]:
        acc = 0.0
        out = []
        for el in self.elements:
            acc += el.length
            out.append(acc)
        return tuple(out)

    @cached_property
    def total_length(self) -> float:
        return self._cum_lengths[-1] if self.elements else 0.0

    def position_at(self, s: float) -> PathSample:
        """Sample the path at arc length ``s`` mm from the start."""
        total = self.total_length
        if s < -1e-9 or s > total + 1e-9:
            raise OutOfRange(f"arc length {s} outside [0, {total}]")
        s = min(max(s, 0.0), total)
        if not self.elements:
            return PathSample((0.0, 0.0), 0.0, 0.0)
        i = bisect.bisect_left(self._cum_lengths, s)
        i = min(i, len(self.elements) - 1)
        start = self._cum_lengths[i - 1] if i > 0 else 0.0
        local = min(max(s - start, 0.0), self.elements[i].length)
        el = self.elements[i]
        return PathSample(el.point_at(local), el.heading_at(local), s)

    def position_at_time(self, speed: float, t: float) -> Point:
        """Constant-speed position at time ``t``; holds the endpoint past the end."""
        if speed <= 0.0:
            raise ValueError("speed must be > 0")
        if t < 0.0:
            raise ValueError("t must be >= 0")
        s = min(speed * t, self.total_length)
        return self.position_at(s).position


def _sample_turn(rng: np.random.Generator, params: TrajectoryParams) -> float:
    """One raw direction-change draw in degrees, uniform on [turn_min, turn_max]."""
    return float(rng.uniform(params.turn_min, params.turn_max))


def _signed_sweep(turn_deg: float) -> float:
    """Map a direction-change magnitude to a signed fillet sweep in radians.

    Changes up to 180 degrees turn left (CCW); larger ones wrap to an
    equivalent right turn, so |sweep| stays in [turn_min, 180] degrees.
    """
    if turn_deg <= 180.0:
        return math.radians(turn_deg)
    return math.radians(turn_deg - 360.0)


def _fillet(pos: Point, heading: float, sweep: float, radius: float) -> Arc:
    """Arc of the given sweep, tangent to ``heading`` at ``pos``."""
    side = 1.0 if sweep > 0.0 else -1.0
    cx = pos[0] + radius * math.cos(heading + side * 0.5 * math.pi)
    cy = pos[1] + radius * math.sin(heading + side * 0.5 * math.pi)
    start_angle = heading - side * 0.5 * math.pi
    return Arc((cx, cy), radius, start_angle, sweep)


def _inside(bbox: tuple[float, float, float, float], half: float) -> bool:
    return bbox[0] >= -half and bbox[1] >= -half and bbox[2] <= half and bbox[3] <= half


def _point_inside(p: Point, half: float) -> bool:
    return abs(p[0]) <= half and abs(p[1]) <= half


def generate(params: TrajectoryParams) -> Trajectory:
    """Generate a random-walk trajectory from seeded parameters.

    Segments keep their full nominal length; a direction change that would
    leave the bounds square is simply re-drawn, up to ``max_resamples`` times
    per junction, before giving up with :class:`BoundsUnsatisfiable`.

    A candidate is also rejected when its segment ends within two fillet
    radii of the boundary: from there the next fillet could be forced out of
    bounds no matter which direction is drawn, so such states are dead ends
    for rejection sampling.
    """
    if params.n_segments == 0:
        return Trajectory((), params)
    rng = np.random.Generator(np.random.PCG64(params.seed))
    length = params.segment_length
    radius = params.fillet_radius
    half = params.bounds_half
    end_half = max(half - 2.0 * radius, 0.0)

    first = None
    for _ in range(params.max_resamples + 1):
        heading = float(rng.uniform(0.0, _TWO_PI))
        cand = Line((0.0, 0.0), (length * math.cos(heading), length * math.sin(heading)))
        if _inside(cand.bbox(), half) and _point_inside(cand.end, end_half):
            first = cand
            break
    if first is None:
        raise BoundsUnsatisfiable(
            f"seed {params.seed}: initial segment does not fit in +/-{half} mm"
        )

    elements: list[PathElement] = [first]
    pos = first.end
    for seg in range(1, params.n_segments):
        placed = False
        for _ in range(params.max_resamples + 1):
            sweep = _signed_sweep(_sample_turn(rng, params))
            if radius > 0.0:
                arc = _fillet(pos, heading, sweep, radius)
                line_start = arc.point_at(arc.length)
            else:
                arc = None
                line_start = pos
            new_heading = heading + sweep
            line = Line(
                line_start,
                (
                    line_start[0] + length * math.cos(new_heading),
                    line_start[1] + length * math.sin(new_heading),
                ),
            )
            ok = _inside(line.bbox(), half) and _point_inside(line.end, end_half)
            if ok and arc is not None:
                ok = _inside(arc.bbox(), half)
            if ok:
                if arc is not None:
                    elements.append(arc)
                elements.append(line)
                pos = line.end
                heading = new_heading
                placed = True
                break
        if not placed:
            raise BoundsUnsatisfiable(
                f"seed {params.seed}: segment {seg} exceeded {params.max_resamples} re-draws"
            )
    return Trajectory(tuple(elements), params)


def _fmt(v: float) -> str:
    """Fixed 9-decimal G-code number, trailing zeros stripped."""
    s = f"{v:.9f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def emit_gcode(traj: Trajectory, speed: float) -> str:
    """Render the trajectory as a Grbl-dialect program at constant feed.

    Output is absolute-mode millimetre G-code: one linear or arc move per
    path element, arc centers in I/J offset form, feed in mm/min on every
    motion line.
    """
    if speed > PLATFORM_SPEED_CAP:
        raise SpeedExceedsPlatform(
            f"speed {speed} mm/s exceeds platform capability {PLATFORM_SPEED_CAP} mm/s"
        )
    if speed <= 0.0:
        raise ValueError("speed must be > 0")
    feed = _fmt(speed * 60.0)
    lines = [
        f"; trajectory seed={traj.params.seed} segments={traj.params.n_segments}",
        "G21",
        "G90",
    ]
    for el in traj.elements:
        if isinstance(el, Line):
            lines.append(f"G1 X{_fmt(el.end[0])} Y{_fmt(el.end[1])} F{feed}")
        else:
            start = el.point_at(0.0)
            end = el.point_at(el.length)
            word = "G3" if el.sweep > 0.0 else "G2"
            i = el.center[0] - start[0]
            j = el.center[1] - start[1]
            lines.append(
                f"{word} X{_fmt(end[0])} Y{_fmt(end[1])} I{_fmt(i)} J{_fmt(j)} F{feed}"
            )
    return "\n".join(lines) + "\n"


def _element_to_dict(el: PathElement) -> dict:
    if isinstance(el, Line):
        return {"type": "line", "start": list(el.start), "end": list(el.end)}
    return {
        "type": "arc",
        "center": list(el.center),
        "radius": el.radius,
        "start_angle": el.start_angle,
        "sweep": el.sweep,
    }


def _element_from_dict(d: dict) -> PathElement:
    if d["type"] == "line":
        return Line(tuple(d["start"]), tuple(d["end"]))
    if d["type"] == "arc":
        return Arc(tuple(d["center"]), d["radius"], d["start_angle"], d["sweep"])
    raise ValueError(f"unknown path element type {d['type']!r}")


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "format": TRAJECTORY_FORMAT,
        "version": TRAJECTORY_VERSION,
        "params": asdict(traj.params),
        "total_length_mm": traj.total_length,
        "elements": [_element_to_dict(el) for el in traj.elements],
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    if data.get("format") != TRAJECTORY_FORMAT:
        raise ValueError("not a trajectory document")
    if data.get("version") != TRAJECTORY_VERSION:
        raise ValueError(f"unsupported trajectory version {data.get('version')!r}")
    params = TrajectoryParams(**data["params"])
    traj = Trajectory(tuple(_element_from_dict(d) for d in data["elements"]), params)
    stored = data.get("total_length_mm")
    if stored is not None and abs(stored - traj.total_length) > 1e-6:
        raise ValueError("total_length_mm does not match the element list")
    return traj


def save_trajectory(traj: Trajectory, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(trajectory_to_dict(traj), f, indent=2)
        f.write("\n")


def load_trajectory(path: str) -> Trajectory:
    with open(path, "r", encoding="utf-8") as f:
        return trajectory_from_dict(json.load(f))
