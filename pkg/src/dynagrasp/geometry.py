"""Planar path elements with exact arc-length parameterization.

Paths are ordered sequences of straight lines and circular arcs in the
workspace plane (units: millimetres). Both element types expose position,
tangent heading, and an axis-aligned bounding box, which is everything the
trajectory generator and the motion planner need.
"""

import math
from dataclasses import dataclass

Point = tuple[float, float]

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class Line:
    """Straight segment from ``start`` to ``end``."""

    start: Point
    end: Point

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])

    def point_at(self, s: float) -> Point:
        """Position at arc length ``s`` from the start (not range-checked)."""
        n = self.length
        if n == 0.0:
            return self.start
        f = s / n
        return (
            self.start[0] + f * (self.end[0] - self.start[0]),
            self.start[1] + f * (self.end[1] - self.start[1]),
        )

    def heading_at(self, s: float) -> float:
        return math.atan2(self.end[1] - self.start[1], self.end[0] - self.start[0])

    def bbox(self) -> tuple[float, float, float, float]:
        (x0, y0), (x1, y1) = self.start, self.end
        return (min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1))


@dataclass(frozen=True)
class Arc:
    """Circular arc; ``sweep`` > 0 runs counter-clockwise."""

    center: Point
    radius: float
    start_angle: float
    sweep: float

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def angle_at(self, s: float) -> float:
        n = self.length
        if n == 0.0:
            return self.start_angle
        return self.start_angle + self.sweep * (s / n)

    def point_at(self, s: float) -> Point:
        a = self.angle_at(s)
        return (
            self.center[0] + self.radius * math.cos(a),
            self.center[1] + self.radius * math.sin(a),
        )

    def heading_at(self, s: float) -> float:
        return self.angle_at(s) + math.copysign(_HALF_PI, self.sweep)

    def bbox(self) -> tuple[float, float, float, float]:
        # Extremes occur at the endpoints or wherever the arc crosses a
        # cardinal direction of its circle.
        pts = [self.point_at(0.0), self.point_at(self.length)]
        a0 = self.start_angle
        a1 = a0 + self.sweep
        lo, hi = (a0, a1) if a1 >= a0 else (a1, a0)
        k0 = math.ceil(lo / _HALF_PI)
        k1 = math.floor(hi / _HALF_PI)
        cx, cy = self.center
        for k in range(k0, k1 + 1):
            a = k * _HALF_PI
            pts.append((cx + self.radius * math.cos(a), cy + self.radius * math.sin(a)))
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        return (min(xs), min(ys), max(xs), max(ys))


PathElement = Line | Arc
