"""Grbl-subset G-code parsing and motion planning for the XY platform.

The accepted dialect is exactly what the trajectory exporter produces plus
comments: G21 (mm units), G90 (absolute mode), G1 linear moves, G2/G3 arc
moves with I/J center offsets, and F feed words in mm/min. Anything else is
rejected loudly rather than silently misinterpreted.

Planning turns a command list into a :class:`MotionTimeline`: a contiguous
sequence of timed path elements. With the default infinite acceleration the
platform runs each move at its (clamped) feed; with finite acceleration each
move gets a trapezoidal speed profile starting and ending at rest.
"""

import bisect
import math
import re
from dataclasses import dataclass

from .geometry import Arc, Line, PathElement, Point

_TWO_PI = 2.0 * math.pi


class GcodeSyntaxError(ValueError):
    """Unparseable program text, with 1-based line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PlanError(ValueError):
    """Well-formed program that cannot be planned (missing setup or feed)."""


@dataclass(frozen=True)
class SetUnitsMM:
    pass


@dataclass(frozen=True)
class SetAbsolute:
    pass


@dataclass(frozen=True)
class LinearMove:
    x: float | None = None
    y: float | None = None
    feed: float | None = None


@dataclass(frozen=True)
class ArcCW:
    x: float
    y: float
    i: float
    j: float
    feed: float | None = None


@dataclass(frozen=True)
class ArcCCW:
    x: float
    y: float
    i: float
    j: float
    feed: float | None = None


GCommand = SetUnitsMM | SetAbsolute | LinearMove | ArcCW | ArcCCW


@dataclass(frozen=True)
class PlannerConfig:
    """Platform kinematic limits; ``accel=None`` means infinite acceleration."""

    speed_cap: float = 250.0  # mm/s
    accel: float | None = None  # mm/s^2

    def __post_init__(self) -> None:
        if self.speed_cap <= 0.0:
            raise ValueError("speed_cap must be > 0")
        if self.accel is not None and self.accel <= 0.0:
            raise ValueError("accel must be > 0 when finite")


@dataclass(frozen=True)
class ConstantProfile:
    speed: float
    length: float

    @property
    def duration(self) -> float:
        return self.length / self.speed

    def distance_at(self, tau: float) -> float:
        return min(max(self.speed * tau, 0.0), self.length)


@dataclass(frozen=True)
class TrapezoidProfile:
    """Accelerate to v_peak, cruise, decelerate; starts and ends at rest."""

    v_peak: float
    accel: float
    t_ramp: float
    t_cruise: float
    length: float

    @property
    def duration(self) -> float:
        return 2.0 * self.t_ramp + self.t_cruise

    def distance_at(self, tau: float) -> float:
        if tau <= 0.0:
            return 0.0
        if tau >= self.duration:
            return self.length
        if tau < self.t_ramp:
            return 0.5 * self.accel * tau * tau
        d_ramp = 0.5 * self.accel * self.t_ramp * self.t_ramp
        if tau < self.t_ramp + self.t_cruise:
            return d_ramp + self.v_peak * (tau - self.t_ramp)
        td = self.duration - tau
        return self.length - 0.5 * self.accel * td * td


SpeedProfile = ConstantProfile | TrapezoidProfile


def _make_profile(length: float, speed: float, accel: float | None) -> SpeedProfile:
    if accel is None:
        return ConstantProfile(speed, length)
    d_ramps = speed * speed / accel
    if length >= d_ramps:
        return TrapezoidProfile(speed, accel, speed / accel, (length - d_ramps) / speed, length)
    v_peak = math.sqrt(length * accel)
    return TrapezoidProfile(v_peak, accel, v_peak / accel, 0.0, length)


@dataclass(frozen=True)
class TimedMove:
    element: PathElement
    start_time: float
    duration: float
    profile: SpeedProfile


@dataclass(frozen=True)
class MotionTimeline:
    """Time-parameterized platform motion; holds position past the last move."""

    start: Point
    moves: tuple[TimedMove, ...]

    @property
    def total_duration(self) -> float:
        if not self.moves:
            return 0.0
        last = self.moves[-1]
        return last.start_time + last.duration

    def end_point(self) -> Point:
        if not self.moves:
            return self.start
        el = self.moves[-1].element
        return el.point_at(el.length)

    def position_at(self, t: float) -> Point:
        """Platform position at time ``t`` >= 0; clamps at both ends."""
        if t < 0.0:
            raise ValueError("t must be >= 0")
        if not self.moves:
            return self.start
        if t >= self.total_duration:
            return self.end_point()
        starts = [m.start_time for m in self.moves]
        i = bisect.bisect_right(starts, t) - 1
        i = max(i, 0)
        move = self.moves[i]
        s = move.profile.distance_at(t - move.start_time)
        return move.element.point_at(min(s, move.element.length))


def position_at_time(timeline: MotionTimeline, t: float) -> Point:
    return timeline.position_at(t)


_WORD_RE = re.compile(r"([A-Za-z])\s*([-+]?(?:\d+\.?\d*|\.\d+))")


def _strip_comments(raw: str, lineno: int) -> str:
    out = []
    i = 0
    depth_open = -1
    while i < len(raw):
        c = raw[i]
        if c == "(":
            depth_open = i
            end = raw.find(")", i + 1)
            if end < 0:
                raise GcodeSyntaxError(lineno, depth_open + 1, "unterminated comment")
            i = end + 1
            continue
        if c == ";":
            break
        out.append(c)
        i += 1
    return "".join(out)


def _words_of_line(line: str, lineno: int) -> list[tuple[str, float, int]]:
    words = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        m = _WORD_RE.match(line, i)
        if m is None:
            raise GcodeSyntaxError(lineno, i + 1, f"unrecognized token {line[i:].split()[0]!r}")
        words.append((m.group(1).upper(), float(m.group(2)), i + 1))
        i = m.end()
    return words


def parse(text: str) -> list[GCommand]:
    """Parse program text into commands, in source order.

    Comments (``;`` to end of line and balanced parentheses) and blank lines
    are ignored; feed stays attached to its motion word and is resolved
    modally at planning time.
    """
    commands: list[GCommand] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comments(raw, lineno)
        words = _words_of_line(line, lineno)
        if not words:
            continue

        g_word = None
        args: dict[str, float] = {}
        for letter, value, col in words:
            if letter == "G":
                if g_word is not None:
                    raise GcodeSyntaxError(lineno, col, "multiple G words on one line")
                if value != int(value):
                    raise GcodeSyntaxError(lineno, col, f"non-integer G code {value}")
                g_word = (int(value), col)
            elif letter in ("X", "Y", "I", "J", "F"):
                if letter in args:
                    raise GcodeSyntaxError(lineno, col, f"duplicate {letter} word")
                args[letter] = value
            else:
                raise GcodeSyntaxError(lineno, col, f"unsupported word {letter}{value:g}")

        if g_word is None:
            raise GcodeSyntaxError(lineno, words[0][2], "line has no G word")
        code, col = g_word

        if code == 21:
            _reject_args(args, lineno, col, "G21")
            commands.append(SetUnitsMM())
        elif code == 90:
            _reject_args(args, lineno, col, "G90")
            commands.append(SetAbsolute())
        elif code == 20:
            raise GcodeSyntaxError(lineno, col, "inch mode (G20) is not supported")
        elif code == 91:
            raise GcodeSyntaxError(lineno, col, "relative mode (G91) is not supported")
        elif code in (0, 1):
            for k in ("I", "J"):
                if k in args:
                    raise GcodeSyntaxError(lineno, col, f"{k} word on a linear move")
            commands.append(LinearMove(args.get("X"), args.get("Y"), args.get("F")))
        elif code in (2, 3):
            missing = [k for k in ("X", "Y", "I", "J") if k not in args]
            if missing:
                raise GcodeSyntaxError(
                    lineno, col, f"arc move missing {'/'.join(missing)} word(s)"
                )
            cls = ArcCW if code == 2 else ArcCCW
            commands.append(cls(args["X"], args["Y"], args["I"], args["J"], args.get("F")))
        else:
            raise GcodeSyntaxError(lineno, col, f"unsupported command G{code}")
    return commands


def _reject_args(args: dict, lineno: int, col: int, name: str) -> None:
    if args:
        raise GcodeSyntaxError(lineno, col, f"{name} takes no axis or feed words")


def plan(
    commands: list[GCommand],
    config: PlannerConfig = PlannerConfig(),
    start: Point = (0.0, 0.0),
) -> MotionTimeline:
    """Plan commands into a timeline, clamping feed to the platform cap.

    Raises :class:`PlanError` if a motion command appears before both G21 and
    G90, or before any feed has been specified.
    """
    units_mm = False
    absolute = False
    feed: float | None = None
    pos = start
    t = 0.0
    moves: list[TimedMove] = []

    for cmd in commands:
        if isinstance(cmd, SetUnitsMM):
            units_mm = True
            continue
        if isinstance(cmd, SetAbsolute):
            absolute = True
            continue
        if not (units_mm and absolute):
            raise PlanError("motion before G21/G90 setup")
        if cmd.feed is not None:
            if cmd.feed <= 0.0:
                raise PlanError(f"non-positive feed {cmd.feed}")
            feed = cmd.feed
        if feed is None:
            raise PlanError("motion before any feed word")
        speed = min(feed / 60.0, config.speed_cap)

        if isinstance(cmd, LinearMove):
            target = (
                cmd.x if cmd.x is not None else pos[0],
                cmd.y if cmd.y is not None else pos[1],
            )
            element: PathElement = Line(pos, target)
            end = target
        else:
            center = (pos[0] + cmd.i, pos[1] + cmd.j)
            radius = math.hypot(pos[0] - center[0], pos[1] - center[1])
            if radius < 1e-9:
                raise PlanError("arc with zero radius (I0 J0)")
            a0 = math.atan2(pos[1] - center[1], pos[0] - center[0])
            a1 = math.atan2(cmd.y - center[1], cmd.x - center[0])
            d = math.fmod(a1 - a0, _TWO_PI)
            if d < 0.0:
                d += _TWO_PI
            if isinstance(cmd, ArcCCW):
                sweep = d if d > 1e-12 else _TWO_PI
            else:
                sweep = d - _TWO_PI if d > 1e-12 else -_TWO_PI
            element = Arc(center, radius, a0, sweep)
            end = element.point_at(element.length)

        length = element.length
        if length <= 1e-12:
            pos = end
            continue
        profile = _make_profile(length, speed, config.accel)
        moves.append(TimedMove(element, t, profile.duration, profile))
        t += profile.duration
        pos = end

    return MotionTimeline(start, tuple(moves))
