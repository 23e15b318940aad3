"""Self-contained SVG line charts for benchmark reports.

One SVG per cube size, with three panels mirroring the report columns:
success rate, perception-failure rate, and mean grasp time (with a +/-1
sigma band) against object speed, one series per perception system. No
plotting dependency; the files are plain hand-built SVG.
"""

import os

SERIES_COLORS = {
    "wrist": "#d62728",
    "single_hand": "#1f77b4",
    "dual_hand": "#2ca02c",
}
SERIES_LABELS = {
    "wrist": "wrist",
    "single_hand": "single hand",
    "dual_hand": "dual hand",
}

_PANEL_W = 340
_PANEL_H = 260
_MARGIN_L = 52
_MARGIN_B = 36
_MARGIN_T = 30
_GAP = 28


def _fmt(v: float) -> str:
    return f"{v:.6g}"


class _Svg:
    def __init__(self, width: int, height: int):
        self.w = width
        self.h = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}" '
            'font-family="sans-serif" font-size="11">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
        ]

    def line(self, x0, y0, x1, y1, stroke="#444", width=1.0):
        self.parts.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
            f'stroke="{stroke}" stroke-width="{width}"/>'
        )

    def polyline(self, pts, stroke, width=1.8):
        s = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self.parts.append(
            f'<polyline points="{s}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'
        )

    def polygon(self, pts, fill, opacity=0.15):
        s = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self.parts.append(f'<polygon points="{s}" fill="{fill}" fill-opacity="{opacity}"/>')

    def circle(self, x, y, r, fill):
        self.parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{fill}"/>')

    def text(self, x, y, s, anchor="start", size=11, color="#222", rotate=None):
        extra = f' transform="rotate(-90 {_fmt(x)} {_fmt(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'font-size="{size}" fill="{color}"{extra}>{s}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _panel(svg, ox, oy, title, ylabel, xvals, series, ylim, bands=None):
    """One axes panel at origin (ox, oy); series maps kind -> [(x, y|None)]."""
    x0, y0 = ox + _MARGIN_L, oy + _MARGIN_T
    w, h = _PANEL_W - _MARGIN_L - 10, _PANEL_H - _MARGIN_T - _MARGIN_B
    xmin, xmax = min(xvals), max(xvals)
    if xmax == xmin:
        xmin, xmax = xmin - 1.0, xmax + 1.0
    ylo, yhi = ylim

    def sx(x):
        return x0 + (x - xmin) / (xmax - xmin) * w

    def sy(y):
        return y0 + h - (y - ylo) / (yhi - ylo) * h

    svg.text(ox + _PANEL_W / 2, oy + 16, title, anchor="middle", size=12)
    svg.line(x0, y0 + h, x0 + w, y0 + h)
    svg.line(x0, y0, x0, y0 + h)
    for xv in sorted(set(xvals)):
        svg.line(sx(xv), y0 + h, sx(xv), y0 + h + 4)
        svg.text(sx(xv), y0 + h + 16, f"{xv:g}", anchor="middle", size=10)
    for yv in _ticks(ylo, yhi):
        svg.line(x0 - 4, sy(yv), x0, sy(yv))
        svg.text(x0 - 7, sy(yv) + 3, f"{yv:g}", anchor="end", size=10)
    svg.text(ox + _PANEL_W / 2, oy + _PANEL_H - 4, "object speed (mm/s)", anchor="middle", size=10)
    svg.text(ox + 14, oy + _MARGIN_T + h / 2, ylabel, anchor="middle", size=10, rotate=True)

    for kind, pts in series.items():
        color = SERIES_COLORS[kind]
        if bands and kind in bands:
            band = [(x, m, s) for (x, m, s) in bands[kind] if m is not None and s is not None]
            if len(band) >= 2:
                top = [(sx(x), sy(min(m + s, yhi))) for (x, m, s) in band]
                bot = [(sx(x), sy(max(m - s, ylo))) for (x, m, s) in reversed(band)]
                svg.polygon(top + bot, color)
        defined = [(sx(x), sy(y)) for (x, y) in pts if y is not None]
        if len(defined) >= 2:
            svg.polyline(defined, color)
        for px, py in defined:
            svg.circle(px, py, 2.5, color)


def render_cube_chart(rows: list[dict], cube: float) -> str:
    """Three-panel chart for one cube size from parsed report rows."""
    kinds = [k for k in SERIES_COLORS if any(r["perception"] == k for r in rows)]
    speeds = sorted({r["speed_mm_s"] for r in rows})

    def cell(kind, speed):
        for r in rows:
            if r["perception"] == kind and r["speed_mm_s"] == speed:
                return r
        return None

    def series_of(field):
        out = {}
        for kind in kinds:
            pts = []
            for speed in speeds:
                r = cell(kind, speed)
                pts.append((speed, r[field] if r else None))
            out[kind] = pts
        return out

    times = [
        r["mean_grasp_time_s"] + (r["sigma_grasp_time_s"] or 0.0)
        for r in rows
        if r["mean_grasp_time_s"] is not None
    ]
    t_hi = max(times) * 1.15 if times else 1.0

    width = 3 * _PANEL_W + 2 * _GAP + 20
    svg = _Svg(width, _PANEL_H + 46)
    svg.text(10, 16, f"cube {cube:g} mm", size=13)
    lx = width - 10 - 110 * len(kinds)
    for kind in kinds:
        svg.line(lx, 12, lx + 16, 12, SERIES_COLORS[kind], 2)
        svg.text(lx + 20, 16, SERIES_LABELS[kind], size=11)
        lx += 110

    _panel(svg, 10, 26, "grasp success rate", "rate", speeds, series_of("success_rate"), (0.0, 1.0))
    _panel(
        svg, 10 + _PANEL_W + _GAP, 26, "perception failure rate", "rate",
        speeds, series_of("perception_failure_rate"), (0.0, 1.0),
    )
    bands = {}
    for kind in kinds:
        bands[kind] = [
            (speed, (cell(kind, speed) or {}).get("mean_grasp_time_s"),
             (cell(kind, speed) or {}).get("sigma_grasp_time_s"))
            for speed in speeds
        ]
    _panel(
        svg, 10 + 2 * (_PANEL_W + _GAP), 26, "mean grasp time (+/- 1 sigma)", "seconds",
        speeds, series_of("mean_grasp_time_s"), (0.0, t_hi), bands=bands,
    )
    return svg.render()


def render_report_charts(rows: list[dict], out_dir: str) -> list[str]:
    """Write one chart file per cube size; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for cube in sorted({r["cube_mm"] for r in rows}):
        cube_rows = [r for r in rows if r["cube_mm"] == cube]
        path = os.path.join(out_dir, f"report_cube{cube:g}mm.svg")
        with open(path, "w", encoding="utf-8") as f:
            f.write(render_cube_chart(cube_rows, cube))
        paths.append(path)
    return paths
