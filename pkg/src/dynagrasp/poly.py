"""Small 2-D polygon helpers for image-space silhouettes.

Convex hull, axis-aligned clipping, and area/centroid moments on plain
``(x, y)`` tuples. Kept free of heavyweight dependencies because these run
once per camera per control tick.
"""

Point2 = tuple[float, float]


def convex_hull(points: list[Point2]) -> list[Point2]:
    """Convex hull (monotone chain), returned counter-clockwise.

    Collinear points on the hull boundary are dropped. Degenerate inputs
    (fewer than 3 distinct points) return the distinct points themselves.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[Point2] = []
        for p in seq:
            while len(out) >= 2:
                (ox, oy), (ax, ay) = out[-2], out[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0.0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _clip_axis(poly: list[Point2], axis: int, bound: float, keep_below: bool) -> list[Point2]:
    """One Sutherland-Hodgman pass against an axis-aligned half-plane."""
    if not poly:
        return []
    out: list[Point2] = []
    n = len(poly)
    for i in range(n):
        p = poly[i]
        q = poly[(i + 1) % n]
        pin = (p[axis] <= bound) if keep_below else (p[axis] >= bound)
        qin = (q[axis] <= bound) if keep_below else (q[axis] >= bound)
        if pin:
            out.append(p)
        if pin != qin:
            t = (bound - p[axis]) / (q[axis] - p[axis])
            if axis == 0:
                out.append((bound, p[1] + t * (q[1] - p[1])))
            else:
                out.append((p[0] + t * (q[0] - p[0]), bound))
    return out


def clip_to_box(poly: list[Point2], lo: float = -1.0, hi: float = 1.0) -> list[Point2]:
    """Clip a polygon to the axis-aligned square [lo, hi] x [lo, hi]."""
    out = _clip_axis(poly, 0, hi, True)
    out = _clip_axis(out, 0, lo, False)
    out = _clip_axis(out, 1, hi, True)
    out = _clip_axis(out, 1, lo, False)
    return out


def polygon_area(poly: list[Point2]) -> float:
    """Unsigned area via the shoelace formula."""
    n = len(poly)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) * 0.5


def polygon_centroid(poly: list[Point2]) -> Point2:
    """Area centroid; falls back to the vertex mean for degenerate polygons."""
    n = len(poly)
    if n == 0:
        raise ValueError("centroid of empty polygon")
    acc = 0.0
    cx = 0.0
    cy = 0.0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        acc += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    if abs(acc) < 1e-12:
        return (sum(p[0] for p in poly) / n, sum(p[1] for p in poly) / n)
    return (cx / (3.0 * acc), cy / (3.0 * acc))


def polygon_bbox(poly: list[Point2]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return (min(xs), min(ys), max(xs), max(ys))


def bboxes_overlap(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]
