"""Analytic eye-in-hand camera models and synthetic cube observations.

Instead of segmenting rendered pixels, the cube silhouette is projected
exactly: the eight cube corners go through a pinhole model (after clipping
against a 1 mm near plane), their convex hull is clipped to the normalized
[-1, 1]^2 image square, and any occluder polygons are subtracted. Centroid
and area of the largest remaining piece stand in for the centroid of the
largest segmented contour.

Cameras are rigid attachments to the end-effector. The default rig offers a
down-looking wrist camera offset behind the closing axis and a pair of hand
cameras at the gripper base pitched in between the fingers; the finger
bodies themselves are projected once per camera into static occluder
polygons.
"""

import math
from dataclasses import dataclass, replace
from functools import cached_property

from shapely.geometry import MultiPolygon, Polygon

from . import poly
from .plant import PlantConfig, PlantState, Vec3

NEAR_PLANE_MM = 1.0
_MIN_VISIBLE_FRACTION = 1e-6

Point2 = tuple[float, float]
Polygon2 = tuple[Point2, ...]

_BOX_FACES = (
    (0, 2, 6, 4),  # x-
    (1, 5, 7, 3),  # x+
    (0, 4, 5, 1),  # y-
    (2, 3, 7, 6),  # y+
    (0, 1, 3, 2),  # z-
    (4, 6, 7, 5),  # z+
)


class GoalOutsideView(ValueError):
    """The grasp-centre point does not project inside the image square."""


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera rigidly mounted on the end-effector.

    ``axes`` holds the camera x/y/z unit vectors expressed in the world
    frame (x right in the image, y down, z along the optical axis);
    ``translation`` is the optical centre relative to the ee origin.
    """

    id: str
    translation: Vec3
    axes: tuple[Vec3, Vec3, Vec3]
    fov_half_x: float  # radians
    fov_half_y: float
    occluders: tuple[Polygon2, ...] = ()

    def __post_init__(self) -> None:
        if not (0.0 < self.fov_half_x < math.pi / 2.0):
            raise ValueError("fov_half_x must be in (0, pi/2)")
        if not (0.0 < self.fov_half_y < math.pi / 2.0):
            raise ValueError("fov_half_y must be in (0, pi/2)")
        for i in range(3):
            n = math.sqrt(sum(c * c for c in self.axes[i]))
            if abs(n - 1.0) > 1e-9:
                raise ValueError("camera axes must be unit length")

    @cached_property
    def tan_x(self) -> float:
        return math.tan(self.fov_half_x)

    @cached_property
    def tan_y(self) -> float:
        return math.tan(self.fov_half_y)

    @cached_property
    def _occluder_shapes(self) -> tuple:
        return tuple(Polygon(o) for o in self.occluders)

    @cached_property
    def _occluder_bboxes(self) -> tuple:
        return tuple(poly.polygon_bbox(list(o)) for o in self.occluders)

    def to_ee_frame(self, p_ee: Vec3) -> Vec3:
        """EE-frame point -> camera-frame coordinates."""
        d = (
            p_ee[0] - self.translation[0],
            p_ee[1] - self.translation[1],
            p_ee[2] - self.translation[2],
        )
        ax, ay, az = self.axes
        return (
            d[0] * ax[0] + d[1] * ax[1] + d[2] * ax[2],
            d[0] * ay[0] + d[1] * ay[1] + d[2] * ay[2],
            d[0] * az[0] + d[1] * az[1] + d[2] * az[2],
        )


@dataclass(frozen=True)
class Observation:
    """Normalized image-space view of the cube from one camera."""

    camera_id: str
    visible: bool
    centroid: Point2 | None
    area: float | None  # fraction of the image area
    t: float


@dataclass(frozen=True)
class PerceptionConfig:
    """One of the three benchmark camera arrangements."""

    kind: str  # "wrist" | "single_hand" | "dual_hand"
    cameras: tuple[CameraModel, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("wrist", "single_hand", "dual_hand"):
            raise ValueError(f"unknown perception kind {self.kind!r}")
        n = 2 if self.kind == "dual_hand" else 1
        if len(self.cameras) != n:
            raise ValueError(f"{self.kind} needs exactly {n} camera(s)")
        ids = {c.id for c in self.cameras}
        if len(ids) != len(self.cameras):
            raise ValueError("camera ids must be distinct")


def make_camera(
    camera_id: str,
    translation: Vec3,
    pitch_deg: float = 0.0,
    fov_half_deg: tuple[float, float] = (35.0, 26.0),
    occluders: tuple[Polygon2, ...] = (),
) -> CameraModel:
    """Down-looking ee camera, optionally pitched about the image y axis.

    ``pitch_deg`` > 0 tilts the optical axis from straight down toward the
    world -x direction (a camera mounted at +x uses positive pitch to aim at
    the grasp centre; one at -x uses negative pitch).
    """
    th = math.radians(pitch_deg)
    axes = (
        (math.cos(th), 0.0, -math.sin(th)),
        (0.0, -1.0, 0.0),
        (-math.sin(th), 0.0, -math.cos(th)),
    )
    return CameraModel(
        id=camera_id,
        translation=translation,
        axes=axes,
        fov_half_x=math.radians(fov_half_deg[0]),
        fov_half_y=math.radians(fov_half_deg[1]),
        occluders=occluders,
    )


def _box_vertices(center: Vec3, half: float) -> list[Vec3]:
    cx, cy, cz = center
    return [
        (
            cx + (half if i & 1 else -half),
            cy + (half if i & 2 else -half),
            cz + (half if i & 4 else -half),
        )
        for i in range(8)
    ]


def _clip_face_near(face: list[Vec3]) -> list[Vec3]:
    """Sutherland-Hodgman pass of one 3-D face against z >= NEAR_PLANE_MM."""
    out: list[Vec3] = []
    n = len(face)
    for i in range(n):
        p = face[i]
        q = face[(i + 1) % n]
        pin = p[2] >= NEAR_PLANE_MM
        qin = q[2] >= NEAR_PLANE_MM
        if pin:
            out.append(p)
        if pin != qin:
            f = (NEAR_PLANE_MM - p[2]) / (q[2] - p[2])
            out.append(
                (
                    p[0] + f * (q[0] - p[0]),
                    p[1] + f * (q[1] - p[1]),
                    NEAR_PLANE_MM,
                )
            )
    return out


def _silhouette(camera: CameraModel, verts_cam: list[Vec3]) -> list[Point2]:
    """Image polygon of a convex box given its camera-frame vertices."""
    pts: list[Point2] = []
    tx, ty = camera.tan_x, camera.tan_y
    for face in _BOX_FACES:
        for x, y, z in _clip_face_near([verts_cam[i] for i in face]):
            pts.append((x / (z * tx), y / (z * ty)))
    if len(pts) < 3:
        return []
    return poly.clip_to_box(poly.convex_hull(pts))


def _largest_piece(shape):
    if shape.is_empty:
        return None
    if isinstance(shape, Polygon):
        return shape
    if isinstance(shape, MultiPolygon):
        return max(shape.geoms, key=lambda g: g.area)
    pieces = [g for g in getattr(shape, "geoms", ()) if isinstance(g, Polygon)]
    return max(pieces, key=lambda g: g.area) if pieces else None


def observe(camera: CameraModel, config: PlantConfig, state: PlantState) -> Observation:
    """Project the cube silhouette into the camera's normalized image.

    Occluder polygons are subtracted from the clipped silhouette; when that
    splits it, the largest remaining piece is measured, mirroring
    largest-contour segmentation.
    """
    cam_pos = (
        state.ee_pos[0] + camera.translation[0],
        state.ee_pos[1] + camera.translation[1],
        state.ee_pos[2] + camera.translation[2],
    )
    ax, ay, az = camera.axes
    verts_cam = []
    for wx, wy, wz in _box_vertices(state.object_center, config.cube_side / 2.0):
        d = (wx - cam_pos[0], wy - cam_pos[1], wz - cam_pos[2])
        verts_cam.append(
            (
                d[0] * ax[0] + d[1] * ax[1] + d[2] * ax[2],
                d[0] * ay[0] + d[1] * ay[1] + d[2] * ay[2],
                d[0] * az[0] + d[1] * az[1] + d[2] * az[2],
            )
        )
    silhouette = _silhouette(camera, verts_cam)
    not_visible = Observation(camera.id, False, None, None, state.t)
    if len(silhouette) < 3:
        return not_visible

    area = poly.polygon_area(silhouette)
    if camera.occluders:
        sil_bbox = poly.polygon_bbox(silhouette)
        if any(poly.bboxes_overlap(sil_bbox, ob) for ob in camera._occluder_bboxes):
            region = Polygon(silhouette)
            for occ in camera._occluder_shapes:
                region = region.difference(occ)
            piece = _largest_piece(region)
            if piece is None or piece.area / 4.0 <= _MIN_VISIBLE_FRACTION:
                return not_visible
            c = piece.centroid
            return Observation(camera.id, True, (c.x, c.y), piece.area / 4.0, state.t)

    if area / 4.0 <= _MIN_VISIBLE_FRACTION:
        return not_visible
    return Observation(
        camera.id, True, poly.polygon_centroid(silhouette), area / 4.0, state.t
    )


def grasp_center_ee(config: PlantConfig) -> Vec3:
    """Where the cube centre sits, in the ee frame, once it is pinched.

    With fingertips at the resolved grasp height and the cube resting on the
    platform, the cube centre lands at ``cube_side/2 - grasp_height`` above
    the fingertip midpoint (zero for the default grasp height).
    """
    rest_z = config.platform_top_z + config.cube_side / 2.0
    return (0.0, 0.0, rest_z - config.grasp_height)


def desired_point(camera: CameraModel, config: PlantConfig) -> Point2:
    """Image-space servo goal: the projection of the grasp centre.

    Constant for a given camera/plant pair because both the camera and the
    grasp centre are fixed in the ee frame.
    """
    x, y, z = camera.to_ee_frame(grasp_center_ee(config))
    if z < NEAR_PLANE_MM:
        raise GoalOutsideView(f"camera {camera.id}: grasp centre behind the image plane")
    u = x / (z * camera.tan_x)
    v = y / (z * camera.tan_y)
    if abs(u) > 1.0 or abs(v) > 1.0:
        raise GoalOutsideView(
            f"camera {camera.id}: grasp centre projects to ({u:.3f}, {v:.3f})"
        )
    return (u, v)


def finger_occluders(camera: CameraModel, config: PlantConfig) -> tuple[Polygon2, ...]:
    """Static occluder polygons: the open-gap finger bodies seen by a camera.

    Both the fingers and the camera ride the end-effector, so these
    silhouettes are exactly static in image space (at the open gap; the brief
    final closing motion is ignored).
    """
    half_w = config.finger_width / 2.0
    out = []
    for side in (-1.0, 1.0):
        inner = side * config.finger_gap_open / 2.0
        outer = inner + side * config.finger_thickness
        x0, x1 = min(inner, outer), max(inner, outer)
        corners_ee = [
            (
                x1 if i & 1 else x0,
                half_w if i & 2 else -half_w,
                config.finger_length if i & 4 else 0.0,
            )
            for i in range(8)
        ]
        verts_cam = [camera.to_ee_frame(c) for c in corners_ee]
        silhouette = _silhouette(camera, verts_cam)
        if poly.polygon_area(silhouette) / 4.0 > _MIN_VISIBLE_FRACTION:
            out.append(tuple(silhouette))
    return tuple(out)


def _with_finger_occluders(camera: CameraModel, config: PlantConfig) -> CameraModel:
    return replace(camera, occluders=finger_occluders(camera, config))


def default_wrist_camera(config: PlantConfig, occlude_fingers: bool = True) -> CameraModel:
    """Down-looking RGB camera offset 50 mm behind the closing axis, 80 mm up.

    With this mount the servo goal sits at u ~ 0.89: inside the image but on
    its border, which is exactly what makes a wrist rig fragile in the final
    phase of a grasp on a fast object.
    """
    cam = make_camera("wrist", (-50.0, 0.0, 80.0), 0.0, (35.0, 26.0))
    return _with_finger_occluders(cam, config) if occlude_fingers else cam


def default_hand_cameras(
    config: PlantConfig, occlude_fingers: bool = True
) -> tuple[CameraModel, CameraModel]:
    """Camera pair at the gripper base, pitched 25 degrees between the fingers."""
    z = config.finger_length
    a = make_camera("hand_a", (35.0, 0.0, z), 25.0, (31.0, 24.0))
    b = make_camera("hand_b", (-35.0, 0.0, z), -25.0, (31.0, 24.0))
    if occlude_fingers:
        a = _with_finger_occluders(a, config)
        b = _with_finger_occluders(b, config)
    return a, b


def perception_by_kind(kind: str, config: PlantConfig) -> PerceptionConfig:
    """Build one of the three default rigs for the given plant geometry."""
    if kind == "wrist":
        return PerceptionConfig("wrist", (default_wrist_camera(config),))
    if kind == "single_hand":
        return PerceptionConfig("single_hand", (default_hand_cameras(config)[0],))
    if kind == "dual_hand":
        return PerceptionConfig("dual_hand", default_hand_cameras(config))
    raise ValueError(f"unknown perception kind {kind!r}")
