"""Configuration file handling and config/dataclass serialization.

One JSON document can override plant geometry, controller gains, trajectory
parameters, trial settings, and the camera rig; command-line ``--set``
key=value pairs override the file. Every effective value ends up echoed in
report metadata, so results always carry their exact configuration.
"""

import dataclasses
import json
from dataclasses import dataclass, field

from .control import ControllerConfig
from .percept import (
    CameraModel,
    PerceptionConfig,
    default_hand_cameras,
    default_wrist_camera,
    finger_occluders,
    make_camera,
)
from .plant import PlantConfig
from .traj import TrajectoryParams

CONFIG_VERSION = 1


class ConfigError(ValueError):
    """Unusable configuration file or override."""


@dataclass(frozen=True)
class CameraSpec:
    """Constrained camera parameterization used by config files."""

    translation: tuple[float, float, float]
    pitch_deg: float = 0.0
    fov_half_deg: tuple[float, float] = (35.0, 26.0)
    finger_occluders: bool = True


@dataclass(frozen=True)
class Settings:
    """Effective merged configuration for CLI commands."""

    plant: PlantConfig = PlantConfig()
    controller: ControllerConfig = ControllerConfig()
    traj_params: TrajectoryParams = TrajectoryParams(n_segments=40, seed=0)
    loss_frames: int = 12
    max_duration: float = 30.0
    cameras: dict = field(default_factory=dict)  # camera id -> CameraSpec


_CAMERA_IDS = ("wrist", "hand_a", "hand_b")
_CAMERA_KEYS = {"translation", "pitch_deg", "fov_half_deg", "finger_occluders"}
_TRIAL_KEYS = {"loss_frames", "max_duration"}


def _field_names(cls) -> set[str]:
    return {f.name for f in dataclasses.fields(cls)}


def _check_keys(section: str, given: dict, allowed: set[str]) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown {section} key(s): {', '.join(sorted(unknown))}")


def _as_tuple(v):
    return tuple(v) if isinstance(v, list) else v


def load_settings(config_path: str | None = None, overrides: list[str] | None = None) -> Settings:
    """Merge defaults, an optional config file, and ``--set`` overrides."""
    tree: dict = {}
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                tree = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{config_path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(tree, dict):
            raise ConfigError(f"{config_path}: top level must be an object")
        version = tree.pop("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {version!r}")

    for kv in overrides or []:
        if "=" not in kv:
            raise ConfigError(f"override {kv!r} is not key=value")
        key, raw = kv.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = value

    _check_keys("top-level", tree, {"plant", "controller", "trial", "trajectory", "cameras"})

    def section(name):
        sec = tree.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"section {name!r} must be an object")
        return sec

    plant_d = section("plant")
    _check_keys("plant", plant_d, _field_names(PlantConfig))
    controller_d = section("controller")
    _check_keys("controller", controller_d, _field_names(ControllerConfig))
    trial_d = section("trial")
    _check_keys("trial", trial_d, _TRIAL_KEYS)
    traj_d = section("trajectory")
    _check_keys("trajectory", traj_d, _field_names(TrajectoryParams) - {"seed"})
    cameras_d = section("cameras")
    _check_keys("cameras", cameras_d, set(_CAMERA_IDS))

    cameras = {}
    for cam_id, spec_d in cameras_d.items():
        if not isinstance(spec_d, dict):
            raise ConfigError(f"camera {cam_id!r} must be an object")
        _check_keys(f"camera {cam_id!r}", spec_d, _CAMERA_KEYS)
        if "translation" not in spec_d:
            raise ConfigError(f"camera {cam_id!r} needs a translation")
        spec_d = {k: _as_tuple(v) for k, v in spec_d.items()}
        cameras[cam_id] = CameraSpec(**spec_d)

    try:
        plant_cfg = PlantConfig(**plant_d)
        controller_cfg = ControllerConfig(**controller_d)
        traj_base = TrajectoryParams(
            n_segments=traj_d.pop("n_segments", 40), seed=0, **traj_d
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    return Settings(
        plant=plant_cfg,
        controller=controller_cfg,
        traj_params=traj_base,
        loss_frames=int(trial_d.get("loss_frames", 12)),
        max_duration=float(trial_d.get("max_duration", 30.0)),
        cameras=cameras,
    )


def build_perception(settings: Settings, kind: str, plant_cfg: PlantConfig) -> PerceptionConfig:
    """Perception rig for ``kind``, honouring any camera overrides."""

    def build(cam_id: str, default: CameraModel) -> CameraModel:
        spec = settings.cameras.get(cam_id)
        if spec is None:
            return default
        cam = make_camera(cam_id, spec.translation, spec.pitch_deg, spec.fov_half_deg)
        if spec.finger_occluders:
            cam = dataclasses.replace(cam, occluders=finger_occluders(cam, plant_cfg))
        return cam

    if kind == "wrist":
        return PerceptionConfig("wrist", (build("wrist", default_wrist_camera(plant_cfg)),))
    a, b = default_hand_cameras(plant_cfg)
    if kind == "single_hand":
        return PerceptionConfig("single_hand", (build("hand_a", a),))
    if kind == "dual_hand":
        return PerceptionConfig("dual_hand", (build("hand_a", a), build("hand_b", b)))
    raise ConfigError(f"unknown perception kind {kind!r}")


def plant_to_dict(cfg: PlantConfig) -> dict:
    return dataclasses.asdict(cfg)


def controller_to_dict(cfg: ControllerConfig) -> dict:
    return dataclasses.asdict(cfg)


def traj_params_to_dict(params: TrajectoryParams) -> dict:
    return dataclasses.asdict(params)


def camera_to_dict(cam: CameraModel) -> dict:
    return {
        "id": cam.id,
        "translation_mm": list(cam.translation),
        "axes_world": [list(a) for a in cam.axes],
        "fov_half_x_rad": cam.fov_half_x,
        "fov_half_y_rad": cam.fov_half_y,
        "occluders": [[list(p) for p in poly] for poly in cam.occluders],
    }


def perception_to_dict(cfg: PerceptionConfig) -> dict:
    return {"kind": cfg.kind, "cameras": [camera_to_dict(c) for c in cfg.cameras]}
