"""Pipeline configuration: strict JSON with a schema version.

Unknown keys are rejected at every level so that a typo in an experiment
definition fails loudly instead of silently falling back to a default.
Angles are degrees in the file and radians everywhere else.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Union

from .errors import ConfigError

SCHEMA_VERSION = 1
SHAPE_KINDS = ("ellipsoid", "diamond", "bilobed", "perturbed_sphere", "obj")


@dataclass
class ShapeConfig:
    kind: str = "diamond"
    subdivisions: int = 4
    params: dict = field(default_factory=dict)
    obj_path: Optional[str] = None

    def validate(self):
        if self.kind not in SHAPE_KINDS:
            raise ConfigError(f"shape.kind must be one of {SHAPE_KINDS}")
        if self.kind == "obj" and not self.obj_path:
            raise ConfigError("shape.obj_path is required for kind 'obj'")
        if not 0 <= self.subdivisions <= 7:
            raise ConfigError("shape.subdivisions must lie in [0, 7]")


@dataclass
class CameraConfig:
    distance: float = 10.0
    lat_deg: float = 14.0
    lon_start_deg: float = 0.0
    lon_end_deg: float = 360.0
    lon_step_deg: float = 1.0
    projection: str = "orthographic"
    resolution: int = 1024
    # bounding-sphere diameter as a fraction of the image width (above 1 zooms in)
    extent: float = 0.66
    pole_angle_deg: float = 20.0

    def validate(self):
        if not self.distance > 0:
            raise ConfigError("camera.distance must be positive")
        if not -90 <= self.lat_deg <= 90:
            raise ConfigError("camera.lat_deg must lie in [-90, 90]")
        if not self.lon_step_deg > 0:
            raise ConfigError("camera.lon_step_deg must be positive")
        if not self.lon_end_deg > self.lon_start_deg:
            raise ConfigError("camera.lon_end_deg must exceed lon_start_deg")
        if self.projection not in ("orthographic", "pinhole"):
            raise ConfigError("camera.projection must be 'orthographic' or 'pinhole'")
        if self.resolution < 8:
            raise ConfigError("camera.resolution must be at least 8")
        if not 0 < self.extent <= 4:
            raise ConfigError("camera.extent must lie in (0, 4]")


@dataclass
class SunConfig:
    phase_deg: float = 90.0
    azimuth_deg: float = 90.0

    def validate(self):
        if not 0 <= self.phase_deg <= 180:
            raise ConfigError("sun.phase_deg must lie in [0, 180]")


@dataclass
class RenderSettings:
    supersample: int = 1
    shadow_epsilon: float = 1e-4
    centroid_weighting: str = "binary"

    def validate(self):
        if self.supersample < 1:
            raise ConfigError("render.supersample must be >= 1")
        if not 0 < self.shadow_epsilon <= 1e-2:
            raise ConfigError("render.shadow_epsilon must lie in (0, 1e-2]")
        if self.centroid_weighting not in ("binary", "lambertian"):
            raise ConfigError("render.centroid_weighting must be 'binary' or 'lambertian'")


@dataclass
class MonteCarloSettings:
    trials: int = 100_000
    sigma_deg: float = 1.0
    n_views: int = 2
    bin_width_deg: float = 2.0
    method: str = "linear"

    def validate(self):
        if self.trials < 1:
            raise ConfigError("montecarlo.trials must be >= 1")
        if self.sigma_deg < 0:
            raise ConfigError("montecarlo.sigma_deg must be >= 0")
        if self.n_views < 2:
            raise ConfigError("montecarlo.n_views must be >= 2")
        if not self.bin_width_deg > 0:
            raise ConfigError("montecarlo.bin_width_deg must be positive")
        if self.method not in ("linear", "nullspace"):
            raise ConfigError("montecarlo.method must be 'linear' or 'nullspace'")


_SECTIONS = {
    "shape": ShapeConfig,
    "camera": CameraConfig,
    "sun": SunConfig,
    "render": RenderSettings,
    "montecarlo": MonteCarloSettings,
}


@dataclass
class PipelineConfig:
    shape: ShapeConfig = field(default_factory=ShapeConfig)
    camera: CameraConfig = field(default_factory=CameraConfig)
    sun: SunConfig = field(default_factory=SunConfig)
    render: RenderSettings = field(default_factory=RenderSettings)
    montecarlo: MonteCarloSettings = field(default_factory=MonteCarloSettings)
    registration: str = "brightness_centroid"
    # pixels, or "full" for no cut-off
    tau: Union[float, str] = 100.0
    grid_step_deg: float = 1.0
    hint_deg: Optional[float] = None
    output_dir: str = "out"
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def validate(self) -> "PipelineConfig":
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        for name in _SECTIONS:
            getattr(self, name).validate()
        if self.registration not in ("none", "known_center", "brightness_centroid"):
            raise ConfigError("registration must be none, known_center or brightness_centroid")
        if isinstance(self.tau, str):
            if self.tau != "full":
                raise ConfigError("tau must be a number or 'full'")
        elif not self.tau > 0:
            raise ConfigError("tau must be positive")
        if not 0 < self.grid_step_deg <= 90:
            raise ConfigError("grid_step_deg must lie in (0, 90]")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
        return self

    @property
    def tau_px(self):
        """Cut-off radius in pixels, or None for the full spectrum."""
        return None if self.tau == "full" else float(self.tau)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        if "schema_version" not in d:
            raise ConfigError("config is missing schema_version")
        kwargs = {}
        top = {f.name for f in fields(cls)}
        for key, value in d.items():
            if key not in top:
                raise ConfigError(f"unknown config key {key!r}")
            if key in _SECTIONS:
                kwargs[key] = _section(_SECTIONS[key], key, value)
            else:
                kwargs[key] = value
        try:
            cfg = cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        _check_types(cfg)
        return cfg.validate()

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            with open(path) as f:
                text = f.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)


def _section(kind, name, value):
    if not isinstance(value, dict):
        raise ConfigError(f"{name} must be an object")
    known = {f.name for f in fields(kind)}
    for key in value:
        if key not in known:
            raise ConfigError(f"unknown config key {name}.{key!r}")
    return kind(**value)


def _check_types(cfg):
    """Reject values whose JSON type cannot be what the field expects."""
    def check(obj, prefix):
        for f in fields(obj):
            v = getattr(obj, f.name)
            default = getattr(type(obj)(), f.name) if f.name not in _SECTIONS else None
            path = f"{prefix}{f.name}"
            if f.name in _SECTIONS:
                check(v, path + ".")
            elif f.name in ("tau", "hint_deg", "obj_path"):
                continue
            elif isinstance(default, bool) or isinstance(v, bool):
                if type(v) is not type(default):
                    raise ConfigError(f"{path} has the wrong type")
            elif isinstance(default, int) and not isinstance(default, bool):
                if not isinstance(v, int):
                    raise ConfigError(f"{path} must be an integer")
            elif isinstance(default, float):
                if not isinstance(v, (int, float)):
                    raise ConfigError(f"{path} must be a number")
            elif isinstance(default, str):
                if not isinstance(v, str):
                    raise ConfigError(f"{path} must be a string")
            elif isinstance(default, dict):
                if not isinstance(v, dict):
                    raise ConfigError(f"{path} must be an object")
    check(cfg, "")
    if cfg.hint_deg is not None and not isinstance(cfg.hint_deg, (int, float)):
        raise ConfigError("hint_deg must be a number or null")
    if not isinstance(cfg.tau, (int, float, str)) or isinstance(cfg.tau, bool):
        raise ConfigError("tau must be a number or 'full'")
