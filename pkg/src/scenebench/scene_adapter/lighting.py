"""The four controlled lighting conditions.

baseline  static, non-uniformly placed scene lights (source lights, or three
          synthesized point lights when the source has none)
nominal   no explicit lights; only emissive meshes contribute
camera    a single directional light attached to the camera
dynamic   baseline lights with per-light intensity keyframes along the
          trajectory
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from .geometry import AABB, convert_vector
from .model import AssetManifest, SourceScene

CONDITIONS = ("baseline", "nominal", "camera", "dynamic")
SYNTH_LIGHT_COUNT = 3
SYNTH_INTENSITY = (0.5, 1.5)
DYNAMIC_FRACTIONS = (0.0, 1 / 3, 2 / 3, 1.0)
DYNAMIC_SCALE = (0.2, 1.0)
CAMERA_LIGHT_DIRECTION = (0.0, 0.0, -1.0)

_STREAM = {"baseline": 1, "dynamic": 2}


@dataclass(frozen=True)
class Light:
    name: str
    kind: str  # point | directional
    intensity: float
    color: tuple[float, float, float] = (1.0, 1.0, 1.0)
    position: tuple[float, float, float] | None = None
    direction: tuple[float, float, float] | None = None
    attached_to: str = "world"

    def to_dict(self) -> dict:
        world = self.attached_to == "world"
        d = {
            "name": self.name,
            "kind": self.kind,
            "intensity": self.intensity,
            "color": list(self.color),
            "attached_to": self.attached_to,
        }
        if self.position is not None:
            d["position"] = list(convert_vector(self.position) if world else self.position)
        if self.direction is not None:
            d["direction"] = list(convert_vector(self.direction) if world else self.direction)
        return d


@dataclass(frozen=True)
class Keyframe:
    trajectory_fraction: float
    intensity_scales: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "trajectory_fraction": self.trajectory_fraction,
            "intensity_scales": list(self.intensity_scales),
        }


@dataclass(frozen=True)
class LightingConfig:
    condition: str
    lights: tuple[Light, ...] = ()
    schedule: tuple[Keyframe, ...] = field(default=())

    def __post_init__(self):
        check_lighting(self)

    def to_dict(self) -> dict:
        """Serialized with world-attached lights in the Y-up frame."""
        return {
            "condition": self.condition,
            "lights": [l.to_dict() for l in self.lights],
            "schedule": [k.to_dict() for k in self.schedule],
        }


def check_lighting(cfg: LightingConfig) -> None:
    if cfg.condition not in CONDITIONS:
        raise InputError(f"unknown lighting condition {cfg.condition!r}")
    for light in cfg.lights:
        if light.intensity < 0:
            raise InputError(f"light {light.name!r} has negative intensity")
    if cfg.condition == "nominal" and cfg.lights:
        raise InputError("nominal lighting must not carry explicit lights")
    if cfg.condition == "camera":
        if len(cfg.lights) != 1:
            raise InputError("camera lighting needs exactly one light")
        only = cfg.lights[0]
        if only.kind != "directional" or only.attached_to != "camera":
            raise InputError("camera lighting needs a camera-attached directional light")
    if cfg.condition == "dynamic":
        fr = [k.trajectory_fraction for k in cfg.schedule]
        if not fr or fr[0] != 0.0 or fr[-1] != 1.0 or any(b <= a for a, b in zip(fr, fr[1:])):
            raise InputError("dynamic schedule must rise strictly from 0.0 to 1.0")
        for k in cfg.schedule:
            if len(k.intensity_scales) != len(cfg.lights) or any(s < 0 for s in k.intensity_scales):
                raise InputError("each keyframe needs one non-negative scale per light")
    elif cfg.schedule:
        raise InputError(f"{cfg.condition} lighting takes no schedule")


def _rng(seed: int, stream: str) -> np.random.Generator:
    return np.random.default_rng([int(seed) % 2**64, _STREAM[stream]])


def scene_bounds(scene: SourceScene, asset_manifest: AssetManifest | None = None) -> AABB:
    box = None
    for m in scene.models:
        b = m.world_bounds(asset_manifest)
        box = b if box is None else box.union(b)
    return box or AABB((-0.5, -0.5, 0.0), (0.5, 0.5, 1.0))


def _baseline_lights(
    scene: SourceScene, seed: int, asset_manifest: AssetManifest | None
) -> tuple[Light, ...]:
    if scene.lights:
        return tuple(
            Light(
                name=l.name or f"light_{i}",
                kind=l.kind,
                intensity=l.intensity,
                color=l.color,
                position=l.position if l.kind == "point" else None,
                direction=l.direction if l.kind == "directional" else None,
            )
            for i, l in enumerate(scene.lights)
        )
    rng = _rng(seed, "baseline")
    box = scene_bounds(scene, asset_manifest)
    lo, hi = np.asarray(box.min), np.asarray(box.max)
    span = hi - lo
    long_axis = 0 if span[0] >= span[1] else 1
    lights = []
    for k in range(SYNTH_LIGHT_COUNT):
        # stratified along the longer horizontal axis, jittered within each stratum
        u = np.empty(3)
        u[long_axis] = (k + rng.uniform(0.1, 0.9)) / SYNTH_LIGHT_COUNT
        u[1 - long_axis] = rng.uniform(0.0, 1.0)
        u[2] = rng.uniform(0.5, 1.0)
        pos = lo + u * span
        lights.append(
            Light(
                name=f"synth_point_{k}",
                kind="point",
                intensity=float(rng.uniform(*SYNTH_INTENSITY)),
                position=tuple(float(v) for v in pos),
            )
        )
    return tuple(lights)


def make_lighting_config(
    scene: SourceScene,
    condition: str,
    seed: int = 0,
    asset_manifest: AssetManifest | None = None,
) -> LightingConfig:
    if condition == "baseline":
        return LightingConfig("baseline", _baseline_lights(scene, seed, asset_manifest))
    if condition == "nominal":
        return LightingConfig("nominal")
    if condition == "camera":
        light = Light(
            name="camera_light",
            kind="directional",
            intensity=1.0,
            direction=CAMERA_LIGHT_DIRECTION,
            attached_to="camera",
        )
        return LightingConfig("camera", (light,))
    if condition == "dynamic":
        lights = _baseline_lights(scene, seed, asset_manifest)
        rng = _rng(seed, "dynamic")
        scales = rng.uniform(*DYNAMIC_SCALE, size=(len(DYNAMIC_FRACTIONS), len(lights)))
        schedule = tuple(
            Keyframe(f, tuple(float(s) for s in row)) for f, row in zip(DYNAMIC_FRACTIONS, scales)
        )
        return LightingConfig("dynamic", lights, schedule)
    raise InputError(f"unknown lighting condition {condition!r}")
