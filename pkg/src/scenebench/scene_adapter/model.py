"""In-memory form of a parsed source scene and its asset manifest."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ..errors import InputError
from .geometry import AABB, Pose

NEUTRAL_GRAY = (0.5, 0.5, 0.5, 1.0)
FLAT_SHADING = {"metallic": 0.0, "roughness": 1.0}


@dataclass(frozen=True)
class Geometry:
    """``kind`` is one of mesh, box, cylinder.

    mesh: ``uri`` and ``scale``; box: ``size``; cylinder: ``radius``, ``length``.
    """

    kind: str
    uri: str | None = None
    scale: tuple[float, float, float] = (1.0, 1.0, 1.0)
    size: tuple[float, float, float] | None = None
    radius: float | None = None
    length: float | None = None

    def __post_init__(self):
        if self.kind == "mesh":
            if not self.uri:
                raise InputError("mesh geometry needs a uri")
            if any(s <= 0 for s in self.scale):
                raise InputError(f"mesh scale must be positive, got {self.scale}")
        elif self.kind == "box":
            if self.size is None or any(s <= 0 for s in self.size):
                raise InputError(f"box size must be positive, got {self.size}")
        elif self.kind == "cylinder":
            if not (self.radius and self.radius > 0 and self.length and self.length > 0):
                raise InputError("cylinder radius and length must be positive")
        else:
            raise InputError(f"unknown geometry kind {self.kind!r}")

    def local_bounds(self, manifest: "AssetManifest | None" = None) -> AABB | None:
        if self.kind == "box":
            h = tuple(s / 2 for s in self.size)
            return AABB(tuple(-v for v in h), h)
        if self.kind == "cylinder":
            r, l = self.radius, self.length / 2
            return AABB((-r, -r, -l), (r, r, l))
        entry = manifest.get(self.uri) if manifest else None
        if entry is None or entry.aabb is None:
            return None
        return entry.aabb

    @property
    def render_scale(self) -> tuple[float, float, float]:
        """Scale applied to the unit-sized render asset."""
        if self.kind == "mesh":
            return self.scale
        if self.kind == "box":
            return self.size
        return (2 * self.radius, 2 * self.radius, self.length)


@dataclass(frozen=True)
class Material:
    base_color: tuple[float, float, float, float] | None = None
    texture_uri: str | None = None
    pbr: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.base_color is not None:
            if len(self.base_color) != 4 or not all(0.0 <= c <= 1.0 for c in self.base_color):
                raise InputError(f"base_color must be RGBA in [0, 1], got {self.base_color}")
        if self.pbr is not None:
            for k in ("metallic", "roughness"):
                if not 0.0 <= self.pbr.get(k, 0.0) <= 1.0:
                    raise InputError(f"pbr {k} must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "base_color": list(self.base_color) if self.base_color else None,
            "texture": self.texture_uri,
            "pbr": dict(sorted(self.pbr.items())) if self.pbr else None,
        }


@dataclass(frozen=True)
class SourceModel:
    name: str
    pose: Pose
    geometry: Geometry
    material: Material | None = None
    raw_label: str = ""
    synthesized: bool = False

    def world_bounds(self, manifest: "AssetManifest | None" = None) -> AABB:
        local = self.geometry.local_bounds(manifest)
        if local is None:
            # unknown mesh extent: collapse to the origin of the model
            return AABB(self.pose.position, self.pose.position)
        scale = self.geometry.scale if self.geometry.kind == "mesh" else (1.0, 1.0, 1.0)
        return local.transformed(self.pose, scale)


@dataclass(frozen=True)
class SourceLight:
    name: str
    kind: str  # point | directional
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    direction: tuple[float, float, float] = (0.0, 0.0, -1.0)
    color: tuple[float, float, float] = (1.0, 1.0, 1.0)
    intensity: float = 1.0


@dataclass(frozen=True)
class SourceScene:
    name: str
    models: tuple[SourceModel, ...] = ()
    lights: tuple[SourceLight, ...] = ()
    up_axis: str = "z_up"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def model(self, name: str) -> SourceModel:
        for m in self.models:
            if m.name == name:
                return m
        raise KeyError(name)


@dataclass(frozen=True)
class AssetEntry:
    uri: str
    exists: bool
    aabb: AABB | None = None


class AssetManifest:
    """Lookup of available assets: ``uri -> exists flag + local AABB``."""

    def __init__(self, entries=()):
        self._entries: dict[str, AssetEntry] = {e.uri: e for e in entries}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AssetManifest":
        entries = []
        for a in doc.get("assets", []):
            box = a.get("aabb")
            aabb = AABB(tuple(box["min"]), tuple(box["max"])) if box else None
            entries.append(AssetEntry(a["uri"], bool(a.get("exists", True)), aabb))
        return cls(entries)

    @classmethod
    def load(cls, path: Path) -> "AssetManifest":
        import json

        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def get(self, uri: str) -> AssetEntry | None:
        return self._entries.get(uri)

    def available(self, uri: str) -> bool:
        e = self._entries.get(uri)
        return bool(e and e.exists)

    def __contains__(self, uri: str) -> bool:
        return self.available(uri)

    def __len__(self) -> int:
        return len(self._entries)
