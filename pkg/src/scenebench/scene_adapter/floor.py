"""Guarantee a walkable floor under every scene."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from ..errors import DegenerateSceneError
from .geometry import AABB, Pose
from .materials import default_color
from .model import FLAT_SHADING, AssetManifest, Geometry, Material, SourceModel, SourceScene
from .semantics import normalize_semantics

FLOOR = "floor"
FLOOR_COVERAGE = 0.8
FLOOR_THICKNESS = 0.05
FLOOR_MARGIN = 1.0
SNAP_TOLERANCE = 1e-4


@dataclass
class FloorReport:
    floor_model: str
    synthesized: bool
    floor_top: float
    snaps: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "floor_model": self.floor_model,
            "synthesized": self.synthesized,
            "floor_top": self.floor_top,
            "snaps": list(self.snaps),
        }


def _overlap_area(a: AABB, b: AABB) -> float:
    w = min(a.max[0], b.max[0]) - max(a.min[0], b.min[0])
    d = min(a.max[1], b.max[1]) - max(a.min[1], b.min[1])
    return max(0.0, w) * max(0.0, d)


def _covers(floor: AABB, extent: AABB) -> bool:
    area = extent.xy_area()
    if area == 0.0:
        return all(floor.min[i] <= extent.min[i] and extent.max[i] <= floor.max[i] for i in (0, 1))
    return _overlap_area(floor, extent) / area >= FLOOR_COVERAGE


def _unused_name(scene: SourceScene, base: str) -> str:
    names = {m.name for m in scene.models}
    if base not in names:
        return base
    i = 1
    while f"{base}_{i}" in names:
        i += 1
    return f"{base}_{i}"


def ensure_floor(
    scene: SourceScene,
    asset_manifest: AssetManifest | None = None,
    categories: Mapping[str, str] | None = None,
) -> tuple[SourceScene, FloorReport]:
    """Make sure a floor spans the scene and nothing sinks through it.

    An existing model categorized as floor is kept when its footprint covers
    at least 80% of the scene's XY extent. Otherwise a thin box floor is
    synthesized with its top face at the lowest AABB bottom in the scene.
    Models whose bottom lies more than 1e-4 m below the floor top are lifted
    onto it.

    Raises:
        DegenerateSceneError: for a scene without models.
    """
    if not scene.models:
        raise DegenerateSceneError(f"scene {scene.name!r} has no models to size a floor from")
    if categories is None:
        categories = normalize_semantics(scene)
    bounds = {m.name: m.world_bounds(asset_manifest) for m in scene.models}
    extent = None
    for b in bounds.values():
        extent = b if extent is None else extent.union(b)

    floor_name = None
    for m in scene.models:
        if categories.get(m.name) == FLOOR and _covers(bounds[m.name], extent):
            floor_name = m.name
            break

    models = list(scene.models)
    if floor_name is not None:
        report = FloorReport(floor_name, False, bounds[floor_name].max[2])
    else:
        z_top = min(b.min[2] for b in bounds.values())
        lo, hi = extent.min, extent.max
        size = (
            hi[0] - lo[0] + 2 * FLOOR_MARGIN,
            hi[1] - lo[1] + 2 * FLOOR_MARGIN,
            FLOOR_THICKNESS,
        )
        center = ((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, z_top - FLOOR_THICKNESS / 2)
        floor_name = _unused_name(scene, FLOOR)
        models.append(
            SourceModel(
                name=floor_name,
                pose=Pose(center),
                geometry=Geometry("box", size=size),
                material=Material(base_color=default_color(FLOOR), pbr=dict(FLAT_SHADING)),
                raw_label=FLOOR,
                synthesized=True,
            )
        )
        report = FloorReport(floor_name, True, z_top)

    top = report.floor_top
    for i, m in enumerate(models):
        if m.name == floor_name or categories.get(m.name) == FLOOR:
            continue
        bottom = bounds[m.name].min[2]
        if bottom < top - SNAP_TOLERANCE:
            dz = top - bottom
            models[i] = replace(m, pose=m.pose.translated(dz=dz))
            report.snaps.append({"model": m.name, "dz": dz})
    return replace(scene, models=tuple(models)), report


def floor_bounds(scene: SourceScene, floor_name: str, asset_manifest: AssetManifest | None = None) -> AABB:
    return scene.model(floor_name).world_bounds(asset_manifest)
