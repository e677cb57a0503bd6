"""Material, texture and shader repair."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .._data import load_table
from .model import FLAT_SHADING, NEUTRAL_GRAY, AssetManifest, Material, SourceScene
from .semantics import normalize_semantics

TEXTURE_REPAIR = "texture_repair"
MATERIAL_REPAIR = "material_repair"
SHADER_FALLBACK = "shader_fallback"


@dataclass(frozen=True)
class RepairEvent:
    model: str
    kind: str
    reason: str

    def to_dict(self) -> dict:
        return {"model": self.model, "kind": self.kind, "reason": self.reason}


def default_color(category: str) -> tuple[float, float, float, float]:
    color = load_table("default_colors.json").get(category)
    return tuple(color) if color else NEUTRAL_GRAY


def repair_materials(
    scene: SourceScene,
    asset_manifest: AssetManifest,
    categories: Mapping[str, str] | None = None,
) -> tuple[SourceScene, list[RepairEvent]]:
    """Give every model a complete material.

    * a texture missing from the manifest is dropped (the base color stays);
    * a missing material or base color gets the category default color,
      falling back to neutral gray;
    * a missing PBR block gets the flat-shading descriptor.
    """
    if categories is None:
        categories = normalize_semantics(scene)
    events: list[RepairEvent] = []
    models = []
    for m in scene.models:
        mat = m.material
        category = categories.get(m.name, "unknown")
        if mat is None:
            mat = Material(base_color=default_color(category))
            events.append(RepairEvent(m.name, MATERIAL_REPAIR, f"no material; default for {category!r}"))
        if mat.texture_uri is not None and not asset_manifest.available(mat.texture_uri):
            events.append(
                RepairEvent(m.name, TEXTURE_REPAIR, f"texture {mat.texture_uri!r} not in asset manifest")
            )
            mat = replace(mat, texture_uri=None)
        if mat.base_color is None:
            mat = replace(mat, base_color=default_color(category))
            events.append(
                RepairEvent(m.name, MATERIAL_REPAIR, f"no base color; default for {category!r}")
            )
        if mat.pbr is None:
            mat = replace(mat, pbr=dict(FLAT_SHADING))
            events.append(RepairEvent(m.name, SHADER_FALLBACK, "no PBR parameters; flat shading"))
        models.append(replace(m, material=mat) if mat != m.material else m)
    return replace(scene, models=tuple(models)), events
