"""Write a converted scene as a Habitat-style dataset bundle.

Files (all canonical JSON)::

    <scene>.scene_instance.json          object placements, Y-up frame
    <template>.object_config.json        one per distinct template
    <scene>.semantic_lexicon.json        category -> dense id
    <scene>.lighting.<condition>.json    one per lighting condition
    <scene>.navigation.json
    scene_dataset_config.json            index of the above
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .. import jsonio
from ..errors import DatasetInvariantError
from .geometry import convert_frame
from .lighting import CONDITIONS, LightingConfig
from .model import SourceModel, SourceScene
from .navigation import NavigationBlock

FORMAT_VERSION = "1.0"
PRIMITIVE_ASSETS = {"box": "cubeSolid", "cylinder": "cylinderSolid"}


@dataclass
class HabitatDataset:
    name: str
    scene_instance: list[dict]
    object_configs: dict[str, dict]
    semantic_lexicon: dict[str, int]
    lighting_configs: dict[str, LightingConfig]
    navigation: NavigationBlock

    def files(self) -> dict[str, object]:
        """Relative file name -> JSON payload."""
        n = self.name
        out: dict[str, object] = {
            f"{n}.scene_instance.json": {
                "scene": n,
                "frame": "y_up",
                "object_instances": self.scene_instance,
            },
            f"{n}.semantic_lexicon.json": {"classes": dict(self.semantic_lexicon)},
            f"{n}.navigation.json": self.navigation.to_dict(),
        }
        for key, cfg in self.object_configs.items():
            out[f"{key}.object_config.json"] = cfg
        for cond, cfg in self.lighting_configs.items():
            out[f"{n}.lighting.{cond}.json"] = cfg.to_dict()
        out["scene_dataset_config.json"] = {
            "format_version": FORMAT_VERSION,
            "scene": n,
            "scene_instance": f"{n}.scene_instance.json",
            "object_configs": sorted(f"{k}.object_config.json" for k in self.object_configs),
            "semantic_lexicon": f"{n}.semantic_lexicon.json",
            "lighting": {c: f"{n}.lighting.{c}.json" for c in self.lighting_configs},
            "navigation": f"{n}.navigation.json",
        }
        return out


def slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_") or "object"


def _template_base(model: SourceModel, category: str) -> tuple[str, str]:
    g = model.geometry
    if g.kind == "mesh":
        stem = os.path.splitext(os.path.basename(g.uri))[0]
        return slug(stem), g.uri
    suffix = "" if g.kind == "box" else f"_{g.kind}"
    return slug(category) + suffix, PRIMITIVE_ASSETS[g.kind]


def build_dataset(
    scene: SourceScene,
    semantics: Mapping[str, str],
    lighting: Mapping[str, LightingConfig],
    navigation: NavigationBlock,
) -> HabitatDataset:
    templates: dict[str, dict] = {}
    owner: dict[tuple[str, str], str] = {}
    lexicon: dict[str, int] = {}
    placements = []
    for m in scene.models:
        category = semantics.get(m.name, "unknown")
        if category not in lexicon:
            lexicon[category] = len(lexicon)
        base, asset = _template_base(m, category)
        key = owner.get((asset, category))
        if key is None:
            key, i = base, 2
            while key in templates:
                key, i = f"{base}_{i}", i + 1
            owner[(asset, category)] = key
            templates[key] = {
                "render_asset": asset,
                "semantic_category": category,
                "semantic_id": lexicon[category],
            }
        pose = convert_frame(m.pose)
        placements.append(
            {
                "instance_name": m.name,
                "template_name": key,
                "translation": list(pose.position),
                "rotation": list(pose.orientation),
                "non_uniform_scale": list(m.geometry.render_scale),
                "motion_type": "STATIC",
                "material": m.material.to_dict() if m.material else None,
            }
        )
    lighting = {c: lighting[c] for c in CONDITIONS if c in lighting}
    return HabitatDataset(scene.name, placements, templates, lexicon, lighting, navigation)


def check_references(ds: HabitatDataset) -> None:
    for p in ds.scene_instance:
        if p["template_name"] not in ds.object_configs:
            raise DatasetInvariantError(
                f"placement {p['instance_name']!r} references missing template {p['template_name']!r}"
            )
    ids = sorted(ds.semantic_lexicon.values())
    if ids != list(range(len(ids))):
        raise DatasetInvariantError(f"semantic ids are not dense: {ids}")
    for key, cfg in ds.object_configs.items():
        if ds.semantic_lexicon.get(cfg["semantic_category"]) != cfg["semantic_id"]:
            raise DatasetInvariantError(f"template {key!r} disagrees with the semantic lexicon")


def emit_habitat_dataset(
    scene: SourceScene,
    semantics: Mapping[str, str],
    lighting: Mapping[str, LightingConfig],
    navigation: NavigationBlock,
    out_dir: Path,
) -> HabitatDataset:
    """Build the dataset bundle, check it, and write it under ``out_dir``.

    Raises:
        DatasetInvariantError: the bundle is internally inconsistent.
        OSError: ``out_dir`` cannot be written.
    """
    ds = build_dataset(scene, semantics, lighting, navigation)
    check_references(ds)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rel, payload in ds.files().items():
        jsonio.write_json(out_dir / rel, payload)
    return ds
