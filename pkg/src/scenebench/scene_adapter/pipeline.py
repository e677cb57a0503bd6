from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .emit import HabitatDataset, emit_habitat_dataset
from .floor import FLOOR, FloorReport, ensure_floor
from .lighting import CONDITIONS, make_lighting_config
from .materials import RepairEvent, repair_materials
from .model import AssetManifest
from .navigation import setup_navigation
from .sdf import parse_scene_source
from .semantics import normalize_semantics

log = logging.getLogger(__name__)


@dataclass
class AdaptResult:
    dataset: HabitatDataset
    repairs: list[RepairEvent]
    floor: FloorReport
    warnings: list[str] = field(default_factory=list)

    def report(self) -> dict:
        return {
            "scene": self.dataset.name,
            "repairs": [e.to_dict() for e in self.repairs],
            "floor": self.floor.to_dict(),
            "warnings": list(self.warnings),
        }


def adapt_scene(
    document: str | bytes,
    manifest: AssetManifest,
    out_dir: Path,
    *,
    name: str | None = None,
    seed: int = 0,
    lexicon_overrides: Mapping[str, str] | None = None,
    conditions: Sequence[str] = CONDITIONS,
) -> AdaptResult:
    """Run parse -> semantics -> repair -> floor -> navigation -> lighting -> emit."""
    scene = parse_scene_source(document, manifest, name=name)
    semantics = normalize_semantics(scene, lexicon_overrides)
    scene, repairs = repair_materials(scene, manifest, semantics)
    scene, floor = ensure_floor(scene, manifest, semantics)
    if floor.synthesized:
        semantics = {**semantics, floor.floor_model: FLOOR}
    nav = setup_navigation(scene, floor, manifest, semantics)
    lighting = {c: make_lighting_config(scene, c, seed, manifest) for c in conditions}
    ds = emit_habitat_dataset(scene, semantics, lighting, nav, out_dir)
    log.info("adapted scene %s: %d placements", scene.name, len(ds.scene_instance))
    return AdaptResult(ds, repairs, floor, list(scene.warnings))
