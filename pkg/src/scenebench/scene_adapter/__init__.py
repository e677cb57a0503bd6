"""Drake-style SDF scenes -> Habitat-style benchmark datasets."""

from .emit import HabitatDataset, build_dataset, emit_habitat_dataset
from .floor import FloorReport, ensure_floor
from .geometry import AABB, Pose, convert_frame, convert_frame_inverse, rpy_to_quat
from .lighting import CONDITIONS, Keyframe, Light, LightingConfig, make_lighting_config
from .materials import RepairEvent, repair_materials
from .model import AssetManifest, Geometry, Material, SourceLight, SourceModel, SourceScene
from .navigation import NavigationBlock, setup_navigation
from .pipeline import AdaptResult, adapt_scene
from .sdf import parse_scene_source
from .semantics import normalize_label, normalize_semantics
from .validate import validate_dataset

__all__ = [
    "AABB",
    "AdaptResult",
    "AssetManifest",
    "CONDITIONS",
    "FloorReport",
    "Geometry",
    "HabitatDataset",
    "Keyframe",
    "Light",
    "LightingConfig",
    "Material",
    "NavigationBlock",
    "Pose",
    "RepairEvent",
    "SourceLight",
    "SourceModel",
    "SourceScene",
    "adapt_scene",
    "build_dataset",
    "convert_frame",
    "convert_frame_inverse",
    "emit_habitat_dataset",
    "ensure_floor",
    "make_lighting_config",
    "normalize_label",
    "normalize_semantics",
    "parse_scene_source",
    "repair_materials",
    "rpy_to_quat",
    "setup_navigation",
    "validate_dataset",
]
