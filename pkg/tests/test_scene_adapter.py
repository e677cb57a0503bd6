import json
import math
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from conftest import GOLDEN_DIR, GOLDEN_SEED, SCENE_IDS, scene_source
from scenebench.errors import DatasetInvariantError, DegenerateSceneError, InputError, UnnavigableSceneError
from scenebench.scene_adapter import (
    CONDITIONS,
    AssetManifest,
    adapt_scene,
    ensure_floor,
    make_lighting_config,
    normalize_label,
    normalize_semantics,
    repair_materials,
    setup_navigation,
    validate_dataset,
)
from scenebench.scene_adapter.emit import build_dataset, check_references, emit_habitat_dataset
from scenebench.scene_adapter.geometry import Pose, rotate
from scenebench.scene_adapter.lighting import Keyframe, Light, LightingConfig
from scenebench.scene_adapter.materials import MATERIAL_REPAIR, SHADER_FALLBACK, TEXTURE_REPAIR
from scenebench.scene_adapter.model import (
    FLAT_SHADING,
    NEUTRAL_GRAY,
    Geometry,
    Material,
    SourceModel,
    SourceScene,
)
from scenebench.scene_adapter.validate import schema

EMPTY = AssetManifest()


def box(name, x=0.0, y=0.0, z=0.5, size=(1.0, 1.0, 1.0), material=None, label=None):
    return SourceModel(name, Pose((x, y, z)), Geometry("box", size=size), material, label or name)


def scene_of(*models, lights=()):
    return SourceScene("s", tuple(models), tuple(lights))


def tree(path: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


# -- semantics -------------------------------------------------------------


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("coffee_mug_03", "mug"),
        ("Sofa", "sofa"),
        ("", "unknown"),
        ("couch-v2", "sofa"),
        ("Table.001", "table"),
        ("night_stand_2", "nightstand"),
        ("chair_copy", "chair"),
        ("lamp instance 4", "lamp"),
        ("armchair_v2", "armchair"),
        ("plate1", "plate"),
        ("___", "unknown"),
        ("3", "unknown"),
    ],
)
def test_normalize_label(raw, expected):
    assert normalize_label(raw) == expected


def test_overrides_apply_last():
    assert normalize_label("couch_1", {"sofa": "settee"}) == "settee"
    assert normalize_label("widget", {"widget": "gadget"}) == "gadget"


# -- materials -------------------------------------------------------------


def test_material_repairs():
    manifest = AssetManifest.from_dict({"assets": [{"uri": "ok.png", "exists": True}]})
    scene = scene_of(
        box("good", material=Material((0.1, 0.1, 0.1, 1.0), "ok.png", {"metallic": 0.2, "roughness": 0.4})),
        box("lost_tex", material=Material((0.3, 0.3, 0.3, 1.0), "missing.png", {"metallic": 0, "roughness": 1})),
        box("sofa"),
        box("gizmo"),
    )
    out, events = repair_materials(scene, manifest)
    by = {m.name: m.material for m in out.models}
    assert by["good"] == scene.model("good").material
    assert by["lost_tex"].texture_uri is None and by["lost_tex"].base_color == (0.3, 0.3, 0.3, 1.0)
    assert by["sofa"].base_color == (0.42, 0.45, 0.55, 1.0)
    assert by["gizmo"].base_color == NEUTRAL_GRAY
    assert by["sofa"].pbr == FLAT_SHADING
    kinds = [(e.model, e.kind) for e in events]
    assert ("good", TEXTURE_REPAIR) not in kinds
    assert kinds.count(("lost_tex", TEXTURE_REPAIR)) == 1
    assert ("sofa", MATERIAL_REPAIR) in kinds and ("sofa", SHADER_FALLBACK) in kinds
    for m in out.models:
        assert m.material.base_color is not None and m.material.pbr is not None


def test_material_validation():
    with pytest.raises(InputError):
        Material((1.2, 0, 0, 1))
    with pytest.raises(InputError):
        Material((1, 0, 0, 1), pbr={"metallic": 2.0, "roughness": 0.5})


# -- floor -----------------------------------------------------------------


def test_floor_existing_full_extent_unchanged():
    scene = scene_of(box("floor", z=-0.05, size=(10, 10, 0.1)), box("table", z=0.5))
    out, report = ensure_floor(scene)
    assert out == scene
    assert not report.synthesized and report.floor_model == "floor" and report.floor_top == 0.0


def test_floor_synthesized_under_boxes():
    scene = scene_of(box("a", 0, 0, 0.5), box("b", 3, 0, 0.5))
    out, report = ensure_floor(scene)
    assert report.synthesized and report.floor_top == 0.0 and report.snaps == []
    floor = out.model("floor")
    b = floor.world_bounds()
    assert b.max[2] == pytest.approx(0.0) and b.max[2] - b.min[2] == pytest.approx(0.05)
    assert b.min[0] <= -0.5 and b.max[0] >= 3.5


def test_floor_top_at_lowest_bottom_no_snaps():
    scene = scene_of(box("a", z=0.4), box("b", 2, 0, 0.5))  # bottoms at -0.1 and 0
    out, report = ensure_floor(scene)
    assert report.floor_top == pytest.approx(-0.1)
    assert report.snaps == []
    assert out.model("a").pose == scene.model("a").pose


def test_floor_small_existing_floor_is_replaced_and_objects_snap():
    scene = scene_of(box("floor", z=-0.05, size=(1, 1, 0.1)), box("a", 5, 5, 0.3))
    out, report = ensure_floor(scene)
    assert report.synthesized and report.floor_model == "floor_1"
    assert report.floor_top == pytest.approx(-0.2)


def test_floor_snaps_sunken_model_onto_existing_floor():
    scene = scene_of(box("floor", z=-0.05, size=(10, 10, 0.1)), box("a", z=0.3))
    out, report = ensure_floor(scene)
    assert [s["model"] for s in report.snaps] == ["a"]
    assert out.model("a").world_bounds().min[2] == pytest.approx(0.0)


def test_floor_degenerate():
    with pytest.raises(DegenerateSceneError):
        ensure_floor(scene_of())


# -- navigation ------------------------------------------------------------


def floor_only(size=4.0):
    return scene_of(box("floor", z=-0.05, size=(size, size, 0.1)))


def test_nav_empty_floor_starts_at_center():
    scene, report = ensure_floor(floor_only())
    nav = setup_navigation(scene, report)
    np.testing.assert_allclose(nav.start_pose.position, (0, 0, 0), atol=1e-9)
    assert nav.agent_radius == 0.18 and nav.agent_height == 1.5


def test_nav_object_in_positive_x_half():
    scene, report = ensure_floor(scene_of(box("floor", z=-0.05, size=(4, 4, 0.1)), box("crate", 1.0, 0.0, 0.5)))
    nav = setup_navigation(scene, report)
    x, y, _ = nav.start_pose.position
    assert x < 0
    bearing = np.array([1.0 - x, -y]) / math.hypot(1.0 - x, y)
    heading = rotate(nav.start_pose.orientation, (1.0, 0.0, 0.0))
    np.testing.assert_allclose(heading, (*bearing, 0.0), atol=1e-9)


def test_nav_ignores_objects_above_agent():
    shelf = box("shelf", 0, 0, 2.0, size=(3.9, 3.9, 0.2))
    scene, report = ensure_floor(scene_of(box("floor", z=-0.05, size=(4, 4, 0.1)), shelf))
    nav = setup_navigation(scene, report)
    np.testing.assert_allclose(nav.start_pose.position[:2], (0, 0), atol=1e-9)


def test_nav_packed_scene_is_unnavigable():
    scene, report = ensure_floor(scene_of(box("floor", z=-0.05, size=(2, 2, 0.1)), box("block", 0, 0, 0.5, (2, 2, 1))))
    with pytest.raises(UnnavigableSceneError):
        setup_navigation(scene, report)


def test_nav_grid_oracle(rng):
    """Start point maximizes clearance over an independently built grid."""
    for _ in range(10):
        models = [box("floor", z=-0.05, size=(5, 4, 0.1))]
        for i in range(3):
            models.append(box(f"o{i}", *rng.uniform(-2, 2, 2), 0.5, size=(0.6, 0.6, 1.0)))
        scene, report = ensure_floor(scene_of(*models))
        nav = setup_navigation(scene, report)
        best = -1.0
        for x in np.arange(-2.5, 2.5 + 1e-9, 0.1):
            for y in np.arange(-2.0, 2.0 + 1e-9, 0.1):
                c = min(x + 2.5, 2.5 - x, y + 2.0, 2.0 - y)
                for m in models[1:]:
                    b = m.world_bounds()
                    dx = max(b.min[0] - x, 0, x - b.max[0])
                    dy = max(b.min[1] - y, 0, y - b.max[1])
                    c = min(c, math.hypot(dx, dy))
                best = max(best, c)
        assert nav.clearance == pytest.approx(best, abs=1e-9)


# -- lighting --------------------------------------------------------------


def test_lighting_conditions_contract():
    scene = scene_of(box("a"), box("b", 3, 2, 0.5))
    nominal = make_lighting_config(scene, "nominal")
    assert nominal.lights == () and nominal.schedule == ()
    cam = make_lighting_config(scene, "camera")
    assert len(cam.lights) == 1
    assert cam.lights[0].kind == "directional" and cam.lights[0].attached_to == "camera"
    assert cam.lights[0].direction == (0.0, 0.0, -1.0)
    base = make_lighting_config(scene, "baseline", seed=5)
    assert len(base.lights) == 3
    assert all(0.5 <= l.intensity <= 1.5 for l in base.lights)
    dyn = make_lighting_config(scene, "dynamic", seed=5)
    assert dyn.lights == base.lights
    assert [k.trajectory_fraction for k in dyn.schedule] == pytest.approx([0, 1 / 3, 2 / 3, 1])
    assert all(0.2 <= s <= 1.0 for k in dyn.schedule for s in k.intensity_scales)


def test_baseline_lights_inside_scene_and_spread():
    scene = scene_of(box("a", 0, 0, 0.5), box("b", 6, 4, 1.5))
    lights = make_lighting_config(scene, "baseline", seed=11).lights
    pos = np.array([l.position for l in lights])
    assert np.all(pos >= np.array([-0.5, -0.5, 0.0]) - 1e-12)
    assert np.all(pos <= np.array([6.5, 4.5, 2.0]) + 1e-12)
    assert len({round(p, 6) for p in pos[:, 0]}) == 3


def test_baseline_copies_source_lights():
    from scenebench.scene_adapter.model import SourceLight

    scene = scene_of(box("a"), lights=[SourceLight("sun", "directional", direction=(0, 0, -1), intensity=2.0)])
    base = make_lighting_config(scene, "baseline", seed=3)
    assert [l.name for l in base.lights] == ["sun"] and base.lights[0].intensity == 2.0


def test_lighting_deterministic_and_seeded():
    scene = scene_of(box("a"), box("b", 2, 2, 0.5))
    a = make_lighting_config(scene, "dynamic", seed=42).to_dict()
    b = make_lighting_config(scene, "dynamic", seed=42).to_dict()
    c = make_lighting_config(scene, "dynamic", seed=43).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a != c


@pytest.mark.parametrize(
    "cfg",
    [
        dict(condition="nominal", lights=(Light("l", "point", 1.0, position=(0, 0, 0)),)),
        dict(condition="camera", lights=()),
        dict(condition="camera", lights=(Light("l", "directional", 1.0, direction=(0, 0, -1)),)),
        dict(condition="dynamic", lights=(), schedule=(Keyframe(0.0, ()), Keyframe(0.5, ()))),
        dict(condition="dynamic", lights=(), schedule=(Keyframe(0.0, ()), Keyframe(1.0, ()), Keyframe(1.0, ()))),
        dict(condition="baseline", lights=(Light("l", "point", -1.0, position=(0, 0, 0)),)),
        dict(condition="sunset"),
    ],
)
def test_lighting_invariants_rejected(cfg):
    with pytest.raises(InputError):
        LightingConfig(**cfg)


# -- emit and validate -----------------------------------------------------


def adapt_fixture(scene_id, out, seed=GOLDEN_SEED, **kw):
    doc, manifest = scene_source(scene_id)
    return adapt_scene(doc, AssetManifest.load(manifest), out, name=scene_id, seed=seed, **kw)


def test_floor_only_dataset(tmp_path):
    scene, report = ensure_floor(floor_only())
    sem = normalize_semantics(scene)
    scene, _ = repair_materials(scene, EMPTY, sem)
    nav = setup_navigation(scene, report)
    lighting = {c: make_lighting_config(scene, c, 0) for c in CONDITIONS}
    ds = emit_habitat_dataset(scene, sem, lighting, nav, tmp_path)
    assert list(ds.object_configs) == ["floor"]
    assert len(list(tmp_path.glob("*.lighting.*.json"))) == 4
    validate_dataset(tmp_path)


def test_template_sharing():
    scene = scene_of(box("floor", z=-0.05, size=(6, 6, 0.1)), box("chair_1", 1, 1), box("chair_2", -1, -1))
    scene, report = ensure_floor(scene)
    sem = normalize_semantics(scene)
    nav = setup_navigation(scene, report)
    ds = build_dataset(scene, sem, {c: make_lighting_config(scene, c) for c in CONDITIONS}, nav)
    assert len(ds.scene_instance) == 3
    assert sorted(ds.object_configs) == ["chair", "floor"]
    assert ds.semantic_lexicon == {"floor": 0, "chair": 1}


def test_check_references_detects_breaks():
    scene, report = ensure_floor(floor_only())
    ds = build_dataset(scene, {"floor": "floor"}, {}, setup_navigation(scene, report))
    ds.object_configs.clear()
    with pytest.raises(DatasetInvariantError):
        check_references(ds)


@pytest.mark.parametrize("scene_id", SCENE_IDS)
def test_fixture_scene_validates_and_is_deterministic(tmp_path, scene_id):
    adapt_fixture(scene_id, tmp_path / "a")
    adapt_fixture(scene_id, tmp_path / "b")
    assert tree(tmp_path / "a") == tree(tmp_path / "b")
    index = validate_dataset(tmp_path / "a")
    assert set(index["lighting"]) == set(CONDITIONS)
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes().endswith(b"}\n") and b"\r" not in f.read_bytes()


@pytest.mark.parametrize("scene_id", SCENE_IDS)
def test_golden_trees(tmp_path, scene_id):
    adapt_fixture(scene_id, tmp_path)
    assert tree(tmp_path) == tree(GOLDEN_DIR / scene_id)


def test_validator_reports_schema_problems(tmp_path):
    adapt_fixture("kitchen_02", tmp_path)
    path = tmp_path / "kitchen_02.lighting.camera.json"
    doc = json.loads(path.read_text())
    doc["lights"].append(dict(doc["lights"][0]))
    path.write_text(json.dumps(doc))
    with pytest.raises(DatasetInvariantError, match="lighting.camera"):
        validate_dataset(tmp_path)


def test_schemas_are_valid_draft_2020_12():
    for name in ("scene_instance", "object_config", "semantic_lexicon", "lighting", "navigation",
                 "scene_dataset_config"):
        jsonschema.Draft202012Validator.check_schema(schema(name))


def test_emitted_positions_are_y_up(tmp_path):
    adapt_fixture("living_room_01", tmp_path)
    inst = json.loads((tmp_path / "living_room_01.scene_instance.json").read_text())
    couch = next(p for p in inst["object_instances"] if p["instance_name"] == "couch_2")
    assert couch["translation"] == pytest.approx([-1.5, 0.0, -1.8])


def test_conditions_subset(tmp_path):
    adapt_fixture("kitchen_02", tmp_path, conditions=("baseline", "camera"))
    assert sorted(p.name for p in tmp_path.glob("*.lighting.*")) == [
        "kitchen_02.lighting.baseline.json",
        "kitchen_02.lighting.camera.json",
    ]
    validate_dataset(tmp_path, ("baseline", "camera"))
    with pytest.raises(DatasetInvariantError):
        validate_dataset(tmp_path)


def test_fixture_repairs_reported(tmp_path):
    report = adapt_fixture("living_room_01", tmp_path).report()
    kinds = {(e["model"], e["kind"]) for e in report["repairs"]}
    assert ("couch_2", TEXTURE_REPAIR) in kinds
    assert not report["floor"]["synthesized"]
    report = adapt_fixture("kitchen_02", tmp_path / "k").report()
    assert report["floor"]["synthesized"]
    assert any("bottle" in w for w in report["warnings"])
    assert [s["model"] for s in report["floor"]["snaps"]] == []
