"""Regenerate the shipped fixtures.

Run from the repository root after an intentional behavior change::

    python3 scripts/build_fixtures.py

Writes the mini example workspace, the 350-prompt offline pool, the 40-record
QC file and the golden scene trees under tests/golden/. Review the diff
before committing.
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path

import numpy as np

from scenebench import jsonio
from scenebench.evaluator.labelmaps import write_pgm, write_raw
from scenebench.question_gen import QuestionItem, generate_questions, load_scene_spec, write_questions
from scenebench.scene_adapter import AssetManifest, adapt_scene
from scenebench.workspace import Workspace, derive_seed

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "scenebench" / "data" / "fixtures"
MINI = FIXTURES / "workspaces" / "mini"
GOLDEN = ROOT / "tests" / "golden"
GOLDEN_SEED = 7

METHODS = ("bbq", "conceptgraphs")
CONDITIONS = ("baseline", "nominal", "camera", "dynamic")

SCENES = {
    "living_room_01": {
        "subset": "furniture",
        "sdf": """<?xml version="1.0"?>
<sdf version="1.9">
  <world name="living_room_01">
    <model name="floor_1">
      <pose>0 0 -0.05 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><box><size>8 6 0.1</size></box></geometry>
        <material><diffuse>0.7 0.65 0.58 1</diffuse></material></visual></link>
    </model>
    <model name="couch_2">
      <pose>-1.5 1.8 0 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/sofa.glb</uri></mesh></geometry>
        <material><script><uri>textures/sofa_fabric.png</uri></script></material></visual></link>
    </model>
    <model name="coffee_table">
      <pose>-1.5 0.5 0.225 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><box><size>1.0 0.6 0.45</size></box></geometry>
        <material><diffuse>0.55 0.4 0.28 1</diffuse></material></visual></link>
    </model>
    <model name="armchair_v2">
      <pose>1.2 1.5 0 0 0 -1.5707963267948966</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/armchair.glb</uri></mesh></geometry></visual></link>
    </model>
    <model name="floor_lamp">
      <pose>2.5 2.3 0.8 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><cylinder><radius>0.15</radius><length>1.6</length></cylinder></geometry></visual></link>
    </model>
    <model name="mug_copy">
      <pose>-1.4 0.5 0.45 0 0 0.3</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/mug.glb</uri></mesh></geometry></visual></link>
    </model>
    <light name="ceiling" type="point">
      <pose>0 0 2.6 0 0 0</pose>
      <diffuse>1 0.95 0.9 1</diffuse>
      <attenuation><constant>0.8</constant></attenuation>
    </light>
  </world>
</sdf>
""",
        "assets": [
            {"uri": "meshes/sofa.glb", "aabb": {"min": [-1.0, -0.45, 0.0], "max": [1.0, 0.45, 0.85]}},
            {"uri": "meshes/armchair.glb", "aabb": {"min": [-0.45, -0.45, 0.0], "max": [0.45, 0.45, 0.9]}},
            {"uri": "meshes/mug.glb", "aabb": {"min": [-0.05, -0.05, 0.0], "max": [0.05, 0.05, 0.1]}},
            {"uri": "textures/sofa_fabric.png", "exists": False},
        ],
        "spec": {
            "objects": [
                {"category": "sofa", "count": 1},
                {"category": "coffee table", "count": 1},
                {"category": "armchair", "count": 1},
                {"category": "lamp", "count": 1},
                {"category": "mug", "count": 1},
            ],
            "relations": [
                {"subject": "mug", "predicate": "on", "object": "coffee table"},
                {"subject": "coffee table", "predicate": "in_front_of", "object": "sofa"},
                {"subject": "lamp", "predicate": "next_to", "object": "armchair"},
            ],
            "source_prompt": "A cozy living room with a sofa facing a coffee table, an armchair beside a "
            "floor lamp, and a mug resting on the coffee table.",
        },
    },
    "kitchen_02": {
        "subset": "manipuland",
        "sdf": """<?xml version="1.0"?>
<sdf version="1.9">
  <world name="kitchen_02">
    <model name="dining_table">
      <pose>0 0 0.375 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><box><size>1.6 0.9 0.75</size></box></geometry>
        <material><diffuse>0.62 0.46 0.3 1</diffuse><pbr><metal><metalness>0.1</metalness><roughness>0.7</roughness></metal></pbr></material></visual></link>
    </model>
    <model name="plate_1">
      <pose>-0.4 0 0.76 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><cylinder><radius>0.12</radius><length>0.02</length></cylinder></geometry></visual></link>
    </model>
    <model name="plate_2">
      <pose>0.4 0 0.76 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><cylinder><radius>0.12</radius><length>0.02</length></cylinder></geometry></visual></link>
    </model>
    <model name="coffee_mug">
      <pose>-0.4 0 0.77 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/mug.glb</uri></mesh></geometry></visual></link>
    </model>
    <model name="bowl_01">
      <pose>0 0.25 0.7 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/bowl.glb</uri><scale>1.2 1.2 1.2</scale></mesh></geometry></visual></link>
    </model>
    <model name="bottle">
      <pose>0.1 -0.3 0.75 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/bottle.glb</uri></mesh></geometry></visual></link>
    </model>
  </world>
</sdf>
""",
        "assets": [
            {"uri": "meshes/mug.glb", "aabb": {"min": [-0.05, -0.05, 0.0], "max": [0.05, 0.05, 0.1]}},
            {"uri": "meshes/bowl.glb", "aabb": {"min": [-0.09, -0.09, 0.0], "max": [0.09, 0.09, 0.07]}},
            {"uri": "meshes/bottle.glb", "exists": False},
        ],
        "spec": {
            "objects": [
                {"category": "table", "count": 1},
                {"category": "plate", "count": 2},
                {"category": "mug", "count": 1},
                {"category": "bowl", "count": 1},
                {"category": "bottle", "count": 1},
            ],
            "relations": [
                {"subject": "plate", "predicate": "on", "object": "table"},
                {"subject": "mug", "predicate": "on", "object": "plate"},
                {"subject": "bowl", "predicate": "on", "object": "table"},
                {"subject": "bottle", "predicate": "next_to", "object": "bowl"},
            ],
            "source_prompt": "A kitchen table set with two plates, a coffee mug on one plate, a bowl in the "
            "middle and a bottle next to the bowl.",
        },
    },
    "bedroom_03": {
        "subset": "furniture",
        "sdf": """<?xml version="1.0"?>
<sdf version="1.9">
  <world name="bedroom_03">
    <model name="bed">
      <pose>0 1.0 0 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><mesh><uri>meshes/bed.glb</uri></mesh></geometry></visual></link>
    </model>
    <model name="night_stand_2">
      <pose>1.25 1.6 0.275 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><box><size>0.5 0.4 0.55</size></box></geometry></visual></link>
    </model>
    <model name="wardrobe">
      <pose>-2.2 -0.5 1.0 0 0 1.5707963267948966</pose>
      <link name="l"><visual name="v"><geometry><box><size>1.2 0.6 2.0</size></box></geometry>
        <material><diffuse>0.48 0.35 0.25 1</diffuse></material></visual></link>
    </model>
    <model name="book">
      <pose>1.25 1.6 0.57 0 0 0.4</pose>
      <link name="l"><visual name="v"><geometry><box><size>0.2 0.15 0.04</size></box></geometry>
        <material><diffuse>0.55 0.2 0.2 1</diffuse></material></visual></link>
    </model>
    <model name="desk">
      <pose>1.8 -1.5 0.37 0 0 0</pose>
      <link name="l"><visual name="v"><geometry><box><size>1.2 0.6 0.75</size></box></geometry></visual></link>
    </model>
    <actor name="sleeper"/>
  </world>
</sdf>
""",
        "assets": [
            {"uri": "meshes/bed.glb", "aabb": {"min": [-1.0, -1.0, 0.0], "max": [1.0, 1.0, 0.6]}},
        ],
        "spec": {
            "objects": [
                {"category": "bed", "count": 1},
                {"category": "nightstand", "count": 1},
                {"category": "wardrobe", "count": 1},
                {"category": "book", "count": 1},
                {"category": "desk", "count": 1},
            ],
            "relations": [
                {"subject": "book", "predicate": "on", "object": "nightstand"},
                {"subject": "nightstand", "predicate": "right_of", "object": "bed"},
                {"subject": "desk", "predicate": "in_front_of", "object": "wardrobe"},
            ],
            "source_prompt": "A bedroom with a bed, a nightstand to its right holding a book, a wardrobe "
            "against the wall and a desk.",
        },
    },
}

STANDARD = {
    "living_room_01": [
        ("measurements", "How many chairs are there?", 1, "integer"),
        ("relations", "Is there a mug on the table?", True, "boolean"),
        ("relations", "What is next to the armchair?", "lamp", "category"),
    ],
    "kitchen_02": [
        ("measurements", "How many dishes are on the table?", 3, "integer"),
        ("relations", "What object holds the mug?", "plate", "category"),
        ("relations", "Is the bottle inside the bowl?", False, "boolean"),
    ],
    "bedroom_03": [
        ("measurements", "How many pieces of furniture are in the room?", 4, "integer"),
        ("relations", "What is on the nightstand?", "book", "category"),
        ("relations", "Is the desk under the bed?", False, "boolean"),
    ],
}

NUMBER_WORDS = ("zero", "one", "two", "three", "four", "five", "six")


def _wrong(q: QuestionItem) -> str:
    if q.answer_type == "integer":
        return str(q.ground_truth + 1)
    if q.answer_type == "boolean":
        return "yes" if q.ground_truth is False else "no"
    return "floor"


def _right(q: QuestionItem, variant: int) -> str:
    if q.answer_type == "integer":
        n = q.ground_truth
        return NUMBER_WORDS[n] if variant % 2 and n < len(NUMBER_WORDS) else str(n)
    if q.answer_type == "boolean":
        return ("Yes." if variant % 2 else "true") if q.ground_truth else ("No" if variant % 2 else "false")
    return q.ground_truth.title() if variant % 2 else q.ground_truth


def build_mini() -> None:
    if MINI.exists():
        shutil.rmtree(MINI)
    for d in ("scenes", "specs", "questions/standard", "answers", "labelmaps/maps"):
        (MINI / d).mkdir(parents=True, exist_ok=True)
    jsonio.write_json(
        MINI / "config.json",
        {
            "seed": 0,
            "jobs": 2,
            "selection": {
                "pool_size_target": 30,
                "select_count": 3,
                "quotas": {"furniture": 2, "manipuland": 1},
                "dedup_threshold": 0.92,
            },
        },
    )
    questions = []
    for sid, sc in SCENES.items():
        sdir = MINI / "scenes" / sid
        sdir.mkdir(parents=True, exist_ok=True)
        (sdir / "scene.sdf").write_text(sc["sdf"], encoding="utf-8")
        jsonio.write_json(sdir / "manifest.json", {"assets": sc["assets"]})
        spec_doc = {"scene_id": sid, "subset": sc["subset"], **sc["spec"]}
        jsonio.write_json(MINI / "specs" / f"{sid}.spec.json", spec_doc)
        spec = load_scene_spec(spec_doc)
        questions += generate_questions(spec, derive_seed(0, f"questions:{sid}"))
        std = [
            QuestionItem(
                qid=f"{sid}/S{i}",
                scene_id=sid,
                subset=sc["subset"],
                category=cat,
                kind="standard",
                text=text,
                ground_truth=gt,
                answer_type=atype,
                source="standard",
            )
            for i, (cat, text, gt, atype) in enumerate(STANDARD[sid])
        ]
        write_questions(MINI / "questions" / "standard" / f"{sid}.questions.jsonl", std)
        questions += std

    rng = np.random.default_rng(2024)
    answers = []
    for m, method in enumerate(METHODS):
        for c, cond in enumerate(CONDITIONS):
            for i, q in enumerate(questions):
                u = rng.random()
                if u < 0.05:
                    continue  # unanswered
                error_rate = 0.15 + 0.05 * c + 0.05 * m + (0.1 if q.source == "standard" else 0.0)
                text = _wrong(q) if u < 0.05 + error_rate else _right(q, i + c)
                answers.append({"qid": q.qid, "method": method, "condition": cond, "answer_text": text})
    jsonio.write_jsonl(MINI / "answers" / "answers.jsonl", answers)

    pairs = []
    shape = (12, 16)
    for s, sid in enumerate(SCENES):
        for f in range(2):
            gt = np.zeros(shape, dtype=np.int64)
            gt[:, 5:11] = 1
            gt[7:, :] = 2
            gt[2:5, 12:15] = 3
            gt[0, 0] = -1 if f == 1 else 0
            gt_rel = f"maps/{sid}_f{f}_gt.pgm"
            if f == 1:
                gt_rel = f"maps/{sid}_f{f}_gt.raw"
                write_raw(MINI / "labelmaps" / gt_rel, gt)
            else:
                write_pgm(MINI / "labelmaps" / gt_rel, gt)
            for m, method in enumerate(METHODS):
                for c, cond in enumerate(CONDITIONS):
                    noise = 0.05 + 0.08 * c * (1 + m) / 2
                    pred = gt.copy()
                    pred[pred < 0] = 0
                    flip = rng.random(shape) < noise
                    pred[flip] = rng.integers(0, 4, size=int(flip.sum()))
                    rel = f"maps/{sid}_f{f}_{method}_{cond}.pgm"
                    entry = {"scene_id": sid, "frame": f, "method": method, "condition": cond, "pred": rel}
                    if f == 1:
                        rel = rel.replace(".pgm", ".raw")
                        write_raw(MINI / "labelmaps" / rel, pred)
                        entry.update(pred=rel, format="raw", width=shape[1], height=shape[0])
                    else:
                        write_pgm(MINI / "labelmaps" / rel, pred)
                    entry["gt"] = gt_rel
                    pairs.append(entry)
    jsonio.write_json(MINI / "labelmaps" / "run.json", {"num_classes": 4, "pairs": pairs})
    jsonio.write_json(MINI / "qc_records.json", {"records": qc_records(len(SCENES), 0)})


def qc_records(n: int, missing: int) -> list[dict]:
    return [
        {"scene_id": f"scene_{i:02d}", "prompted_object_count": 5 + i % 3, "missing_objects": int(i < missing)}
        for i in range(n)
    ]


def build_pool() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        ws = Workspace.init(Path(tmp) / "ws")
        ws.prompts("generate")
        shutil.copy(ws.path("prompts/pool.generated.jsonl"), FIXTURES / "prompt_pool_350.jsonl")


def build_golden() -> None:
    if GOLDEN.exists():
        shutil.rmtree(GOLDEN)
    for sid in SCENES:
        sdir = MINI / "scenes" / sid
        adapt_scene(
            (sdir / "scene.sdf").read_bytes(),
            AssetManifest.load(sdir / "manifest.json"),
            GOLDEN / sid,
            name=sid,
            seed=GOLDEN_SEED,
        )


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    build_mini()
    jsonio.write_json(FIXTURES / "qc_records_40.json", {"records": qc_records(40, 4)})
    build_pool()
    build_golden()


if __name__ == "__main__":
    main()
