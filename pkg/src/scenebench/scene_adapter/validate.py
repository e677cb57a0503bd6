"""Schema and cross-file checks for an emitted dataset directory."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import jsonschema

from .. import jsonio
from .._data import load_table
from ..errors import DatasetInvariantError
from .lighting import CONDITIONS


def schema(name: str) -> dict:
    return load_table(f"schemas/{name}.schema.json")


def _check(doc, name: str, where: str, problems: list[str]) -> None:
    validator = jsonschema.Draft202012Validator(schema(name))
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path)):
        path = "/".join(str(p) for p in err.absolute_path)
        problems.append(f"{where}:{path}: {err.message}")


def validate_dataset(out_dir: Path, conditions: Iterable[str] = CONDITIONS) -> dict:
    """Validate every file of a dataset bundle; return the parsed index.

    Raises:
        DatasetInvariantError: listing every problem found.
    """
    out_dir = Path(out_dir)
    problems: list[str] = []
    index = jsonio.read_json(out_dir / "scene_dataset_config.json")
    _check(index, "scene_dataset_config", "scene_dataset_config.json", problems)
    if problems:
        raise DatasetInvariantError("; ".join(problems))

    inst = jsonio.read_json(out_dir / index["scene_instance"])
    _check(inst, "scene_instance", index["scene_instance"], problems)
    lex = jsonio.read_json(out_dir / index["semantic_lexicon"])
    _check(lex, "semantic_lexicon", index["semantic_lexicon"], problems)
    _check(jsonio.read_json(out_dir / index["navigation"]), "navigation", index["navigation"], problems)

    templates = {}
    for rel in index["object_configs"]:
        cfg = jsonio.read_json(out_dir / rel)
        _check(cfg, "object_config", rel, problems)
        templates[rel.removesuffix(".object_config.json")] = cfg

    if set(index["lighting"]) != set(conditions):
        problems.append(f"lighting conditions {sorted(index['lighting'])} != {sorted(conditions)}")
    for cond, rel in index["lighting"].items():
        cfg = jsonio.read_json(out_dir / rel)
        _check(cfg, "lighting", rel, problems)
        if cfg.get("condition") != cond:
            problems.append(f"{rel}: condition field {cfg.get('condition')!r} != {cond!r}")
        fr = [k["trajectory_fraction"] for k in cfg.get("schedule", [])]
        if cond == "dynamic" and (
            not fr or fr[0] != 0.0 or fr[-1] != 1.0 or any(b <= a for a, b in zip(fr, fr[1:]))
        ):
            problems.append(f"{rel}: schedule must rise strictly from 0.0 to 1.0")

    classes = lex.get("classes", {})
    if sorted(classes.values()) != list(range(len(classes))):
        problems.append("semantic ids are not a permutation of 0..N-1")
    for key, cfg in templates.items():
        if classes.get(cfg.get("semantic_category")) != cfg.get("semantic_id"):
            problems.append(f"object config {key!r} disagrees with the lexicon")
    for p in inst.get("object_instances", []):
        if p.get("template_name") not in templates:
            problems.append(f"placement {p.get('instance_name')!r} has no object config")

    if problems:
        raise DatasetInvariantError("; ".join(problems))
    return index
