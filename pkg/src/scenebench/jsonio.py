"""Canonical JSON emission.

All files written by the toolkit go through here so that identical inputs
produce byte-identical outputs: 2-space indent, sorted keys, UTF-8, LF line
endings and a trailing newline.
"""

import json
import math
from pathlib import Path
from typing import Any, Iterable

FLOAT_DIGITS = 9


def clean_float(x: float, digits: int | None = FLOAT_DIGITS) -> float:
    """Round to a fixed number of digits (``None`` keeps full precision) and fold negative zero."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    x = float(x)
    if digits is not None:
        x = round(x, digits)
    return x + 0.0


def canonical(obj: Any, digits: int | None = FLOAT_DIGITS) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return clean_float(obj, digits)
    if isinstance(obj, dict):
        return {str(k): canonical(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v, digits) for v in obj]
    # numpy scalars
    if hasattr(obj, "item"):
        return canonical(obj.item(), digits)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, digits: int | None = FLOAT_DIGITS) -> str:
    return json.dumps(canonical(obj, digits), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dumps_line(obj: Any, digits: int | None = FLOAT_DIGITS) -> str:
    return json.dumps(
        canonical(obj, digits), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )


def write_json(path: Path, obj: Any) -> None:
    Path(path).write_bytes(dumps(obj).encode("utf-8"))


def write_jsonl(path: Path, rows: Iterable[Any], digits: int | None = FLOAT_DIGITS) -> None:
    text = "".join(dumps_line(r, digits) + "\n" for r in rows)
    Path(path).write_bytes(text.encode("utf-8"))


def read_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_jsonl(path: Path) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
