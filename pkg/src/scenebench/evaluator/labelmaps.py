"""Label map file formats.

PGM (P2 ascii or P5 binary, 8 or 16 bit) with an optional JSON sidecar
mapping gray values to class ids, and a raw format holding little-endian
int32 ids row-major with dimensions supplied by the caller.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

import numpy as np

from ..errors import DimensionMismatchError, InputError, LabelRangeError
from .segmentation import IGNORE_ID, LabelMap


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, honoring # comments."""
    tokens, i, n = [], 0, len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise InputError("truncated PGM header")
        tokens.append(data[start:i])
    return tokens, i + 1  # exactly one whitespace byte ends the header


def read_pgm(path: Path, remap: Mapping[int, int] | None = None, ignore_id: int = IGNORE_ID) -> LabelMap:
    data = Path(path).read_bytes()
    (magic, w, h, maxval), offset = _pgm_tokens(data, 4)
    width, height, maxval = int(w), int(h), int(maxval)
    if magic == b"P2":
        vals = np.array(data[offset:].split()[: width * height], dtype=np.int64)
    elif magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        vals = np.frombuffer(data, dtype=dtype, count=width * height, offset=offset).astype(np.int64)
    else:
        raise InputError(f"{path}: not a PGM file (magic {magic!r})")
    if vals.size != width * height:
        raise DimensionMismatchError(f"{path}: expected {width * height} pixels, found {vals.size}")
    if remap is not None:
        lut = dict(remap)
        missing = sorted(set(np.unique(vals).tolist()) - set(lut))
        if missing:
            raise LabelRangeError(f"{path}: gray values {missing} missing from the id remap")
        keys = np.array(sorted(lut))
        mapped = np.array([lut[k] for k in keys], dtype=np.int64)
        vals = mapped[np.searchsorted(keys, vals)]
    return LabelMap(width, height, vals, ignore_id)


def write_pgm(path: Path, labels: np.ndarray, binary: bool = True) -> None:
    arr = np.asarray(labels, dtype=np.int64)
    if arr.min(initial=0) < 0:
        raise InputError("PGM cannot store negative ids; remap them first")
    maxval = max(1, int(arr.max(initial=0)))
    maxval = 255 if maxval <= 255 else 65535
    h, w = arr.shape
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        body = arr.astype(dtype).tobytes()
        Path(path).write_bytes(f"P5\n{w} {h}\n{maxval}\n".encode() + body)
    else:
        lines = "\n".join(" ".join(str(v) for v in row) for row in arr)
        Path(path).write_text(f"P2\n{w} {h}\n{maxval}\n{lines}\n", encoding="ascii")


def read_remap(path: Path) -> dict[int, int]:
    with open(path, encoding="utf-8") as fh:
        return {int(k): int(v) for k, v in json.load(fh).items()}


def read_raw(path: Path, width: int, height: int, ignore_id: int = IGNORE_ID) -> LabelMap:
    vals = np.fromfile(path, dtype="<i4").astype(np.int64)
    if vals.size != width * height:
        raise DimensionMismatchError(f"{path}: expected {width * height} ids, found {vals.size}")
    return LabelMap(width, height, vals, ignore_id)


def write_raw(path: Path, labels: np.ndarray) -> None:
    np.asarray(labels).astype("<i4").tofile(path)


def load_label_map(entry: Mapping, base: Path, which: str) -> LabelMap:
    """Load the ``which`` ("gt" or "pred") map of a run-manifest pair entry."""
    rel = entry[which]
    fmt = entry.get("format", "pgm")
    path = Path(base) / rel
    if fmt == "raw":
        return read_raw(path, int(entry["width"]), int(entry["height"]))
    if fmt != "pgm":
        raise InputError(f"unknown label map format {fmt!r}")
    remap_rel = entry.get(f"{which}_remap", entry.get("remap"))
    remap = read_remap(Path(base) / remap_rel) if remap_rel else None
    return read_pgm(path, remap)
