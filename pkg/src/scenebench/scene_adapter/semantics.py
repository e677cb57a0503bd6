"""Raw asset labels -> canonical semantic categories."""

from __future__ import annotations

import re
from typing import Mapping

from .._data import load_table
from .model import SourceScene

UNKNOWN = "unknown"

_SEPARATORS = re.compile(r"[-_.]")
_NOISE_TOKEN = re.compile(r"^(\d+|v\d+|copy|instance)$")
_TRAILING_DIGITS = re.compile(r"(?<=[a-z])\d+$")


def _strip_trailing_noise(tokens: list[str]) -> list[str]:
    changed = True
    while tokens and changed:
        changed = False
        if _NOISE_TOKEN.match(tokens[-1]):
            tokens.pop()
            changed = True
        elif _TRAILING_DIGITS.search(tokens[-1]):
            tokens[-1] = _TRAILING_DIGITS.sub("", tokens[-1])
            changed = True
    return tokens


def normalize_label(raw: str, overrides: Mapping[str, str] | None = None) -> str:
    """Map a raw label onto a canonical category name.

    >>> normalize_label("coffee_mug_03")
    'mug'
    >>> normalize_label("")
    'unknown'
    """
    text = _SEPARATORS.sub(" ", raw.lower())
    tokens = _strip_trailing_noise(text.split())
    result = " ".join(tokens)
    result = load_table("synonyms.json").get(result, result)
    if overrides:
        result = overrides.get(result, result)
    return result or UNKNOWN


def normalize_semantics(
    scene: SourceScene, lexicon_overrides: Mapping[str, str] | None = None
) -> dict[str, str]:
    return {m.name: normalize_label(m.raw_label, lexicon_overrides) for m in scene.models}
