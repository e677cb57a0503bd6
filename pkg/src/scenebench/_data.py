import json
from functools import lru_cache
from importlib import resources
from pathlib import Path


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("scenebench").joinpath("data", *parts)))


@lru_cache(maxsize=None)
def load_table(name: str):
    """Load one of the JSON tables shipped under ``scenebench/data``."""
    with open(data_path(name), encoding="utf-8") as fh:
        return json.load(fh)
